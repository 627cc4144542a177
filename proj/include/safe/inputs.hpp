#pragma once

#include <cmath>
#include <optional>

#include "safe/errors.hpp"

namespace safe {

// One group's summary statistics (mean, SD, sample size).
struct GroupSummary {
    double mean = 0.0;
    double sd = 0.0;
    long long n = 0;

    GroupSummary() = default;
    GroupSummary(double mean_, double sd_, long long n_) : mean(mean_), sd(sd_), n(n_) {
        if (!std::isfinite(mean)) throw InvalidParameterError("group mean is not finite");
        if (!(sd > 0.0) || !std::isfinite(sd)) {
            throw InvalidParameterError("group sd must be positive and finite");
        }
        if (n < 2) throw InvalidParameterError("group n must be at least 2");
    }

    double variance() const { return sd * sd; }
    double mean_se() const { return sd / std::sqrt(static_cast<double>(n)); }
};

// Within-pair correlation for dependent designs; both groups share n.
struct PairedDesign {
    double r = 0.0;
    long long n = 0;

    PairedDesign() = default;
    PairedDesign(double r_, long long n_) : r(r_), n(n_) {
        if (!(std::abs(r) < 1.0)) {
            throw InvalidParameterError("within-pair correlation must satisfy |r| < 1");
        }
        if (n < 2) throw InvalidParameterError("paired n must be at least 2");
    }
};

using Design = std::optional<PairedDesign>;  // empty = independent groups

// 2x2 event counts for binary outcomes.
struct ContingencyTable {
    long long a = 0, b = 0, c = 0, d = 0;

    ContingencyTable() = default;
    ContingencyTable(long long a_, long long b_, long long c_, long long d_)
        : a(a_), b(b_), c(c_), d(d_) {
        if (a < 0 || b < 0 || c < 0 || d < 0) {
            throw InvalidParameterError("contingency cells must be non-negative");
        }
        if (a + b < 1 || c + d < 1) {
            throw InvalidParameterError("each contingency row needs at least one observation");
        }
    }

    long long n1() const { return a + b; }
    long long n2() const { return c + d; }
    double p1() const { return static_cast<double>(a) / static_cast<double>(n1()); }
    double p2() const { return static_cast<double>(c) / static_cast<double>(n2()); }
};

// Tri-category genotype counts for Hardy-Weinberg analysis.
struct GenotypeCounts {
    long long n_aa_major = 0;  // nAA
    long long n_het = 0;       // nAa
    long long n_aa_minor = 0;  // naa

    GenotypeCounts() = default;
    GenotypeCounts(long long n_AA, long long n_Aa, long long n_aa)
        : n_aa_major(n_AA), n_het(n_Aa), n_aa_minor(n_aa) {
        if (n_AA < 0 || n_Aa < 0 || n_aa < 0) {
            throw InvalidParameterError("genotype counts must be non-negative");
        }
        if (total() < 1) throw InvalidParameterError("genotype total must be at least 1");
    }

    long long total() const { return n_aa_major + n_het + n_aa_minor; }
    double p1() const { return static_cast<double>(n_aa_major) / static_cast<double>(total()); }
    double p2() const { return static_cast<double>(n_het) / static_cast<double>(total()); }
    double p3() const { return static_cast<double>(n_aa_minor) / static_cast<double>(total()); }
    // Allele frequency of A: p1 + p2/2.
    double allele_freq() const { return p1() + 0.5 * p2(); }
};

// Inputs for one effect-size computation; which members are set depends on the kind.
struct EffectInputs {
    std::optional<GroupSummary> group1;
    std::optional<GroupSummary> group2;
    Design design;  // only meaningful for two-group continuous kinds
    std::optional<ContingencyTable> table;
    std::optional<GenotypeCounts> genotypes;
};

}  // namespace safe
