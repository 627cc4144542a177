#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "safe/inputs.hpp"
#include "safe/linalg.hpp"
#include "safe/rng.hpp"

namespace safe {

enum class ModelFamily { NormalVector, BinomialPair, Multinomial };

enum class VarianceSamplingMode { Gaussian, ChiSquare };

constexpr double kUnbounded = -std::numeric_limits<double>::infinity();

// The fitted "draw" specification: one of
//   - normal-vector: MVN(mean, cov) with optional strict lower bounds, plus
//     optionally two trailing variance coordinates drawn as scaled chi-squares
//     (independent designs only), in which case cov covers only the mean block;
//   - binomial-pair: two independent Binomial(trials[i], prob[i]) counts;
//   - multinomial: one Multinomial(trials, probs) count vector.
struct SamplingModel {
    ModelFamily family = ModelFamily::NormalVector;
    std::vector<std::string> labels;

    // normal-vector
    std::vector<double> mean;
    CovarianceMatrix cov;
    std::vector<double> lower_bounds;  // same length as the full coordinate vector
    bool chisq_variances = false;
    std::array<double, 2> chisq_df{0.0, 0.0};
    std::array<double, 2> chisq_scale{0.0, 0.0};

    // binomial-pair
    std::array<long long, 2> trials{0, 0};
    std::array<double, 2> prob{0.0, 0.0};
    std::array<bool, 2> prob_cc_adjusted{false, false};

    // multinomial
    long long multinomial_trials = 0;
    std::vector<double> probs;
    bool probs_cc_adjusted = false;

    std::vector<std::string> notes;  // warnings collected while fitting

    // Gaussian coordinates plus chi-square coordinates.
    std::size_t coordinate_count() const {
        return mean.size() + (chisq_variances ? 2 : 0);
    }
};

// Normal(x̄, s²/n) for a single mean; label "x̄".
SamplingModel model_single_mean(const GroupSummary& g);

// Bivariate normal over the two sample means. Off-diagonal r·s₁s₂/n when
// paired. `positive_means` installs strict lower bounds at 0 on both
// coordinates, used by the log-based transforms (lnRoM, lnCVR) in
// bounded-draw mode.
SamplingModel model_two_means(const GroupSummary& g1, const GroupSummary& g2,
                              const Design& design, bool positive_means = false);

// Quartet (x̄₁, x̄₂, s₁², s₂²): mean block as model_two_means, variance block
// diag 2sᵢ⁴/(nᵢ−1) with off-diagonal 2r²s₁²s₂²/√((n₁−1)(n₂−1)) when paired.
// Variance coordinates always carry lower bound 0. Chi-square mode draws the
// variances as sᵢ²·χ²(nᵢ−1)/(nᵢ−1) instead (independent designs only).
SamplingModel model_mean_variance_quartet(const GroupSummary& g1,
                                          const GroupSummary& g2,
                                          const Design& design,
                                          VarianceSamplingMode vmode,
                                          bool positive_means = false);

// Two independent binomials on (n₁, p̂₁), (n₂, p̂₂). A degenerate observed
// cell (0 or the group total) is drawn from the continuity-corrected
// proportion (count+add)/(n+2·add) and flagged in the model notes.
SamplingModel model_two_binomials(const ContingencyTable& t, double cc_add = 0.5);

// Multinomial(n; p̂₁, p̂₂, p̂₃) with the 3-category observed-level continuity
// correction applied first when any count is zero.
SamplingModel model_genotypes(const GenotypeCounts& g, double cc_add = 0.5);

}  // namespace safe
