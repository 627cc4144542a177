#include "safe/transforms.hpp"

#include <cmath>

namespace safe {

const char* kind_name(EffectSizeKind kind) {
    switch (kind) {
        case EffectSizeKind::Reciprocal: return "reciprocal";
        case EffectSizeKind::LnRoM: return "lnrom";
        case EffectSizeKind::Smd: return "smd";
        case EffectSizeKind::LnOR: return "lnor";
        case EffectSizeKind::LnRR: return "lnrr";
        case EffectSizeKind::LnCVR: return "lncvr";
        case EffectSizeKind::Hwd: return "hwd";
    }
    return "?";
}

EffectSizeKind kind_from_string(const std::string& name) {
    if (name == "reciprocal") return EffectSizeKind::Reciprocal;
    if (name == "lnrom") return EffectSizeKind::LnRoM;
    if (name == "smd") return EffectSizeKind::Smd;
    if (name == "lnor") return EffectSizeKind::LnOR;
    if (name == "lnrr") return EffectSizeKind::LnRR;
    if (name == "lncvr") return EffectSizeKind::LnCVR;
    if (name == "hwd") return EffectSizeKind::Hwd;
    throw InvalidParameterError("unknown effect-size kind '" + name + "'");
}

CcPolicy CcPolicy::with_add(double add, std::vector<std::string>* warnings) {
    if (!(add > 0.0)) {
        throw InvalidParameterError("continuity-correction add must be positive");
    }
    if (add != 0.5 && add != 1.0 && warnings != nullptr) {
        warnings->push_back("unusual-cc-add");
    }
    return CcPolicy{add};
}

// --- per-replicate transforms ----------------------------------------------

TransformOutcome reciprocal_replicate(double xbar) {
    const double v = 1.0 / xbar;
    if (!std::isfinite(v)) return {};
    return {v, true, false};
}

TransformOutcome lnrom_replicate(double x1, double x2) {
    if (!(x1 > 0.0) || !(x2 > 0.0)) return {};
    return {std::log(x1) - std::log(x2), true, false};
}

TransformOutcome smd_replicate(double x1, double x2, double v1, double v2,
                               long long n1, long long n2) {
    if (!(v1 > 0.0) || !(v2 > 0.0)) return {};
    const double df = static_cast<double>(n1 + n2 - 2);
    const double sp2 = (static_cast<double>(n1 - 1) * v1 +
                        static_cast<double>(n2 - 1) * v2) / df;
    return {(x1 - x2) / std::sqrt(sp2), true, false};
}

TransformOutcome lnor_replicate(double a, double b, double c, double d, double add) {
    const bool cc = a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0;
    if (cc) {
        a += add;
        b += add;
        c += add;
        d += add;
    }
    const double p = std::log(a) + std::log(d);
    const double q = std::log(b) + std::log(c);
    return {p - q, true, cc};
}

TransformOutcome lnrr_replicate(double a, double n1, double c, double n2, double add) {
    const double add1 = a == 0.0 ? add : 0.0;
    const double add2 = c == 0.0 ? add : 0.0;
    const double p1 = (a + add1) / (n1 + 2.0 * add1);
    const double p2 = (c + add2) / (n2 + 2.0 * add2);
    return {std::log(p1) - std::log(p2), true, add1 != 0.0 || add2 != 0.0};
}

TransformOutcome lncvr_replicate(double x1, double x2, double v1, double v2) {
    if (!(v1 > 0.0) || !(v2 > 0.0) || !(x1 > 0.0) || !(x2 > 0.0)) return {};
    const double t1 = 0.5 * std::log(v1) - std::log(x1);
    const double t2 = 0.5 * std::log(v2) - std::log(x2);
    return {t1 - t2, true, false};
}

TransformOutcome hwd_replicate(double n_aa, double n_het, double n_minor,
                               double n, double add) {
    const bool cc = n_aa == 0.0 || n_het == 0.0 || n_minor == 0.0;
    double denom = n;
    if (cc) {
        n_aa += add;
        n_het += add;
        n_minor += add;
        denom = n + 3.0 * add;
    }
    const double p1 = n_aa / denom;
    const double p2 = n_het / denom;
    const double p3 = n_minor / denom;
    return {std::log(p2) - std::log(2.0 * std::sqrt(p1 * p3)), true, cc};
}

// --- plug-in estimates ------------------------------------------------------

double plugin_reciprocal(const GroupSummary& g) {
    if (g.mean == 0.0) throw DomainError("reciprocal: mean is zero");
    return 1.0 / g.mean;
}

double plugin_lnrom(const GroupSummary& g1, const GroupSummary& g2) {
    if (!(g1.mean > 0.0)) throw DomainError("lnrom: group 1 mean must be positive");
    if (!(g2.mean > 0.0)) throw DomainError("lnrom: group 2 mean must be positive");
    return std::log(g1.mean) - std::log(g2.mean);
}

double plugin_smd(const GroupSummary& g1, const GroupSummary& g2) {
    const double df = static_cast<double>(g1.n + g2.n - 2);
    if (!(df >= 1.0)) throw DomainError("smd: n1 + n2 must be at least 3");
    const double sp2 = (static_cast<double>(g1.n - 1) * g1.variance() +
                        static_cast<double>(g2.n - 1) * g2.variance()) / df;
    if (!(sp2 > 0.0)) throw DomainError("smd: pooled variance is zero");
    return (g1.mean - g2.mean) / std::sqrt(sp2);
}

double plugin_lnor(const ContingencyTable& t, const CcPolicy& cc) {
    return lnor_replicate(static_cast<double>(t.a), static_cast<double>(t.b),
                          static_cast<double>(t.c), static_cast<double>(t.d), cc.add)
        .value;
}

double plugin_lnrr(const ContingencyTable& t, const CcPolicy& cc) {
    return lnrr_replicate(static_cast<double>(t.a), static_cast<double>(t.n1()),
                          static_cast<double>(t.c), static_cast<double>(t.n2()), cc.add)
        .value;
}

double plugin_lncvr(const GroupSummary& g1, const GroupSummary& g2) {
    if (!(g1.mean > 0.0)) throw DomainError("lncvr: group 1 mean must be positive");
    if (!(g2.mean > 0.0)) throw DomainError("lncvr: group 2 mean must be positive");
    const double t1 = std::log(g1.sd) - std::log(g1.mean);
    const double t2 = std::log(g2.sd) - std::log(g2.mean);
    return t1 - t2;
}

double plugin_hwd(const GenotypeCounts& g, const CcPolicy& cc) {
    return hwd_replicate(static_cast<double>(g.n_aa_major), static_cast<double>(g.n_het),
                         static_cast<double>(g.n_aa_minor),
                         static_cast<double>(g.total()), cc.add)
        .value;
}

namespace {

const GroupSummary& need_group(const EffectInputs& in, int which, EffectSizeKind kind) {
    const auto& g = which == 1 ? in.group1 : in.group2;
    if (!g) {
        throw InvalidParameterError(std::string(kind_name(kind)) + " requires group " +
                                    std::to_string(which) + " summaries");
    }
    return *g;
}

const ContingencyTable& need_table(const EffectInputs& in, EffectSizeKind kind) {
    if (!in.table) {
        throw InvalidParameterError(std::string(kind_name(kind)) +
                                    " requires a 2x2 contingency table");
    }
    return *in.table;
}

const GenotypeCounts& need_genotypes(const EffectInputs& in, EffectSizeKind kind) {
    if (!in.genotypes) {
        throw InvalidParameterError(std::string(kind_name(kind)) +
                                    " requires genotype counts");
    }
    return *in.genotypes;
}

}  // namespace

double plugin_estimate(EffectSizeKind kind, const EffectInputs& inputs,
                       const CcPolicy& cc) {
    switch (kind) {
        case EffectSizeKind::Reciprocal:
            return plugin_reciprocal(need_group(inputs, 1, kind));
        case EffectSizeKind::LnRoM:
            return plugin_lnrom(need_group(inputs, 1, kind), need_group(inputs, 2, kind));
        case EffectSizeKind::Smd:
            return plugin_smd(need_group(inputs, 1, kind), need_group(inputs, 2, kind));
        case EffectSizeKind::LnOR:
            return plugin_lnor(need_table(inputs, kind), cc);
        case EffectSizeKind::LnRR:
            return plugin_lnrr(need_table(inputs, kind), cc);
        case EffectSizeKind::LnCVR:
            return plugin_lncvr(need_group(inputs, 1, kind), need_group(inputs, 2, kind));
        case EffectSizeKind::Hwd:
            return plugin_hwd(need_genotypes(inputs, kind), cc);
    }
    throw InvalidParameterError("unknown effect-size kind");
}

ReplicateBatch transform_replicates(EffectSizeKind kind, const Matrix& draws,
                                    const CcPolicy& cc, const EffectInputs& inputs) {
    ReplicateBatch batch;
    batch.drawn = draws.rows;
    batch.values.reserve(draws.rows);

    for (std::size_t b = 0; b < draws.rows; ++b) {
        TransformOutcome o;
        switch (kind) {
            case EffectSizeKind::Reciprocal:
                o = reciprocal_replicate(draws.at(b, 0));
                break;
            case EffectSizeKind::LnRoM:
                o = lnrom_replicate(draws.at(b, 0), draws.at(b, 1));
                break;
            case EffectSizeKind::Smd: {
                const auto& g1 = need_group(inputs, 1, kind);
                const auto& g2 = need_group(inputs, 2, kind);
                o = smd_replicate(draws.at(b, 0), draws.at(b, 1), draws.at(b, 2),
                                  draws.at(b, 3), g1.n, g2.n);
                break;
            }
            case EffectSizeKind::LnOR: {
                const auto& t = need_table(inputs, kind);
                const double a = draws.at(b, 0);
                const double c = draws.at(b, 1);
                o = lnor_replicate(a, static_cast<double>(t.n1()) - a, c,
                                   static_cast<double>(t.n2()) - c, cc.add);
                break;
            }
            case EffectSizeKind::LnRR: {
                const auto& t = need_table(inputs, kind);
                o = lnrr_replicate(draws.at(b, 0), static_cast<double>(t.n1()),
                                   draws.at(b, 1), static_cast<double>(t.n2()), cc.add);
                break;
            }
            case EffectSizeKind::LnCVR:
                o = lncvr_replicate(draws.at(b, 0), draws.at(b, 1), draws.at(b, 2),
                                    draws.at(b, 3));
                break;
            case EffectSizeKind::Hwd: {
                const auto& g = need_genotypes(inputs, kind);
                o = hwd_replicate(draws.at(b, 0), draws.at(b, 1), draws.at(b, 2),
                                  static_cast<double>(g.total()), cc.add);
                break;
            }
        }
        if (o.valid) {
            ++batch.valid;
            batch.moments.add(o.value);
            batch.values.push_back(o.value);
            if (o.cc_applied) ++batch.cc_applied;
        } else {
            ++batch.rejected_nonpositive;
        }
    }

    const double frac =
        batch.drawn > 0
            ? static_cast<double>(batch.valid) / static_cast<double>(batch.drawn)
            : 0.0;
    if (frac < 0.5) {
        throw ExcessRejectionError("transform: only " + std::to_string(batch.valid) +
                                   " of " + std::to_string(batch.drawn) +
                                   " replicates were valid");
    }
    if (frac < 0.99) batch.warnings.push_back("high-rejection");
    return batch;
}

}  // namespace safe
