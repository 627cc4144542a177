#pragma once

#include <utility>

#include "safe/inputs.hpp"
#include "safe/transforms.hpp"

namespace safe {

enum class MethodLabel { First, Second, DependentFirst, DependentSecond, CohenD, HedgesG };

const char* method_label_name(MethodLabel m);

// A deterministic point estimate with its delta-method (or classical) variance.
struct EstimatorResult {
    double point = 0.0;
    double variance = 0.0;
    double se = 0.0;
    MethodLabel method = MethodLabel::First;
};

struct SmdDetails {
    double d = 0.0;
    double g = 0.0;
    double correction_j = 0.0;  // 1 - 3/(4*df - 1)
    double pooled_sd = 0.0;
    long long df = 0;
};

enum class SmdEstimator { CohenD, HedgesG };

// Log ratio of means. Order 1: ln(x̄₁/x̄₂) with per-group s²/(n·x̄²) variance;
// order 2 adds the half-difference point term and half-sum quartic variance
// term. Dependent designs subtract 2rs₁s₂/(x̄₁x̄₂√(n₁n₂)) from the order-1
// variance; an order-2 dependent form is not defined and throws.
EstimatorResult lnrom_estimate(const GroupSummary& g1, const GroupSummary& g2,
                               int order, const Design& design = std::nullopt);

// Cohen's d / Hedges' g with their classical variances.
std::pair<EstimatorResult, SmdDetails> smd_estimate(const GroupSummary& g1,
                                                    const GroupSummary& g2,
                                                    SmdEstimator estimator);

// ln(ad/bc) with variance 1/a+1/b+1/c+1/d; all four cells continuity-corrected
// first iff any cell is zero.
EstimatorResult lnor_estimate(const ContingencyTable& t, const CcPolicy& cc);

// ln(p₁/p₂) with variance (1-p₁)/a + (1-p₂)/c; zero successes corrected via
// p = (count+add)/(n+2·add), zero failures left as-is.
EstimatorResult lnrr_estimate(const ContingencyTable& t, const CcPolicy& cc);

// Log coefficient-of-variation ratio, orders 1/2, independent or dependent
// (D1/D2 variances; dependent points reuse the independent formulas with the
// shared n).
EstimatorResult lncvr_estimate(const GroupSummary& g1, const GroupSummary& g2,
                               int order, const Design& design = std::nullopt);

// Relative excess of heterozygosity: ln(p₂/(2√(p₁p₃))) with variance
// (1/n)(1/p₂ + (1-p₂)/(4p₁p₃)). The 1/n factor keeps the true n even when the
// continuity correction altered the proportions.
EstimatorResult hwd_estimate(const GenotypeCounts& g, const CcPolicy& cc);

// Delta-method variance of the reciprocal of a mean: s²/(n·x̄⁴).
double reciprocal_delta_var(double mean, double sd, long long n);

}  // namespace safe
