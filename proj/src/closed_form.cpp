#include "safe/closed_form.hpp"

#include <cmath>

namespace safe {

const char* method_label_name(MethodLabel m) {
    switch (m) {
        case MethodLabel::First: return "first";
        case MethodLabel::Second: return "second";
        case MethodLabel::DependentFirst: return "dependent-first";
        case MethodLabel::DependentSecond: return "dependent-second";
        case MethodLabel::CohenD: return "cohen-d";
        case MethodLabel::HedgesG: return "hedges-g";
    }
    return "?";
}

namespace {

EstimatorResult make_result(double point, double variance, MethodLabel m) {
    return {point, variance, std::sqrt(variance), m};
}

void check_dependent(const GroupSummary& g1, const GroupSummary& g2,
                     const Design& design) {
    if (!design) return;
    if (g1.n != g2.n || design->n != g1.n) {
        throw DesignMismatchError("dependent estimate requires a shared n");
    }
}

// s²/(n·x̄²), the per-group relative-variance term shared by lnRoM and lnCVR.
double rel_var(const GroupSummary& g) {
    return g.variance() / (static_cast<double>(g.n) * g.mean * g.mean);
}

}  // namespace

EstimatorResult lnrom_estimate(const GroupSummary& g1, const GroupSummary& g2,
                               int order, const Design& design) {
    if (!(g1.mean > 0.0)) throw DomainError("lnrom: group 1 mean must be positive");
    if (!(g2.mean > 0.0)) throw DomainError("lnrom: group 2 mean must be positive");
    if (order != 1 && order != 2) throw InvalidParameterError("lnrom order must be 1 or 2");
    check_dependent(g1, g2, design);
    if (design && order == 2) {
        throw UnsupportedCombinationError(
            "order-2 dependent lnrom point/variance is not defined");
    }

    const double a = rel_var(g1);
    const double b = rel_var(g2);
    const double point1 = std::log(g1.mean) - std::log(g2.mean);

    if (design) {
        const double n = static_cast<double>(design->n);
        const double cross = 2.0 * design->r * g1.sd * g2.sd / (g1.mean * g2.mean * n);
        return make_result(point1, (a + b) - cross, MethodLabel::DependentFirst);
    }
    if (order == 1) {
        return make_result(point1, a + b, MethodLabel::First);
    }
    const double point2 = point1 + 0.5 * (a - b);
    const double var2 = (a + b) + 0.5 * (a * a + b * b);
    return make_result(point2, var2, MethodLabel::Second);
}

std::pair<EstimatorResult, SmdDetails> smd_estimate(const GroupSummary& g1,
                                                    const GroupSummary& g2,
                                                    SmdEstimator estimator) {
    const long long df = g1.n + g2.n - 2;
    if (df < 1) throw DomainError("smd: n1 + n2 must be at least 3");
    const double sp2 = (static_cast<double>(g1.n - 1) * g1.variance() +
                        static_cast<double>(g2.n - 1) * g2.variance()) /
                       static_cast<double>(df);
    if (!(sp2 > 0.0)) throw DomainError("smd: pooled variance is zero");

    SmdDetails det;
    det.df = df;
    det.pooled_sd = std::sqrt(sp2);
    det.d = (g1.mean - g2.mean) / det.pooled_sd;
    det.correction_j = 1.0 - 3.0 / (4.0 * static_cast<double>(df) - 1.0);
    det.g = det.correction_j * det.d;

    const double n1 = static_cast<double>(g1.n);
    const double n2 = static_cast<double>(g2.n);
    const double var_d = (n1 + n2) / (n1 * n2) + det.d * det.d / (2.0 * static_cast<double>(df));

    if (estimator == SmdEstimator::CohenD) {
        return {make_result(det.d, var_d, MethodLabel::CohenD), det};
    }
    const double j2 = det.correction_j * det.correction_j;
    return {make_result(det.g, j2 * var_d, MethodLabel::HedgesG), det};
}

EstimatorResult lnor_estimate(const ContingencyTable& t, const CcPolicy& cc) {
    double a = static_cast<double>(t.a);
    double b = static_cast<double>(t.b);
    double c = static_cast<double>(t.c);
    double d = static_cast<double>(t.d);
    if (a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0) {
        a += cc.add;
        b += cc.add;
        c += cc.add;
        d += cc.add;
    }
    const double point = (std::log(a) + std::log(d)) - (std::log(b) + std::log(c));
    const double variance = (1.0 / a + 1.0 / b) + (1.0 / c + 1.0 / d);
    return make_result(point, variance, MethodLabel::First);
}

EstimatorResult lnrr_estimate(const ContingencyTable& t, const CcPolicy& cc) {
    const double n1 = static_cast<double>(t.n1());
    const double n2 = static_cast<double>(t.n2());
    const double add1 = t.a == 0 ? cc.add : 0.0;
    const double add2 = t.c == 0 ? cc.add : 0.0;
    const double a = static_cast<double>(t.a) + add1;
    const double c = static_cast<double>(t.c) + add2;
    const double p1 = a / (n1 + 2.0 * add1);
    const double p2 = c / (n2 + 2.0 * add2);
    const double point = std::log(p1) - std::log(p2);
    const double variance = (1.0 - p1) / a + (1.0 - p2) / c;
    return make_result(point, variance, MethodLabel::First);
}

EstimatorResult lncvr_estimate(const GroupSummary& g1, const GroupSummary& g2,
                               int order, const Design& design) {
    if (!(g1.mean > 0.0)) throw DomainError("lncvr: group 1 mean must be positive");
    if (!(g2.mean > 0.0)) throw DomainError("lncvr: group 2 mean must be positive");
    if (order != 1 && order != 2) throw InvalidParameterError("lncvr order must be 1 or 2");
    check_dependent(g1, g2, design);

    const double n1 = static_cast<double>(g1.n);
    const double n2 = static_cast<double>(g2.n);
    const double a = rel_var(g1);
    const double b = rel_var(g2);
    const double point1 = (std::log(g1.sd) - std::log(g1.mean)) -
                          (std::log(g2.sd) - std::log(g2.mean));
    const double point2 = point1 + 0.5 * (1.0 / (n1 - 1.0) - 1.0 / (n2 - 1.0)) +
                          0.5 * (b - a);
    const double point = order == 1 ? point1 : point2;

    // The dependent variances are evaluated as the independent expression plus
    // r-correction terms that are exact zeros at r = 0, so D1/D2 reduce to the
    // independent formulas bit-exactly.
    const double var1_indep = (a + b) + (0.5 / (n1 - 1.0) + 0.5 / (n2 - 1.0));
    const double q1 = a + 0.5 * a * a + n1 / (2.0 * (n1 - 1.0) * (n1 - 1.0));
    const double q2 = b + 0.5 * b * b + n2 / (2.0 * (n2 - 1.0) * (n2 - 1.0));
    const double var2_indep = q1 + q2;

    if (!design) {
        return make_result(point, order == 1 ? var1_indep : var2_indep,
                           order == 1 ? MethodLabel::First : MethodLabel::Second);
    }

    const double n = static_cast<double>(design->n);
    const double r = design->r;
    const double cross = 2.0 * r * g1.sd * g2.sd / (n * g1.mean * g2.mean);
    if (order == 1) {
        double var = var1_indep;
        var -= cross;
        var -= r * r / (n - 1.0);
        return make_result(point, var, MethodLabel::DependentFirst);
    }
    const double x1_4 = std::pow(g1.mean, 4);
    const double x2_4 = std::pow(g2.mean, 4);
    const double s1_4 = g1.variance() * g1.variance();
    const double s2_4 = g2.variance() * g2.variance();
    double var = var2_indep;
    var -= cross;
    var += r * r * g1.variance() * g2.variance() * (x1_4 + x2_4) /
           (2.0 * n * n * x1_4 * x2_4);
    var -= r * r / (n - 1.0);
    var += std::pow(r, 4) * (s1_4 * s1_4 + s2_4 * s2_4) /
           (2.0 * (n - 1.0) * (n - 1.0) * s1_4 * s2_4);
    return make_result(point, var, MethodLabel::DependentSecond);
}

EstimatorResult hwd_estimate(const GenotypeCounts& g, const CcPolicy& cc) {
    const double n = static_cast<double>(g.total());
    const bool any_zero = g.n_aa_major == 0 || g.n_het == 0 || g.n_aa_minor == 0;
    const double add = any_zero ? cc.add : 0.0;
    const double denom = n + 3.0 * add;
    const double p1 = (static_cast<double>(g.n_aa_major) + add) / denom;
    const double p2 = (static_cast<double>(g.n_het) + add) / denom;
    const double p3 = (static_cast<double>(g.n_aa_minor) + add) / denom;
    const double point = std::log(p2) - std::log(2.0 * std::sqrt(p1 * p3));
    const double variance = (1.0 / p2 + (1.0 - p2) / (4.0 * p1 * p3)) / n;
    return make_result(point, variance, MethodLabel::First);
}

double reciprocal_delta_var(double mean, double sd, long long n) {
    if (mean == 0.0) throw DomainError("reciprocal: mean is zero");
    const double m2 = mean * mean;
    return sd * sd / (static_cast<double>(n) * m2 * m2);
}

}  // namespace safe
