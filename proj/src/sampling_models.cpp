#include "safe/sampling_models.hpp"

#include <cmath>

namespace safe {

namespace {

void check_paired(const GroupSummary& g1, const GroupSummary& g2, const Design& design) {
    if (!design) return;
    if (g1.n != g2.n) {
        throw DesignMismatchError("paired design requires n1 == n2 (got " +
                                  std::to_string(g1.n) + " and " + std::to_string(g2.n) + ")");
    }
    if (design->n != g1.n) {
        throw DesignMismatchError("paired design n does not match the group n");
    }
}

}  // namespace

SamplingModel model_single_mean(const GroupSummary& g) {
    SamplingModel m;
    m.family = ModelFamily::NormalVector;
    m.labels = {"xbar"};
    m.mean = {g.mean};
    m.cov = CovarianceMatrix::diagonal({g.variance() / static_cast<double>(g.n)});
    m.lower_bounds = {kUnbounded};
    return m;
}

SamplingModel model_two_means(const GroupSummary& g1, const GroupSummary& g2,
                              const Design& design, bool positive_means) {
    check_paired(g1, g2, design);
    SamplingModel m;
    m.family = ModelFamily::NormalVector;
    m.labels = {"xbar1", "xbar2"};
    m.mean = {g1.mean, g2.mean};
    const double v1 = g1.variance() / static_cast<double>(g1.n);
    const double v2 = g2.variance() / static_cast<double>(g2.n);
    std::vector<double> e{v1, 0.0, 0.0, v2};
    if (design) {
        const double off = design->r * g1.sd * g2.sd / static_cast<double>(design->n);
        e[1] = e[2] = off;
    }
    m.cov = CovarianceMatrix(2, std::move(e));
    const double lb = positive_means ? 0.0 : kUnbounded;
    m.lower_bounds = {lb, lb};
    return m;
}

SamplingModel model_mean_variance_quartet(const GroupSummary& g1,
                                          const GroupSummary& g2,
                                          const Design& design,
                                          VarianceSamplingMode vmode,
                                          bool positive_means) {
    check_paired(g1, g2, design);
    if (vmode == VarianceSamplingMode::ChiSquare && design) {
        throw UnsupportedCombinationError(
            "chi-square variance sampling is defined for independent designs only");
    }
    SamplingModel m;
    m.family = ModelFamily::NormalVector;
    m.labels = {"xbar1", "xbar2", "s1sq", "s2sq"};
    if (g1.n < 3 || g2.n < 3) {
        m.notes.push_back("small-n-quartet");
    }

    const double n1 = static_cast<double>(g1.n);
    const double n2 = static_cast<double>(g2.n);
    const double mv1 = g1.variance() / n1;
    const double mv2 = g2.variance() / n2;
    const double mean_off =
        design ? design->r * g1.sd * g2.sd / std::sqrt(n1 * n2) : 0.0;
    const double meanlb = positive_means ? 0.0 : kUnbounded;

    if (vmode == VarianceSamplingMode::ChiSquare) {
        m.mean = {g1.mean, g2.mean};
        m.cov = CovarianceMatrix(2, {mv1, mean_off, mean_off, mv2});
        m.chisq_variances = true;
        m.chisq_df = {n1 - 1.0, n2 - 1.0};
        m.chisq_scale = {g1.variance() / (n1 - 1.0), g2.variance() / (n2 - 1.0)};
        m.lower_bounds = {meanlb, meanlb, 0.0, 0.0};
        return m;
    }

    m.mean = {g1.mean, g2.mean, g1.variance(), g2.variance()};
    const double vv1 = 2.0 * g1.variance() * g1.variance() / (n1 - 1.0);
    const double vv2 = 2.0 * g2.variance() * g2.variance() / (n2 - 1.0);
    const double var_off =
        design ? 2.0 * design->r * design->r * g1.variance() * g2.variance() /
                     std::sqrt((n1 - 1.0) * (n2 - 1.0))
               : 0.0;
    std::vector<double> e(16, 0.0);
    e[0 * 4 + 0] = mv1;
    e[1 * 4 + 1] = mv2;
    e[0 * 4 + 1] = e[1 * 4 + 0] = mean_off;
    e[2 * 4 + 2] = vv1;
    e[3 * 4 + 3] = vv2;
    e[2 * 4 + 3] = e[3 * 4 + 2] = var_off;
    m.cov = CovarianceMatrix(4, std::move(e));
    m.lower_bounds = {meanlb, meanlb, 0.0, 0.0};
    return m;
}

SamplingModel model_two_binomials(const ContingencyTable& t, double cc_add) {
    SamplingModel m;
    m.family = ModelFamily::BinomialPair;
    m.labels = {"a", "c"};
    m.trials = {t.n1(), t.n2()};
    const std::array<long long, 2> counts{t.a, t.c};
    for (int i = 0; i < 2; ++i) {
        const double n = static_cast<double>(m.trials[i]);
        const double count = static_cast<double>(counts[i]);
        if (counts[i] == 0 || counts[i] == m.trials[i]) {
            m.prob[i] = (count + cc_add) / (n + 2.0 * cc_add);
            m.prob_cc_adjusted[i] = true;
        } else {
            m.prob[i] = count / n;
        }
    }
    if (m.prob_cc_adjusted[0] || m.prob_cc_adjusted[1]) {
        m.notes.push_back("cc-adjusted-model");
    }
    return m;
}

SamplingModel model_genotypes(const GenotypeCounts& g, double cc_add) {
    SamplingModel m;
    m.family = ModelFamily::Multinomial;
    m.labels = {"nAA", "nAa", "naa"};
    m.multinomial_trials = g.total();
    const std::array<long long, 3> counts{g.n_aa_major, g.n_het, g.n_aa_minor};
    const bool any_zero = counts[0] == 0 || counts[1] == 0 || counts[2] == 0;
    const double add = any_zero ? cc_add : 0.0;
    const double denom = static_cast<double>(g.total()) + 3.0 * add;
    m.probs.resize(3);
    for (int i = 0; i < 3; ++i) {
        m.probs[i] = (static_cast<double>(counts[i]) + add) / denom;
    }
    if (any_zero) {
        m.probs_cc_adjusted = true;
        m.notes.push_back("cc-adjusted-model");
    }
    return m;
}

}  // namespace safe
