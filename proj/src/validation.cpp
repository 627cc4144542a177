#include "safe/validation.hpp"

#include <cmath>
#include <ostream>

#include "safe/closed_form.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace safe {

namespace {

std::vector<std::string> methods_for(EffectSizeKind kind) {
    switch (kind) {
        case EffectSizeKind::Reciprocal: return {"first", "safe_bc"};
        case EffectSizeKind::LnRoM: return {"first", "second", "safe_bc"};
        case EffectSizeKind::Smd: return {"d", "g", "safe_bc"};
        case EffectSizeKind::LnOR: return {"first", "safe_bc"};
        case EffectSizeKind::LnRR: return {"first", "safe_bc"};
        case EffectSizeKind::LnCVR: return {"first", "second", "safe_bc"};
        case EffectSizeKind::Hwd: return {"first", "safe_bc"};
    }
    return {};
}

bool is_continuous(EffectSizeKind kind) {
    return kind == EffectSizeKind::Reciprocal || kind == EffectSizeKind::LnRoM ||
           kind == EffectSizeKind::Smd || kind == EffectSizeKind::LnCVR;
}

bool needs_positive_mean(EffectSizeKind kind) {
    return kind == EffectSizeKind::Reciprocal || kind == EffectSizeKind::LnRoM ||
           kind == EffectSizeKind::LnCVR;
}

GroupSummary reduce_normal(CounterRng& g, long long n, double mu, double sigma) {
    MomentAccumulator acc;
    for (long long i = 0; i < n; ++i) acc.add(mu + sigma * g.next_normal());
    return GroupSummary(acc.mean, std::sqrt(acc.sample_variance()), n);
}

// One replication: generate raw data, reduce to summaries, run every method.
// Returns the number of regenerated degenerate samples.
int run_replication(const Scenario& s, long long n, std::uint64_t base, int rep,
                    MethodEstimates& out) {
    const RngStream raw{s.seed, base + 2 * static_cast<std::uint64_t>(rep)};
    int regenerated = 0;

    EffectInputs in;
    if (is_continuous(s.kind)) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt > 100) {
                throw DegenerateBatchError(
                    "scenario kept producing degenerate raw samples");
            }
            CounterRng g = raw.at(attempt);
            in.group1 = reduce_normal(g, n, s.mu1, s.sigma1);
            if (s.kind != EffectSizeKind::Reciprocal) {
                in.group2 = reduce_normal(g, n, s.mu2, s.sigma2);
            }
            const bool bad_mean =
                needs_positive_mean(s.kind) &&
                (!(in.group1->mean > 0.0) || (in.group2 && !(in.group2->mean > 0.0)));
            if (!bad_mean) {
                regenerated = static_cast<int>(attempt);
                break;
            }
        }
    } else if (s.kind == EffectSizeKind::Hwd) {
        CounterRng g = raw.at(0);
        std::vector<long long> counts;
        multinomial_draw(g, n,
                         {s.genotype_probs[0], s.genotype_probs[1], s.genotype_probs[2]},
                         counts);
        in.genotypes = GenotypeCounts(counts[0], counts[1], counts[2]);
    } else {
        CounterRng g = raw.at(0);
        const long long a = binomial_draw(g, n, s.p1);
        const long long c = binomial_draw(g, n, s.p2);
        in.table = ContingencyTable(a, n - a, c, n - c);
    }

    SafeConfig cfg = s.config;
    cfg.master_seed = s.seed;
    cfg.stream_id = base + 2 * static_cast<std::uint64_t>(rep) + 1;
    cfg.threads = 1;
    const BootstrapResult res = safe_estimate(s.kind, in, cfg);

    for (std::size_t m = 0; m < out.methods.size(); ++m) {
        double point = 0.0, se = 0.0;
        const std::string& name = out.methods[m];
        if (name == "safe_bc") {
            point = res.theta_bc;
            se = res.se_safe;
        } else if (name == "d" || name == "g") {
            const auto [er, det] = smd_estimate(
                *in.group1, *in.group2,
                name == "d" ? SmdEstimator::CohenD : SmdEstimator::HedgesG);
            point = er.point;
            se = er.se;
        } else {
            const int order = name == "second" ? 2 : 1;
            EstimatorResult er;
            switch (s.kind) {
                case EffectSizeKind::Reciprocal:
                    er.point = plugin_reciprocal(*in.group1);
                    er.se = std::sqrt(reciprocal_delta_var(in.group1->mean,
                                                           in.group1->sd, in.group1->n));
                    break;
                case EffectSizeKind::LnRoM:
                    er = lnrom_estimate(*in.group1, *in.group2, order);
                    break;
                case EffectSizeKind::LnCVR:
                    er = lncvr_estimate(*in.group1, *in.group2, order);
                    break;
                case EffectSizeKind::LnOR:
                    er = lnor_estimate(*in.table, s.config.cc);
                    break;
                case EffectSizeKind::LnRR:
                    er = lnrr_estimate(*in.table, s.config.cc);
                    break;
                default:
                    throw InvalidParameterError("unexpected method for kind");
            }
            point = er.point;
            se = er.se;
        }
        out.points[m][rep] = point;
        out.ses[m][rep] = se;
    }
    return regenerated;
}

}  // namespace

double scenario_true_theta(const Scenario& s) {
    switch (s.kind) {
        case EffectSizeKind::Reciprocal:
            return 1.0 / s.mu1;
        case EffectSizeKind::LnRoM:
            return std::log(s.mu1) - std::log(s.mu2);
        case EffectSizeKind::Smd:
            // Homoscedastic convention: difference over the RMS population SD.
            return (s.mu1 - s.mu2) /
                   std::sqrt(0.5 * (s.sigma1 * s.sigma1 + s.sigma2 * s.sigma2));
        case EffectSizeKind::LnOR:
            return (std::log(s.p1) - std::log(1.0 - s.p1)) -
                   (std::log(s.p2) - std::log(1.0 - s.p2));
        case EffectSizeKind::LnRR:
            return std::log(s.p1) - std::log(s.p2);
        case EffectSizeKind::LnCVR:
            return (std::log(s.sigma1) - std::log(s.mu1)) -
                   (std::log(s.sigma2) - std::log(s.mu2));
        case EffectSizeKind::Hwd: {
            const auto& p = s.genotype_probs;
            return std::log(p[1]) - std::log(2.0 * std::sqrt(p[0] * p[2]));
        }
    }
    throw InvalidParameterError("unknown scenario kind");
}

MethodEstimates simulate_cell(const Scenario& s, long long n, int* regenerated) {
    if (s.replications < 100) {
        throw InvalidParameterError("scenario replications must be at least 100");
    }
    const std::vector<std::string> methods = methods_for(s.kind);
    MethodEstimates out;
    out.methods = methods;
    out.points.assign(methods.size(), std::vector<double>(s.replications, 0.0));
    out.ses.assign(methods.size(), std::vector<double>(s.replications, 0.0));

    // Streams: raw data on (n << 32 | 2*rep), the engine on (n << 32 | 2*rep + 1).
    const std::uint64_t base = static_cast<std::uint64_t>(n) << 32;
    int regen_total = 0;
    std::string first_error;

#ifdef _OPENMP
    const int team = s.config.threads > 0 ? s.config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(team) reduction(+ : regen_total)
#endif
    for (int rep = 0; rep < s.replications; ++rep) {
        try {
            regen_total += run_replication(s, n, base, rep, out);
        } catch (const std::exception& e) {
            // Exceptions must not escape the parallel region.
#ifdef _OPENMP
#pragma omp critical
#endif
            if (first_error.empty()) first_error = e.what();
        }
    }
    if (!first_error.empty()) {
        throw DegenerateBatchError("scenario replication failed: " + first_error);
    }
    if (regenerated != nullptr) *regenerated = regen_total;
    return out;
}

ScoreTable simulate_scenario(const Scenario& s) {
    ScoreTable table;
    table.kind = s.kind;
    table.seed = s.seed;
    const double theta = scenario_true_theta(s);
    for (long long n : s.n_grid) {
        int regen = 0;
        const MethodEstimates est = simulate_cell(s, n, &regen);
        for (std::size_t m = 0; m < est.methods.size(); ++m) {
            ScoreCell cell;
            cell.method = est.methods[m];
            cell.n = n;
            cell.replications = s.replications;
            cell.true_theta = theta;
            cell.regenerated = regen;
            MomentAccumulator pts;
            double sq = 0.0;
            MomentAccumulator ses;
            for (int rep = 0; rep < s.replications; ++rep) {
                pts.add(est.points[m][rep]);
                const double err = est.points[m][rep] - theta;
                sq += err * err;
                ses.add(est.ses[m][rep]);
            }
            cell.mean_bias = pts.mean - theta;
            cell.rmse = std::sqrt(sq / s.replications);
            cell.mean_se = ses.mean;
            cell.empirical_sd = std::sqrt(pts.sample_variance());
            cell.se_calibration = cell.mean_se / cell.empirical_sd;
            table.cells.push_back(cell);
        }
    }
    return table;
}

void write_score_table(const ScoreTable& table, std::ostream& out) {
    out << "# kind: " << kind_name(table.kind) << "\n";
    out << "# seed: " << table.seed << "\n";
    out << "# grid: stand-in\n";
    out << "method,n,replications,true_theta,mean_bias,rmse,mean_se,"
           "empirical_sd,se_calibration,regenerated\n";
    char buf[512];
    for (const ScoreCell& c : table.cells) {
        std::snprintf(buf, sizeof(buf), "%s,%lld,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%d\n",
                      c.method.c_str(), c.n, c.replications, c.true_theta, c.mean_bias,
                      c.rmse, c.mean_se, c.empirical_sd, c.se_calibration,
                      c.regenerated);
        out << buf;
    }
}

}  // namespace safe
