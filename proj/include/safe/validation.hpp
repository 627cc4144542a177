#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "safe/engine.hpp"

namespace safe {

// Desk-scale simulation study: generate raw data from a known population,
// reduce to summaries, score every method against the true effect.
struct Scenario {
    EffectSizeKind kind = EffectSizeKind::LnRoM;

    // continuous populations (normal)
    double mu1 = 10.0, sigma1 = 2.0;
    double mu2 = 12.0, sigma2 = 2.0;
    // binary populations (Bernoulli)
    double p1 = 0.3, p2 = 0.5;
    // genotype population (multinomial)
    std::array<double, 3> genotype_probs{0.3, 0.3, 0.4};

    std::vector<long long> n_grid{5, 10, 20, 50, 100};
    int replications = 1000;  // R >= 100 for any reported cell
    SafeConfig config;        // B etc.; per-replication streams are derived
    std::uint64_t seed = 1;
};

struct ScoreCell {
    std::string method;
    long long n = 0;
    int replications = 0;
    double true_theta = 0.0;
    double mean_bias = 0.0;
    double rmse = 0.0;
    double mean_se = 0.0;
    double empirical_sd = 0.0;
    double se_calibration = 0.0;  // mean_se / empirical_sd
    int regenerated = 0;          // degenerate raw samples that were redrawn
};

struct ScoreTable {
    EffectSizeKind kind;
    std::uint64_t seed = 0;
    std::vector<ScoreCell> cells;
};

// The true effect computed from the population parameters.
double scenario_true_theta(const Scenario& s);

// One replication's estimates, exposed for the acceptance suite's bootstrap
// comparison of per-method bias.
struct MethodEstimates {
    std::vector<std::string> methods;
    std::vector<std::vector<double>> points;  // [method][replication]
    std::vector<std::vector<double>> ses;
};

MethodEstimates simulate_cell(const Scenario& s, long long n, int* regenerated);

ScoreTable simulate_scenario(const Scenario& s);

// CSV emission (with a metadata comment line naming the grid as a stand-in).
void write_score_table(const ScoreTable& table, std::ostream& out);

}  // namespace safe
