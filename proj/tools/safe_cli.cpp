// safeboot: bias-corrected effect-size estimates and bootstrap standard
// errors from summary statistics, via the single-fit parametric bootstrap.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "safe/batch.hpp"
#include "safe/closed_form.hpp"
#include "safe/engine.hpp"
#include "safe/validation.hpp"

namespace {

struct ComputeArgs {
    std::string kind;
    double m1 = 0, sd1 = 0, m2 = 0, sd2 = 0;
    long long n1 = 0, n2 = 0;
    long long a = -1, b = -1, c = -1, d = -1;
    long long nAA = -1, nAa = -1, naa = -1;
    std::string design = "independent";
    double r = 0.0;
    bool r_given = false;
    std::string format = "text";
    std::string histogram;
    int round_dp = 4;
};

struct CommonArgs {
    std::uint64_t replicates = 100000;
    std::uint64_t seed = 0;
    double cc_add = 0.5;
    std::string var_model = "gaussian";
    bool truncate = false;
    int threads = 0;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SAFE_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 0;
}

safe::SafeConfig make_config(const CommonArgs& common) {
    safe::SafeConfig cfg;
    cfg.replicates = common.replicates;
    cfg.master_seed = common.seed;
    std::vector<std::string> warn;
    cfg.cc = safe::CcPolicy::with_add(common.cc_add, &warn);
    if (!warn.empty()) {
        std::cerr << "warning: --cc-add " << common.cc_add
                  << " is unusual (0.5 or 1.0 expected)\n";
    }
    cfg.variance_mode = common.var_model == "chisq"
                            ? safe::VarianceSamplingMode::ChiSquare
                            : safe::VarianceSamplingMode::Gaussian;
    cfg.truncation = common.truncate ? safe::TruncationPolicy::BoundedDraw
                                     : safe::TruncationPolicy::Reject;
    cfg.threads = common.threads;
    return cfg;
}

std::string fmt(double v, int dp) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", dp, v);
    return buf;
}

void print_method_table(const std::vector<std::string>& labels,
                        const std::vector<double>& points,
                        const std::vector<double>& ses, int dp) {
    std::size_t width = 6;
    std::vector<std::string> prow, serow;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        prow.push_back(fmt(points[i], dp));
        serow.push_back(fmt(ses[i], dp));
        width = std::max({width, labels[i].size(), prow[i].size(), serow[i].size()});
    }
    const auto cell = [width](const std::string& s) {
        return std::string(width + 2 - s.size(), ' ') + s;
    };
    std::string head = "     ";
    std::string line1 = "Point";
    std::string line2 = "SE   ";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        head += cell(labels[i]);
        line1 += cell(prow[i]);
        line2 += cell(serow[i]);
    }
    std::cout << head << "\n" << line1 << "\n" << line2 << "\n";
}

int run_compute(const ComputeArgs& args, const CommonArgs& common) {
    const safe::EffectSizeKind kind = safe::kind_from_string(args.kind);
    safe::SafeConfig cfg = make_config(common);
    cfg.keep_values = !args.histogram.empty();

    safe::EffectInputs in;
    const bool paired = args.design == "paired";
    switch (kind) {
        case safe::EffectSizeKind::Reciprocal:
            in.group1 = safe::GroupSummary(args.m1, args.sd1, args.n1);
            break;
        case safe::EffectSizeKind::LnRoM:
        case safe::EffectSizeKind::Smd:
        case safe::EffectSizeKind::LnCVR:
            in.group1 = safe::GroupSummary(args.m1, args.sd1, args.n1);
            in.group2 = safe::GroupSummary(args.m2, args.sd2, args.n2);
            if (paired) in.design = safe::PairedDesign(args.r, args.n1);
            break;
        case safe::EffectSizeKind::LnOR:
        case safe::EffectSizeKind::LnRR: {
            const long long b = args.b >= 0 ? args.b : args.n1 - args.a;
            const long long d = args.d >= 0 ? args.d : args.n2 - args.c;
            in.table = safe::ContingencyTable(args.a, b, args.c, d);
            break;
        }
        case safe::EffectSizeKind::Hwd:
            in.genotypes = safe::GenotypeCounts(args.nAA, args.nAa, args.naa);
            break;
    }

    const safe::BootstrapResult res = safe::safe_estimate(kind, in, cfg);

    // Reference columns mirroring the method's usual comparison table.
    std::vector<std::string> labels;
    std::vector<double> points, ses;
    const auto push = [&](const std::string& l, double p, double s) {
        labels.push_back(l);
        points.push_back(p);
        ses.push_back(s);
    };
    switch (kind) {
        case safe::EffectSizeKind::Reciprocal: {
            const double var = safe::reciprocal_delta_var(args.m1, args.sd1, args.n1);
            push("First", res.theta_hat, std::sqrt(var));
            break;
        }
        case safe::EffectSizeKind::LnRoM: {
            const auto first = safe::lnrom_estimate(*in.group1, *in.group2, 1, in.design);
            push("First", first.point, first.se);
            if (!in.design) {
                const auto second = safe::lnrom_estimate(*in.group1, *in.group2, 2);
                push("Second", second.point, second.se);
            }
            break;
        }
        case safe::EffectSizeKind::Smd: {
            const auto [d_res, det] =
                safe::smd_estimate(*in.group1, *in.group2, safe::SmdEstimator::CohenD);
            const auto [g_res, det2] =
                safe::smd_estimate(*in.group1, *in.group2, safe::SmdEstimator::HedgesG);
            push("d", d_res.point, d_res.se);
            push("g", g_res.point, g_res.se);
            break;
        }
        case safe::EffectSizeKind::LnOR: {
            const auto first = safe::lnor_estimate(*in.table, cfg.cc);
            push("First", first.point, first.se);
            break;
        }
        case safe::EffectSizeKind::LnRR: {
            const auto first = safe::lnrr_estimate(*in.table, cfg.cc);
            push("First", first.point, first.se);
            break;
        }
        case safe::EffectSizeKind::LnCVR: {
            const auto first = safe::lncvr_estimate(*in.group1, *in.group2, 1, in.design);
            const auto second = safe::lncvr_estimate(*in.group1, *in.group2, 2, in.design);
            push("First", first.point, first.se);
            push("Second", second.point, second.se);
            break;
        }
        case safe::EffectSizeKind::Hwd: {
            const auto first = safe::hwd_estimate(*in.genotypes, cfg.cc);
            push("First", first.point, first.se);
            break;
        }
    }
    push("SAFE", res.theta_bc, res.se_safe);

    if (args.format == "json") {
        nlohmann::json j;
        j["kind"] = args.kind;
        j["seed"] = cfg.master_seed;
        j["B"] = cfg.replicates;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            j["methods"][labels[i]] = {{"point", points[i]}, {"se", ses[i]}};
        }
        j["safe"] = {{"theta_hat", res.theta_hat}, {"mean_star", res.mean_star},
                     {"bias", res.bias},           {"theta_bc", res.theta_bc},
                     {"se", res.se_safe},          {"var", res.var_safe},
                     {"drawn", res.drawn},         {"valid", res.valid},
                     {"cc_applied", res.cc_applied}, {"flags", res.flags}};
        std::cout << j.dump(2) << "\n";
    } else if (args.format == "csv") {
        std::cout << "method,point,se\n";
        for (std::size_t i = 0; i < labels.size(); ++i) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", labels[i].c_str(),
                          points[i], ses[i]);
            std::cout << buf;
        }
    } else {
        print_method_table(labels, points, ses, args.round_dp);
        for (const std::string& f : res.flags) {
            std::cerr << "warning: " << f << "\n";
        }
    }

    if (!args.histogram.empty()) {
        safe::ResultRow row;
        row.row_index = 0;
        row.values = res.values;
        safe::write_histograms({row}, args.histogram);
    }
    return 0;
}

int run_batch_cmd(const std::string& kind_name, const std::string& input,
                  const std::string& output, bool compare, bool strict, bool tab,
                  int order, int round_dp, const std::string& histogram,
                  bool r_given, double const_r, const CommonArgs& common) {
    safe::BatchOptions opt;
    opt.kind = safe::kind_from_string(kind_name);
    opt.config = make_config(common);
    opt.config.keep_values = !histogram.empty();
    opt.compare = compare;
    opt.reference_order = order;
    opt.strict = strict;
    opt.workers = common.threads;
    if (r_given) opt.const_r = const_r;

    const char delim = tab ? '\t' : ',';
    const safe::Table table = safe::read_table(input, delim);
    const std::vector<safe::ResultRow> rows = safe::run_batch(table, opt);
    safe::write_table(rows, table.header, output, delim, round_dp);
    if (!histogram.empty()) safe::write_histograms(rows, histogram);

    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.failed ? 1 : 0;
    if (failed > 0) {
        std::cerr << "warning: " << failed << " of " << rows.size()
                  << " rows failed (see warnings column)\n";
    }
    return 0;
}

int run_validate(const std::string& kind_name, const std::string& grid,
                 int reps, const std::string& output, double mu1, double sigma1,
                 double mu2, double sigma2, double p1, double p2,
                 const std::vector<double>& genotype_probs, const CommonArgs& common) {
    safe::Scenario s;
    s.kind = safe::kind_from_string(kind_name);
    s.mu1 = mu1;
    s.sigma1 = sigma1;
    s.mu2 = mu2;
    s.sigma2 = sigma2;
    s.p1 = p1;
    s.p2 = p2;
    if (genotype_probs.size() == 3) {
        s.genotype_probs = {genotype_probs[0], genotype_probs[1], genotype_probs[2]};
    }
    s.n_grid.clear();
    std::stringstream ss(grid);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) s.n_grid.push_back(std::stoll(tok));
    }
    if (s.n_grid.empty()) throw safe::InvalidParameterError("--n-grid is empty");
    s.replications = reps;
    s.config = make_config(common);
    s.seed = common.seed;

    const safe::ScoreTable table = safe::simulate_scenario(s);
    if (output.empty() || output == "-") {
        safe::write_score_table(table, std::cout);
    } else {
        std::ofstream out(output);
        if (!out) throw safe::IoError("cannot open " + output + " for writing");
        safe::write_score_table(table, out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SAFE parametric bootstrap for meta-analytic effect sizes"};
    app.require_subcommand(1);

    CommonArgs common;
    common.seed = default_seed();
    ComputeArgs cargs;

    const auto add_common = [&common](CLI::App* cmd) {
        cmd->add_option("--B", common.replicates, "bootstrap replicates")
            ->capture_default_str();
        cmd->add_option("--seed", common.seed, "master seed (fallback: SAFE_SEED)");
        cmd->add_option("--cc-add", common.cc_add, "continuity-correction constant")
            ->capture_default_str();
        cmd->add_option("--var-model", common.var_model,
                        "variance sampling model: gaussian|chisq")
            ->check(CLI::IsMember({"gaussian", "chisq"}));
        cmd->add_flag("--truncate", common.truncate,
                      "draw from the bounded model instead of rejecting");
        cmd->add_option("--threads", common.threads, "worker threads (0 = all)");
    };

    // --- compute ---
    CLI::App* compute = app.add_subcommand(
        "compute", "one effect size from inline summary statistics");
    compute->add_option("--kind", cargs.kind, "effect-size kind")
        ->required()
        ->check(CLI::IsMember(
            {"reciprocal", "lnrom", "smd", "lnor", "lnrr", "lncvr", "hwd"}));
    compute->add_option("--m1", cargs.m1, "group 1 mean");
    compute->add_option("--sd1", cargs.sd1, "group 1 SD");
    compute->add_option("--n1", cargs.n1, "group 1 n (or group 1 total for 2x2)");
    compute->add_option("--m2", cargs.m2, "group 2 mean");
    compute->add_option("--sd2", cargs.sd2, "group 2 SD");
    compute->add_option("--n2", cargs.n2, "group 2 n (or group 2 total for 2x2)");
    compute->add_option("--a", cargs.a, "2x2 cell a (group 1 events)");
    compute->add_option("--b", cargs.b, "2x2 cell b (group 1 non-events)");
    compute->add_option("--c", cargs.c, "2x2 cell c (group 2 events)");
    compute->add_option("--d", cargs.d, "2x2 cell d (group 2 non-events)");
    compute->add_option("--nAA", cargs.nAA, "AA genotype count");
    compute->add_option("--nAa", cargs.nAa, "Aa genotype count");
    compute->add_option("--naa", cargs.naa, "aa genotype count");
    CLI::Option* design_opt =
        compute->add_option("--design", cargs.design, "independent|paired")
            ->check(CLI::IsMember({"independent", "paired"}));
    CLI::Option* r_opt =
        compute->add_option("--r", cargs.r, "within-pair correlation (implies paired)");
    compute->add_option("--format", cargs.format, "text|csv|json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    compute->add_option("--round", cargs.round_dp, "decimal places for the text table")
        ->capture_default_str();
    compute->add_option("--histogram", cargs.histogram,
                        "write a replicate histogram CSV to this path");
    add_common(compute);

    // --- batch ---
    std::string b_kind, b_input, b_output, b_histogram;
    bool b_compare = false, b_strict = false, b_tab = false, b_r_given = false;
    int b_order = 1, b_round = -1;
    double b_r = 0.5;
    CLI::App* batch = app.add_subcommand("batch", "row-wise SAFE over a dataset");
    batch->add_option("--kind", b_kind, "effect-size kind")
        ->required()
        ->check(CLI::IsMember(
            {"reciprocal", "lnrom", "smd", "lnor", "lnrr", "lncvr", "hwd"}));
    batch->add_option("--input", b_input, "input CSV/TSV path")->required();
    batch->add_option("--output", b_output, "output path")->required();
    batch->add_flag("--compare", b_compare, "add closed-form yi_ref/vi_ref columns");
    batch->add_flag("--strict", b_strict, "abort on the first failing row");
    batch->add_flag("--tab", b_tab, "tab-delimited input and output");
    batch->add_option("--order", b_order, "reference order for lnrom/lncvr: 1|2")
        ->check(CLI::IsMember({1, 2}));
    batch->add_option("--round", b_round, "round output columns to this many decimals");
    batch->add_option("--histogram", b_histogram,
                      "write per-row replicate histograms to this path");
    CLI::Option* br_opt = batch->add_option(
        "--r", b_r, "constant within-pair correlation for rows without an r column");
    add_common(batch);

    // --- validate ---
    std::string v_kind = "lnrom", v_grid = "5,10,20,50,100", v_output;
    int v_reps = 1000;
    double v_mu1 = 10, v_sigma1 = 2, v_mu2 = 12, v_sigma2 = 2, v_p1 = 0.3, v_p2 = 0.5;
    std::vector<double> v_geno;
    CLI::App* validate = app.add_subcommand(
        "validate", "simulation study scoring methods against the true effect");
    validate->add_option("--kind", v_kind, "effect-size kind")
        ->check(CLI::IsMember(
            {"reciprocal", "lnrom", "smd", "lnor", "lnrr", "lncvr", "hwd"}));
    validate->add_option("--n-grid", v_grid, "comma-separated per-group sizes")
        ->capture_default_str();
    validate->add_option("--reps", v_reps, "replications per cell")
        ->capture_default_str();
    validate->add_option("--output", v_output, "output CSV path (default stdout)");
    validate->add_option("--mu1", v_mu1, "population mean, group 1");
    validate->add_option("--sigma1", v_sigma1, "population SD, group 1");
    validate->add_option("--mu2", v_mu2, "population mean, group 2");
    validate->add_option("--sigma2", v_sigma2, "population SD, group 2");
    validate->add_option("--p1", v_p1, "population event probability, group 1");
    validate->add_option("--p2", v_p2, "population event probability, group 2");
    validate->add_option("--genotype-probs", v_geno, "three genotype probabilities")
        ->expected(3);
    add_common(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (compute->parsed()) {
            cargs.r_given = r_opt->count() > 0;
            if (cargs.r_given && design_opt->count() > 0 && cargs.design == "independent") {
                std::cerr << "error: --r conflicts with --design independent\n";
                return 1;
            }
            if (cargs.r_given) cargs.design = "paired";
            if (cargs.design == "paired" && !cargs.r_given) {
                std::cerr << "error: --design paired requires --r\n";
                return 1;
            }
            return run_compute(cargs, common);
        }
        if (batch->parsed()) {
            b_r_given = br_opt->count() > 0;
            return run_batch_cmd(b_kind, b_input, b_output, b_compare, b_strict, b_tab,
                                 b_order, b_round, b_histogram, b_r_given, b_r, common);
        }
        return run_validate(v_kind, v_grid, v_reps, v_output, v_mu1, v_sigma1, v_mu2,
                            v_sigma2, v_p1, v_p2, v_geno, common);
    } catch (const safe::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
