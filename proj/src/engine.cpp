#include "safe/engine.hpp"

#include <cmath>
#include <string>

namespace safe {

namespace {

template <class Fn>
auto run_stage(const char* stage_label, Fn&& fn) -> decltype(fn()) {
    const auto tag = [stage_label](const char* what) {
        return std::string(stage_label) + ": " + what;
    };
    try {
        return fn();
    } catch (const DecompositionError& e) {
        throw DecompositionError(tag(e.what()), e.leading_minor);
    } catch (const TruncationInfeasibleError& e) {
        throw TruncationInfeasibleError(tag(e.what()), e.acceptance_rate);
    } catch (const InvalidParameterError& e) {
        throw InvalidParameterError(tag(e.what()));
    } catch (const DomainError& e) {
        throw DomainError(tag(e.what()));
    } catch (const DesignMismatchError& e) {
        throw DesignMismatchError(tag(e.what()));
    } catch (const UnsupportedCombinationError& e) {
        throw UnsupportedCombinationError(tag(e.what()));
    } catch (const ExcessRejectionError& e) {
        throw ExcessRejectionError(tag(e.what()));
    } catch (const DegenerateBatchError& e) {
        throw DegenerateBatchError(tag(e.what()));
    }
}

SamplingModel build_model(EffectSizeKind kind, const EffectInputs& in,
                          const SafeConfig& config) {
    switch (kind) {
        case EffectSizeKind::Reciprocal:
            if (!in.group1) throw InvalidParameterError("reciprocal requires group 1");
            return model_single_mean(*in.group1);
        case EffectSizeKind::LnRoM:
            if (!in.group1 || !in.group2) {
                throw InvalidParameterError("lnrom requires two group summaries");
            }
            return model_two_means(*in.group1, *in.group2, in.design,
                                   /*positive_means=*/true);
        case EffectSizeKind::Smd:
            if (!in.group1 || !in.group2) {
                throw InvalidParameterError("smd requires two group summaries");
            }
            return model_mean_variance_quartet(*in.group1, *in.group2, in.design,
                                               config.variance_mode,
                                               /*positive_means=*/false);
        case EffectSizeKind::LnCVR:
            if (!in.group1 || !in.group2) {
                throw InvalidParameterError("lncvr requires two group summaries");
            }
            return model_mean_variance_quartet(*in.group1, *in.group2, in.design,
                                               config.variance_mode,
                                               /*positive_means=*/true);
        case EffectSizeKind::LnOR:
        case EffectSizeKind::LnRR:
            if (!in.table) {
                throw InvalidParameterError(std::string(kind_name(kind)) +
                                            " requires a 2x2 contingency table");
            }
            return model_two_binomials(*in.table, config.cc.add);
        case EffectSizeKind::Hwd:
            if (!in.genotypes) throw InvalidParameterError("hwd requires genotype counts");
            return model_genotypes(*in.genotypes, config.cc.add);
    }
    throw InvalidParameterError("unknown effect-size kind");
}

}  // namespace

ReplicateProgram::ReplicateProgram(const SamplingModel& model, EffectSizeKind kind,
                                   CcPolicy cc, TruncationPolicy truncation,
                                   double max_attempt_factor,
                                   const EffectInputs& inputs)
    : family_(model.family), kind_(kind), add_(cc.add) {
    switch (family_) {
        case ModelFamily::NormalVector: {
            gauss_dim_ = static_cast<int>(model.mean.size());
            total_dim_ = static_cast<int>(model.coordinate_count());
            const Matrix L = cholesky_lower(model.cov);
            for (int i = 0; i < gauss_dim_; ++i) {
                mean_[i] = model.mean[i];
                for (int j = 0; j <= i; ++j) chol_[i * 4 + j] = L.at(i, j);
            }
            for (int i = 0; i < total_dim_; ++i) lower_[i] = model.lower_bounds[i];
            chisq_ = model.chisq_variances;
            chisq_df_ = model.chisq_df;
            chisq_scale_ = model.chisq_scale;
            if (truncation == TruncationPolicy::BoundedDraw) {
                for (int i = 0; i < total_dim_; ++i) {
                    if (lower_[i] != kUnbounded) bounded_ = true;
                }
            }
            budget_ = bounded_ ? truncation_attempt_budget(max_attempt_factor) : 1;
            break;
        }
        case ModelFamily::BinomialPair:
            bin1_.emplace(model.trials[0], model.prob[0]);
            bin2_.emplace(model.trials[1], model.prob[1]);
            n1_ = model.trials[0];
            n2_ = model.trials[1];
            break;
        case ModelFamily::Multinomial:
            mn_trials_ = model.multinomial_trials;
            for (int i = 0; i < 3; ++i) probs_[i] = model.probs[i];
            total_ = static_cast<double>(mn_trials_);
            break;
    }
    if (kind_ == EffectSizeKind::Smd || kind_ == EffectSizeKind::LnCVR) {
        if (!inputs.group1 || !inputs.group2) {
            throw InvalidParameterError(std::string(kind_name(kind_)) +
                                        " requires two group summaries");
        }
        n1_ = inputs.group1->n;
        n2_ = inputs.group2->n;
    }
}

ReplicateOutcome ReplicateProgram::transform(const double* x) const {
    TransformOutcome t;
    switch (kind_) {
        case EffectSizeKind::Reciprocal:
            t = reciprocal_replicate(x[0]);
            break;
        case EffectSizeKind::LnRoM:
            t = lnrom_replicate(x[0], x[1]);
            break;
        case EffectSizeKind::Smd:
            t = smd_replicate(x[0], x[1], x[2], x[3], n1_, n2_);
            break;
        case EffectSizeKind::LnCVR:
            t = lncvr_replicate(x[0], x[1], x[2], x[3]);
            break;
        case EffectSizeKind::LnOR:
            t = lnor_replicate(x[0], static_cast<double>(n1_) - x[0], x[1],
                               static_cast<double>(n2_) - x[1], add_);
            break;
        case EffectSizeKind::LnRR:
            t = lnrr_replicate(x[0], static_cast<double>(n1_), x[1],
                               static_cast<double>(n2_), add_);
            break;
        case EffectSizeKind::Hwd:
            t = hwd_replicate(x[0], x[1], x[2], total_, add_);
            break;
    }
    ReplicateOutcome o;
    o.value = t.value;
    o.status = t.valid ? ReplicateOutcome::Ok : ReplicateOutcome::Rejected;
    o.cc_applied = t.cc_applied;
    return o;
}

ReplicateOutcome ReplicateProgram::operator()(CounterRng& g) const {
    double x[4] = {0, 0, 0, 0};
    switch (family_) {
        case ModelFamily::NormalVector: {
            double z[4];
            for (std::uint32_t attempt = 1; attempt <= budget_; ++attempt) {
                for (int j = 0; j < gauss_dim_; ++j) z[j] = g.next_normal();
                for (int i = 0; i < gauss_dim_; ++i) {
                    double v = mean_[i];
                    for (int j = 0; j <= i; ++j) v += chol_[i * 4 + j] * z[j];
                    x[i] = v;
                }
                if (chisq_) {
                    x[gauss_dim_] = chisq_scale_[0] * chisq_draw(g, chisq_df_[0]);
                    x[gauss_dim_ + 1] = chisq_scale_[1] * chisq_draw(g, chisq_df_[1]);
                }
                if (!bounded_) break;
                bool ok = true;
                for (int i = 0; i < total_dim_; ++i) {
                    if (!(x[i] > lower_[i])) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    ReplicateOutcome o = transform(x);
                    o.attempts = attempt;
                    return o;
                }
                if (attempt == budget_) {
                    ReplicateOutcome o;
                    o.status = ReplicateOutcome::TruncationFailed;
                    o.attempts = attempt;
                    return o;
                }
            }
            return transform(x);
        }
        case ModelFamily::BinomialPair:
            x[0] = static_cast<double>(bin1_->draw(g));
            x[1] = static_cast<double>(bin2_->draw(g));
            return transform(x);
        case ModelFamily::Multinomial: {
            // Three-category conditional binomials; the row sums to n exactly.
            const long long k1 = binomial_draw(g, mn_trials_, probs_[0]);
            const double rest = probs_[1] + probs_[2];
            long long k2;
            if (rest <= 0.0 || probs_[1] >= rest) {
                k2 = mn_trials_ - k1;
            } else {
                k2 = binomial_draw(g, mn_trials_ - k1, probs_[1] / rest);
            }
            x[0] = static_cast<double>(k1);
            x[1] = static_cast<double>(k2);
            x[2] = static_cast<double>(mn_trials_ - k1 - k2);
            return transform(x);
        }
    }
    return {};
}

BootstrapResult summarise(const ReplicateBatch& batch, double theta_hat) {
    if (batch.valid < 2) {
        throw DegenerateBatchError("summarise: needs at least 2 valid replicates, got " +
                                   std::to_string(batch.valid));
    }
    BootstrapResult r;
    r.theta_hat = theta_hat;
    r.mean_star = batch.moments.mean;
    r.bias = r.mean_star - theta_hat;
    r.theta_bc = 2.0 * theta_hat - r.mean_star;
    r.var_safe = batch.moments.sample_variance();
    r.se_safe = std::sqrt(r.var_safe);
    r.drawn = batch.drawn;
    r.valid = batch.valid;
    r.rejected_nonpositive = batch.rejected_nonpositive;
    r.cc_applied = batch.cc_applied;
    r.flags = batch.warnings;
    r.values = batch.values;
    return r;
}

BootstrapResult safe_estimate(EffectSizeKind kind, const EffectInputs& inputs,
                              const SafeConfig& config) {
    if (config.replicates < 1000) {
        throw InvalidParameterError("config: B must be at least 1000");
    }
    if (config.replicates > 0xFFFFFFFFull) {
        throw InvalidParameterError("config: B exceeds the 2^32 stream capacity");
    }

    const SamplingModel model =
        run_stage("fit", [&] { return build_model(kind, inputs, config); });
    const double theta_hat =
        run_stage("fit", [&] { return plugin_estimate(kind, inputs, config.cc); });

    const ReplicateProgram prog(model, kind, config.cc, config.truncation,
                                config.max_attempt_factor, inputs);
    const RngStream stream{config.master_seed, config.stream_id};
    std::vector<double> slots;
    const KernelStats stats =
        run_replicates(prog, stream, config.replicates, config.threads,
                       config.keep_values ? &slots : nullptr);

    if (stats.truncation_failures > 0) {
        const double rate = stats.attempts > 0
                                ? static_cast<double>(stats.drawn -
                                                      stats.truncation_failures) /
                                      static_cast<double>(stats.attempts)
                                : 0.0;
        throw TruncationInfeasibleError(
            "draw: bounded drawing infeasible; empirical acceptance rate " +
                std::to_string(rate),
            rate);
    }

    ReplicateBatch batch;
    batch.drawn = stats.drawn;
    batch.valid = stats.valid;
    batch.rejected_nonpositive = stats.rejected;
    batch.cc_applied = stats.cc_applied;
    batch.moments = stats.moments;
    const double frac = static_cast<double>(stats.valid) /
                        static_cast<double>(stats.drawn);
    if (frac < 0.5) {
        throw ExcessRejectionError("transform: only " + std::to_string(stats.valid) +
                                   " of " + std::to_string(stats.drawn) +
                                   " replicates were valid");
    }
    if (config.keep_values) {
        batch.values.reserve(stats.valid);
        for (double v : slots) {
            if (!std::isnan(v)) batch.values.push_back(v);
        }
    }

    BootstrapResult result = run_stage("summarise", [&] {
        return summarise(batch, theta_hat);
    });
    result.flags = model.notes;
    if (config.replicates < 100000) result.flags.push_back("small-B");
    if (frac < 0.99) result.flags.push_back("high-rejection");
    return result;
}

}  // namespace safe
