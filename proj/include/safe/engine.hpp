#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "safe/accumulator.hpp"
#include "safe/inputs.hpp"
#include "safe/rng.hpp"
#include "safe/sampling_models.hpp"
#include "safe/transforms.hpp"

namespace safe {

enum class TruncationPolicy { Reject, BoundedDraw };

struct SafeConfig {
    std::uint64_t replicates = 100000;  // B; error below 1000, warning below 100000
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;  // e.g. dataset row index
    CcPolicy cc{};
    VarianceSamplingMode variance_mode = VarianceSamplingMode::Gaussian;
    TruncationPolicy truncation = TruncationPolicy::Reject;
    double max_attempt_factor = 100.0;
    int threads = 0;  // 0 = all available; results are identical at any value
    bool keep_values = false;
};

struct BootstrapResult {
    double theta_hat = 0.0;
    double mean_star = 0.0;
    double bias = 0.0;      // mean_star - theta_hat
    double theta_bc = 0.0;  // 2*theta_hat - mean_star
    double se_safe = 0.0;
    double var_safe = 0.0;
    std::uint64_t drawn = 0;
    std::uint64_t valid = 0;
    std::uint64_t rejected_nonpositive = 0;
    std::uint64_t cc_applied = 0;
    std::vector<std::string> flags;
    std::vector<double> values;  // retained replicates when requested
};

// One replicate's result inside the kernels.
struct ReplicateOutcome {
    double value = 0.0;
    enum Status : std::uint8_t { Rejected = 0, Ok = 1, TruncationFailed = 2 };
    Status status = Rejected;
    bool cc_applied = false;
    std::uint32_t attempts = 1;
};

// Model + transform fused into a per-replicate function. Replicate b is a pure
// function of stream.at(b), which is what lets the parallel kernel match the
// serial one bit-for-bit.
class ReplicateProgram {
public:
    ReplicateProgram(const SamplingModel& model, EffectSizeKind kind, CcPolicy cc,
                     TruncationPolicy truncation, double max_attempt_factor,
                     const EffectInputs& inputs);

    ReplicateOutcome operator()(CounterRng& g) const;

private:
    ReplicateOutcome transform(const double* x) const;

    ModelFamily family_;
    EffectSizeKind kind_;
    double add_;
    bool bounded_ = false;
    std::uint32_t budget_ = 1;

    // normal-vector
    int gauss_dim_ = 0;
    int total_dim_ = 0;
    std::array<double, 4> mean_{};
    std::array<double, 4> lower_{};
    std::array<double, 16> chol_{};
    bool chisq_ = false;
    std::array<double, 2> chisq_df_{};
    std::array<double, 2> chisq_scale_{};

    // binomial-pair
    std::optional<BinomialSampler> bin1_;
    std::optional<BinomialSampler> bin2_;

    // multinomial (three categories)
    long long mn_trials_ = 0;
    std::array<double, 3> probs_{};

    // observed design quantities used by the transforms
    long long n1_ = 0;
    long long n2_ = 0;
    double total_ = 0.0;
};

struct KernelStats {
    MomentAccumulator moments;
    std::uint64_t drawn = 0;
    std::uint64_t valid = 0;
    std::uint64_t rejected = 0;
    std::uint64_t cc_applied = 0;
    std::uint64_t attempts = 0;
    std::uint64_t truncation_failures = 0;

    void absorb(const ReplicateOutcome& o) {
        ++drawn;
        attempts += o.attempts;
        switch (o.status) {
            case ReplicateOutcome::Ok:
                ++valid;
                moments.add(o.value);
                if (o.cc_applied) ++cc_applied;
                break;
            case ReplicateOutcome::Rejected:
                ++rejected;
                break;
            case ReplicateOutcome::TruncationFailed:
                ++truncation_failures;
                break;
        }
    }

    void merge(const KernelStats& o) {
        moments.merge(o.moments);
        drawn += o.drawn;
        valid += o.valid;
        rejected += o.rejected;
        cc_applied += o.cc_applied;
        attempts += o.attempts;
        truncation_failures += o.truncation_failures;
    }
};

namespace detail {

// Fixed chunking: chunk boundaries depend only on the replicate index, never
// on the thread count, so per-chunk partials and their in-order merge give the
// same bits no matter how chunks were scheduled.
constexpr std::uint64_t kKernelChunk = 8192;

template <class Program>
void run_chunk(const Program& prog, const RngStream& stream, std::uint64_t begin,
               std::uint64_t end, KernelStats& part, double* retained) {
    for (std::uint64_t b = begin; b < end; ++b) {
        CounterRng g = stream.at(b);
        const ReplicateOutcome o = prog(g);
        part.absorb(o);
        if (retained != nullptr) {
            retained[b] = o.status == ReplicateOutcome::Ok
                              ? o.value
                              : std::numeric_limits<double>::quiet_NaN();
        }
    }
}

inline KernelStats merge_chunks(std::vector<KernelStats>& parts) {
    KernelStats total;
    for (const KernelStats& p : parts) total.merge(p);
    return total;
}

}  // namespace detail

// OpenMP kernel. `retained`, when non-null, is resized to `count` with NaN in
// rejected slots. Bit-identical to run_replicates_serial at any thread count.
template <class Program>
KernelStats run_replicates(const Program& prog, const RngStream& stream,
                           std::uint64_t count, int threads,
                           std::vector<double>* retained = nullptr);

// Serial reference: identical chunking and merge order, no OpenMP. Kept for
// the equivalence tests and the benchmark.
template <class Program>
KernelStats run_replicates_serial(const Program& prog, const RngStream& stream,
                                  std::uint64_t count,
                                  std::vector<double>* retained = nullptr) {
    const std::uint64_t nchunks =
        (count + detail::kKernelChunk - 1) / detail::kKernelChunk;
    std::vector<KernelStats> parts(nchunks);
    if (retained != nullptr) retained->assign(count, 0.0);
    double* slots = retained != nullptr ? retained->data() : nullptr;
    for (std::uint64_t c = 0; c < nchunks; ++c) {
        const std::uint64_t begin = c * detail::kKernelChunk;
        const std::uint64_t end = std::min(count, begin + detail::kKernelChunk);
        detail::run_chunk(prog, stream, begin, end, parts[c], slots);
    }
    return detail::merge_chunks(parts);
}

// Eqs for the summarise step: se = sd(theta*), bias = mean(theta*) - theta_hat,
// theta_bc = 2*theta_hat - mean(theta*). Requires >= 2 valid replicates.
BootstrapResult summarise(const ReplicateBatch& batch, double theta_hat);

// The four-step procedure: fit the sampling model, draw config.replicates
// replicates, transform each into the effect size, summarise. The anchor
// theta_hat is always the first-order plug-in estimate.
BootstrapResult safe_estimate(EffectSizeKind kind, const EffectInputs& inputs,
                              const SafeConfig& config);

}  // namespace safe

#include "safe/engine_kernel.hpp"  // run_replicates definition (OpenMP)
