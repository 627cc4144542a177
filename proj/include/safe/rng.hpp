#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "safe/linalg.hpp"

namespace safe {

// Philox4x32-10 counter block function (the standard Random123 constants).
// Pure: output depends only on (counter, key), which is what makes every
// replicate independently addressable and the parallel kernels deterministic.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Inverse standard-normal CDF (Wichura's AS241 PPND16), accurate to ~1e-16.
// Requires p in (0, 1).
double normal_quantile(double p);

// Standard normal CDF via erfc.
double normal_cdf(double x);

// An infinite random sequence rooted at (master_seed, stream_id, index).
// Words are Philox blocks keyed by the master seed with the counter laid out
// as [block, index, stream_lo, stream_hi], so distinct (stream, index) pairs
// never overlap.
class CounterRng {
public:
    CounterRng(std::uint64_t master_seed, std::uint64_t stream_id, std::uint32_t index)
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)},
          ctr_{0, index, static_cast<std::uint32_t>(stream_id),
               static_cast<std::uint32_t>(stream_id >> 32)} {}

    std::uint32_t next_u32() {
        if (have_ == 0) refill();
        return buf_[--have_];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform double in the open interval (0, 1); symmetric around 0.5.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal draw via the inverse CDF (one uniform per draw).
    double next_normal() { return normal_quantile(next_unit()); }

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> buf_{};
    unsigned have_ = 0;
};

// A seedable stream of substreams. Identical (master_seed, stream_id) yields
// identical draws on every platform and thread count; distinct stream_ids are
// statistically independent. Single-consumer: move between threads, do not
// share — parallelism comes from distinct stream_ids (or distinct indexes).
struct RngStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    CounterRng at(std::uint64_t index) const;
};

// --- scalar samplers ------------------------------------------------------

// One Binomial(n, p) draw. Inversion (chop-down) for small n*p, Stadlober's
// ratio-of-uniforms otherwise; exact in distribution for all valid (n, p).
long long binomial_draw(CounterRng& g, long long n, double p);

// Fixed-parameter binomial sampler with the per-(n, p) setup hoisted out of
// the replicate loop.
class BinomialSampler {
public:
    BinomialSampler(long long n, double p);
    long long draw(CounterRng& g) const;

private:
    long long n_;
    double p_;            // possibly flipped to <= 0.5
    bool flipped_;
    bool inversion_;
    // inversion setup
    double f0_ = 0.0;
    double odds_ = 0.0;
    long long bound_ = 0;
    // ratio-of-uniforms setup
    double rlog_ = 0.0;
    double center_ = 0.0;
    double width_ = 0.0;
    double mode_log_f_ = 0.0;
    long long mode_ = 0;
    long long upper_ = 0;
};

// One chi-square(df) draw, df > 0 (Marsaglia–Tsang gamma).
double chisq_draw(CounterRng& g, double df);

// One multinomial draw via conditional binomials; counts must sum to n.
void multinomial_draw(CounterRng& g, long long n, const std::vector<double>& probs,
                      std::vector<long long>& out);

// --- vector operations ----------------------------------------------------

// B i.i.d. Normal(mean, sd^2) draws; draw b is a pure function of (rng, b).
std::vector<double> normal_sample(double mean, double sd, std::uint64_t count,
                                  const RngStream& rng);

// B rows of MVN(mean, cov).
Matrix mvn_sample(const std::vector<double>& mean, const CovarianceMatrix& cov,
                  std::uint64_t count, const RngStream& rng);

// Rejection-sampled MVN with per-coordinate strict lower bounds
// (-infinity for unbounded). Returns exactly B rows or throws
// TruncationInfeasibleError reporting the empirical acceptance rate.
Matrix mvn_sample_lower_bounded(const std::vector<double>& mean,
                                const CovarianceMatrix& cov,
                                const std::vector<double>& lower_bounds,
                                std::uint64_t count, double max_attempt_factor,
                                const RngStream& rng);

// B i.i.d. Binomial(n, p) draws.
std::vector<long long> binomial_sample(long long n, double p, std::uint64_t count,
                                       const RngStream& rng);

// B rows of Multinomial(n; probs); every row sums exactly to n.
// probs must be non-negative and sum to 1 within 1e-9.
Matrix multinomial_sample(long long n, const std::vector<double>& probs,
                          std::uint64_t count, const RngStream& rng);

// Deterministic per-replicate rejection budget used by all bounded drawing.
// Exhausting it corresponds to an acceptance rate below ~1/max_attempt_factor.
inline std::uint32_t truncation_attempt_budget(double max_attempt_factor) {
    const double b = 16.0 * (max_attempt_factor > 1.0 ? max_attempt_factor : 1.0);
    return b > 4e9 ? 4000000000u : static_cast<std::uint32_t>(b);
}

}  // namespace safe
