#pragma once

#include <cstdint>

namespace safe {

// Single-pass Welford accumulator with Chan's pairwise merge, so a stream of
// values can be reduced chunk-by-chunk with a result independent of how the
// chunks were scheduled across threads (merge order must stay fixed).
struct MomentAccumulator {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const MomentAccumulator& other) {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const std::uint64_t total = count + other.count;
        const double delta = other.mean - mean;
        const double w = static_cast<double>(other.count) / static_cast<double>(total);
        mean += delta * w;
        m2 += other.m2 + delta * delta * w * static_cast<double>(count);
        count = total;
    }

    // Sample variance (divisor count-1); caller guards count >= 2.
    double sample_variance() const {
        return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    }
};

}  // namespace safe
