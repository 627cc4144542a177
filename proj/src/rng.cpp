#include "safe/rng.hpp"

#include <cmath>
#include <string>

#include "safe/errors.hpp"

namespace safe {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
        const std::array<std::uint32_t, 4> next = {
            static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
            static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
            static_cast<std::uint32_t>(p0),
        };
        ctr = next;
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

void CounterRng::refill() {
    buf_ = philox4x32(ctr_, key_);
    ++ctr_[0];
    have_ = 4;
}

CounterRng RngStream::at(std::uint64_t index) const {
    if (index > 0xFFFFFFFFull) {
        throw InvalidParameterError("draw index exceeds the 2^32 stream capacity");
    }
    return CounterRng(master_seed, stream_id, static_cast<std::uint32_t>(index));
}

double normal_quantile(double p) {
    // Wichura (1988), algorithm AS241, PPND16.
    static constexpr double a[8] = {
        3.3871328727963666080e0,  1.3314166789178437745e2,  1.9715909503065514427e3,
        1.3731693765509461125e4,  4.5921953931549871457e4,  6.7265770927008700853e4,
        3.3430575583588128105e4,  2.5090809287301226727e3};
    static constexpr double b[8] = {
        1.0,                      4.2313330701600911252e1,  6.8718700749205790830e2,
        5.3941960214247511077e3,  2.1213794301586595867e4,  3.9307895800092710610e4,
        2.8729085735721942674e4,  5.2264952788528545610e3};
    static constexpr double c[8] = {
        1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
        3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
        2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static constexpr double d[8] = {
        1.0,                      2.05319162663775882187e0, 1.67638483018380384940e0,
        6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
        5.47593808499534494600e-4, 1.05075007164441684324e-9};
    static constexpr double e[8] = {
        6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
        2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
        2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr double f[8] = {
        1.0,                      5.99832206555887937690e-1, 1.36929880922735805310e-1,
        1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
        1.42151175831644588870e-7, 2.04426310338993978564e-15};

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        double num = a[7], den = b[7];
        for (int i = 6; i >= 0; --i) {
            num = num * r + a[i];
            den = den * r + b[i];
        }
        return q * num / den;
    }
    double r = q < 0.0 ? p : 1.0 - p;
    if (!(r > 0.0)) {
        throw InvalidParameterError("normal_quantile requires p in (0, 1)");
    }
    r = std::sqrt(-std::log(r));
    double z;
    if (r <= 5.0) {
        r -= 1.6;
        double num = c[7], den = d[7];
        for (int i = 6; i >= 0; --i) {
            num = num * r + c[i];
            den = den * r + d[i];
        }
        z = num / den;
    } else {
        r -= 5.0;
        double num = e[7], den = f[7];
        for (int i = 6; i >= 0; --i) {
            num = num * r + e[i];
            den = den * r + f[i];
        }
        z = num / den;
    }
    return q < 0.0 ? -z : z;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

namespace {

constexpr int kLnFacTable = 1024;

double ln_factorial(long long n) {
    static const std::vector<double> table = [] {
        std::vector<double> t(kLnFacTable, 0.0);
        double sum = 0.0;
        for (int i = 1; i < kLnFacTable; ++i) {
            sum += std::log(static_cast<double>(i));
            t[i] = sum;
        }
        return t;
    }();
    if (n < kLnFacTable) return table[n];
    // Stirling with two correction terms; plenty for the rejection tests below.
    const double x = static_cast<double>(n);
    const double r = 1.0 / x;
    return (x + 0.5) * std::log(x) - x + 0.9189385332046727418 +
           r * (1.0 / 12.0 - r * r / 360.0);
}

// Stadlober's hat constants: 8/e and 3 - sqrt(12/e).
constexpr double kShat1 = 2.943035529371538573;
constexpr double kShat2 = 0.8989161620588987408;

}  // namespace

BinomialSampler::BinomialSampler(long long n, double p) : n_(n) {
    if (n < 0) throw InvalidParameterError("binomial trials must be non-negative");
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidParameterError("binomial probability " + std::to_string(p) +
                                    " lies outside [0, 1]");
    }
    flipped_ = p > 0.5;
    p_ = flipped_ ? 1.0 - p : p;
    const double np = static_cast<double>(n_) * p_;
    inversion_ = np < 30.0;
    if (n_ == 0 || p_ == 0.0) {
        inversion_ = true;
        f0_ = 1.0;
        odds_ = 0.0;
        bound_ = 0;
        return;
    }
    if (inversion_) {
        f0_ = std::exp(static_cast<double>(n_) * std::log1p(-p_));
        odds_ = p_ / (1.0 - p_);
        const double rc = static_cast<double>(n_ + 1) * p_;
        const double cap = rc + 11.0 * (std::sqrt(rc) + 1.0);
        bound_ = cap < static_cast<double>(n_) ? static_cast<long long>(cap) : n_;
    } else {
        const double q1 = 1.0 - p_;
        mode_ = static_cast<long long>(np + p_);
        center_ = np + 0.5;
        rlog_ = std::log(p_ / q1);
        mode_log_f_ = ln_factorial(mode_) + ln_factorial(n_ - mode_);
        width_ = std::sqrt(kShat1 * (np * q1 + 0.5)) + kShat2;
        const double cap = center_ + 6.0 * width_;
        upper_ = cap < static_cast<double>(n_) ? static_cast<long long>(cap) : n_;
    }
}

long long BinomialSampler::draw(CounterRng& g) const {
    long long x = 0;
    if (inversion_) {
        for (;;) {
            double r = g.next_unit();
            double fx = f0_;
            x = 0;
            bool accepted = false;
            for (;;) {
                r -= fx;
                if (r <= 0.0) {
                    accepted = true;
                    break;
                }
                ++x;
                if (x > bound_) break;
                fx *= odds_ * static_cast<double>(n_ - x + 1);
                r *= static_cast<double>(x);
            }
            if (accepted) break;
        }
    } else {
        for (;;) {
            const double u = g.next_unit();
            const double v = center_ + width_ * (g.next_unit() - 0.5) / u;
            if (v < 0.0 || v > static_cast<double>(upper_)) continue;
            x = static_cast<long long>(v);
            const double lf = static_cast<double>(x - mode_) * rlog_ + mode_log_f_ -
                              ln_factorial(x) - ln_factorial(n_ - x);
            if (u * (4.0 - u) - 3.0 <= lf) break;       // squeeze accept
            if (u * (u - lf) > 1.0) continue;            // squeeze reject
            if (2.0 * std::log(u) <= lf) break;
        }
    }
    return flipped_ ? n_ - x : x;
}

long long binomial_draw(CounterRng& g, long long n, double p) {
    return BinomialSampler(n, p).draw(g);
}

namespace {

double gamma_draw(CounterRng& g, double alpha) {
    // Marsaglia & Tsang (2000); boost for alpha < 1.
    if (alpha < 1.0) {
        const double u = g.next_unit();
        return gamma_draw(g, alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = g.next_normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = g.next_unit();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace

double chisq_draw(CounterRng& g, double df) {
    if (!(df > 0.0)) throw InvalidParameterError("chi-square df must be positive");
    return 2.0 * gamma_draw(g, 0.5 * df);
}

void multinomial_draw(CounterRng& g, long long n, const std::vector<double>& probs,
                      std::vector<long long>& out) {
    const std::size_t k = probs.size();
    out.assign(k, 0);
    long long remaining = n;
    double mass = 0.0;
    for (double p : probs) mass += p;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        if (remaining == 0 || probs[i] <= 0.0) {
            mass -= probs[i];
            continue;
        }
        if (probs[i] >= mass) {
            out[i] = remaining;
            remaining = 0;
            mass -= probs[i];
            continue;
        }
        const long long x = binomial_draw(g, remaining, probs[i] / mass);
        out[i] = x;
        remaining -= x;
        mass -= probs[i];
    }
    if (k > 0) out[k - 1] = remaining;
}

std::vector<double> normal_sample(double mean, double sd, std::uint64_t count,
                                  const RngStream& rng) {
    if (!(sd >= 0.0) || !std::isfinite(sd)) {
        throw InvalidParameterError("normal sd must be finite and non-negative");
    }
    std::vector<double> out(count);
    for (std::uint64_t b = 0; b < count; ++b) {
        CounterRng g = rng.at(b);
        out[b] = mean + sd * g.next_normal();
    }
    return out;
}

Matrix mvn_sample(const std::vector<double>& mean, const CovarianceMatrix& cov,
                  std::uint64_t count, const RngStream& rng) {
    const std::size_t k = mean.size();
    if (cov.dim() != k) {
        throw InvalidParameterError("mvn mean/covariance dimension mismatch");
    }
    const Matrix L = cholesky_lower(cov);
    Matrix out(count, k);
    std::vector<double> z(k);
    for (std::uint64_t b = 0; b < count; ++b) {
        CounterRng g = rng.at(b);
        for (std::size_t j = 0; j < k; ++j) z[j] = g.next_normal();
        for (std::size_t i = 0; i < k; ++i) {
            double x = mean[i];
            for (std::size_t j = 0; j <= i; ++j) x += L.at(i, j) * z[j];
            out.at(b, i) = x;
        }
    }
    return out;
}

Matrix mvn_sample_lower_bounded(const std::vector<double>& mean,
                                const CovarianceMatrix& cov,
                                const std::vector<double>& lower_bounds,
                                std::uint64_t count, double max_attempt_factor,
                                const RngStream& rng) {
    const std::size_t k = mean.size();
    if (cov.dim() != k || lower_bounds.size() != k) {
        throw InvalidParameterError("mvn bound/dimension mismatch");
    }
    const Matrix L = cholesky_lower(cov);
    const std::uint32_t budget = truncation_attempt_budget(max_attempt_factor);
    Matrix out(count, k);
    std::vector<double> z(k), x(k);
    std::uint64_t attempts_total = 0;
    std::uint64_t accepted_total = 0;
    for (std::uint64_t b = 0; b < count; ++b) {
        CounterRng g = rng.at(b);
        bool accepted = false;
        for (std::uint32_t attempt = 0; attempt < budget; ++attempt) {
            ++attempts_total;
            for (std::size_t j = 0; j < k; ++j) z[j] = g.next_normal();
            bool ok = true;
            for (std::size_t i = 0; i < k; ++i) {
                double v = mean[i];
                for (std::size_t j = 0; j <= i; ++j) v += L.at(i, j) * z[j];
                x[i] = v;
                if (!(v > lower_bounds[i])) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                accepted = true;
                ++accepted_total;
                for (std::size_t i = 0; i < k; ++i) out.at(b, i) = x[i];
                break;
            }
        }
        if (!accepted) {
            const double rate = attempts_total > 0
                                    ? static_cast<double>(accepted_total) /
                                          static_cast<double>(attempts_total)
                                    : 0.0;
            throw TruncationInfeasibleError(
                "bounded mvn drawing infeasible: empirical acceptance rate " +
                    std::to_string(rate) + " is below 1/max_attempt_factor",
                rate);
        }
    }
    return out;
}

std::vector<long long> binomial_sample(long long n, double p, std::uint64_t count,
                                       const RngStream& rng) {
    const BinomialSampler sampler(n, p);
    std::vector<long long> out(count);
    for (std::uint64_t b = 0; b < count; ++b) {
        CounterRng g = rng.at(b);
        out[b] = sampler.draw(g);
    }
    return out;
}

Matrix multinomial_sample(long long n, const std::vector<double>& probs,
                          std::uint64_t count, const RngStream& rng) {
    if (n < 0) throw InvalidParameterError("multinomial trials must be non-negative");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) {
            throw InvalidParameterError("multinomial probabilities must be non-negative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) >= 1e-9) {
        throw InvalidParameterError("multinomial probabilities sum to " +
                                    std::to_string(sum) + ", expected 1");
    }
    const std::size_t k = probs.size();
    Matrix out(count, k);
    std::vector<long long> row(k);
    for (std::uint64_t b = 0; b < count; ++b) {
        CounterRng g = rng.at(b);
        multinomial_draw(g, n, probs, row);
        for (std::size_t i = 0; i < k; ++i) out.at(b, i) = static_cast<double>(row[i]);
    }
    return out;
}

}  // namespace safe
