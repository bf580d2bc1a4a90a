#include "mggd/sampler.hpp"

#include <cmath>

#include "mggd/errors.hpp"

namespace mggd {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(RngSeed seed) {
    std::uint64_t sm = seed.master_seed;
    const std::uint64_t master_mix = splitmix64(sm);
    std::uint64_t st = seed.stream_id ^ 0x6A09E667F3BCC909ULL;
    const std::uint64_t stream_mix = splitmix64(st);
    std::uint64_t x = master_mix ^ rotl(stream_mix, 17);
    for (auto& s : state_) s = splitmix64(x);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() {
    // (k + 0.5) / 2^53 never hits 0 or 1.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double sample_gamma(double shape, double scale, Rng& rng) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw InvalidArgument("gamma shape and scale must be positive");
    if (shape < 1.0) {
        const double g = sample_gamma(shape + 1.0, scale, rng);
        return g * std::pow(rng.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

double sample_tau(double beta, std::size_t p, Rng& rng) {
    if (p < 1) throw InvalidArgument("dimension must be at least 1");
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    const double a = static_cast<double>(p) / (2.0 * beta);
    return std::pow(sample_gamma(a, 2.0, rng), 1.0 / (2.0 * beta));
}

std::vector<double> sample_sphere(std::size_t p, Rng& rng) {
    if (p < 1) throw InvalidArgument("dimension must be at least 1");
    std::vector<double> u(p);
    double norm2 = 0.0;
    while (norm2 == 0.0) {
        norm2 = 0.0;
        for (double& v : u) {
            v = rng.normal();
            norm2 += v * v;
        }
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : u) v *= inv;
    return u;
}

SampleSet sample_mggd(const MggdParams& params, std::size_t n, Rng& rng) {
    if (n < 1) throw InvalidArgument("sample size must be at least 1");
    const std::size_t p = params.dim();
    const Matrix a = factor_sqrt(params.sigma());
    std::vector<double> values(n * p);
    for (std::size_t r = 0; r < n; ++r) {
        const double tau = sample_tau(params.shape(), p, rng);
        const auto u = sample_sphere(p, rng);
        for (std::size_t i = 0; i < p; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k <= i; ++k) s += a(i, k) * u[k];
            values[r * p + i] = tau * s;
        }
    }
    return SampleSet(p, std::move(values));
}

}  // namespace mggd
