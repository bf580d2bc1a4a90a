#pragma once

// Exact MGGD variate generation through the stochastic representation
// x = tau * A * u, A A^T = m M, u uniform on the sphere, tau^(2 beta) ~ Gamma(p/(2 beta), 2).

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mggd/model.hpp"

namespace mggd {

struct RngSeed {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

// xoshiro256** seeded through splitmix64 from (master_seed, stream_id).
// Streams with different ids are statistically independent. Normal and
// uniform variates are generated in-house so the stream does not depend on
// the standard library implementation.
class Rng {
public:
    explicit Rng(RngSeed seed);
    Rng(std::uint64_t master_seed, std::uint64_t stream_id) : Rng(RngSeed{master_seed, stream_id}) {}

    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    // Standard normal (Marsaglia polar method, spare value cached).
    double normal();

private:
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Marsaglia-Tsang squeeze; shapes below one use the U^(1/shape) boost.
double sample_gamma(double shape, double scale, Rng& rng);

// G^(1/(2 beta)) with G ~ Gamma(p/(2 beta), 2).
double sample_tau(double beta, std::size_t p, Rng& rng);

// Normalized vector of p standard normals; the all-zero draw is redrawn.
std::vector<double> sample_sphere(std::size_t p, Rng& rng);

// n i.i.d. rows. Per row the generator is consumed as: tau, then the sphere
// direction components in index order.
SampleSet sample_mggd(const MggdParams& params, std::size_t n, Rng& rng);

}  // namespace mggd
