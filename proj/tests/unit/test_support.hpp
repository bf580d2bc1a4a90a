#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mggd/sampler.hpp"
#include "mggd/spd_matrix.hpp"

namespace mggd::testing {

// G G^T + 0.1 I with G standard normal.
inline SpdMatrix random_spd(std::size_t p, Rng& rng) {
    Matrix g(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) g(i, j) = rng.normal();
    return SpdMatrix(g * g.transpose() + Matrix::identity(p) * 0.1);
}

inline std::vector<double> random_vector(std::size_t p, Rng& rng) {
    std::vector<double> v(p);
    for (double& x : v) x = rng.normal();
    return v;
}

// Standard normal rows; zero rows have probability zero.
inline SampleSet random_data(std::size_t p, std::size_t n, Rng& rng) {
    std::vector<double> v(p * n);
    for (double& x : v) x = rng.normal();
    return SampleSet(p, std::move(v));
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    return m;
}

}  // namespace mggd::testing
