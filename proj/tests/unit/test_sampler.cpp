#include <doctest.h>

#include <cmath>
#include <vector>

#include "mggd/sampler.hpp"
#include "mggd/special_functions.hpp"

using namespace mggd;

namespace {

struct Moments {
    double mean;
    double se;
};

template <class F>
Moments moments(std::size_t n, F&& draw) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = draw();
        s += v;
        s2 += v * v;
    }
    const double mean = s / n;
    const double var = (s2 - n * mean * mean) / (n - 1);
    return {mean, std::sqrt(var / n)};
}

// E[G^s] for G ~ Gamma(a, 2): 2^s Gamma(a + s) / Gamma(a)
double gamma_moment(double a, double s) { return std::exp(s * std::log(2.0) + log_gamma(a + s) - log_gamma(a)); }

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
    Rng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 10; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        CHECK(va != c.next_u64());
        CHECK(va != d.next_u64());
    }
    Rng u(1, 0);
    for (int i = 0; i < 100000; ++i) {
        const double x = u.uniform();
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
    }
}

TEST_CASE("gamma variates") {
    Rng rng(5, 0);
    for (double shape : {0.3, 0.75, 1.0, 3.3, 50.0}) {
        CAPTURE(shape);
        const auto m = moments(200000, [&] { return sample_gamma(shape, 2.0, rng); });
        CHECK(std::abs(m.mean - 2.0 * shape) < 4.0 * m.se);
    }
}

TEST_CASE("sample_tau moments") {
    Rng rng(6, 0);
    const std::size_t n = 1000000;
    SUBCASE("tau^(2 beta) has mean p / beta") {
        const auto m = moments(n, [&] { return sample_tau(0.5, 3, rng); });
        CHECK(std::abs(m.mean - 6.0) < 3.0 * m.se);
    }
    SUBCASE("beta = 1 gives chi-squared with p degrees of freedom") {
        const auto m = moments(n, [&] {
            const double t = sample_tau(1.0, 2, rng);
            return t * t;
        });
        CHECK(std::abs(m.mean - 2.0) < 3.0 * m.se);
    }
    SUBCASE("second moment of tau") {
        // beta = 0.5, p = 3: 4 Gamma(5) / Gamma(3) = 48
        CHECK(gamma_moment(3.0, 2.0) == doctest::Approx(48.0).epsilon(1e-12));
        const auto m = moments(n, [&] {
            const double t = sample_tau(0.5, 3, rng);
            return t * t;
        });
        CHECK(std::abs(m.mean - 48.0) < 3.0 * m.se);
    }
}

TEST_CASE("sample_sphere") {
    Rng rng(7, 0);
    const std::size_t n = 100000;
    double outer[3][3] = {};
    double mean[3] = {};
    for (std::size_t k = 0; k < n; ++k) {
        const auto u = sample_sphere(3, rng);
        double norm2 = 0.0;
        for (double v : u) norm2 += v * v;
        REQUIRE(std::abs(std::sqrt(norm2) - 1.0) <= 1e-12);
        for (int i = 0; i < 3; ++i) {
            mean[i] += u[i];
            for (int j = 0; j < 3; ++j) outer[i][j] += u[i] * u[j];
        }
    }
    const double se = std::sqrt(1.0 / 3.0 / n);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(mean[i] / n) < 3.0 * se);
        for (int j = 0; j < 3; ++j) CHECK(std::abs(outer[i][j] / n - (i == j ? 1.0 / 3.0 : 0.0)) < 0.01);
    }
    const auto one = sample_sphere(1, rng);
    CHECK(std::abs(one[0]) == 1.0);
}

TEST_CASE("sample_mggd covariance") {
    SUBCASE("Gaussian member") {
        Rng rng(8, 0);
        const SampleSet s = sample_mggd(MggdParams(SpdMatrix::identity(2), 1.0, 1.0), 100000, rng);
        const Matrix cov = sample_covariance(s);
        CHECK(std::abs(cov(0, 0) - 1.0) < 0.02);
        CHECK(std::abs(cov(1, 1) - 1.0) < 0.02);
        CHECK(std::abs(cov(0, 1)) < 0.02);
    }
    SUBCASE("heavy-tailed member matches the moment formula within 3%") {
        Rng rng(9, 0);
        const SpdMatrix m = toeplitz_rho(3, 0.8);
        const SampleSet s = sample_mggd(MggdParams(m, 2.0, 0.5), 100000, rng);
        const double factor = gamma_moment(3.0, 2.0) / 3.0;  // 16
        const Matrix cov = sample_covariance(s);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                const double expected = factor * 2.0 * m(i, j);
                CHECK(std::abs(cov(i, j) - expected) < 0.03 * expected);
            }
    }
}

TEST_CASE("quadratic forms against the true Sigma follow the tau law") {
    Rng rng(10, 0);
    const double beta = 0.35;
    const MggdParams params(normalize_trace(toeplitz_rho(4, 0.5)), 0.7, beta);
    const SampleSet s = sample_mggd(params, 200000, rng);
    const SpdMatrix sigma = params.sigma();
    std::size_t i = 0;
    const auto m = moments(s.size(), [&] { return std::pow(quadratic_form(sigma, s.row(i++)), beta); });
    CHECK(std::abs(m.mean - 4.0 / beta) < 3.0 * m.se);
}

TEST_CASE("deterministic replay") {
    const MggdParams params(toeplitz_rho(3, 0.8), 1.0, 0.2);
    Rng a(42, 0), b(42, 0), c(42, 1);
    const SampleSet sa = sample_mggd(params, 200, a);
    const SampleSet sb = sample_mggd(params, 200, b);
    const SampleSet sc = sample_mggd(params, 200, c);
    CHECK(sa == sb);
    CHECK_FALSE(sa == sc);
}
