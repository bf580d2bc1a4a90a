#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mggd/errors.hpp"
#include "mggd/model.hpp"
#include "test_support.hpp"

using namespace mggd;

namespace {

// Tensor-grid midpoint rule for the p = 2 density with M = I, m = 1. The grid
// is uniform in s with x = sinh(s), which keeps the cusp at the origin
// resolved while reaching far enough into the tails.
double integrate_density_2d(double beta, double half_width, std::size_t cells) {
    const MggdParams params(SpdMatrix::identity(2), 1.0, beta);
    const double s_max = std::asinh(half_width);
    const double ds = 2.0 * s_max / static_cast<double>(cells);
    std::vector<double> x(cells), w(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const double s = -s_max + (static_cast<double>(i) + 0.5) * ds;
        x[i] = std::sinh(s);
        w[i] = std::cosh(s) * ds;
    }
    double total = 0.0;
    std::vector<double> pt(2);
    for (std::size_t i = 0; i < cells; ++i)
        for (std::size_t j = 0; j < cells; ++j) {
            pt = {x[i], x[j]};
            total += std::exp(log_pdf(pt, params)) * w[i] * w[j];
        }
    return total;
}

// Plain uniform midpoint rule on [-12, 12]^2.
double integrate_box(double beta, double step) {
    const MggdParams params(SpdMatrix::identity(2), 1.0, beta);
    const auto cells = static_cast<std::size_t>(std::lround(24.0 / step));
    double total = 0.0;
    std::vector<double> pt(2);
    for (std::size_t i = 0; i < cells; ++i)
        for (std::size_t j = 0; j < cells; ++j) {
            pt = {-12.0 + (i + 0.5) * step, -12.0 + (j + 0.5) * step};
            total += std::exp(log_pdf(pt, params));
        }
    return total * step * step;
}

}  // namespace

TEST_CASE("density generator") {
    CHECK(density_generator(0.0, 1.0, 1.0, 2) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(density_generator(0.0, 1.0, 0.5, 2) == doctest::Approx(0.5 / (4.0 * std::numbers::pi)).epsilon(1e-14));
    for (double beta : {0.1, 0.5, 0.9})
        for (std::size_t p : {1u, 3u, 7u}) CHECK(density_generator(1.0, 0.7, beta, p) > density_generator(4.0, 0.7, beta, p));
}

TEST_CASE("log_pdf") {
    const std::vector<double> zero{0.0, 0.0};
    const std::vector<double> e1{1.0, 0.0};
    CHECK(log_pdf(zero, MggdParams(SpdMatrix::identity(2), 1.0, 1.0)) ==
          doctest::Approx(std::log(1.0 / (2.0 * std::numbers::pi))).epsilon(1e-14));
    CHECK(log_pdf(e1, MggdParams(SpdMatrix::identity(2), 1.0, 0.5)) ==
          doctest::Approx(std::log(0.5 / (4.0 * std::numbers::pi)) - 0.5).epsilon(1e-14));
    const std::vector<double> bad{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(log_pdf(bad, MggdParams(SpdMatrix::identity(2), 1.0, 0.5)), DimensionMismatch);

    SUBCASE("change of variables") {
        // Tr(M) = p pins M, so x -> a x is absorbed by m -> a^2 m.
        const SpdMatrix m = normalize_trace(toeplitz_rho(3, 0.6));
        const std::vector<double> x{0.3, -1.2, 0.7};
        for (double a : {0.5, 3.0}) {
            std::vector<double> ax = x;
            for (double& v : ax) v *= a;
            const double base = log_pdf(x, MggdParams(m, 1.3, 0.4));
            const double moved = log_pdf(ax, MggdParams(m, 1.3 * a * a, 0.4));
            CHECK(moved == doctest::Approx(base - 3.0 * std::log(a)).epsilon(1e-12));
        }
    }
}

TEST_CASE("parameter invariants") {
    CHECK_THROWS_AS(MggdParams(SpdMatrix({{2, 0}, {0, 2}}), 1.0, 0.5), InvalidArgument);
    CHECK_THROWS_AS(MggdParams(SpdMatrix::identity(2), 0.0, 0.5), InvalidArgument);
    CHECK_THROWS_AS(MggdParams(SpdMatrix::identity(2), 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(MggdParams(SpdMatrix::identity(2), 1.0, 1.5), InvalidArgument);
}

TEST_CASE("sample set validation") {
    CHECK_THROWS_AS(SampleSet(2, {1.0, 0.0, 0.0, 0.0}), DegenerateData);
    try {
        SampleSet(2, {1.0, 0.0, 1.0, 1.0, 0.0, 0.0});
        FAIL("expected DegenerateData");
    } catch (const DegenerateData& e) {
        CHECK(e.row() == 2);
    }
    CHECK_THROWS_AS(SampleSet(2, {1.0, INFINITY}), InvalidArgument);
    CHECK_THROWS_AS(SampleSet(2, {1.0, 2.0, 3.0}), DimensionMismatch);

    // too few rows and rank deficiency
    CHECK_THROWS_AS(SampleSet(2, {1.0, 0.0, 0.0, 1.0}).require_estimable(), DegenerateData);
    CHECK_THROWS_AS(SampleSet(2, {1.0, 1.0, 2.0, 2.0, -1.0, -1.0}).require_estimable(), DegenerateData);
    CHECK_NOTHROW(SampleSet(2, {1.0, 0.0, 0.0, 1.0, 1.0, 1.0}).require_estimable());
}

TEST_CASE("log profile objective") {
    const SampleSet basis(2, {1.0, 0.0, 0.0, 1.0});
    CHECK(log_profile_objective(SpdMatrix::identity(2), basis, 0.5) ==
          doctest::Approx(-4.0 * std::log(2.0)).epsilon(1e-14));

    Rng rng(21, 0);
    const SampleSet data = mggd::testing::random_data(3, 40, rng);
    const SpdMatrix m = mggd::testing::random_spd(3, rng);
    const double base = log_profile_objective(m, data, 0.3);
    for (double lambda : {0.1, 1.0, 7.0})
        CHECK(std::abs(log_profile_objective(m.scaled(lambda), data, 0.3) - base) < 1e-10);

    SUBCASE("permutation invariance") {
        std::vector<double> v(data.values().begin(), data.values().end());
        std::vector<std::size_t> order(data.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = (i * 17) % order.size();
        std::vector<double> shuffled;
        for (std::size_t i : order) shuffled.insert(shuffled.end(), v.begin() + i * 3, v.begin() + i * 3 + 3);
        CHECK(log_profile_objective(m, SampleSet(3, shuffled), 0.3) == doctest::Approx(base).epsilon(1e-13));
    }

    SUBCASE("extreme magnitudes stay finite") {
        std::vector<double> v;
        for (int k = -15; k <= 15; ++k) {
            const double s = std::pow(10.0, k);
            v.insert(v.end(), {s, 0.5 * s, -0.25 * s});
        }
        const SampleSet wide(3, v);
        for (double beta : {0.01, 0.5, 0.99}) CHECK(std::isfinite(log_profile_objective(SpdMatrix::identity(3), wide, beta)));
    }

    CHECK_THROWS_AS(log_profile_objective(SpdMatrix::identity(2), SampleSet(2, {1e-200, 0.0}), 0.5), DegenerateData);
}

TEST_CASE("density integrates to one") {
    // On [-12, 12]^2 only the light-tailed case holds the mass; the heavier
    // shapes put about 1.7% (beta 0.5) and over half (beta 0.3) of it outside that box.
    const double coarse = integrate_box(0.8, 0.04);
    const double fine = integrate_box(0.8, 0.02);
    CHECK(std::abs(fine - coarse) < 1e-4);
    CHECK(std::abs(fine - 1.0) < 1e-3);

    for (double beta : {0.3, 0.5, 0.8}) {
        CAPTURE(beta);
        // Half-width where P(tau > L) < 1e-6: tau^(2 beta) ~ Gamma(1/beta, 2).
        const double half_width = beta < 0.4 ? 2e4 : (beta < 0.6 ? 80.0 : 40.0);
        const double coarse_w = integrate_density_2d(beta, half_width, 600);
        const double fine_w = integrate_density_2d(beta, half_width, 1200);
        CHECK(std::abs(fine_w - coarse_w) < 1e-4);
        CHECK(std::abs(fine_w - 1.0) < 1e-3);
    }
}
