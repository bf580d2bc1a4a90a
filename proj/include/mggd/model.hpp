#pragma once

// MGGD density, profile likelihood and the observation container shared by
// the sampler and the estimators.

#include <cstddef>
#include <span>
#include <vector>

#include "mggd/spd_matrix.hpp"

namespace mggd {

// Working range for the shape parameter in every fit.
inline constexpr double kBetaMin = 0.01;
inline constexpr double kBetaMax = 0.99;

// Quadratic forms below this are treated as degenerate.
inline constexpr double kMinQuadraticForm = 1e-300;

// N observations of dimension p, stored row-major. Every row is finite and
// non-zero.
class SampleSet {
public:
    // Throws DegenerateData (with the row index) for a zero row,
    // InvalidArgument for non-finite entries or p == 0.
    SampleSet(std::size_t dim, std::vector<double> values);
    explicit SampleSet(const Matrix& rows);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return count_; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
    std::span<const double> values() const noexcept { return values_; }

    SampleSet scaled(double c) const;

    // Stand-in for the general-position hypothesis: N >= p + 1 and the data
    // matrix has rank p. Throws DegenerateData otherwise. Full verification
    // would need every p-subset to be independent; this holds almost surely
    // for continuous data but is not checked.
    void require_estimable() const;

    friend bool operator==(const SampleSet&, const SampleSet&) = default;

private:
    std::size_t dim_;
    std::size_t count_;
    std::vector<double> values_;
};

// (1/N) sum x_i x_i^T
Matrix sample_covariance(const SampleSet& data);

// y_i = x_i^T M^{-1} x_i for every row. Throws DegenerateData with the row
// index when some y_i < kMinQuadraticForm.
std::vector<double> quadratic_forms(const SpdMatrix& m, const SampleSet& data);

// Model parameter triple (M, m, beta) with Tr(M) = p. beta = 1 (the Gaussian
// member) is accepted here for testing; the estimators restrict beta to
// [kBetaMin, kBetaMax].
class MggdParams {
public:
    MggdParams(SpdMatrix scatter, double scale, double shape);

    std::size_t dim() const noexcept { return scatter_.dim(); }
    const SpdMatrix& scatter() const noexcept { return scatter_; }
    double scale() const noexcept { return scale_; }
    double shape() const noexcept { return shape_; }

    // Sigma = m M
    SpdMatrix sigma() const { return scatter_.scaled(scale_); }

private:
    SpdMatrix scatter_;
    double scale_;
    double shape_;
};

// log h_{m,beta}(y) for dimension p.
double log_density_generator(double y, double m, double beta, std::size_t p);
double density_generator(double y, double m, double beta, std::size_t p);

double log_pdf(std::span<const double> x, const MggdParams& params);

// Sum of log_pdf over the data set.
double log_likelihood(const SampleSet& data, const MggdParams& params);

// log F(M) = -log|M| - (p/beta) log sum_i y_i^beta. Homogeneous of degree
// zero in M; maximized on the ray through the fixed point.
double log_profile_objective(const SpdMatrix& m, const SampleSet& data, double beta);

}  // namespace mggd
