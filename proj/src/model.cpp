#include "mggd/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mggd/errors.hpp"
#include "mggd/special_functions.hpp"

namespace mggd {

SampleSet::SampleSet(std::size_t dim, std::vector<double> values)
    : dim_(dim), count_(0), values_(std::move(values)) {
    if (dim_ == 0) throw InvalidArgument("sample dimension must be positive");
    if (values_.size() % dim_ != 0) throw DimensionMismatch("sample values are not a multiple of the dimension");
    count_ = values_.size() / dim_;
    for (std::size_t i = 0; i < count_; ++i) {
        bool nonzero = false;
        for (double v : row(i)) {
            if (!std::isfinite(v))
                throw InvalidArgument("non-finite value in row " + std::to_string(i));
            nonzero = nonzero || v != 0.0;
        }
        if (!nonzero) throw DegenerateData("row " + std::to_string(i) + " is the zero vector", i);
    }
}

SampleSet::SampleSet(const Matrix& rows)
    : SampleSet(rows.cols(), std::vector<double>(rows.data().begin(), rows.data().end())) {}

SampleSet SampleSet::scaled(double c) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= c;
    return SampleSet(dim_, std::move(v));
}

void SampleSet::require_estimable() const {
    if (count_ < dim_ + 1)
        throw DegenerateData("need at least p + 1 = " + std::to_string(dim_ + 1) + " observations, got " +
                             std::to_string(count_));
    const Matrix scm = sample_covariance(*this);
    double scale = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) scale = std::max(scale, scm(i, i));
    Matrix l;
    try {
        l = cholesky(scm);
    } catch (const NotPositiveDefinite&) {
        throw DegenerateData("data matrix does not have full column rank");
    }
    for (std::size_t i = 0; i < dim_; ++i)
        if (l(i, i) * l(i, i) <= 1e-13 * scale) throw DegenerateData("data matrix does not have full column rank");
}

Matrix sample_covariance(const SampleSet& data) {
    Matrix s(data.dim(), data.dim());
    for (std::size_t i = 0; i < data.size(); ++i) add_outer(s, data.row(i), 1.0);
    s *= 1.0 / static_cast<double>(data.size());
    return s;
}

std::vector<double> quadratic_forms(const SpdMatrix& m, const SampleSet& data) {
    if (m.dim() != data.dim()) throw DimensionMismatch("scatter and data dimensions differ");
    std::vector<double> y(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        y[i] = quadratic_form(m, data.row(i));
        if (!(y[i] >= kMinQuadraticForm))
            throw DegenerateData("quadratic form of row " + std::to_string(i) + " underflows", i);
    }
    return y;
}

MggdParams::MggdParams(SpdMatrix scatter, double scale, double shape)
    : scatter_(std::move(scatter)), scale_(scale), shape_(shape) {
    const double p = static_cast<double>(scatter_.dim());
    if (std::abs(scatter_.trace() - p) > 1e-9)
        throw InvalidArgument("scatter matrix must have trace p");
    if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw InvalidArgument("scale m must be positive and finite");
    if (!(shape_ > 0.0 && shape_ <= 1.0)) throw InvalidArgument("shape beta must lie in (0, 1]");
}

double log_density_generator(double y, double m, double beta, std::size_t p) {
    if (!(y >= 0.0)) throw InvalidArgument("density generator needs y >= 0");
    if (!(m > 0.0)) throw InvalidArgument("density generator needs m > 0");
    if (!(beta > 0.0)) throw InvalidArgument("density generator needs beta > 0");
    const double pd = static_cast<double>(p);
    const double a = pd / (2.0 * beta);
    const double log_norm = std::log(beta) + log_gamma(0.5 * pd) - 0.5 * pd * std::log(std::numbers::pi) -
                            log_gamma(a) - a * std::numbers::ln2 - 0.5 * pd * std::log(m);
    // y^beta / m^beta evaluated as (y/m)^beta
    return log_norm - 0.5 * std::pow(y / m, beta);
}

double density_generator(double y, double m, double beta, std::size_t p) {
    return std::exp(log_density_generator(y, m, beta, p));
}

double log_pdf(std::span<const double> x, const MggdParams& params) {
    const SpdMatrix& m = params.scatter();
    const double y = quadratic_form(m, x);
    return -0.5 * m.log_det() + log_density_generator(y, params.scale(), params.shape(), m.dim());
}

double log_likelihood(const SampleSet& data, const MggdParams& params) {
    if (data.dim() != params.dim()) throw DimensionMismatch("data and parameter dimensions differ");
    double s = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) s += log_pdf(data.row(i), params);
    return s;
}

double log_profile_objective(const SpdMatrix& m, const SampleSet& data, double beta) {
    if (data.size() == 0) throw DegenerateData("empty sample set");
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
    const auto y = quadratic_forms(m, data);
    std::vector<double> terms(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) terms[i] = beta * std::log(y[i]);
    const double p = static_cast<double>(m.dim());
    return -m.log_det() - (p / beta) * log_sum_exp(terms);
}

}  // namespace mggd
