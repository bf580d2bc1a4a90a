#include "mggd/spd_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mggd/errors.hpp"

namespace mggd {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionMismatch("ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionMismatch("matrix sum");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionMismatch("matrix difference");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

void add_outer(Matrix& target, std::span<const double> x, double w) {
    const std::size_t n = target.rows();
    if (x.size() != n || !target.square()) throw DimensionMismatch("outer product update");
    for (std::size_t i = 0; i < n; ++i) {
        const double wxi = w * x[i];
        for (std::size_t j = 0; j < n; ++j) target(i, j) += wxi * x[j];
    }
}

double relative_frobenius_distance(const Matrix& a, const Matrix& b) {
    return (a - b).frobenius_norm() / b.frobenius_norm();
}

Matrix cholesky(const Matrix& a) {
    if (!a.square()) throw DimensionMismatch("cholesky of a non-square matrix");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0))
            throw NotPositiveDefinite("cholesky: non-positive pivot at column " + std::to_string(j));
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

SpdMatrix::SpdMatrix(const Matrix& entries) : entries_(entries) {
    if (!entries_.square() || entries_.rows() == 0)
        throw DimensionMismatch("SPD matrix must be square and non-empty");
    const std::size_t n = entries_.rows();
    for (double v : entries_.data())
        if (!std::isfinite(v)) throw InvalidArgument("SPD matrix has non-finite entries");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = entries_(i, j);
            const double b = entries_(j, i);
            if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a)))
                throw InvalidArgument("matrix is not symmetric");
            const double mean = 0.5 * (a + b);
            entries_(i, j) = mean;
            entries_(j, i) = mean;
        }
    factor_ = cholesky(entries_);
}

double SpdMatrix::log_det() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += std::log(factor_(i, i));
    return 2.0 * s;
}

void SpdMatrix::whiten(std::span<const double> x, std::span<double> out) const {
    const std::size_t n = dim();
    if (x.size() != n || out.size() != n) throw DimensionMismatch("vector length does not match matrix");
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= factor_(i, k) * out[k];
        out[i] = s / factor_(i, i);
    }
}

std::vector<double> SpdMatrix::solve(std::span<const double> b) const {
    const std::size_t n = dim();
    std::vector<double> z(n);
    whiten(b, z);
    // back substitution with L^T
    for (std::size_t ii = n; ii-- > 0;) {
        double s = z[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= factor_(k, ii) * z[k];
        z[ii] = s / factor_(ii, ii);
    }
    return z;
}

Matrix SpdMatrix::solve(const Matrix& b) const {
    if (b.rows() != dim()) throw DimensionMismatch("solve: row count does not match");
    Matrix out(b.rows(), b.cols());
    std::vector<double> col(b.rows());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
        const auto z = solve(col);
        for (std::size_t i = 0; i < b.rows(); ++i) out(i, j) = z[i];
    }
    return out;
}

SpdMatrix SpdMatrix::scaled(double s) const { return SpdMatrix(entries_ * s); }

double quadratic_form(const SpdMatrix& m, std::span<const double> x) {
    if (x.size() != m.dim()) throw DimensionMismatch("quadratic_form: vector length does not match matrix");
    double buf[16];
    std::vector<double> heap;
    std::span<double> z;
    if (x.size() <= 16) {
        z = std::span<double>(buf, x.size());
    } else {
        heap.resize(x.size());
        z = heap;
    }
    m.whiten(x, z);
    double s = 0.0;
    for (double v : z) s += v * v;
    return s;
}

SpdMatrix normalize_trace(const SpdMatrix& m) {
    const double p = static_cast<double>(m.dim());
    const double tr = m.trace();
    if (!(tr > 0.0)) throw InvalidArgument("normalize_trace: trace must be positive");
    // Already at trace p up to rounding: keep the exact bits so the operation
    // is idempotent.
    if (std::abs(tr - p) <= 4.0 * std::numeric_limits<double>::epsilon() * p) return m;
    return m.scaled(p / tr);
}

SpdMatrix toeplitz_rho(std::size_t p, double rho) {
    if (p < 1) throw InvalidArgument("toeplitz_rho: p must be at least 1");
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("toeplitz_rho: rho must lie in [0, 1)");
    Matrix m(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            m(i, j) = std::pow(rho, static_cast<double>(i > j ? i - j : j - i));
    return SpdMatrix(m);
}

double min_eigenvalue(const Matrix& symmetric) {
    if (!symmetric.square()) throw DimensionMismatch("min_eigenvalue of a non-square matrix");
    Matrix a = symmetric;
    const std::size_t n = a.rows();
    if (n == 0) throw DimensionMismatch("min_eigenvalue of an empty matrix");
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                total += a(i, j) * a(i, j);
                if (i != j) off += a(i, j) * a(i, j);
            }
        if (off <= 1e-30 * total || off == 0.0) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    double lo = a(0, 0);
    for (std::size_t i = 1; i < n; ++i) lo = std::min(lo, a(i, i));
    return lo;
}

bool loewner_geq(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("loewner_geq");
    return min_eigenvalue(a - b) >= -tol;
}

Matrix factor_sqrt(const SpdMatrix& s) { return s.factor(); }

}  // namespace mggd
