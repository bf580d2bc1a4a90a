#pragma once

// Small dense kernel for symmetric positive-definite matrices. The targeted
// regime is p <= 16, so everything is row-major std::vector storage with
// unblocked loops. Inverses are never formed explicitly.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mggd {

// Dense row-major real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> data() const noexcept { return data_; }

    Matrix transpose() const;
    double trace() const;
    double frobenius_norm() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }
    friend Matrix operator*(const Matrix& a, const Matrix& b);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// this += w * x x^T  (x of length rows()).
void add_outer(Matrix& target, std::span<const double> x, double w);

// ||a - b||_F / ||b||_F
double relative_frobenius_distance(const Matrix& a, const Matrix& b);

// Lower-triangular L with L L^T = a. Throws NotPositiveDefinite when a pivot
// is not strictly positive, DimensionMismatch for non-square input.
Matrix cholesky(const Matrix& a);

// Symmetric positive-definite matrix with its Cholesky factor computed at
// construction. Immutable; safe to share across threads.
class SpdMatrix {
public:
    // Symmetrizes entries that drift by less than 1e-9 (relative), rejects
    // larger asymmetry or non-finite entries with InvalidArgument, and throws
    // NotPositiveDefinite when the factorization fails.
    explicit SpdMatrix(const Matrix& entries);
    SpdMatrix(std::initializer_list<std::initializer_list<double>> rows)
        : SpdMatrix(Matrix(rows)) {}

    static SpdMatrix identity(std::size_t n) { return SpdMatrix(Matrix::identity(n)); }

    std::size_t dim() const noexcept { return entries_.rows(); }
    const Matrix& entries() const noexcept { return entries_; }
    const Matrix& factor() const noexcept { return factor_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

    double trace() const { return entries_.trace(); }
    double log_det() const;

    // Solves M z = b via the cached factor.
    std::vector<double> solve(std::span<const double> b) const;
    // M^{-1} B, column by column.
    Matrix solve(const Matrix& b) const;
    // L^{-1} x, so that ||L^{-1} x||^2 = x^T M^{-1} x.
    void whiten(std::span<const double> x, std::span<double> out) const;

    SpdMatrix scaled(double s) const;

private:
    Matrix entries_;
    Matrix factor_;
};

// x^T M^{-1} x via a single forward substitution.
double quadratic_form(const SpdMatrix& m, std::span<const double> x);

// (p / Tr M) M. Requires Tr M > 0.
SpdMatrix normalize_trace(const SpdMatrix& m);

// M(i, j) = rho^|i-j|. Throws InvalidArgument for rho outside [0, 1) or p < 1.
SpdMatrix toeplitz_rho(std::size_t p, double rho);

// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi).
double min_eigenvalue(const Matrix& symmetric);

// true iff lambda_min(a - b) >= -tol.
bool loewner_geq(const Matrix& a, const Matrix& b, double tol);

// Any A with A A^T = S; returns the Cholesky factor.
Matrix factor_sqrt(const SpdMatrix& s);

}  // namespace mggd
