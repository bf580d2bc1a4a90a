#pragma once

// Maximum-likelihood estimation of MGGD parameters.
//
// The scatter matrix solves the fixed-point equation M = f(M) where
//
//   f(M) = p / S * sum_i x_i x_i^T / y_i^(1 - beta),
//   y_i  = x_i^T M^{-1} x_i,   S = sum_j y_j^beta.
//
// f is homogeneous of degree one, so solutions form a ray; the iteration
// M'_{k+1} = normalize_trace(f(M'_k)) picks the point with Tr(M) = p. The
// scale follows in closed form from M and beta, and the shape solves
// alpha(beta) = 0, where alpha is -beta times the derivative of the profile
// log-likelihood in beta.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mggd/model.hpp"

namespace mggd {

// Starting point of the scatter recursion. Every option is trace-normalized
// before the first step.
class Initializer {
public:
    enum class Kind { Identity, ScaledScm, UserSupplied };

    static Initializer identity() { return Initializer(Kind::Identity, std::nullopt); }
    static Initializer scaled_scm() { return Initializer(Kind::ScaledScm, std::nullopt); }
    static Initializer user(SpdMatrix m) { return Initializer(Kind::UserSupplied, std::move(m)); }

    Kind kind() const noexcept { return kind_; }
    const std::optional<SpdMatrix>& matrix() const noexcept { return matrix_; }

    // The raw (unnormalized) starting matrix for this data set.
    SpdMatrix initial_matrix(const SampleSet& data) const;

private:
    Initializer(Kind k, std::optional<SpdMatrix> m) : kind_(k), matrix_(std::move(m)) {}
    Kind kind_;
    std::optional<SpdMatrix> matrix_;
};

struct FitOptions {
    double tol_c = 1e-6;
    int max_iter = 100;
    // Set for known-shape fits; the beta update is skipped.
    std::optional<double> beta_fixed;
    double beta_init = 0.5;
    Initializer init = Initializer::scaled_scm();
    double newton_max_step = 0.2;
    double beta_min = kBetaMin;
    double beta_max = kBetaMax;

    // Throws InvalidArgument on inconsistent settings.
    void validate() const;
};

struct FitReport {
    SpdMatrix scatter;        // trace p
    double scale = 0.0;       // m
    double beta = 0.0;
    int iterations = 0;
    std::vector<double> c_trace;  // C(k), one entry per scatter update
    double alpha_residual = 0.0;  // |alpha(beta)| at the returned estimate
    bool converged = false;
    double objective = 0.0;       // log F at the returned scatter
};

// One application of the fixed-point map. Throws DegenerateData when some
// y_i underflows, InvalidArgument for beta outside (0, 1).
SpdMatrix fp_map(const SpdMatrix& m, const SampleSet& data, double beta);

// Closed-form scale [beta/(pN) sum y_i^beta]^(1/beta).
double estimate_scale(const SpdMatrix& m, const SampleSet& data, double beta);

// Shape likelihood equation and its analytic derivative in beta. Both are
// invariant under y -> c y.
double alpha_equation(double beta, std::span<const double> y, std::size_t p);
double alpha_derivative(double beta, std::span<const double> y, std::size_t p);

// beta - alpha/alpha' with the step clipped to +-newton_max_step and the
// result clamped to [beta_min, beta_max]. Throws ZeroDerivative when
// |alpha'| < 1e-12.
double newton_beta_step(double beta, std::span<const double> y, std::size_t p, const FitOptions& opts);

// Root of alpha by bisection on the first sign change found in a 16-point
// scan of [beta_min, beta_max]. Empty when no sign change exists.
std::optional<double> bisect_beta(std::span<const double> y, std::size_t p, const FitOptions& opts);

// Trace-normalized fixed-point recursion for known beta. A non-converged
// run still returns the last iterate with converged = false.
FitReport fit_scatter_fp(const SampleSet& data, double beta, const FitOptions& opts);

// Joint estimation: per outer iteration one normalized scatter update
// followed by one Newton step on beta, then the scale. With
// opts.beta_fixed set this is exactly fit_scatter_fp.
FitReport fit_joint(const SampleSet& data, const FitOptions& opts);

// Relative Frobenius steps ||A_{k+1} - A_k|| / ||A_k||. Throws EmptyTrace
// for fewer than two matrices.
std::vector<double> convergence_criteria(std::span<const Matrix> trace);

// One step of the recursion on Sigma = m M without normalization:
// Sigma' = (beta/N) sum x_i x_i^T / (x_i^T Sigma^{-1} x_i)^(1 - beta).
SpdMatrix sigma_map(const SpdMatrix& sigma, const SampleSet& data, double beta);

}  // namespace mggd
