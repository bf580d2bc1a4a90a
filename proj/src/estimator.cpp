#include "mggd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mggd/errors.hpp"
#include "mggd/special_functions.hpp"

namespace mggd {

namespace {

void require_open_unit(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
}

void require_positive_y(std::span<const double> y) {
    if (y.empty()) throw DegenerateData("no observations");
    for (std::size_t i = 0; i < y.size(); ++i)
        if (!(y[i] >= kMinQuadraticForm))
            throw DegenerateData("quadratic form of row " + std::to_string(i) + " underflows", i);
}

// Sums shared by alpha and alpha': with l_i = ln y_i - mean(ln y) and
// w_i = softmax(beta l_i), returns L = log sum exp(beta l_i), the weighted
// mean A and weighted variance V of l.
struct ShapeSums {
    double log_sum;
    double mean;
    double var;
};

ShapeSums shape_sums(double beta, std::span<const double> y) {
    std::vector<double> l(y.size());
    double centre = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        l[i] = std::log(y[i]);
        centre += l[i];
    }
    centre /= static_cast<double>(y.size());
    std::vector<double> t(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        l[i] -= centre;
        t[i] = beta * l[i];
    }
    const double lse = log_sum_exp(t);
    double mean = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) mean += std::exp(t[i] - lse) * l[i];
    double var = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = l[i] - mean;
        var += std::exp(t[i] - lse) * d * d;
    }
    return {lse, mean, var};
}

FitReport finish_report(const SampleSet& data, SpdMatrix scatter, double beta, std::vector<double> c_trace,
                        bool converged) {
    const auto y = quadratic_forms(scatter, data);
    FitReport r{.scatter = scatter,
                .scale = estimate_scale(scatter, data, beta),
                .beta = beta,
                .iterations = static_cast<int>(c_trace.size()),
                .c_trace = std::move(c_trace),
                .alpha_residual = std::abs(alpha_equation(beta, y, data.dim())),
                .converged = converged,
                .objective = log_profile_objective(scatter, data, beta)};
    return r;
}

}  // namespace

SpdMatrix Initializer::initial_matrix(const SampleSet& data) const {
    switch (kind_) {
        case Kind::Identity:
            return SpdMatrix::identity(data.dim());
        case Kind::ScaledScm:
            return SpdMatrix(sample_covariance(data));
        case Kind::UserSupplied:
            if (!matrix_ || matrix_->dim() != data.dim())
                throw DimensionMismatch("initial matrix dimension does not match the data");
            return *matrix_;
    }
    throw InvalidArgument("unknown initializer");
}

void FitOptions::validate() const {
    if (!(tol_c > 0.0)) throw InvalidArgument("tol_c must be positive");
    if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
    if (!(beta_min > 0.0 && beta_min < beta_max && beta_max < 1.0))
        throw InvalidArgument("beta clamp range must satisfy 0 < beta_min < beta_max < 1");
    if (!(beta_init >= beta_min && beta_init <= beta_max))
        throw InvalidArgument("beta_init must lie inside the beta clamp range");
    if (beta_fixed && !(*beta_fixed >= beta_min && *beta_fixed <= beta_max))
        throw InvalidArgument("beta_fixed must lie inside the beta clamp range");
    if (!(newton_max_step > 0.0)) throw InvalidArgument("newton_max_step must be positive");
}

SpdMatrix fp_map(const SpdMatrix& m, const SampleSet& data, double beta) {
    require_open_unit(beta);
    const auto y = quadratic_forms(m, data);
    std::vector<double> logy(y.size());
    std::vector<double> t(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        logy[i] = std::log(y[i]);
        t[i] = beta * logy[i];
    }
    const double log_s = log_sum_exp(t);
    const double p = static_cast<double>(m.dim());
    Matrix out(m.dim(), m.dim());
    for (std::size_t i = 0; i < y.size(); ++i)
        add_outer(out, data.row(i), p * std::exp(-log_s - (1.0 - beta) * logy[i]));
    return SpdMatrix(out);
}

double estimate_scale(const SpdMatrix& m, const SampleSet& data, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in (0, 1]");
    const auto y = quadratic_forms(m, data);
    std::vector<double> t(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) t[i] = beta * std::log(y[i]);
    const double pn = static_cast<double>(m.dim() * data.size());
    return std::exp((std::log(beta / pn) + log_sum_exp(t)) / beta);
}

double alpha_equation(double beta, std::span<const double> y, std::size_t p) {
    require_open_unit(beta);
    require_positive_y(y);
    const double pd = static_cast<double>(p);
    const double n = static_cast<double>(y.size());
    const double c = 0.5 * pd * n;
    const double a = pd / (2.0 * beta);
    const auto s = shape_sums(beta, y);
    return c * s.mean - (c / beta) * (digamma(a) + std::numbers::ln2) - n -
           (c / beta) * (std::log(beta) - std::log(pd * n) + s.log_sum);
}

double alpha_derivative(double beta, std::span<const double> y, std::size_t p) {
    require_open_unit(beta);
    require_positive_y(y);
    const double pd = static_cast<double>(p);
    const double n = static_cast<double>(y.size());
    const double c = 0.5 * pd * n;
    const double a = pd / (2.0 * beta);
    const double b2 = beta * beta;
    const auto s = shape_sums(beta, y);
    return c * s.var + (c / b2) * (digamma(a) + std::numbers::ln2) + (c * a / b2) * trigamma(a) +
           (c / b2) * (std::log(beta) - std::log(pd * n) + s.log_sum) - c / b2 - (c / beta) * s.mean;
}

double newton_beta_step(double beta, std::span<const double> y, std::size_t p, const FitOptions& opts) {
    const double f = alpha_equation(beta, y, p);
    const double df = alpha_derivative(beta, y, p);
    if (!(std::abs(df) >= 1e-12)) throw ZeroDerivative("shape equation has a vanishing derivative");
    const double step = std::clamp(f / df, -opts.newton_max_step, opts.newton_max_step);
    return std::clamp(beta - step, opts.beta_min, opts.beta_max);
}

std::optional<double> bisect_beta(std::span<const double> y, std::size_t p, const FitOptions& opts) {
    constexpr int kScan = 16;
    double lo = opts.beta_min;
    double f_lo = alpha_equation(lo, y, p);
    for (int k = 1; k < kScan; ++k) {
        const double hi = opts.beta_min + (opts.beta_max - opts.beta_min) * k / (kScan - 1);
        const double f_hi = alpha_equation(hi, y, p);
        if (f_lo == 0.0) return lo;
        if ((f_lo < 0.0) != (f_hi < 0.0)) {
            double a = lo, b = hi, fa = f_lo;
            for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = alpha_equation(mid, y, p);
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            return 0.5 * (a + b);
        }
        lo = hi;
        f_lo = f_hi;
    }
    return std::nullopt;
}

FitReport fit_scatter_fp(const SampleSet& data, double beta, const FitOptions& opts) {
    opts.validate();
    if (!(beta >= opts.beta_min && beta <= opts.beta_max))
        throw InvalidArgument("beta must lie inside the clamp range");
    data.require_estimable();

    SpdMatrix current = normalize_trace(opts.init.initial_matrix(data));
    std::vector<double> c_trace;
    bool converged = false;
    for (int k = 0; k < opts.max_iter; ++k) {
        SpdMatrix next = normalize_trace(fp_map(current, data, beta));
        const double c = relative_frobenius_distance(next.entries(), current.entries());
        c_trace.push_back(c);
        current = std::move(next);
        if (c < opts.tol_c) {
            converged = true;
            break;
        }
    }
    return finish_report(data, std::move(current), beta, std::move(c_trace), converged);
}

FitReport fit_joint(const SampleSet& data, const FitOptions& opts) {
    opts.validate();
    if (opts.beta_fixed) return fit_scatter_fp(data, *opts.beta_fixed, opts);
    data.require_estimable();

    SpdMatrix current = normalize_trace(opts.init.initial_matrix(data));
    double beta = opts.beta_init;
    std::vector<double> c_trace;
    bool converged = false;
    for (int k = 0; k < opts.max_iter; ++k) {
        SpdMatrix next = normalize_trace(fp_map(current, data, beta));
        const double c = relative_frobenius_distance(next.entries(), current.entries());
        c_trace.push_back(c);
        current = std::move(next);

        const auto y = quadratic_forms(current, data);
        double beta_next;
        try {
            beta_next = newton_beta_step(beta, y, data.dim(), opts);
        } catch (const ZeroDerivative&) {
            const auto root = bisect_beta(y, data.dim(), opts);
            if (!root) break;
            beta_next = *root;
        }
        const double beta_step = std::abs(beta_next - beta);
        beta = beta_next;
        if (c < opts.tol_c && beta_step < opts.tol_c) {
            converged = true;
            break;
        }
    }
    return finish_report(data, std::move(current), beta, std::move(c_trace), converged);
}

std::vector<double> convergence_criteria(std::span<const Matrix> trace) {
    if (trace.size() < 2) throw EmptyTrace("convergence criteria need at least two iterates");
    std::vector<double> out;
    out.reserve(trace.size() - 1);
    for (std::size_t k = 0; k + 1 < trace.size(); ++k)
        out.push_back(relative_frobenius_distance(trace[k + 1], trace[k]));
    return out;
}

SpdMatrix sigma_map(const SpdMatrix& sigma, const SampleSet& data, double beta) {
    require_open_unit(beta);
    const auto y = quadratic_forms(sigma, data);
    Matrix out(sigma.dim(), sigma.dim());
    const double scale = beta / static_cast<double>(data.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        add_outer(out, data.row(i), scale * std::exp(-(1.0 - beta) * std::log(y[i])));
    return SpdMatrix(out);
}

}  // namespace mggd
