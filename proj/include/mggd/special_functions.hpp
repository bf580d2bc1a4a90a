#pragma once

#include <span>

namespace mggd {

// ln Gamma(a), a > 0. Throws InvalidArgument otherwise.
double log_gamma(double a);

// Psi(a) = d/da ln Gamma(a), a > 0.
double digamma(double a);

// Psi'(a), a > 0. Needed for the analytic derivative of the shape equation.
double trigamma(double a);

// log(sum_i exp(v_i)) with the max factored out. Empty input gives -inf.
double log_sum_exp(std::span<const double> v);

}  // namespace mggd
