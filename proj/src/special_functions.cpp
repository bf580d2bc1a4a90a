#include "mggd/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mggd/errors.hpp"

namespace mggd {

namespace {

void require_positive(double a, const char* who) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument(std::string(who) + ": argument must be positive");
}

}  // namespace

double log_gamma(double a) {
    require_positive(a, "log_gamma");
    return std::lgamma(a);
}

double digamma(double a) {
    require_positive(a, "digamma");
    double shift = 0.0;
    while (a < 10.0) {
        shift -= 1.0 / a;
        a += 1.0;
    }
    // Asymptotic expansion; Bernoulli terms up to B_12.
    const double inv = 1.0 / a;
    const double inv2 = inv * inv;
    const double tail =
        inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * 691.0 / 32760)))));
    return shift + std::log(a) - 0.5 * inv - tail;
}

double trigamma(double a) {
    require_positive(a, "trigamma");
    double shift = 0.0;
    while (a < 10.0) {
        shift += 1.0 / (a * a);
        a += 1.0;
    }
    const double inv = 1.0 / a;
    const double inv2 = inv * inv;
    const double series =
        inv + 0.5 * inv2 +
        inv * inv2 * (1.0 / 6 - inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 * (1.0 / 30 - inv2 * 5.0 / 66))));
    return shift + series;
}

double log_sum_exp(std::span<const double> v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    const double hi = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(hi)) return hi;
    double s = 0.0;
    for (double x : v) s += std::exp(x - hi);
    return hi + std::log(s);
}

}  // namespace mggd
