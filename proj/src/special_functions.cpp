#include "risklab/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace risklab {

namespace {

// Continued fraction for the incomplete beta, modified Lentz method.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 500;
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    constexpr double kFloor = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;

    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFloor) d = kFloor;
    d = 1.0 / d;
    double h = d;

    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFloor) d = kFloor;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFloor) c = kFloor;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFloor) d = kFloor;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFloor) c = kFloor;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double reg_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("reg_incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);

    // Use the symmetry that keeps the continued fraction fast-converging.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("student_t_two_tailed: df must be positive");
    if (!std::isfinite(t)) return 0.0;
    const double x = df / (df + t * t);
    return reg_incomplete_beta(0.5 * df, 0.5, x);
}

double f_tail(double f, double df1, double df2) {
    if (!(df1 > 0.0) || !(df2 > 0.0))
        throw std::invalid_argument("f_tail: degrees of freedom must be positive");
    if (f <= 0.0) return 1.0;
    if (!std::isfinite(f)) return 0.0;
    const double x = df2 / (df2 + df1 * f);
    return reg_incomplete_beta(0.5 * df2, 0.5 * df1, x);
}

}  // namespace risklab
