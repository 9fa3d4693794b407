#pragma once

#include <span>
#include <vector>

#include "fracdiff/frac_order.hpp"

namespace fracdiff::special {

struct MLResult {
    double value = 0.0;
    int terms_used = 0;
    double error_bound = 0.0;
};

/// Largest |z| accepted by mittag_leffler.
inline constexpr double kMittagLefflerMaxAbsZ = 30.0;

/// E_alpha(z) for real z <= 0 with |z| <= 30 by direct series summation.
/// The series alternates with huge intermediate terms, so it is summed in
/// multiprecision whenever double would lose the requested accuracy.
/// Throws RegimeError for |z| > 30, and also for small alpha where the
/// cancelling series would need more than about a second of multiprecision work
/// (e.g. alpha = 0.2 beyond |z| ~ 3, alpha = 0.35 beyond |z| ~ 10).
MLResult mittag_leffler(FracOrder alpha, double z);

/// u(t) = E_alpha(-(mu / Gamma(1-alpha)) (t-a)^alpha): exact solution of the
/// rescaled-Caputo eigen-ODE d^alpha u = -mu u with u(a) = 1.
std::vector<double> eigenmode_reference(FracOrder alpha, double mu, double a,
                                        std::span<const double> times);

// Power sums used by the discrete Caputo tails and the periodized kernels.
// All use direct summation to X >= 16 followed by an Euler-Maclaurin remainder
// with five Bernoulli corrections (relative error far below 1e-15).

/// Hurwitz zeta  sum_{m>=0} (m+q)^{-s},  s > 1, q > 0.
double hurwitz_zeta(double s, double q);

/// sum_{m>=0} [(m+q1)^{-s} - (m+q2)^{-s}], any s > 0, q1, q2 > 0.
double power_sum_difference(double s, double q1, double q2);

/// Tail sum_{m>j} m^{-s} for s > 1, j >= 0.
inline double zeta_tail(double s, long j) { return hurwitz_zeta(s, static_cast<double>(j) + 1.0); }

}  // namespace fracdiff::special
