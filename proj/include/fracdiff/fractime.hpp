#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fracdiff/frac_order.hpp"

namespace fracdiff::fractime {

/// Uniform lattice a = t_0 < t_1 < ... < t_k = T.
class TimeGrid {
public:
    TimeGrid(double a, double T, long k);

    double a() const noexcept { return a_; }
    double T() const noexcept { return T_; }
    long k() const noexcept { return k_; }
    double eps() const noexcept { return eps_; }
    /// t_j = a + j*eps, with t_k returned as T exactly.
    double node(long j) const noexcept { return j == k_ ? T_ : a_ + static_cast<double>(j) * eps_; }

private:
    double a_, T_;
    long k_;
    double eps_;
};

/// How a series is continued outside [a,T].
enum class HistoryExtension { ConstantBeforeA, ZeroBeforeA, EvenReflectAfterT };

/// Node values u_0..u_k; the continuum reading is piecewise constant,
/// u(t) = u_j on (t_{j-1}, t_j].
class TimeSeries {
public:
    TimeSeries(TimeGrid grid, std::vector<double> values,
               HistoryExtension ext = HistoryExtension::ConstantBeforeA);

    const TimeGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    HistoryExtension extension() const noexcept { return ext_; }
    double operator[](long j) const { return values_[static_cast<std::size_t>(j)]; }

private:
    TimeGrid grid_;
    std::vector<double> values_;
    HistoryExtension ext_;
};

/// c_m = m^{-(1+alpha)} for m = 1..j, plus tau = sum_{m>j} m^{-(1+alpha)}
/// when the extension carries an infinite constant history (0 otherwise).
struct CaputoWeights {
    std::vector<double> c;
    double tail = 0.0;
};

/// Weights of the discrete derivative at node j (j >= 1). The tail is
/// accurate far below tail_tol; tail_tol only has to be positive.
CaputoWeights caputo_weights(FracOrder alpha, long j, HistoryExtension ext, double tail_tol = 1e-12);

/// zeta(1+alpha): the j-independent total weight sum_m c_m + tau_j.
double caputo_total_weight(FracOrder alpha);

/// alpha eps^{-alpha} [ (sum c_m + tail) u_j - sum c_m u_{j-m} - tail u_0 ]
/// with u_{j-m} = 0 for j-m < 0 outside the ConstantBeforeA extension.
/// `u` holds u_0..u_j (at least j+1 values).
double discrete_caputo(std::span<const double> u, const CaputoWeights& w, double eps, FracOrder alpha);

/// Discrete rescaled Caputo derivative of a series at node j, 1 <= j <= k.
double discrete_caputo(const TimeSeries& u, FracOrder alpha, long j);

using ScalarFn = std::function<double(double)>;

/// Rescaled Caputo derivative at t from the regularized form
///   (u(t)-u(a))/(t-a)^alpha + alpha int_a^t (u(t)-u(s))/(t-s)^{1+alpha} ds
/// with M cells: the divided difference (u(t)-u(s))/(t-s) is sampled at cell
/// midpoints and multiplied by the exact cell integral of alpha (t-s)^{-alpha}.
/// Exact for affine u; s = t is never evaluated.
double caputo_quadrature(const ScalarFn& u, FracOrder alpha, double a, double t, long M);

struct BarrierBound {
    double min_full = 0.0;      ///< min over nodes in (a,0) with the true history of h before a
    double argmin_full = 0.0;   ///< node where min_full is attained
    double min_anchored = 0.0;  ///< same, but history frozen at h(a) (ConstantBeforeA)
    double reference_c = 0.0;   ///< c = -d^alpha h(-1), history from -infinity, by quadrature
    bool monotone_ok = true;    ///< derivative nonincreasing in t on nodes t <= -1
};

/// Lower bound of the discrete derivative of h(t) = max(|t|^nu - 1, 0) over
/// nodes a < t < 0. Requires 0 < nu < alpha and a < -1.
BarrierBound barrier_bound_check(double nu, FracOrder alpha, const TimeGrid& grid);

/// -d^alpha h(-1) for h(t) = max(|t|^nu - 1, 0) with history from -infinity.
double barrier_reference_constant(double nu, FracOrder alpha);

/// |LHS - RHS| of the Caputo integration-by-parts identity on [a,T] for C^1
/// functions g, h, every integral evaluated at resolution M.
double ibp_defect(const ScalarFn& g, const ScalarFn& h, FracOrder alpha, double a, double T, long M);

struct EnergyPair {
    double extended = 0.0;  ///< Gagliardo energy of the zero/even-reflected extension over R x R
    double bound = 0.0;     ///< 8 (one-sided energy on [a,T] + int u^2/(t-a)^alpha)
};

/// Both sides of the extension energy inequality for the piecewise-constant
/// extension of u, integrated exactly cell by cell.
EnergyPair extension_energy_ratio(const TimeSeries& u, FracOrder alpha);

}  // namespace fracdiff::fractime
