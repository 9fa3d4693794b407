#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracdiff/march.hpp"

namespace fracdiff::diagnostics {

// ---------------------------------------------------------------- barriers

enum class BarrierKind { Psi, PsiL, PsiBar, PsiLambda, PsiTauLambda, Phi, F1, F2, Eta };

struct BarrierParams {
    double sigma = 1.0;
    double alpha = 0.5;
    double level = 0.0;   ///< L of psi_L
    double lambda = 0.1;  ///< psi_lambda, psi_{tau,lambda}, phi_i
    double tau = 0.25;    ///< exponent of psi_{tau,lambda}
    int i = 0;            ///< index of phi_i, 0..4
};

struct BarrierFamily {
    BarrierKind kind = BarrierKind::Psi;
    BarrierParams params;
};

/// Pointwise value of the chosen cutoff at (t, x); x is a 1-D position and
/// |x| its distance to the origin. F1 ignores t, F2 and Eta ignore x.
/// The psi family requires t <= 0; PsiLambda/Phi require lambda < 1/3.
double barrier_eval(const BarrierFamily& family, double t, double x);

/// p = 2(alpha n + sigma)/(alpha n + (1-alpha) sigma), beta = sigma/(alpha n + sigma).
struct InterpolationExponents {
    double p;
    double beta;
};
InterpolationExponents interpolation_exponent(int n, FracOrder alpha, double sigma);

// ---------------------------------------------------------------- energy

struct EnergyGap {
    double lhs = 0.0;        ///< sum_{j>=1} eps u_j d_eps^alpha u_j
    double squares = 0.0;    ///< alpha eps^{1-alpha} sum_{0<=i<j<=k} (u_j-u_i)^2 / (2 (j-i)^{1+alpha})
    double right_tail = 0.0; ///< eps^{1-alpha}/2 sum_{0<j<k} u_j^2 / (2^{1+alpha} (k-j)^alpha)
    double left_tail = 0.0;  ///< eps^{1-alpha}/2 sum_{0<j<=k} u_j^2 / (2 j^alpha)
    double coupling = 0.0;   ///< -eps^{1-alpha} sum_{0<j<=k} u(a) u_j / j^alpha
    double slack = 0.0;      ///< lhs - (squares + right_tail + left_tail + coupling)
    double scale = 0.0;      ///< sum of magnitudes of all terms
};

/// Discrete integration-by-parts energy estimate for a series with the
/// constant history extension.
EnergyGap energy_decompose_gap(const fractime::TimeSeries& u, FracOrder alpha);

// ---------------------------------------------------------------- De Giorgi

/// Diagnostic frame: t_d = t - T (so the window is [a - T, 0]) and
/// x_d = signed minimal displacement of x from `center` on the torus.
struct Frame {
    double center = 0.0;
};

struct LevelEnergy {
    std::vector<double> levels;  ///< L_k = (1 - 2^{-k}) / 2
    std::vector<double> values;  ///< U_k
    double p = 0.0;              ///< interpolation exponent for the problem's (alpha, sigma)
};

/// U_k = sum over cells (eps h each) of (w - psi_{L_k})_+ + (w - psi_{L_k})_+^2 + 1{w > psi_{L_k}},
/// where psi_{L_k} = L_k + barrier; k = 0..k_max.
LevelEnergy truncation_energy(const march::Trajectory& traj, const BarrierFamily& barrier, int k_max,
                              Frame frame = {});

struct Region {
    double t0, t1;   ///< diagnostic-time interval [t0, t1], t1 <= 0
    double radius;   ///< ball |x_d| < radius
};

enum class Direction { Above, Below };

struct LevelSetMeasure {
    double measure = 0.0;   ///< absolute, units of time x length
    double fraction = 0.0;  ///< measure / |region|
};

/// Measure of {w > cutoff} (or {w < cutoff}) inside the region, each grid cell
/// (t_{j-1}, t_j] x [x_m - h/2, x_m + h/2] weighted by its overlap with the region
/// and tested at its node (t_j, x_m).
LevelSetMeasure level_set_measure(const march::Trajectory& traj, const BarrierFamily& cutoff, const Region& region,
                                  Direction direction, Frame frame = {});

struct OscillationReport {
    double t0 = 0.0, x0 = 0.0, gamma = 0.5, ratio = 2.0;  ///< ratio = sigma / alpha
    std::vector<double> radii;         ///< gamma^k
    std::vector<double> time_extents;  ///< gamma^{k sigma/alpha}
    std::vector<double> osc;           ///< sup - inf over cylinder k (0 when within rounding)
    bool truncated = false;            ///< fewer than `depth` cylinders were usable
    std::string limit;                 ///< why the scan stopped early
    double limiting_scale = 0.0;
};

/// osc_k over the cylinders [t0 - gamma^{k sigma/alpha}, t0] x B_{gamma^k}(x0), k = 0..depth-1.
/// Stops once an extent drops below 2 eps, a radius below 2 h, or a cylinder leaves the domain.
OscillationReport oscillation_scan(const march::Trajectory& traj, double t0, double x0, double gamma, int depth);

struct HolderFit {
    double beta = 0.0;       ///< least-squares slope; +inf when every osc_k vanishes
    double residual = 0.0;   ///< RMS misfit of the line
    double intercept = 0.0;
    int used = 0;
    bool all_zero = false;
    bool dropped_zeros = false;
};

/// Slope of ln osc_k against ln gamma^{k sigma/alpha}.
HolderFit holder_fit(const OscillationReport& report);

/// Closed-form exponent ln(1 - lambda_star/4) / ln(gamma^{sigma/alpha}).
double holder_closed_form(double lambda_star, double gamma, double ratio);

using TestFunction = std::function<double(double t, double x)>;

/// |LHS - RHS| of the weak formulation, every term evaluated on the
/// piecewise-constant extension of the trajectory. The forcing is sampled at
/// nodes; the kernel term uses the assembled operator at each t_j.
double weak_residual(const march::Trajectory& traj, const TestFunction& phi);

/// (1 - r^2)^3 bump of radius L/4 centred at L/2, times 1 + (t - a)/(2 (T - a)).
TestFunction bump_test_function(const march::Problem& problem);

struct QuotientReport {
    double sup = 0.0;        ///< sup |v| / (h eps)^beta
    double seminorm = 0.0;   ///< discrete Holder-beta seminorm in time over lags >= 2 eps
    double shift = 0.0;      ///< h_steps * eps
};

/// v_j(x) = (eta w)(t_j + h eps) - (eta w)(t_j), eta evaluated at (t - a)/(T - a).
QuotientReport difference_quotient_scan(const march::Trajectory& traj, long h_steps, double beta_target);

/// Problem on [a - 5, T]: kernel frozen at its time-a value for t < a and forcing
/// F = f 1{t > a} - 1{t <= a} A w0, whose solution is w0 on [a-5, a] and then
/// coincides with the original trajectory. Requires 5/eps to be an integer.
march::Problem backward_extension_problem(const march::Problem& original);

// ---------------------------------------------------------------- oracle

/// Rayleigh quotient -<A phi, phi>/<phi, phi> of phi = cos(2 pi mode x / L); exact
/// eigenvalue because translation-invariant operators on the torus are circulant.
double discrete_eigenvalue(const spaceop::NonlocalOperator& op, int mode);

struct EigenmodeComparison {
    double mu = 0.0;
    double max_rel_error = 0.0;     ///< over nodes t_j >= a + skip * eps
    std::vector<double> times, amplitude, reference;
};

/// Projects every field on cos(2 pi mode x / L), normalizes by the initial
/// projection and compares with the Mittag-Leffler decay curve.
EigenmodeComparison eigenmode_comparison(const march::Trajectory& traj, int mode, long skip = 10);

}  // namespace fracdiff::diagnostics
