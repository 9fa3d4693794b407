#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracdiff/frac_order.hpp"

namespace fracdiff::spaceop {

/// Periodic 1-D lattice x_m = m h on a torus of circumference L.
class SpaceGrid {
public:
    SpaceGrid(double L, long Nx);

    double L() const noexcept { return L_; }
    long Nx() const noexcept { return Nx_; }
    double h() const noexcept { return h_; }
    int n() const noexcept { return 1; }
    double node(long m) const noexcept { return static_cast<double>(m) * h_; }

private:
    double L_;
    long Nx_;
    double h_;
};

enum class KernelMode { TruncatedFractional, FullFractional, Tabulated };

/// Scalar factor m(t) applied to the kernel, evaluated at
/// time_offset + time_scale * t (clamped from below by freeze_before).
struct TimeMultiplier {
    enum class Kind { Constant, Sinusoid };
    Kind kind = Kind::Constant;
    double value = 1.0;      ///< Constant: the factor; Sinusoid: the mean
    double amplitude = 0.0;  ///< Sinusoid only
    double omega = 0.0;
    double phase = 0.0;
    double time_offset = 0.0;
    double time_scale = 1.0;
    std::optional<double> freeze_before;  ///< m(t) = m(freeze_before) for earlier t

    double operator()(double t) const;
    bool is_constant() const noexcept { return kind == Kind::Constant || amplitude == 0.0; }
};

/// Tabulated profile g: K(d) = g(d) d^{-(1+sigma)} for d <= support.
/// g is piecewise linear through the knots and constant beyond them.
struct KernelTable {
    std::vector<double> distances;  ///< strictly increasing, positive
    std::vector<double> factors;    ///< g at each knot, >= 0
    double operator()(double d) const;
};

struct KernelSpec {
    double sigma = 1.0;
    double Lambda = 1.0;
    KernelMode mode = KernelMode::FullFractional;
    double period = 8.0;              ///< torus circumference the kernel is periodized on
    double truncation_radius = 3.0;   ///< support radius for Truncated/Tabulated
    double lower_radius = 3.0;        ///< radius of the lower ellipticity bound
    KernelTable table;
    TimeMultiplier multiplier;

    /// Throws DomainError on out-of-range fields.
    void validate() const;
};

std::string to_string(KernelMode mode);
KernelMode kernel_mode_from_string(const std::string& name);

/// Minimal periodic distance of x and y on a torus of length L, in [0, L/2].
double torus_distance(double x, double y, double L);

/// K(t,x,y) from the minimal periodic displacement, summed over periodic images.
double kernel_eval(const KernelSpec& spec, double t, double x, double y);

struct EllipticityViolation {
    double t, x, y, K, lower, upper;
};

struct EllipticityReport {
    std::vector<EllipticityViolation> violations;
    double min_ratio = 0.0;  ///< min of K / (periodized |z|^{-1-sigma})
    double max_ratio = 0.0;
};

/// Deterministic quasi-random check of
///   Lambda^{-1} sum_{|z| <= lower_radius} |z|^{-1-sigma} <= K <= Lambda sum_z |z|^{-1-sigma}
/// (sums over the periodic images z of x - y), t sampled in [0, t_span].
EllipticityReport ellipticity_check(const KernelSpec& spec, long sample_count, double t_span = 10.0);

/// Cell-integrated weights W[m][m'] = int_{cell m'} K(t, x_m, y) dy, self-cell dropped.
class NonlocalOperator {
public:
    NonlocalOperator(SpaceGrid grid, Eigen::MatrixXd weights);

    const SpaceGrid& grid() const noexcept { return grid_; }
    const Eigen::MatrixXd& weights() const noexcept { return W_; }
    /// Row sums of W (the diagonal of -A).
    const Eigen::VectorXd& row_sums() const noexcept { return rows_; }
    /// Dense matrix of the operator A (off-diagonal W, diagonal -row sums).
    Eigen::MatrixXd dense() const;
    NonlocalOperator scaled(double factor) const;

private:
    SpaceGrid grid_;
    Eigen::MatrixXd W_;
    Eigen::VectorXd rows_;
};

NonlocalOperator assemble(const KernelSpec& spec, const SpaceGrid& grid, double t);

/// Weight of the cell at signed offset o (1 <= o < Nx) without time multiplier.
double offset_weight(const KernelSpec& spec, const SpaceGrid& grid, long o);

/// (Aw)_m = sum_{m' != m} W[m][m'] (w_{m'} - w_m).
std::vector<double> apply(const NonlocalOperator& op, std::span<const double> w);

/// 1/2 h sum_{m != m'} W[m][m'] (u_m - u_{m'}) (v_m - v_{m'}) = -h <Au, v>.
double bilinear(const NonlocalOperator& op, std::span<const double> u, std::span<const double> v);

/// K_R(t,x,y) = R^{-(1+sigma)} K(t0 + t / R^{sigma/alpha}, x0 + x/R, x0 + y/R).
/// Kernels are translation invariant, so x0 only fixes the frame.
KernelSpec rescale_kernel(const KernelSpec& spec, double R, double t0, double x0, FracOrder alpha);

}  // namespace fracdiff::spaceop
