#include "fracdiff/spaceop.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracdiff/parallel.hpp"
#include "fracdiff/special.hpp"

namespace fracdiff::spaceop {

SpaceGrid::SpaceGrid(double L, long Nx) : L_(L), Nx_(Nx) {
    if (!std::isfinite(L) || L < 8.0)
        throw DomainError("SpaceGrid: torus length L must be >= 8 (balls up to radius 3 must embed)");
    if (Nx < 8) throw DomainError("SpaceGrid: Nx must be >= 8");
    h_ = L / static_cast<double>(Nx);
}

double TimeMultiplier::operator()(double t) const {
    double tau = time_offset + time_scale * t;
    if (freeze_before && tau < *freeze_before) tau = *freeze_before;
    if (kind == Kind::Constant) return value;
    return value + amplitude * std::sin(omega * tau + phase);
}

double KernelTable::operator()(double d) const {
    if (distances.empty()) return 0.0;
    if (d <= distances.front()) return factors.front();
    if (d >= distances.back()) return factors.back();
    const auto it = std::upper_bound(distances.begin(), distances.end(), d);
    const std::size_t i = static_cast<std::size_t>(it - distances.begin());
    const double d0 = distances[i - 1], d1 = distances[i];
    const double w = (d - d0) / (d1 - d0);
    return (1.0 - w) * factors[i - 1] + w * factors[i];
}

void KernelSpec::validate() const {
    if (!(sigma > 0.0 && sigma < 2.0)) throw DomainError("kernel: sigma must lie in (0,2)");
    if (!(Lambda >= 1.0) || !std::isfinite(Lambda)) throw DomainError("kernel: Lambda must be >= 1");
    if (!(period > 0.0) || !std::isfinite(period)) throw DomainError("kernel: period must be positive");
    if (!(truncation_radius > 0.0)) throw DomainError("kernel: truncation_radius must be positive");
    if (!(lower_radius > 0.0)) throw DomainError("kernel: lower_radius must be positive");
    if (mode == KernelMode::Tabulated) {
        if (table.distances.empty() || table.distances.size() != table.factors.size())
            throw DomainError("kernel: tabulated mode needs equally long, nonempty distances and factors");
        for (std::size_t i = 0; i < table.distances.size(); ++i) {
            if (!(table.distances[i] > 0.0) || (i > 0 && !(table.distances[i] > table.distances[i - 1])))
                throw DomainError("kernel: tabulated distances must be positive and strictly increasing");
            if (!(table.factors[i] >= 0.0) || !std::isfinite(table.factors[i]))
                throw DomainError("kernel: tabulated factors must be finite and >= 0");
        }
    }
    const TimeMultiplier& m = multiplier;
    if (!std::isfinite(m.value) || !std::isfinite(m.amplitude) || !std::isfinite(m.omega) ||
        !std::isfinite(m.phase) || !std::isfinite(m.time_offset) || !std::isfinite(m.time_scale))
        throw DomainError("kernel: multiplier parameters must be finite");
    const double lo = m.kind == TimeMultiplier::Kind::Constant ? m.value : m.value - std::abs(m.amplitude);
    if (!(lo > 0.0)) throw DomainError("kernel: multiplier must stay positive");
}

std::string to_string(KernelMode mode) {
    switch (mode) {
        case KernelMode::TruncatedFractional: return "truncated";
        case KernelMode::FullFractional: return "full";
        case KernelMode::Tabulated: return "tabulated";
    }
    return "unknown";
}

KernelMode kernel_mode_from_string(const std::string& name) {
    if (name == "truncated") return KernelMode::TruncatedFractional;
    if (name == "full") return KernelMode::FullFractional;
    if (name == "tabulated") return KernelMode::Tabulated;
    throw DomainError("unknown kernel mode '" + name + "' (expected truncated, full or tabulated)");
}

double torus_distance(double x, double y, double L) {
    const double d = std::fmod(std::abs(x - y), L);
    return std::min(d, L - d);
}

namespace {

// Periodized full power law sum_n |d + nL|^{-s}, 0 < d < L.
double periodized_power(double s, double d, double L) {
    return std::pow(L, -s) * (special::hurwitz_zeta(s, d / L) + special::hurwitz_zeta(s, 1.0 - d / L));
}

// Calls f(|z|) for every image z = d + nL with |z| <= r.
template <class F>
void for_images_within(double d, double L, double r, F f) {
    const long n0 = static_cast<long>(std::ceil((-r - d) / L));
    const long n1 = static_cast<long>(std::floor((r - d) / L));
    for (long n = n0; n <= n1; ++n) {
        const double z = std::abs(d + static_cast<double>(n) * L);
        if (z <= r && z > 0.0) f(z);
    }
}

double base_kernel(const KernelSpec& spec, double d) {
    const double s = 1.0 + spec.sigma, L = spec.period;
    switch (spec.mode) {
        case KernelMode::FullFractional: return periodized_power(s, d, L);
        case KernelMode::TruncatedFractional: {
            double acc = 0.0;
            for_images_within(d, L, spec.truncation_radius, [&](double z) { acc += std::pow(z, -s); });
            return acc;
        }
        case KernelMode::Tabulated: {
            double acc = 0.0;
            for_images_within(d, L, spec.truncation_radius,
                              [&](double z) { acc += spec.table(z) * std::pow(z, -s); });
            return acc;
        }
    }
    return 0.0;
}

// Positive intervals [p, q] covered by the images of [lo, hi] (0 not inside),
// clipped to |z| <= r (r = +inf for the full kernel).
template <class F>
void for_clipped_images(double lo, double hi, double L, double r, F f) {
    const long n0 = static_cast<long>(std::floor((-r - hi) / L)) - 1;
    const long n1 = static_cast<long>(std::ceil((r - lo) / L)) + 1;
    for (long n = n0; n <= n1; ++n) {
        double a = lo + static_cast<double>(n) * L, b = hi + static_cast<double>(n) * L;
        if (b <= 0.0) {
            const double t = -b;
            b = -a;
            a = t;
        }
        a = std::max(a, 0.0);
        b = std::min(b, r);
        if (b > a) f(a, b);
    }
}

double power_interval(double sigma, double p, double q) {
    return (std::pow(p, -sigma) - std::pow(q, -sigma)) / sigma;
}

double tabulated_interval(const KernelSpec& spec, double p, double q) {
    // Split at knots so the integrand is smooth on each piece.
    std::vector<double> cuts{p};
    for (double d : spec.table.distances)
        if (d > p && d < q) cuts.push_back(d);
    cuts.push_back(q);
    const double s = 1.0 + spec.sigma;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += boost::math::quadrature::gauss<double, 16>::integrate(
            [&](double z) { return spec.table(z) * std::pow(z, -s); }, cuts[i], cuts[i + 1]);
    return acc;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, double t, double x, double y) {
    const double d = torus_distance(x, y, spec.period);
    if (!(d > 1e-14 * spec.period)) throw DomainError("kernel_eval: x = y is the singular point");
    return spec.multiplier(t) * base_kernel(spec, d);
}

EllipticityReport ellipticity_check(const KernelSpec& spec, long sample_count, double t_span) {
    if (sample_count < 1) throw DomainError("ellipticity_check: sample_count must be >= 1");
    spec.validate();
    // Additive recurrence on the 3-D generalized golden ratio.
    constexpr double g = 1.2207440846057596;
    const double q1 = 1.0 / g, q2 = 1.0 / (g * g), q3 = 1.0 / (g * g * g);
    const double s = 1.0 + spec.sigma, L = spec.period;
    EllipticityReport rep;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    rep.max_ratio = 0.0;
    for (long i = 0; i < sample_count; ++i) {
        const double u1 = std::fmod(0.5 + q1 * (i + 1), 1.0);
        const double u2 = std::fmod(0.5 + q2 * (i + 1), 1.0);
        const double u3 = std::fmod(0.5 + q3 * (i + 1), 1.0);
        const double t = t_span * u1, x = L * u2, y = L * u3;
        const double d = torus_distance(x, y, L);
        if (!(d > 1e-9 * L)) continue;
        const double K = kernel_eval(spec, t, x, y);
        double lower = 0.0;
        for_images_within(d, L, spec.lower_radius, [&](double z) { lower += std::pow(z, -s); });
        lower /= spec.Lambda;
        const double full = periodized_power(s, d, L);
        const double upper = spec.Lambda * full;
        rep.min_ratio = std::min(rep.min_ratio, K / full);
        rep.max_ratio = std::max(rep.max_ratio, K / full);
        if (K < lower * (1.0 - 1e-12) || K > upper * (1.0 + 1e-12))
            rep.violations.push_back({t, x, y, K, lower, upper});
    }
    return rep;
}

NonlocalOperator::NonlocalOperator(SpaceGrid grid, Eigen::MatrixXd weights)
    : grid_(grid), W_(std::move(weights)) {
    if (W_.rows() != grid_.Nx() || W_.cols() != grid_.Nx())
        throw DomainError("NonlocalOperator: weight matrix must be Nx x Nx");
    rows_ = Eigen::VectorXd::Zero(grid_.Nx());
    for (long c = 0; c < grid_.Nx(); ++c)
        for (long r = 0; r < grid_.Nx(); ++r)
            if (r != c) rows_(c) += W_(r, c);
}

Eigen::MatrixXd NonlocalOperator::dense() const {
    Eigen::MatrixXd A = W_;
    for (long m = 0; m < grid_.Nx(); ++m) A(m, m) = -rows_(m);
    return A;
}

NonlocalOperator NonlocalOperator::scaled(double factor) const {
    return NonlocalOperator(grid_, W_ * factor);
}

double offset_weight(const KernelSpec& spec, const SpaceGrid& grid, long o) {
    const double h = grid.h(), L = grid.L();
    const double lo = static_cast<double>(o) * h - 0.5 * h, hi = lo + h;
    switch (spec.mode) {
        case KernelMode::FullFractional: {
            const double P1 = lo, P2 = L - hi;
            const double sg = spec.sigma;
            return std::pow(L, -sg) / sg *
                   (special::power_sum_difference(sg, P1 / L, (P1 + h) / L) +
                    special::power_sum_difference(sg, P2 / L, (P2 + h) / L));
        }
        case KernelMode::TruncatedFractional: {
            double acc = 0.0;
            for_clipped_images(lo, hi, L, spec.truncation_radius,
                               [&](double p, double q) { acc += power_interval(spec.sigma, p, q); });
            return acc;
        }
        case KernelMode::Tabulated: {
            double acc = 0.0;
            for_clipped_images(lo, hi, L, spec.truncation_radius,
                               [&](double p, double q) { acc += tabulated_interval(spec, p, q); });
            return acc;
        }
    }
    return 0.0;
}

NonlocalOperator assemble(const KernelSpec& spec, const SpaceGrid& grid, double t) {
    spec.validate();
    if (std::abs(spec.period - grid.L()) > 1e-12 * grid.L())
        throw DomainError("assemble: kernel period does not match the grid length");
    const long N = grid.Nx();
    std::vector<double> w(static_cast<std::size_t>(N), 0.0);
    for (long o = 1; o <= N / 2; ++o) {
        w[static_cast<std::size_t>(o)] = offset_weight(spec, grid, o);
        w[static_cast<std::size_t>(N - o)] = w[static_cast<std::size_t>(o)];
    }
    const double mult = spec.multiplier(t);
    Eigen::MatrixXd W(N, N);
    for (long c = 0; c < N; ++c)
        for (long r = 0; r < N; ++r) W(r, c) = r == c ? 0.0 : mult * w[static_cast<std::size_t>((c - r + N) % N)];
    W = (0.5 * (W + W.transpose())).eval();
    return NonlocalOperator(grid, std::move(W));
}

std::vector<double> apply(const NonlocalOperator& op, std::span<const double> w) {
    const long N = op.grid().Nx();
    if (static_cast<long>(w.size()) != N)
        throw DomainError("apply: field length " + std::to_string(w.size()) + " != Nx " + std::to_string(N));
    std::vector<double> out(static_cast<std::size_t>(N));
    const Eigen::MatrixXd& W = op.weights();
    parallel_for(N, [&](long lo, long hi) {
        for (long m = lo; m < hi; ++m) {
            const double wm = w[static_cast<std::size_t>(m)];
            const double* col = W.col(m).data();  // symmetric: column m == row m
            double acc = 0.0;
            for (long q = 0; q < N; ++q)
                if (q != m) acc += col[q] * (w[static_cast<std::size_t>(q)] - wm);
            out[static_cast<std::size_t>(m)] = acc;
        }
    });
    return out;
}

double bilinear(const NonlocalOperator& op, std::span<const double> u, std::span<const double> v) {
    const long N = op.grid().Nx();
    if (static_cast<long>(u.size()) != N || static_cast<long>(v.size()) != N)
        throw DomainError("bilinear: field length does not match Nx");
    const Eigen::MatrixXd& W = op.weights();
    double acc = 0.0;
    for (long m = 0; m < N; ++m)
        for (long q = 0; q < N; ++q)
            if (q != m)
                acc += W(q, m) * (u[static_cast<std::size_t>(m)] - u[static_cast<std::size_t>(q)]) *
                       (v[static_cast<std::size_t>(m)] - v[static_cast<std::size_t>(q)]);
    return 0.5 * op.grid().h() * acc;
}

KernelSpec rescale_kernel(const KernelSpec& spec, double R, double t0, double x0, FracOrder alpha) {
    (void)x0;
    if (!(R >= 1.0) || !std::isfinite(R)) throw DomainError("rescale_kernel: R must be >= 1");
    KernelSpec out = spec;
    if (R != 1.0) {
        out.period = spec.period * R;
        out.truncation_radius = spec.truncation_radius * R;
        out.lower_radius = spec.lower_radius * R;
        for (double& d : out.table.distances) d *= R;
    }
    out.multiplier.time_offset = spec.multiplier.time_offset + spec.multiplier.time_scale * t0;
    out.multiplier.time_scale = spec.multiplier.time_scale * std::pow(R, -spec.sigma / alpha.value());
    return out;
}

}  // namespace fracdiff::spaceop
