#include "fracdiff/fractime.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fracdiff/special.hpp"

namespace fracdiff::fractime {

TimeGrid::TimeGrid(double a, double T, long k) : a_(a), T_(T), k_(k) {
    if (!std::isfinite(a) || !std::isfinite(T) || !(T > a))
        throw DomainError("TimeGrid: need finite a < T");
    if (k < 1) throw DomainError("TimeGrid: step count k must be >= 1");
    eps_ = (T - a) / static_cast<double>(k);
}

TimeSeries::TimeSeries(TimeGrid grid, std::vector<double> values, HistoryExtension ext)
    : grid_(grid), values_(std::move(values)), ext_(ext) {
    if (static_cast<long>(values_.size()) != grid_.k() + 1)
        throw DomainError("TimeSeries: expected k+1 = " + std::to_string(grid_.k() + 1) +
                          " values, got " + std::to_string(values_.size()));
    for (double v : values_)
        if (!std::isfinite(v)) throw DomainError("TimeSeries: non-finite value");
}

CaputoWeights caputo_weights(FracOrder alpha, long j, HistoryExtension ext, double tail_tol) {
    if (j < 1) throw DomainError("caputo_weights: j must be >= 1 (no past nodes at j = 0)");
    if (!(tail_tol > 0.0)) throw DomainError("caputo_weights: tail_tol must be positive");
    const double s = 1.0 + alpha.value();
    CaputoWeights w;
    w.c.resize(static_cast<std::size_t>(j));
    for (long m = 1; m <= j; ++m) w.c[static_cast<std::size_t>(m - 1)] = std::pow(static_cast<double>(m), -s);
    if (ext == HistoryExtension::ConstantBeforeA) w.tail = special::zeta_tail(s, j);
    return w;
}

double caputo_total_weight(FracOrder alpha) { return special::hurwitz_zeta(1.0 + alpha.value(), 1.0); }

double discrete_caputo(std::span<const double> u, const CaputoWeights& w, double eps, FracOrder alpha) {
    const std::size_t j = w.c.size();
    if (u.size() < j + 1) throw DomainError("discrete_caputo: history shorter than weight vector");
    const double uj = u[j];
    double acc = w.tail * (uj - u[0]);
    for (std::size_t m = 1; m <= j; ++m) acc += w.c[m - 1] * (uj - u[j - m]);
    return alpha.value() * std::pow(eps, -alpha.value()) * acc;
}

double discrete_caputo(const TimeSeries& u, FracOrder alpha, long j) {
    if (j < 1 || j > u.grid().k()) throw DomainError("discrete_caputo: need 1 <= j <= k");
    const CaputoWeights w = caputo_weights(alpha, j, u.extension());
    return discrete_caputo(std::span<const double>(u.values().data(), static_cast<std::size_t>(j) + 1), w,
                           u.grid().eps(), alpha);
}

double caputo_quadrature(const ScalarFn& u, FracOrder alpha, double a, double t, long M) {
    if (!(t > a)) throw DomainError("caputo_quadrature: need t > a");
    if (M < 2) throw DomainError("caputo_quadrature: resolution M must be >= 2");
    const double al = alpha.value();
    const double ut = u(t);
    const double d = (t - a) / static_cast<double>(M);
    // int_{s0}^{s1} alpha (t-s)^{-alpha} ds = alpha/(1-alpha) [(t-s0)^{1-alpha} - (t-s1)^{1-alpha}]
    const double pref = al / (1.0 - al);
    double acc = 0.0;
    double upper = std::pow(t - a, 1.0 - al);
    for (long i = 0; i < M; ++i) {
        const double s1 = (i + 1 == M) ? t : a + static_cast<double>(i + 1) * d;
        const double sm = a + (static_cast<double>(i) + 0.5) * d;
        const double lower = std::pow(t - s1, 1.0 - al);
        acc += (ut - u(sm)) / (t - sm) * (upper - lower);
        upper = lower;
    }
    return (ut - u(a)) / std::pow(t - a, al) + pref * acc;
}

namespace {

using boost::math::quadrature::gauss_kronrod;

template <class F>
double integrate01(F f) {
    return gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 20, 1e-13);
}

}  // namespace

double barrier_reference_constant(double nu, FracOrder alpha) {
    const double al = alpha.value();
    if (!(nu > 0.0 && nu < al)) throw DomainError("barrier_reference_constant: need 0 < nu < alpha");
    // c = nu int_0^inf (1+r)^{nu-1} r^{-alpha} dr, split at r = 1.
    // [0,1]:   r = x^{1/(1-alpha)}  removes r^{-alpha}.
    // [1,inf): r = x^{-1/(alpha-nu)} turns the algebraic tail into a bounded integrand.
    const double near = integrate01([&](double x) {
        const double r = std::pow(x, 1.0 / (1.0 - al));
        return nu * std::pow(1.0 + r, nu - 1.0) / (1.0 - al);
    });
    const double far = integrate01([&](double x) {
        if (x <= 0.0) return 0.0;
        const double r = std::pow(x, -1.0 / (al - nu));
        return nu * std::pow(1.0 + 1.0 / r, nu - 1.0) / (al - nu);
    });
    return near + far;
}

BarrierBound barrier_bound_check(double nu, FracOrder alpha, const TimeGrid& grid) {
    const double al = alpha.value();
    if (!(nu > 0.0)) throw DomainError("barrier_bound_check: nu must be positive");
    if (!(nu < al)) throw DomainError("barrier_bound_check: requires nu < alpha");
    if (!(grid.a() < -1.0)) throw DomainError("barrier_bound_check: requires a < -1");
    const double eps = grid.eps(), a = grid.a(), s = 1.0 + al;
    const auto h = [nu](double t) { return std::max(std::pow(std::abs(t), nu) - 1.0, 0.0); };

    long jmax = 0;  // last node strictly inside (a, 0)
    while (jmax + 1 <= grid.k() && grid.node(jmax + 1) < -1e-12 * eps) ++jmax;
    if (jmax < 1) throw DomainError("barrier_bound_check: no grid nodes in (a, 0)");

    std::vector<double> hv(static_cast<std::size_t>(jmax) + 1);
    for (long j = 0; j <= jmax; ++j) hv[static_cast<std::size_t>(j)] = h(grid.node(j));
    const CaputoWeights w = caputo_weights(alpha, jmax, HistoryExtension::ConstantBeforeA);
    const double scale = al * std::pow(eps, -al);
    const double ha = hv[0], absa = -a;

    // History of h before a:  -scale * sum_{i>=1} (h(a - i eps) - h(a)) (j+i)^{-s},
    // summed directly for i <= I, then the remainder as an integral from I + 1/2
    // (midpoint-rule view of the sum) after the substitution x = X v^{-p}, which
    // makes the integrand bounded on (0, 1]. Only (j + x)^{-s} depends on j, so a
    // dyadically graded Gauss-Legendre rule is built once and reused for every node.
    constexpr long I = 256;
    std::vector<double> head(static_cast<std::size_t>(I));
    for (long i = 1; i <= I; ++i) head[static_cast<std::size_t>(i - 1)] = std::pow(absa + eps * i, nu) - 1.0 - ha;
    std::vector<double> xq, gq;
    {
        using GL = boost::math::quadrature::gauss<double, 20>;
        const double X = I + 0.5, p = 1.0 / (al - nu);
        const auto add = [&](double v, double wt) {
            const double x = X * std::pow(v, -p);
            xq.push_back(x);
            gq.push_back(wt * (std::pow(absa + eps * x, nu) - 1.0 - ha) * X * p * std::pow(v, -p - 1.0));
        };
        for (int level = 0; level < 40; ++level) {
            const double hi = std::ldexp(1.0, -level), mid = 0.75 * hi, half = hi / 4.0;
            for (std::size_t q = 0; q < GL::abscissa().size(); ++q) {
                const double z = GL::abscissa()[q], wt = GL::weights()[q] * half;
                add(mid + half * z, wt);
                if (z != 0.0) add(mid - half * z, wt);
            }
        }
    }
    const auto history = [&](long j) {
        double acc = 0.0;
        for (long i = I; i >= 1; --i) acc += head[static_cast<std::size_t>(i - 1)] * std::pow(static_cast<double>(j + i), -s);
        for (std::size_t q = 0; q < xq.size(); ++q) acc += gq[q] * std::pow(j + xq[q], -s);
        return -scale * acc;
    };

    BarrierBound out;
    out.min_full = std::numeric_limits<double>::infinity();
    out.min_anchored = std::numeric_limits<double>::infinity();
    double prev_full = std::numeric_limits<double>::infinity();
    for (long j = 1; j <= jmax; ++j) {
        CaputoWeights wj;
        wj.c.assign(w.c.begin(), w.c.begin() + j);
        wj.tail = special::zeta_tail(s, j);
        const double anchored = discrete_caputo(std::span<const double>(hv.data(), static_cast<std::size_t>(j) + 1),
                                                wj, eps, alpha);
        const double full = anchored + history(j);
        out.min_anchored = std::min(out.min_anchored, anchored);
        if (full < out.min_full) {
            out.min_full = full;
            out.argmin_full = grid.node(j);
        }
        if (grid.node(j) <= -1.0 + 1e-12) {
            if (full > prev_full + 1e-12 * std::max(1.0, std::abs(prev_full))) out.monotone_ok = false;
            prev_full = full;
        }
    }
    out.reference_c = barrier_reference_constant(nu, alpha);
    return out;
}

double ibp_defect(const ScalarFn& g, const ScalarFn& h, FracOrder alpha, double a, double T, long M) {
    if (!(T > a)) throw DomainError("ibp_defect: need T > a");
    if (M < 2) throw DomainError("ibp_defect: resolution M must be >= 2");
    const double al = alpha.value(), d = (T - a) / static_cast<double>(M);
    const std::size_t n = static_cast<std::size_t>(M);
    std::vector<double> tm(n), gm(n), hm(n), dg(n), dh(n);
    const double del = d / 4.0;
    for (std::size_t i = 0; i < n; ++i) {
        tm[i] = a + (static_cast<double>(i) + 0.5) * d;
        gm[i] = g(tm[i]);
        hm[i] = h(tm[i]);
        dg[i] = (g(tm[i] + del) - g(tm[i] - del)) / (2.0 * del);
        dh[i] = (h(tm[i] + del) - h(tm[i] - del)) / (2.0 * del);
    }
    const double ga = g(a), ha = h(a);

    // Left side: outer midpoint rule; inner derivatives with cells of width d/2.
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const long inner = 2 * static_cast<long>(i) + 1;
        const double Dh = caputo_quadrature(h, alpha, a, tm[i], std::max(2L, inner));
        const double Dg = caputo_quadrature(g, alpha, a, tm[i], std::max(2L, inner));
        lhs += d * (gm[i] * Dh + hm[i] * Dg);
    }

    // Exact cell integrals of (t-a)^{-alpha} and (T-t)^{-alpha}.
    const auto cell_left = [&](std::size_t i) {
        return (std::pow((i + 1) * d, 1.0 - al) - std::pow(i * d, 1.0 - al)) / (1.0 - al);
    };
    double boundary = 0.0, coupling = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wl = cell_left(i), wr = cell_left(n - 1 - i);
        boundary += gm[i] * hm[i] * (wl + wr);
        coupling += (gm[i] * ha + hm[i] * ga) * wl;
    }

    // alpha int int_{s<t} (dg)(dh) (t-s)^{1-alpha}, with dg, dh divided differences.
    const auto F = [&](double x) { return std::pow(x, 3.0 - al) / ((2.0 - al) * (3.0 - al)); };
    std::vector<double> J(n);
    for (std::size_t D = 1; D < n; ++D) J[D] = F((D + 1) * d) - 2.0 * F(D * d) + F((D - 1) * d);
    double gag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        gag += dg[i] * dh[i] * F(d);  // same-cell pairs s < t
        for (std::size_t q = 0; q < i; ++q) {
            const double dt = tm[i] - tm[q];
            gag += (gm[i] - gm[q]) * (hm[i] - hm[q]) / (dt * dt) * J[i - q];
        }
    }
    const double rhs = boundary + al * gag - coupling;
    return std::abs(lhs - rhs);
}

EnergyPair extension_energy_ratio(const TimeSeries& u, FracOrder alpha) {
    if (u.extension() == HistoryExtension::ConstantBeforeA)
        throw DomainError("extension_energy_ratio: series must be extended by zero before a");
    const double al = alpha.value(), eps = u.grid().eps();
    const long k = u.grid().k();
    const std::size_t nc = static_cast<std::size_t>(2 * k);
    // Cells 1..k carry u_1..u_k; cells k+1..2k the mirror image; zero outside [a, 2T-a].
    std::vector<double> v(nc);
    for (long c = 0; c < k; ++c) {
        v[static_cast<std::size_t>(c)] = u[c + 1];
        v[static_cast<std::size_t>(2 * k - 1 - c)] = u[c + 1];
    }
    // I_D = int_P int_Q |t-s|^{-1-alpha} for cells D apart (D >= 1).
    const auto G = [&](double x) { return std::pow(x, 1.0 - al) / ((-al) * (1.0 - al)); };
    std::vector<double> I(nc);
    for (std::size_t D = 1; D < nc; ++D) I[D] = G((D + 1) * eps) - 2.0 * G(D * eps) + G((D - 1) * eps);
    // Exterior mass of cell c: int_P int_{s outside} |t-s|^{-1-alpha} for one side.
    const auto side = [&](std::size_t c) {
        return (std::pow((c + 1) * eps, 1.0 - al) - std::pow(c * eps, 1.0 - al)) / (al * (1.0 - al));
    };

    double pairs_all = 0.0, pairs_half = 0.0;
    for (std::size_t p = 0; p < nc; ++p)
        for (std::size_t q = 0; q < p; ++q) {
            const double diff = v[p] - v[q];
            const double term = diff * diff * I[p - q];
            pairs_all += term;
            if (p < static_cast<std::size_t>(k)) pairs_half += term;
        }
    double exterior = 0.0, endpoint = 0.0;
    for (std::size_t c = 0; c < nc; ++c) exterior += v[c] * v[c] * (side(c) + side(nc - 1 - c));
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) endpoint += v[c] * v[c] * al * side(c);

    EnergyPair out;
    out.extended = al * (2.0 * pairs_all + 2.0 * exterior);
    out.bound = 8.0 * (al * pairs_half + endpoint);
    return out;
}

}  // namespace fracdiff::fractime
