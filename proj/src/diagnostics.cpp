#include "fracdiff/diagnostics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracdiff/parallel.hpp"
#include "fracdiff/special.hpp"

namespace fracdiff::diagnostics {

namespace {

// Signed minimal displacement x - c on a torus of length L, in [-L/2, L/2).
double displacement(double x, double c, double L) {
    double d = std::fmod(x - c, L);
    if (d < -0.5 * L) d += L;
    if (d >= 0.5 * L) d -= L;
    return d;
}

double overlap(double lo, double hi, double a, double b) { return std::max(0.0, std::min(hi, b) - std::max(lo, a)); }

}  // namespace

EnergyGap energy_decompose_gap(const fractime::TimeSeries& u, FracOrder alpha) {
    if (u.extension() != fractime::HistoryExtension::ConstantBeforeA)
        throw DomainError("energy_decompose_gap: series must use the constant history extension");
    const long k = u.grid().k();
    const double al = alpha.value(), eps = u.grid().eps(), s = 1.0 + al;
    const double e1 = std::pow(eps, 1.0 - al);
    EnergyGap g;
    for (long j = 1; j <= k; ++j) g.lhs += eps * u[j] * fractime::discrete_caputo(u, alpha, j);
    std::vector<double> w(static_cast<std::size_t>(k) + 1);
    for (long d = 1; d <= k; ++d) w[static_cast<std::size_t>(d)] = std::pow(static_cast<double>(d), -s);
    double sq = 0.0;
    for (long j = 1; j <= k; ++j)
        for (long i = 0; i < j; ++i) {
            const double diff = u[j] - u[i];
            sq += diff * diff * w[static_cast<std::size_t>(j - i)];
        }
    g.squares = al * e1 * sq / 2.0;
    for (long j = 1; j < k; ++j)
        g.right_tail += u[j] * u[j] / (std::pow(2.0, s) * std::pow(static_cast<double>(k - j), al));
    g.right_tail *= e1 / 2.0;
    for (long j = 1; j <= k; ++j) {
        const double ja = std::pow(static_cast<double>(j), al);
        g.left_tail += u[j] * u[j] / (2.0 * ja);
        g.coupling += u[0] * u[j] / ja;
    }
    g.left_tail *= e1 / 2.0;
    g.coupling *= -e1;
    g.slack = g.lhs - (g.squares + g.right_tail + g.left_tail + g.coupling);
    g.scale = std::abs(g.lhs) + std::abs(g.squares) + std::abs(g.right_tail) + std::abs(g.left_tail) +
              std::abs(g.coupling);
    return g;
}

LevelEnergy truncation_energy(const march::Trajectory& traj, const BarrierFamily& barrier, int k_max, Frame frame) {
    if (k_max < 0) throw DomainError("truncation_energy: k_max must be >= 0");
    const auto& p = traj.problem();
    const double eps = p.tgrid.eps(), h = p.sgrid.h(), T = p.tgrid.T(), L = p.sgrid.L();
    const long k = traj.k(), N = traj.Nx();
    // Barrier values do not depend on the level; evaluate them once.
    std::vector<double> psi(static_cast<std::size_t>(k * N));
    for (long j = 1; j <= k; ++j)
        for (long m = 0; m < N; ++m)
            psi[static_cast<std::size_t>((j - 1) * N + m)] =
                barrier_eval(barrier, p.tgrid.node(j) - T, displacement(p.sgrid.node(m), frame.center, L));
    LevelEnergy out;
    out.p = interpolation_exponent(1, p.alpha, p.kernel.sigma).p;
    for (int q = 0; q <= k_max; ++q) {
        const double level = 0.5 * (1.0 - std::pow(2.0, -q));
        double U = 0.0;
        for (long j = 1; j <= k; ++j)
            for (long m = 0; m < N; ++m) {
                const double v = traj.at(j, m) - level - psi[static_cast<std::size_t>((j - 1) * N + m)];
                if (v > 0.0) U += v + v * v + 1.0;
            }
        out.levels.push_back(level);
        out.values.push_back(U * eps * h);
    }
    return out;
}

LevelSetMeasure level_set_measure(const march::Trajectory& traj, const BarrierFamily& cutoff, const Region& region,
                                  Direction direction, Frame frame) {
    const auto& p = traj.problem();
    const double eps = p.tgrid.eps(), h = p.sgrid.h(), T = p.tgrid.T(), L = p.sgrid.L();
    const double tol = 1e-12 * std::max(1.0, T - p.tgrid.a());
    if (!(region.t1 > region.t0) || !(region.radius > 0.0))
        throw DomainError("level_set_measure: empty region");
    if (region.t0 < p.tgrid.a() - T - tol || region.t1 > tol || region.radius > 0.5 * L)
        throw DomainError("level_set_measure: region exceeds the trajectory's domain");
    LevelSetMeasure out;
    for (long j = 1; j <= traj.k(); ++j) {
        const double td = p.tgrid.node(j) - T;
        const double ot = overlap(td - eps, td, region.t0, region.t1);
        if (ot <= 0.0) continue;
        for (long m = 0; m < traj.Nx(); ++m) {
            const double xd = displacement(p.sgrid.node(m), frame.center, L);
            const double ox = overlap(xd - 0.5 * h, xd + 0.5 * h, -region.radius, region.radius);
            if (ox <= 0.0) continue;
            const double c = barrier_eval(cutoff, td, xd);
            const double w = traj.at(j, m);
            if (direction == Direction::Above ? w > c : w < c) out.measure += ot * ox;
        }
    }
    out.fraction = out.measure / ((region.t1 - region.t0) * 2.0 * region.radius);
    return out;
}

OscillationReport oscillation_scan(const march::Trajectory& traj, double t0, double x0, double gamma, int depth) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("oscillation_scan: gamma must lie in (0,1)");
    if (depth < 1) throw DomainError("oscillation_scan: depth must be >= 1");
    const auto& p = traj.problem();
    const double a = p.tgrid.a(), T = p.tgrid.T(), eps = p.tgrid.eps(), h = p.sgrid.h(), L = p.sgrid.L();
    if (!(t0 > a && t0 <= T + 1e-12 * (T - a))) throw DomainError("oscillation_scan: t0 must lie in (a, T]");
    OscillationReport r;
    r.t0 = t0;
    r.x0 = x0;
    r.gamma = gamma;
    r.ratio = p.kernel.sigma / p.alpha.value();
    const double tol = 1e-12 * (T - a);
    for (int q = 0; q < depth; ++q) {
        const double rad = std::pow(gamma, q), ext = std::pow(gamma, q * r.ratio);
        if (ext < 2.0 * eps * (1.0 - 1e-12)) {
            r.truncated = true;
            r.limit = "time extent below 2 eps";
            r.limiting_scale = ext;
            break;
        }
        if (rad < 2.0 * h * (1.0 - 1e-12)) {
            r.truncated = true;
            r.limit = "radius below 2 h";
            r.limiting_scale = rad;
            break;
        }
        if (t0 - ext < a - tol || rad > 0.5 * L) {
            r.truncated = true;
            r.limit = "cylinder leaves the domain";
            r.limiting_scale = std::max(ext, rad);
            break;
        }
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (long j = 0; j <= traj.k(); ++j) {
            const double t = p.tgrid.node(j);
            if (t < t0 - ext - tol || t > t0 + tol) continue;
            for (long m = 0; m < traj.Nx(); ++m) {
                if (spaceop::torus_distance(p.sgrid.node(m), x0, L) > rad + 1e-12 * L) continue;
                lo = std::min(lo, traj.at(j, m));
                hi = std::max(hi, traj.at(j, m));
            }
        }
        r.radii.push_back(rad);
        r.time_extents.push_back(ext);
        // Spreads at rounding level are zero; otherwise they feed noise into holder_fit.
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
        r.osc.push_back(hi - lo > noise ? hi - lo : 0.0);
    }
    return r;
}

HolderFit holder_fit(const OscillationReport& report) {
    HolderFit fit;
    std::vector<double> X, Y;
    for (std::size_t q = 0; q < report.osc.size(); ++q) {
        if (report.osc[q] > 0.0) {
            X.push_back(static_cast<double>(q) * report.ratio * std::log(report.gamma));
            Y.push_back(std::log(report.osc[q]));
        } else {
            fit.dropped_zeros = true;
        }
    }
    if (!report.osc.empty() && X.empty()) {
        fit.all_zero = true;
        fit.beta = std::numeric_limits<double>::infinity();
        return fit;
    }
    if (X.size() < 3) throw DomainError("holder_fit: needs at least 3 usable scales");
    const double n = static_cast<double>(X.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        mx += X[i];
        my += Y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        sxx += (X[i] - mx) * (X[i] - mx);
        sxy += (X[i] - mx) * (Y[i] - my);
    }
    fit.beta = sxy / sxx;
    fit.intercept = my - fit.beta * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double e = Y[i] - fit.intercept - fit.beta * X[i];
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    fit.used = static_cast<int>(X.size());
    return fit;
}

double holder_closed_form(double lambda_star, double gamma, double ratio) {
    if (!(lambda_star > 0.0 && lambda_star < 4.0)) throw DomainError("holder_closed_form: lambda_star out of range");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("holder_closed_form: gamma must lie in (0,1)");
    return std::log(1.0 - lambda_star / 4.0) / (ratio * std::log(gamma));
}

double weak_residual(const march::Trajectory& traj, const TestFunction& phi) {
    const auto& p = traj.problem();
    const long k = traj.k(), N = traj.Nx();
    const double a = p.tgrid.a(), eps = p.tgrid.eps(), h = p.sgrid.h(), al = p.alpha.value();
    const std::size_t K = static_cast<std::size_t>(k), NN = static_cast<std::size_t>(N);

    // phi at cell midpoints (row j-1 <-> cell (t_{j-1}, t_j]) and at t = a.
    std::vector<double> ph(K * NN), pha(NN), dph(K * NN);
    for (long m = 0; m < N; ++m) pha[static_cast<std::size_t>(m)] = phi(a, p.sgrid.node(m));
    for (long j = 1; j <= k; ++j)
        for (long m = 0; m < N; ++m)
            ph[static_cast<std::size_t>((j - 1) * N + m)] = phi(a + (j - 0.5) * eps, p.sgrid.node(m));
    // Rescaled Caputo derivative of phi at the cell midpoints.
    parallel_for(N, [&](long lo, long hi) {
        for (long m = lo; m < hi; ++m) {
            const double x = p.sgrid.node(m);
            const auto f = [&](double t) { return phi(t, x); };
            for (long j = 1; j <= k; ++j)
                dph[static_cast<std::size_t>((j - 1) * N + m)] =
                    fractime::caputo_quadrature(f, p.alpha, a, a + (j - 0.5) * eps, std::max(2L, 2 * j));
        }
    });

    // Exact cell integrals of (t-a)^{-alpha} and (T-t)^{-alpha}.
    const double e1 = std::pow(eps, 1.0 - al) / (1.0 - al);
    std::vector<double> wl(K), wr(K);
    for (std::size_t j = 1; j <= K; ++j) {
        wl[j - 1] = e1 * (std::pow(static_cast<double>(j), 1.0 - al) - std::pow(static_cast<double>(j - 1), 1.0 - al));
        wr[j - 1] = e1 * (std::pow(static_cast<double>(K - j + 1), 1.0 - al) -
                          std::pow(static_cast<double>(K - j), 1.0 - al));
    }
    // J_D = int_P int_Q (t-s)^{-alpha} for cells D apart.
    const auto F = [&](double x) { return std::pow(x, 2.0 - al) / ((1.0 - al) * (2.0 - al)); };
    std::vector<double> J(K);
    for (std::size_t D = 1; D < K; ++D) J[D] = F((D + 1) * eps) - 2.0 * F(D * eps) + F((D - 1) * eps);

    double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0, t5 = 0.0, rhs = 0.0;
    for (long m = 0; m < N; ++m) {
        const std::size_t mm = static_cast<std::size_t>(m);
        const double w0 = traj.at(0, m);
        const double x = p.sgrid.node(m);
        for (std::size_t j = 1; j <= K; ++j) {
            const double wj = traj.at(static_cast<long>(j), m), pj = ph[(j - 1) * NN + mm];
            t1 += wj * pj * (wl[j - 1] + wr[j - 1]);
            t3 -= (pj * w0 + pha[mm] * wj) * wl[j - 1];
            t4 -= eps * wj * dph[(j - 1) * NN + mm];
            rhs += eps * p.f.fn(p.tgrid.node(static_cast<long>(j)), x) * pj;
            for (std::size_t q = 1; q < j; ++q) {
                const double dw = wj - traj.at(static_cast<long>(q), m);
                if (dw == 0.0) continue;
                const double dp = (pj - ph[(q - 1) * NN + mm]) / (static_cast<double>(j - q) * eps);
                t2 += dw * dp * J[j - q];
            }
        }
    }
    t1 *= h;
    t2 *= al * h;
    t3 *= h;
    t4 *= h;
    rhs *= h;
    spaceop::KernelSpec unit = p.kernel;
    unit.multiplier = spaceop::TimeMultiplier{};
    const auto base = spaceop::assemble(unit, p.sgrid, a);
    std::vector<double> prow(NN);
    for (long j = 1; j <= k; ++j) {
        std::copy(ph.begin() + (j - 1) * N, ph.begin() + j * N, prow.begin());
        t5 += eps * p.kernel.multiplier(p.tgrid.node(j)) * spaceop::bilinear(base, traj.field(j), prow);
    }
    return std::abs(t1 + t2 + t3 + t4 + t5 - rhs);
}

TestFunction bump_test_function(const march::Problem& problem) {
    const double L = problem.sgrid.L(), a = problem.tgrid.a(), T = problem.tgrid.T();
    return [=](double t, double x) {
        const double r = std::abs(spaceop::torus_distance(x, 0.5 * L, L)) / (0.25 * L);
        if (r >= 1.0) return 0.0;
        const double b = 1.0 - r * r;
        return b * b * b * (1.0 + 0.5 * (t - a) / (T - a));
    };
}

QuotientReport difference_quotient_scan(const march::Trajectory& traj, long h_steps, double beta_target) {
    const auto& p = traj.problem();
    const long k = traj.k(), N = traj.Nx();
    const double a = p.tgrid.a(), T = p.tgrid.T(), eps = p.tgrid.eps();
    if (h_steps < 1) throw DomainError("difference_quotient_scan: h_steps must be >= 1");
    if (!(beta_target >= 0.0 && beta_target < 1.0))
        throw DomainError("difference_quotient_scan: beta_target must lie in [0,1)");
    const long n = k - h_steps + 1;  // quotients for j = 0..k-h_steps
    if (!(2 * h_steps < k) || n < 4) throw DomainError("difference_quotient_scan: window too small for the shift");
    QuotientReport r;
    r.shift = static_cast<double>(h_steps) * eps;
    const BarrierFamily eta{BarrierKind::Eta, {}};
    std::vector<double> et(static_cast<std::size_t>(k) + 1);
    for (long j = 0; j <= k; ++j) et[static_cast<std::size_t>(j)] = barrier_eval(eta, (p.tgrid.node(j) - a) / (T - a), 0.0);
    const double norm = std::pow(r.shift, beta_target);
    std::vector<double> v(static_cast<std::size_t>(n * N));
    for (long j = 0; j < n; ++j)
        for (long m = 0; m < N; ++m) {
            const double q = et[static_cast<std::size_t>(j + h_steps)] * traj.at(j + h_steps, m) -
                             et[static_cast<std::size_t>(j)] * traj.at(j, m);
            v[static_cast<std::size_t>(j * N + m)] = q / norm;
            r.sup = std::max(r.sup, std::abs(q) / norm);
        }
    for (long lag = 2; lag < n; lag *= 2) {
        const double denom = std::pow(static_cast<double>(lag) * eps, beta_target);
        for (long j = 0; j + lag < n; ++j)
            for (long m = 0; m < N; ++m) {
                const double d = std::abs(v[static_cast<std::size_t>((j + lag) * N + m)] -
                                          v[static_cast<std::size_t>(j * N + m)]);
                r.seminorm = std::max(r.seminorm, d / denom);
            }
    }
    return r;
}

march::Problem backward_extension_problem(const march::Problem& original) {
    const double a = original.tgrid.a(), T = original.tgrid.T(), eps = original.tgrid.eps();
    const double steps = 5.0 / eps;
    const long extra = std::lround(steps);
    if (std::abs(steps - static_cast<double>(extra)) > 1e-9 * std::max(1.0, steps))
        throw DomainError("backward_extension_problem: 5 / eps must be an integer");
    spaceop::KernelSpec kernel = original.kernel;
    const double freeze = kernel.multiplier.time_offset + kernel.multiplier.time_scale * a;
    kernel.multiplier.freeze_before =
        kernel.multiplier.freeze_before ? std::max(*kernel.multiplier.freeze_before, freeze) : freeze;

    const auto op = spaceop::assemble(original.kernel, original.sgrid, a);
    const auto Aw0 = spaceop::apply(op, original.w0);
    double sup_aw = 0.0;
    for (double v : Aw0) {
        if (!std::isfinite(v)) throw DomainError("backward_extension_problem: A w0 is not finite");
        sup_aw = std::max(sup_aw, std::abs(v));
    }
    march::Forcing F;
    const auto f = original.f.fn;
    const double h = original.sgrid.h();
    const long N = original.sgrid.Nx();
    const double switch_time = a + 0.5 * eps;
    F.fn = [f, Aw0, h, N, switch_time](double t, double x) {
        if (t < switch_time) {
            const long m = ((std::lround(x / h) % N) + N) % N;
            return -Aw0[static_cast<std::size_t>(m)];
        }
        return f(t, x);
    };
    F.sup_bound = std::max(original.f.sup_bound, sup_aw);
    F.is_zero = original.f.is_zero && sup_aw == 0.0;
    nlohmann::json desc = {{"name", "backward_extension"},
                           {"base", nlohmann::json::parse(original.f.description)},
                           {"history", 5.0}};
    F.description = desc.dump();

    return march::Problem{fractime::TimeGrid(a - 5.0, T, original.tgrid.k() + extra),
                          original.sgrid,
                          original.alpha,
                          kernel,
                          std::move(F),
                          original.w0,
                          original.w0_description};
}

}  // namespace fracdiff::diagnostics


namespace fracdiff::diagnostics {

namespace {
std::vector<double> cosine_mode(const spaceop::SpaceGrid& g, int mode) {
    std::vector<double> v(static_cast<std::size_t>(g.Nx()));
    for (long m = 0; m < g.Nx(); ++m)
        v[static_cast<std::size_t>(m)] = std::cos(2.0 * std::numbers::pi * mode * g.node(m) / g.L());
    return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
}  // namespace

double discrete_eigenvalue(const spaceop::NonlocalOperator& op, int mode) {
    if (mode < 0) throw DomainError("discrete_eigenvalue: mode must be >= 0");
    const auto phi = cosine_mode(op.grid(), mode);
    const auto Aphi = spaceop::apply(op, phi);
    return -dot(Aphi, phi) / dot(phi, phi);
}

EigenmodeComparison eigenmode_comparison(const march::Trajectory& traj, int mode, long skip) {
    const auto& p = traj.problem();
    if (!p.kernel.multiplier.is_constant())
        throw DomainError("eigenmode_comparison: kernel must be time independent");
    const auto op = spaceop::assemble(p.kernel, p.sgrid, p.tgrid.a());
    const auto phi = cosine_mode(p.sgrid, mode);
    EigenmodeComparison out;
    out.mu = std::max(0.0, discrete_eigenvalue(op, mode));
    if (mode == 0) out.mu = 0.0;
    const double d0 = dot(traj.field(0), phi);
    const auto f0 = traj.field(0);
    if (std::abs(d0) <= 1e-12 * std::sqrt(dot(f0, f0) * dot(phi, phi))) throw DomainError("eigenmode_comparison: initial field has no component on the mode");
    for (long j = 0; j <= traj.k(); ++j) {
        out.times.push_back(p.tgrid.node(j));
        out.amplitude.push_back(dot(traj.field(j), phi) / d0);
    }
    out.reference = special::eigenmode_reference(p.alpha, out.mu, p.tgrid.a(), out.times);
    for (long j = std::max(skip, 0L); j <= traj.k(); ++j) {
        const std::size_t i = static_cast<std::size_t>(j);
        out.max_rel_error =
            std::max(out.max_rel_error, std::abs(out.amplitude[i] - out.reference[i]) / std::abs(out.reference[i]));
    }
    return out;
}

}  // namespace fracdiff::diagnostics
