#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "fracdiff/config.hpp"
#include "fracdiff/diagnostics.hpp"
#include "fracdiff/errors.hpp"
#include "fracdiff/parallel.hpp"
#include "fracdiff/report.hpp"
#include "fracdiff/trajectory_io.hpp"

namespace fracdiff::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using diagnostics::BarrierFamily;
using diagnostics::BarrierKind;

struct Session {
    config::RunConfig cfg;
    bool has_config = false;

    std::string path(const std::string& name) const { return (fs::path(cfg.output) / name).string(); }
};

Session open_session(const Options& opt, bool need_config) {
    Session s;
    if (!opt.config.empty()) {
        s.cfg = config::load_config(opt.config);
        s.has_config = true;
    } else if (need_config) {
        throw config::ConfigError("--config is required", 0);
    } else {
        s.cfg.echo = json::object();
    }
    if (!opt.out.empty()) s.cfg.output = opt.out;
    if (opt.threads > 0) s.cfg.threads = opt.threads;
    s.cfg.echo["output"] = s.cfg.output;
    s.cfg.echo["threads"] = s.cfg.threads;
    if (!opt.trajectory.empty()) s.cfg.echo["trajectory"] = opt.trajectory;
    set_thread_count(s.cfg.threads);
    fs::create_directories(s.cfg.output);
    return s;
}

march::Trajectory obtain(const Options& opt, const Session& s) {
    if (!opt.trajectory.empty()) return io::load_trajectory(opt.trajectory);
    if (!s.has_config) throw config::ConfigError("either --trajectory or --config is required", 0);
    return march::run(config::make_problem(s.cfg), s.cfg.tol.residual);
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// The residual is recomputed here rather than read from the file header.
Check residual_contract(const march::Trajectory& tr, double tol) {
    double worst = 0.0;
    long at = 0;
    for (long j = 1; j <= tr.k(); ++j) {
        const double r = march::scheme_residual(tr, j) / (1.0 + sup_norm(tr.field(j)));
        if (r > worst) {
            worst = r;
            at = j;
        }
    }
    return {"residual_contract", worst <= tol, worst, tol, "worst normalized residual at step " + std::to_string(at)};
}

int finish(const ReportDocument& rep, const std::string& path) {
    rep.write(path);
    for (const auto& c : rep.checks())
        std::printf("%s %-34s measured %-12.6g threshold %.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.measured, c.threshold);
    std::printf("report: %s\n", path.c_str());
    return rep.all_pass() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- verify suites

void suite_maxprinciple(const march::Trajectory& tr, const Session& s, ReportDocument& rep) {
    const auto& p = tr.problem();
    const double tol = s.cfg.tol.max_principle;
    if (p.f.is_zero) {
        const auto [lo, hi] = std::minmax_element(p.w0.begin(), p.w0.end());
        double excess = 0.0;
        for (double v : tr.data()) excess = std::max({excess, *lo - v, v - *hi});
        rep.add({"range_of_initial_data", excess <= tol, excess, tol, "max distance outside [min w0, max w0]"});
        return;
    }
    // With forcing, |w_j| is bounded by the scalar recursion driven by sup|f|.
    const double F = p.f.sup_bound;
    const auto bound = march::scalar_recursion(p.alpha, p.tgrid, 0.0, sup_norm(p.w0), [F](double) { return F; });
    double excess = 0.0;
    for (long j = 0; j <= tr.k(); ++j)
        excess = std::max(excess, sup_norm(tr.field(j)) - bound[static_cast<std::size_t>(j)]);
    rep.add({"comparison_with_scalar_bound", excess <= tol, excess, tol, "max_j |w_j|_inf - u_j"});
}

void suite_energy(const march::Trajectory& tr, const Session& s, ReportDocument& rep) {
    const auto& p = tr.problem();
    const long k = tr.k();
    config::Uniform rng(s.cfg.seed);
    double worst = std::numeric_limits<double>::infinity();
    for (long n = 0; n < s.cfg.energy_series; ++n) {
        std::vector<double> u(static_cast<std::size_t>(k) + 1, 0.0);
        for (long j = 1; j <= k; ++j) u[static_cast<std::size_t>(j)] = 2.0 * rng() - 1.0;
        const auto g = diagnostics::energy_decompose_gap(fractime::TimeSeries(p.tgrid, u), p.alpha);
        worst = std::min(worst, g.slack / g.scale);
    }
    rep.add({"energy_random_series", worst >= -s.cfg.tol.energy, worst, -s.cfg.tol.energy,
             std::to_string(s.cfg.energy_series) + " series with u(a) = 0, min slack / scale"});

    double worst_col = std::numeric_limits<double>::infinity();
    const long stride = std::max(1L, tr.Nx() / 8);
    for (long m = 0; m < tr.Nx(); m += stride) {
        std::vector<double> u(static_cast<std::size_t>(k) + 1);
        for (long j = 0; j <= k; ++j) u[static_cast<std::size_t>(j)] = tr.at(j, m) - tr.at(0, m);
        const auto g = diagnostics::energy_decompose_gap(fractime::TimeSeries(p.tgrid, u), p.alpha);
        if (g.scale > 0.0) worst_col = std::min(worst_col, g.slack / g.scale);
    }
    if (!std::isfinite(worst_col)) worst_col = 0.0;
    rep.add({"energy_trajectory_columns", worst_col >= -s.cfg.tol.energy, worst_col, -s.cfg.tol.energy,
             "columns w(., x) - w0(x), min slack / scale"});
}

void suite_barriers(const march::Trajectory& tr, const Session& s, ReportDocument& rep) {
    const auto& p = tr.problem();
    diagnostics::BarrierParams bp;
    bp.sigma = p.kernel.sigma;
    bp.alpha = p.alpha.value();
    bp.lambda = s.cfg.diag.lambda;
    bp.tau = s.cfg.diag.tau;
    const auto eval = [&](BarrierKind kind, double t, double x, int i = 0) {
        BarrierFamily f{kind, bp};
        f.params.i = i;
        return diagnostics::barrier_eval(f, t, x);
    };

    double psi_inside = 0.0, bar_excess = -std::numeric_limits<double>::infinity(), phi_drop = 0.0;
    for (int a = 0; a <= 80; ++a) {
        const double t = -4.0 + 0.05 * a;
        for (int b = 0; b <= 160; ++b) {
            const double x = -4.0 + 0.05 * b;
            const double psi = eval(BarrierKind::Psi, t, x);
            if (t >= -1.0 && std::abs(x) <= 1.0) psi_inside = std::max(psi_inside, std::abs(psi));
            bar_excess = std::max(bar_excess, eval(BarrierKind::PsiBar, t, x) - psi);
            if (eval(BarrierKind::F1, t, x) + eval(BarrierKind::F2, t, x) < 0.0)
                for (int i = 0; i < 4; ++i)
                    phi_drop = std::max(phi_drop, eval(BarrierKind::Phi, t, x, i) - eval(BarrierKind::Phi, t, x, i + 1));
        }
    }
    rep.add({"psi_vanishes_on_unit_cylinder", psi_inside == 0.0, psi_inside, 0.0, "max |psi| on [-1,0] x B_1"});
    rep.add({"psibar_below_psi", bar_excess <= 1e-14, bar_excess, 1e-14, "max psibar - psi on [-4,0] x [-4,4]"});
    rep.add({"phi_nondecreasing_in_i", phi_drop <= 1e-14, phi_drop, 1e-14, "max phi_i - phi_{i+1} where F1 + F2 < 0"});

    const double nu = 0.5 * p.alpha.value();
    const long kb = std::clamp(std::lround(3.0 / p.tgrid.eps()), 30L, 30000L);
    const auto bb = fractime::barrier_bound_check(nu, p.alpha, fractime::TimeGrid(-2.0, 1.0, kb));
    rep.add({"barrier_bound_vs_reference", bb.min_full >= -bb.reference_c * (1.0 + 1e-9), bb.min_full,
             -bb.reference_c, "nu = alpha/2 on [-2, 1], full history"});
    rep.add({"barrier_anchored_dominates", bb.min_anchored >= bb.min_full - 1e-12, bb.min_anchored - bb.min_full,
             0.0, "anchored minus full-history minimum"});
    rep.add({"barrier_monotone_before_minus_one", bb.monotone_ok, bb.monotone_ok ? 1.0 : 0.0, 1.0, ""});

    const double x0 = s.cfg.diag.x0.value_or(p.sgrid.L() / 4.0);
    const auto U = diagnostics::truncation_energy(tr, BarrierFamily{BarrierKind::Psi, bp}, 8, {x0});
    double rise = 0.0;
    for (std::size_t i = 1; i < U.values.size(); ++i) rise = std::max(rise, U.values[i] - U.values[i - 1]);
    rep.add({"truncation_energy_nonincreasing", rise <= 0.0, rise, 0.0, "max U_{k+1} - U_k"});
    rep.data()["truncation_energy"] = U.values;
    rep.data()["barrier_bound"] = {{"min_full", bb.min_full}, {"argmin", bb.argmin_full},
                                   {"min_anchored", bb.min_anchored}, {"reference_c", bb.reference_c}};
}

march::Problem coarsened(const march::Problem& p) {
    march::Problem c{fractime::TimeGrid(p.tgrid.a(), p.tgrid.T(), p.tgrid.k() / 2),
                     spaceop::SpaceGrid(p.sgrid.L(), p.sgrid.Nx() / 2),
                     p.alpha,
                     p.kernel,
                     p.f,
                     {},
                     p.w0_description};
    for (long m = 0; m < c.sgrid.Nx(); ++m) c.w0.push_back(p.w0[static_cast<std::size_t>(2 * m)]);
    return c;
}

void suite_weakform(const march::Trajectory& tr, const Session& s, ReportDocument& rep) {
    const auto& p = tr.problem();
    if (tr.k() % 2 != 0 || tr.Nx() % 2 != 0 || tr.Nx() < 16)
        throw config::ConfigError("weakform suite needs even k and an even Nx >= 16", 0);
    const auto coarse = march::run(coarsened(p), s.cfg.tol.residual);
    const auto phi = diagnostics::bump_test_function(p);
    const double fine_r = diagnostics::weak_residual(tr, phi);
    const double coarse_r = diagnostics::weak_residual(coarse, phi);
    const double ratio = fine_r > 0.0 ? coarse_r / fine_r : std::numeric_limits<double>::infinity();
    rep.add({"weak_residual_refinement", ratio >= s.cfg.tol.weak_ratio, ratio, s.cfg.tol.weak_ratio,
             "residual at (k/2, Nx/2) over residual at (k, Nx)"});
    rep.data()["weak_residual"] = {{"fine", fine_r}, {"coarse", coarse_r}};
}

void suite_uniqueness(const march::Trajectory& tr, const Session& s, ReportDocument& rep) {
    const auto& p = tr.problem();
    const auto again = march::run(p, s.cfg.tol.residual);
    long differ = 0;
    for (std::size_t i = 0; i < tr.data().size(); ++i)
        if (std::memcmp(&tr.data()[i], &again.data()[i], sizeof(double)) != 0) ++differ;
    rep.add({"bitwise_rerun", differ == 0, static_cast<double>(differ), 0.0, "entries differing from a fresh solve"});

    const int threads = thread_count();
    set_thread_count(threads == 1 ? 4 : 1);
    const auto other = march::run(p, s.cfg.tol.residual);
    set_thread_count(threads);
    long differ_threads = 0;
    for (std::size_t i = 0; i < tr.data().size(); ++i)
        if (std::memcmp(&tr.data()[i], &other.data()[i], sizeof(double)) != 0) ++differ_threads;
    rep.add({"thread_count_independent", differ_threads == 0, static_cast<double>(differ_threads), 0.0, ""});

    // Two solutions with the same data differ by a solution of the homogeneous problem.
    march::Problem diff = p;
    diff.f = march::Forcing::zero();
    for (long m = 0; m < tr.Nx(); ++m) diff.w0[static_cast<std::size_t>(m)] = tr.at(0, m) - again.at(0, m);
    diff.w0_description = R"({"name":"difference"})";
    const auto d = march::run(diff, s.cfg.tol.residual);
    const double dn = sup_norm(d.data());
    rep.add({"difference_problem_vanishes", dn <= 1e-12, dn, 1e-12, "sup of the homogeneous solution"});
}

}  // namespace

int cmd_solve(const Options& opt) {
    const Session s = open_session(opt, true);
    const auto problem = config::make_problem(s.cfg);
    spdlog::info("solving k = {}, Nx = {}, alpha = {}, kernel = {}", problem.tgrid.k(), problem.sgrid.Nx(),
                 problem.alpha.value(), spaceop::to_string(problem.kernel.mode));
    const auto tr = march::run(problem, s.cfg.tol.residual);
    ReportDocument rep("solve", s.cfg.echo);
    io::save_trajectory(tr, s.path("trajectory.fdt"));
    io::write_csv(tr, s.path("trajectory.csv"));
    rep.artifact(s.path("trajectory.fdt"));
    rep.artifact(s.path("trajectory.csv"));
    rep.add(residual_contract(tr, s.cfg.tol.residual));
    const auto& res = tr.meta().residuals;
    const double worst = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
    rep.data()["max_residual"] = worst;
    std::printf("steps %ld  Nx %ld  max scheme residual %.3e  wall %.2fs\n", tr.k(), tr.Nx(), worst,
                tr.meta().wall_seconds);
    return finish(rep, s.path("solve.json"));
}

int cmd_verify(const Options& opt) {
    static const std::vector<std::string> suites = {"maxprinciple", "energy", "barriers", "weakform", "uniqueness"};
    if (std::find(suites.begin(), suites.end(), opt.suite) == suites.end())
        throw config::ConfigError("unknown suite '" + opt.suite +
                                      "' (expected maxprinciple, energy, barriers, weakform or uniqueness)",
                                  0);
    const Session s = open_session(opt, false);
    const auto tr = obtain(opt, s);
    ReportDocument rep("verify " + opt.suite, s.cfg.echo);
    rep.add(residual_contract(tr, s.cfg.tol.residual));
    if (opt.suite == "maxprinciple") suite_maxprinciple(tr, s, rep);
    if (opt.suite == "energy") suite_energy(tr, s, rep);
    if (opt.suite == "barriers") suite_barriers(tr, s, rep);
    if (opt.suite == "weakform") suite_weakform(tr, s, rep);
    if (opt.suite == "uniqueness") suite_uniqueness(tr, s, rep);
    return finish(rep, s.path("verify_" + opt.suite + ".json"));
}

int cmd_degiorgi(const Options& opt) {
    const Session s = open_session(opt, false);
    const auto tr = obtain(opt, s);
    const auto& p = tr.problem();
    const auto& d = s.cfg.diag;
    const double t0 = d.t0.value_or(p.tgrid.T()), x0 = d.x0.value_or(p.sgrid.L() / 4.0);
    ReportDocument rep("degiorgi", s.cfg.echo);

    const auto osc = diagnostics::oscillation_scan(tr, t0, x0, d.gamma, static_cast<int>(d.depth));
    std::vector<std::vector<double>> rows;
    for (std::size_t q = 0; q < osc.osc.size(); ++q)
        rows.push_back({static_cast<double>(q), osc.radii[q], osc.time_extents[q], osc.osc[q]});
    write_table(s.path("oscillation.csv"), {"k", "radius", "time_extent", "osc"}, rows);
    rep.artifact(s.path("oscillation.csv"));
    rep.data()["osc"] = osc.osc;
    if (osc.truncated) {
        rep.data()["truncated"] = {{"limit", osc.limit}, {"limiting_scale", osc.limiting_scale}};
        rep.write(s.path("degiorgi.json"));
        spdlog::error("scan stopped after {} of {} cylinders: {} (limiting scale {})", osc.osc.size(), d.depth,
                      osc.limit, osc.limiting_scale);
        return kOutOfRange;
    }
    double rise = 0.0;
    for (std::size_t q = 1; q < osc.osc.size(); ++q) rise = std::max(rise, osc.osc[q] - osc.osc[q - 1]);
    rep.add({"osc_nonincreasing", rise <= 0.0, rise, 0.0, "max osc_{k+1} - osc_k"});

    const auto fit = diagnostics::holder_fit(osc);
    rep.add({"holder_exponent_positive", fit.beta > 0.0, fit.beta, 0.0, fit.all_zero ? "all osc vanish" : ""});
    rep.data()["beta_hat"] = fit.beta;
    rep.data()["beta_fit_residual"] = fit.residual;
    rep.data()["beta_closed_form"] = diagnostics::holder_closed_form(d.lambda_star, d.gamma, osc.ratio);

    diagnostics::BarrierParams bp;
    bp.sigma = p.kernel.sigma;
    bp.alpha = p.alpha.value();
    bp.lambda = d.lambda;
    const auto U = diagnostics::truncation_energy(tr, BarrierFamily{BarrierKind::Psi, bp}, 8, {x0});
    rows.clear();
    double urise = 0.0;
    for (std::size_t q = 0; q < U.values.size(); ++q) {
        rows.push_back({static_cast<double>(q), U.levels[q], U.values[q]});
        if (q > 0) urise = std::max(urise, U.values[q] - U.values[q - 1]);
    }
    write_table(s.path("truncation_energy.csv"), {"k", "level", "U"}, rows);
    rep.artifact(s.path("truncation_energy.csv"));
    rep.add({"truncation_energy_nonincreasing", urise <= 0.0, urise, 0.0, "max U_{k+1} - U_k"});
    rep.data()["interpolation_p"] = U.p;

    // Level-set regions live on [-3, 0] in the diagnostic frame and need that much history.
    if (p.tgrid.T() - p.tgrid.a() >= 3.0) {
        BarrierFamily phi0{BarrierKind::Phi, bp}, phi4{BarrierKind::Phi, bp};
        phi4.params.i = 4;
        const auto hyp = diagnostics::level_set_measure(tr, phi0, {-3.0, -2.0, 1.0}, diagnostics::Direction::Below, {x0});
        const auto con = diagnostics::level_set_measure(tr, phi4, {-2.0, 0.0, 2.0}, diagnostics::Direction::Above, {x0});
        rep.data()["level_sets"] = {{"below_phi0", {{"measure", hyp.measure}, {"fraction", hyp.fraction}}},
                                    {"above_phi4", {{"measure", con.measure}, {"fraction", con.fraction}}},
                                    {"hypothesis_mu", d.mu}};
    } else {
        rep.data()["level_sets"] = "skipped: window shorter than 3";
    }

    try {
        const auto dq = diagnostics::difference_quotient_scan(tr, d.h_steps, d.beta_target);
        rep.data()["difference_quotient"] = {{"sup", dq.sup}, {"seminorm", dq.seminorm}, {"shift", dq.shift}};
    } catch (const DomainError& e) {
        rep.data()["difference_quotient"] = std::string("skipped: ") + e.what();
    }
    std::printf("beta_hat %.6g over %zu scales\n", fit.beta, osc.osc.size());
    return finish(rep, s.path("degiorgi.json"));
}

int cmd_converge(const Options& opt) {
    const Session s = open_session(opt, true);
    auto ladder = s.cfg.ladder;
    if (ladder.empty())
        for (long r = 1; r <= 4; r *= 2) ladder.emplace_back(s.cfg.k * r, s.cfg.Nx * r);
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (ladder[i].first % ladder[i - 1].first != 0 || ladder[i].second % ladder[i - 1].second != 0)
            throw config::ConfigError("ladder: each rung's k and Nx must be multiples of the previous rung's", 0);

    ReportDocument rep("converge", s.cfg.echo);
    std::vector<march::Trajectory> runs;
    std::vector<double> weak;
    json rungs = json::array();
    int code = kOk;
    for (const auto& [k, Nx] : ladder) {
        try {
            runs.push_back(march::run(config::make_problem(s.cfg, k, Nx), s.cfg.tol.residual));
        } catch (const SolverError& e) {
            spdlog::error("rung (k = {}, Nx = {}) failed: {}", k, Nx, e.what());
            rep.data()["failed_rung"] = {{"k", k}, {"Nx", Nx}, {"error", e.what()}};
            code = kSolverFailed;
            break;
        }
        weak.push_back(diagnostics::weak_residual(runs.back(), diagnostics::bump_test_function(runs.back().problem())));
        spdlog::info("rung k = {}, Nx = {}: weak residual {:.4e}", k, Nx, weak.back());
    }

    std::vector<std::vector<double>> rows;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double prev_diff = nan;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& tr = runs[i];
        double diff = nan, order = nan;
        if (i > 0) {
            const auto& c = runs[i - 1];
            const long rk = tr.k() / c.k(), rx = tr.Nx() / c.Nx();
            diff = 0.0;
            for (long j = 0; j <= c.k(); ++j)
                for (long m = 0; m < c.Nx(); ++m) diff = std::max(diff, std::abs(c.at(j, m) - tr.at(j * rk, m * rx)));
            if (rk > 1 && i > 1 && diff > 0.0) order = std::log(prev_diff / diff) / std::log(static_cast<double>(rk));
            if (rk > 1 || rx > 1) {
                const double ratio = weak[i - 1] / weak[i];
                rep.add({"weak_ratio_rung_" + std::to_string(i), ratio >= s.cfg.tol.weak_ratio, ratio,
                         s.cfg.tol.weak_ratio, "weak residual decrease from the previous rung"});
            }
            if (i > 1 && rk > 1)
                rep.add({"sup_diff_decreasing_rung_" + std::to_string(i), diff < prev_diff, diff, prev_diff, ""});
            prev_diff = diff;
        }
        rows.push_back({static_cast<double>(i), static_cast<double>(tr.k()), static_cast<double>(tr.Nx()),
                        tr.problem().tgrid.eps(), tr.problem().sgrid.h(), diff, weak[i], order});
        rungs.push_back({{"k", tr.k()}, {"Nx", tr.Nx()}, {"sup_diff", diff}, {"weak_residual", weak[i]},
                         {"observed_order", order}});
    }
    rep.data()["rungs"] = rungs;
    write_table(s.path("converge.csv"), {"rung", "k", "Nx", "eps", "h", "sup_diff", "weak_residual", "order"}, rows);
    rep.artifact(s.path("converge.csv"));
    const int checks = finish(rep, s.path("converge.json"));
    return code != kOk ? code : checks;
}

int cmd_oracle(const Options& opt) {
    const Session s = open_session(opt, true);
    const auto& c = s.cfg;
    const std::string w0name = c.w0.value("name", "");
    if (c.kernel.mode != spaceop::KernelMode::FullFractional || !c.kernel.multiplier.is_constant())
        throw config::ConfigError("oracle needs the full kernel with a constant multiplier", 0);
    if (c.forcing.value("name", "") != "zero") throw config::ConfigError("oracle needs zero forcing", 0);
    if (w0name != "cosine" && w0name != "constant")
        throw config::ConfigError("oracle needs cosine (eigenmode) or constant initial data", 0);
    if (w0name == "cosine" && c.w0.value("offset", 0.0) != 0.0)
        throw config::ConfigError("oracle needs a cosine without offset", 0);
    const int mode = w0name == "cosine" ? c.w0.value("mode", 1) : 0;

    const auto tr = march::run(config::make_problem(c), c.tol.residual);
    const auto cmp = diagnostics::eigenmode_comparison(tr, mode);
    ReportDocument rep("oracle", c.echo);
    rep.add(residual_contract(tr, c.tol.residual));
    rep.add({"mittag_leffler_amplitude", cmp.max_rel_error <= c.tol.oracle, cmp.max_rel_error, c.tol.oracle,
             "max relative amplitude error over [a + 10 eps, T]"});
    rep.data()["mu"] = cmp.mu;
    rep.data()["mode"] = mode;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < cmp.times.size(); ++i) rows.push_back({cmp.times[i], cmp.amplitude[i], cmp.reference[i]});
    write_table(s.path("oracle.csv"), {"t", "amplitude", "reference"}, rows);
    rep.artifact(s.path("oracle.csv"));
    std::printf("mu %.8g  max relative error %.4e\n", cmp.mu, cmp.max_rel_error);
    return finish(rep, s.path("oracle.json"));
}

int guarded(const char* command, int (*fn)(const Options&), const Options& opt) {
    try {
        return fn(opt);
    } catch (const RegimeError& e) {
        spdlog::error("{}: out of regime: {}", command, e.what());
        return kOutOfRange;
    } catch (const SolverError& e) {
        spdlog::error("{}: solver failure: {}", command, e.what());
        if (!e.log().empty()) spdlog::debug("{}", e.log());
        return kSolverFailed;
    } catch (const FormatError& e) {
        spdlog::error("{}: {}", command, e.what());
        return kBadInput;
    } catch (const DomainError& e) {
        spdlog::error("{}: invalid input: {}", command, e.what());
        return kBadInput;
    } catch (const std::exception& e) {
        spdlog::error("{}: {}", command, e.what());
        return kBadInput;
    }
}

}  // namespace fracdiff::cli
