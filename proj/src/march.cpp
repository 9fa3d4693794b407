#include "fracdiff/march.hpp"

#include <Eigen/Cholesky>
#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "fracdiff/parallel.hpp"
#include "fracdiff/special.hpp"

namespace fracdiff::march {

namespace {
constexpr long kDirectSolveMaxNx = 512;

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

spaceop::KernelSpec without_multiplier(spaceop::KernelSpec spec) {
    spec.multiplier = spaceop::TimeMultiplier{};
    return spec;
}
}  // namespace

Forcing Forcing::zero() {
    Forcing f;
    f.fn = [](double, double) { return 0.0; };
    f.sup_bound = 0.0;
    f.description = R"({"name":"zero"})";
    f.is_zero = true;
    return f;
}

void Problem::validate() const {
    kernel.validate();
    if (std::abs(kernel.period - sgrid.L()) > 1e-12 * sgrid.L())
        throw DomainError("problem: kernel period must equal the torus length L");
    if (static_cast<long>(w0.size()) != sgrid.Nx())
        throw DomainError("problem: w0 has " + std::to_string(w0.size()) + " entries, expected Nx = " +
                          std::to_string(sgrid.Nx()));
    for (double v : w0)
        if (!std::isfinite(v)) throw DomainError("problem: w0 contains non-finite values");
    if (!f.fn) throw DomainError("problem: forcing sampler missing");
    for (long j = 0; j <= tgrid.k(); ++j)
        for (long m = 0; m < sgrid.Nx(); ++m) {
            const double v = f.fn(tgrid.node(j), sgrid.node(m));
            if (!std::isfinite(v)) throw DomainError("problem: forcing is not finite on the grid");
            if (std::abs(v) > f.sup_bound * (1.0 + 1e-12) + 1e-300)
                throw DomainError("problem: forcing exceeds its declared sup bound");
        }
}

Trajectory::Trajectory(Problem problem, std::vector<double> data, SolverMeta meta)
    : problem_(std::move(problem)), data_(std::move(data)), meta_(std::move(meta)) {
    if (static_cast<long>(data_.size()) != (k() + 1) * Nx())
        throw DomainError("Trajectory: data must hold (k+1) * Nx values");
    for (long m = 0; m < Nx(); ++m)
        if (data_[static_cast<std::size_t>(m)] != problem_.w0[static_cast<std::size_t>(m)])
            throw DomainError("Trajectory: field 0 must equal w0 exactly");
}

std::span<const double> Trajectory::field(long j) const {
    if (j < 0 || j > k()) throw DomainError("Trajectory::field: index out of range");
    return {data_.data() + j * Nx(), static_cast<std::size_t>(Nx())};
}

struct Marcher::Solver {
    Eigen::MatrixXd M;
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::ConjugateGradient<Eigen::MatrixXd, Eigen::Lower | Eigen::Upper> cg;
    bool direct = true;
};

Marcher::Marcher(const Problem& problem)
    : p_(problem),
      base_(spaceop::assemble(without_multiplier(problem.kernel), problem.sgrid, 0.0)) {
    const long k = p_.tgrid.k();
    const double al = p_.alpha.value();
    c_.resize(static_cast<std::size_t>(k));
    prefix_.resize(static_cast<std::size_t>(k));
    double acc = 0.0;
    for (long m = 1; m <= k; ++m) {
        c_[static_cast<std::size_t>(m - 1)] = std::pow(static_cast<double>(m), -(1.0 + al));
        acc += c_[static_cast<std::size_t>(m - 1)];
        prefix_[static_cast<std::size_t>(m - 1)] = acc;
    }
    zeta_ = special::hurwitz_zeta(1.0 + al, 1.0);
    scale_ = al * std::pow(p_.tgrid.eps(), -al);
    c0_ = scale_ * zeta_;
}

Marcher::~Marcher() = default;

Marcher::Solver& Marcher::solver_for(double multiplier) {
    auto it = solvers_.find(multiplier);
    if (it != solvers_.end()) return *it->second;
    auto s = std::make_unique<Solver>();
    const long N = p_.sgrid.Nx();
    s->M = -multiplier * base_.dense();
    s->M.diagonal().array() += c0_;
    s->direct = N <= kDirectSolveMaxNx;
    if (s->direct) {
        s->llt.compute(s->M);
        if (s->llt.info() != Eigen::Success)
            throw SolverError("Cholesky factorization of c0 I - A failed (matrix not SPD)");
    } else {
        s->cg.setTolerance(1e-14);
        s->cg.setMaxIterations(10 * N);
        s->cg.compute(s->M);
    }
    // Time-dependent kernels produce a new multiplier every step; keep the cache small.
    if (solvers_.size() > 8) solvers_.clear();
    return *solvers_.emplace(multiplier, std::move(s)).first->second;
}

std::vector<double> Marcher::step(std::span<const double> history, long j, long* iterations) {
    const long N = p_.sgrid.Nx();
    if (j < 1 || j > p_.tgrid.k()) throw DomainError("step: need 1 <= j <= k");
    if (static_cast<long>(history.size()) < j * N) throw DomainError("step: history incomplete");
    const double tj = p_.tgrid.node(j);
    const double tail = zeta_ - prefix_[static_cast<std::size_t>(j - 1)];

    // g = f(t_j) + alpha eps^{-alpha} (sum_m c_m w_{j-m} + tau_j w_0)
    Eigen::VectorXd g(N);
    parallel_for(N, [&](long lo, long hi) {
        for (long x = lo; x < hi; ++x) {
            double acc = tail * history[static_cast<std::size_t>(x)];
            for (long m = j; m >= 1; --m)
                acc += c_[static_cast<std::size_t>(m - 1)] * history[static_cast<std::size_t>((j - m) * N + x)];
            g(x) = scale_ * acc + p_.f.fn(tj, p_.sgrid.node(x));
        }
    });

    Solver& s = solver_for(p_.kernel.multiplier(tj));
    Eigen::VectorXd w;
    long iters = 0;
    if (s.direct) {
        w = s.llt.solve(g);
    } else {
        w = s.cg.solve(g);
        iters = s.cg.iterations();
        if (s.cg.info() != Eigen::Success) {
            std::ostringstream log;
            log << "step " << j << ": CG stopped after " << iters << " iterations, estimated error "
                << s.cg.error();
            throw SolverError("linear solve did not reach tolerance at step " + std::to_string(j), log.str());
        }
    }
    const double res = (g - s.M * w).cwiseAbs().maxCoeff();
    const double wn = w.cwiseAbs().maxCoeff();
    if (!(res <= 1e-11 * (1.0 + wn) * (1.0 + c0_))) {
        std::ostringstream log;
        log << "step " << j << ": linear residual " << res << " with |w|_inf " << wn;
        throw SolverError("linear solve inaccurate at step " + std::to_string(j), log.str());
    }
    if (iterations) *iterations = iters;
    return {w.data(), w.data() + N};
}

std::vector<double> step(std::span<const double> history, const Problem& problem, long j) {
    Marcher m(problem);
    return m.step(history, j);
}

double scheme_residual(const Problem& problem, std::span<const double> data, long j) {
    const long N = problem.sgrid.Nx(), k = problem.tgrid.k();
    if (j < 1 || j > k) throw DomainError("scheme_residual: need 1 <= j <= k");
    if (static_cast<long>(data.size()) < (j + 1) * N) throw DomainError("scheme_residual: data too short");
    const double tj = problem.tgrid.node(j);
    const auto op = spaceop::assemble(problem.kernel, problem.sgrid, tj);
    const auto Aw = spaceop::apply(op, data.subspan(static_cast<std::size_t>(j * N), static_cast<std::size_t>(N)));
    const auto w = fractime::caputo_weights(problem.alpha, j, fractime::HistoryExtension::ConstantBeforeA);
    double worst = 0.0;
    std::vector<double> column(static_cast<std::size_t>(j) + 1);
    for (long x = 0; x < N; ++x) {
        for (long i = 0; i <= j; ++i) column[static_cast<std::size_t>(i)] = data[static_cast<std::size_t>(i * N + x)];
        const double d = fractime::discrete_caputo(column, w, problem.tgrid.eps(), problem.alpha);
        const double r = d - Aw[static_cast<std::size_t>(x)] - problem.f.fn(tj, problem.sgrid.node(x));
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double scheme_residual(const Trajectory& traj, long j) { return scheme_residual(traj.problem(), traj.data(), j); }

Trajectory run(const Problem& problem, double residual_tol) {
    problem.validate();
    const auto start = std::chrono::steady_clock::now();
    const long N = problem.sgrid.Nx(), k = problem.tgrid.k();
    std::vector<double> data(static_cast<std::size_t>((k + 1) * N));
    std::copy(problem.w0.begin(), problem.w0.end(), data.begin());
    Marcher marcher(problem);
    SolverMeta meta;
    meta.residuals.reserve(static_cast<std::size_t>(k));
    meta.iterations.reserve(static_cast<std::size_t>(k));
    for (long j = 1; j <= k; ++j) {
        long iters = 0;
        std::vector<double> wj;
        try {
            wj = marcher.step({data.data(), static_cast<std::size_t>(j * N)}, j, &iters);
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " (run aborted at step " + std::to_string(j) + ")", e.log());
        }
        std::copy(wj.begin(), wj.end(), data.begin() + j * N);
        const double r = scheme_residual(problem, data, j);
        if (!(r <= residual_tol * (1.0 + sup_norm(wj)))) {
            std::ostringstream os;
            os << "scheme residual " << r << " exceeds contract at step " << j;
            throw SolverError(os.str());
        }
        meta.residuals.push_back(r);
        meta.iterations.push_back(iters);
    }
    meta.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return Trajectory(problem, std::move(data), std::move(meta));
}

std::vector<double> scalar_recursion(FracOrder alpha, const fractime::TimeGrid& grid, double mu, double u0,
                                     const std::function<double(double)>& g) {
    const long k = grid.k();
    const double scale = alpha.value() * std::pow(grid.eps(), -alpha.value());
    std::vector<double> u(static_cast<std::size_t>(k) + 1);
    u[0] = u0;
    const auto all = fractime::caputo_weights(alpha, k, fractime::HistoryExtension::ConstantBeforeA);
    for (long j = 1; j <= k; ++j) {
        const double tail = special::zeta_tail(1.0 + alpha.value(), j);
        double sumc = tail, hist = tail * u0;
        for (long m = 1; m <= j; ++m) {
            sumc += all.c[static_cast<std::size_t>(m - 1)];
            hist += all.c[static_cast<std::size_t>(m - 1)] * u[static_cast<std::size_t>(j - m)];
        }
        const double rhs = (g ? g(grid.node(j)) : 0.0) + scale * hist;
        u[static_cast<std::size_t>(j)] = rhs / (scale * sumc + mu);
    }
    return u;
}

}  // namespace fracdiff::march
