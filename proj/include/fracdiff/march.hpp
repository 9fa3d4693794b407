#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fracdiff/fractime.hpp"
#include "fracdiff/spaceop.hpp"

namespace fracdiff::march {

/// f(t,x) sampled at grid nodes, with a declared bound on |f|.
struct Forcing {
    std::function<double(double t, double x)> fn;
    double sup_bound = 0.0;
    std::string description = "zero";  ///< JSON text describing the forcing (for provenance)
    bool is_zero = true;

    static Forcing zero();
};

struct Problem {
    fractime::TimeGrid tgrid;
    spaceop::SpaceGrid sgrid;
    FracOrder alpha;
    spaceop::KernelSpec kernel;
    Forcing f;
    std::vector<double> w0;
    std::string w0_description = "custom";

    /// Checks the invariants: finite samples, |f| <= declared bound, w0 length Nx.
    void validate() const;
};

struct SolverMeta {
    std::vector<double> residuals;   ///< scheme residual per step j = 1..k (index j-1)
    std::vector<long> iterations;    ///< linear-solver iterations per step (0 for direct)
    double wall_seconds = 0.0;
};

/// Full history w_0..w_k, stored row-major as (k+1) x Nx.
class Trajectory {
public:
    Trajectory(Problem problem, std::vector<double> data, SolverMeta meta);

    const Problem& problem() const noexcept { return problem_; }
    long k() const noexcept { return problem_.tgrid.k(); }
    long Nx() const noexcept { return problem_.sgrid.Nx(); }
    std::span<const double> field(long j) const;
    double at(long j, long m) const { return data_[static_cast<std::size_t>(j * Nx() + m)]; }
    const std::vector<double>& data() const noexcept { return data_; }
    const SolverMeta& meta() const noexcept { return meta_; }

private:
    Problem problem_;
    std::vector<double> data_;
    SolverMeta meta_;
};

/// Stateful stepper: assembles the operator once and caches factorizations of
/// (c0 I - m A) by multiplier value m.
class Marcher {
public:
    explicit Marcher(const Problem& problem);
    ~Marcher();
    Marcher(const Marcher&) = delete;
    Marcher& operator=(const Marcher&) = delete;

    /// Solves for w_j given fields 0..j-1 in `history` (row-major, at least j*Nx values).
    std::vector<double> step(std::span<const double> history, long j, long* iterations = nullptr);

    double c0() const noexcept { return c0_; }

private:
    struct Solver;
    Solver& solver_for(double multiplier);

    Problem p_;
    spaceop::NonlocalOperator base_;
    std::vector<double> c_;       // c_m, m = 1..k
    std::vector<double> prefix_;  // sum_{m<=j} c_m
    double zeta_;
    double scale_;                // alpha eps^{-alpha}
    double c0_;
    std::map<double, std::unique_ptr<Solver>> solvers_;
};

/// One step of the scheme (assembles a fresh Marcher).
std::vector<double> step(std::span<const double> history, const Problem& problem, long j);

/// Marches j = 1..k and records the per-step scheme residual. Throws
/// SolverError (message names the failing step) if a step cannot be solved or
/// breaks the residual contract residual <= residual_tol (1 + |w_j|_inf).
Trajectory run(const Problem& problem, double residual_tol = 1e-10);

/// max_x |d_eps^alpha w(t_j,x) - (A_j w_j)(x) - f(t_j,x)|, with the discrete
/// derivative taken through fractime (ConstantBeforeA) and A_j freshly assembled.
double scheme_residual(const Trajectory& traj, long j);
double scheme_residual(const Problem& problem, std::span<const double> data, long j);

/// Solution of the scalar recursion d_eps^alpha u = -mu u + g_j, u_0 given.
std::vector<double> scalar_recursion(FracOrder alpha, const fractime::TimeGrid& grid, double mu, double u0,
                                     const std::function<double(double)>& g = {});

}  // namespace fracdiff::march
