#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fracdiff/errors.hpp"
#include "fracdiff/march.hpp"

namespace fracdiff::config {

/// Invalid configuration; `line` is 1-based (0 when unknown).
class ConfigError : public FormatError {
public:
    ConfigError(const std::string& msg, int line)
        : FormatError(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct DiagnosticParams {
    double lambda = 0.1;       ///< cutoff parameter of psi_lambda / phi_i
    double mu = 0.1;           ///< hypothesis measure fraction
    double gamma = 0.5;        ///< cylinder shrink factor
    double kappa0 = 1e-3;
    double tau = 0.25;         ///< exponent of psi_{tau,lambda}
    double lambda_star = 0.2;  ///< for the closed-form Holder exponent
    long depth = 4;
    double beta_target = 0.5;
    long h_steps = 4;
    std::optional<double> t0;  ///< scan time, default T
    std::optional<double> x0;  ///< scan / barrier centre, default L/4
};

struct Tolerances {
    double residual = 1e-10;
    double max_principle = 1e-10;
    double oracle = 0.05;
    double weak_ratio = 1.4;
    double energy = 1e-10;
};

struct RunConfig {
    double a = 0.0, T = 1.0;
    long k = 64;
    double L = 8.0;
    long Nx = 64;
    double alpha = 0.5;
    double sigma = 1.0;
    double Lambda = 1.0;
    spaceop::KernelSpec kernel;
    nlohmann::json forcing = {{"name", "zero"}};
    nlohmann::json w0 = {{"name", "constant"}, {"value", 0.0}};
    DiagnosticParams diag;
    Tolerances tol;
    std::string output = "out";
    std::uint64_t seed = 1;
    int threads = 1;
    long energy_series = 50;
    std::vector<std::pair<long, long>> ladder;  ///< (k, Nx) rungs; empty = derived from k, Nx
    nlohmann::json echo;                        ///< normalized config for reports
};

/// Parses and validates a configuration document. Unknown keys, type errors and
/// range violations raise ConfigError naming the field and its line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Both builders expect the normalized specs stored in RunConfig (every field present).

/// Forcing from {"name": zero|constant|cosine, ...}.
march::Forcing make_forcing(const nlohmann::json& spec, double L);

/// Initial field from {"name": constant|cosine|bump|random|indicator, ...}.
std::vector<double> make_w0(const nlohmann::json& spec, const spaceop::SpaceGrid& grid);

spaceop::KernelSpec kernel_from_json(const nlohmann::json& j);
nlohmann::json kernel_to_json(const spaceop::KernelSpec& spec);

/// Problem at resolution (k, Nx); the config's own resolution when omitted.
march::Problem make_problem(const RunConfig& cfg, std::optional<long> k = {}, std::optional<long> Nx = {});

/// Uniform doubles in [0,1) from a seeded 64-bit Mersenne Twister (53-bit mantissa mapping).
class Uniform {
public:
    explicit Uniform(std::uint64_t seed);
    double operator()();

private:
    std::mt19937_64 gen_;
};

}  // namespace fracdiff::config
