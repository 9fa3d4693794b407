#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "fracdiff/config.hpp"
#include "fracdiff/report.hpp"
#include "fracdiff/trajectory_io.hpp"

using namespace fracdiff;
namespace fs = std::filesystem;

namespace {

const char* kBase = R"({
  "a": 0.0,
  "T": 1.0,
  "k": 16,
  "L": 8.0,
  "Nx": 16,
  "alpha": 0.5,
  "sigma": 1.0,
  "kernel": {"mode": "full"},
  "forcing": {"name": "cosine", "amplitude": 0.5, "mode": 1, "omega": 3.0},
  "w0": {"name": "cosine", "amplitude": 1.0, "mode": 1}
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

// Message of the ConfigError raised by the text (empty if none).
std::string config_error(const std::string& text, int* line = nullptr) {
    try {
        config::parse_config(text);
    } catch (const config::ConfigError& e) {
        if (line) *line = e.line();
        return e.what();
    }
    return {};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "fracdiff_test_config_io";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("a valid configuration parses") {
    const auto cfg = config::parse_config(kBase);
    CHECK(cfg.k == 16);
    CHECK(cfg.alpha == 0.5);
    CHECK(cfg.kernel.mode == spaceop::KernelMode::FullFractional);
    CHECK(cfg.kernel.period == 8.0);
    const auto p = config::make_problem(cfg);
    CHECK(p.w0.size() == 16);
    CHECK(p.w0[0] == doctest::Approx(1.0));
    CHECK(p.f.sup_bound == doctest::Approx(0.5));
    CHECK(!p.f.is_zero);
    const auto coarse = config::make_problem(cfg, 8, 8);
    CHECK(coarse.tgrid.k() == 8);
    CHECK(coarse.sgrid.Nx() == 8);
}

TEST_CASE("configuration errors name the field and line") {
    int line = 0;
    auto msg = config_error(replace(kBase, "\"alpha\": 0.5", "\"alpha\": 1.5"), &line);
    CHECK(msg.find("alpha") != std::string::npos);
    CHECK(line == 7);

    msg = config_error(replace(kBase, "\"sigma\": 1.0", "\"sigma\": 1.0,\n  \"bogus\": 3"), &line);
    CHECK(msg.find("bogus") != std::string::npos);
    CHECK(line == 9);

    msg = config_error(replace(kBase, "\"kernel\": {\"mode\": \"full\"}",
                               "\"kernel\": {\"mode\": \"full\", \"multiplier\": {\"kind\": \"constant\", \"value\": 5.0}}"),
                       &line);
    CHECK(msg.find("multiplier") != std::string::npos);
    CHECK(line == 9);

    msg = config_error(replace(kBase, "\"sigma\": 1.0", "\"sigma\": 1.0,\n  \"ladder\": [[32, 16], [16, 8]]"), &line);
    CHECK(msg.find("ladder") != std::string::npos);

    msg = config_error(replace(kBase, "\"k\": 16", "\"k\": \"many\""), &line);
    CHECK(msg.find("k") != std::string::npos);
    CHECK(line == 4);

    CHECK(!config_error(replace(kBase, "\"Nx\": 16", "\"Nx\": 4")).empty());
    CHECK(!config_error(replace(kBase, "\"L\": 8.0", "\"L\": 6.0")).empty());
    CHECK(!config_error(replace(kBase, "\"T\": 1.0", "\"T\": -1.0")).empty());
    CHECK(!config_error("{ \"a\": 0.0, ").empty());
    CHECK_THROWS_AS(config::load_config("/nonexistent/fracdiff.json"), FormatError);
}

TEST_CASE("kernel JSON round trip") {
    spaceop::KernelSpec k;
    k.mode = spaceop::KernelMode::Tabulated;
    k.sigma = 0.7;
    k.Lambda = 2.0;
    k.period = 12.0;
    k.truncation_radius = 2.5;
    k.table.distances = {0.5, 1.0, 2.0};
    k.table.factors = {1.0, 0.8, 1.2};
    k.multiplier.kind = spaceop::TimeMultiplier::Kind::Sinusoid;
    k.multiplier.value = 1.0;
    k.multiplier.amplitude = 0.25;
    k.multiplier.omega = 2.0;
    k.multiplier.phase = 0.1;
    const auto back = config::kernel_from_json(config::kernel_to_json(k));
    CHECK(back.mode == k.mode);
    CHECK(back.sigma == k.sigma);
    CHECK(back.Lambda == k.Lambda);
    CHECK(back.period == k.period);
    CHECK(back.truncation_radius == k.truncation_radius);
    CHECK(back.table.distances == k.table.distances);
    CHECK(back.table.factors == k.table.factors);
    CHECK(back.multiplier.kind == k.multiplier.kind);
    CHECK(back.multiplier.amplitude == k.multiplier.amplitude);
    CHECK(back.multiplier.phase == k.multiplier.phase);
    CHECK(config::kernel_to_json(back) == config::kernel_to_json(k));
}

TEST_CASE("initial fields and forcings") {
    const spaceop::SpaceGrid g(8.0, 32);
    const auto c = config::make_w0({{"name", "constant"}, {"value", 0.75}}, g);
    for (double v : c) CHECK(v == 0.75);
    const auto r1 = config::make_w0({{"name", "random"}, {"seed", 5}, {"amplitude", 0.5}}, g);
    const auto r2 = config::make_w0({{"name", "random"}, {"seed", 5}, {"amplitude", 0.5}}, g);
    CHECK(r1 == r2);
    for (double v : r1) CHECK(std::abs(v) <= 0.5);
    CHECK_THROWS_AS(config::make_w0({{"name", "sawtooth"}}, g), FormatError);

    const auto f = config::make_forcing({{"name", "constant"}, {"value", -2.0}}, 8.0);
    CHECK(f.fn(0.3, 1.0) == -2.0);
    CHECK(f.sup_bound == 2.0);
    CHECK(config::make_forcing({{"name", "zero"}}, 8.0).is_zero);
}

TEST_CASE("uniform generator is reproducible and in range") {
    config::Uniform u(42), v(42), w(43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = u();
        CHECK(x == v());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        differs = differs || x != w();
    }
    CHECK(differs);
}

TEST_CASE("trajectory round trip") {
    const auto cfg = config::parse_config(kBase);
    const auto tr = march::run(config::make_problem(cfg));
    const auto path = scratch("round.fdt");
    io::save_trajectory(tr, path.string());
    const auto back = io::load_trajectory(path.string());
    CHECK(back.data() == tr.data());
    CHECK(back.k() == tr.k());
    CHECK(back.problem().alpha.value() == tr.problem().alpha.value());
    CHECK(back.problem().tgrid.a() == tr.problem().tgrid.a());
    CHECK(back.problem().sgrid.L() == tr.problem().sgrid.L());
    CHECK(back.meta().residuals == tr.meta().residuals);
    CHECK(back.problem().f.fn(0.4, 2.0) == tr.problem().f.fn(0.4, 2.0));
    for (long j = 1; j <= back.k(); ++j) CHECK(march::scheme_residual(back, j) <= 1e-10 * 2.0);

    const auto again = scratch("again.fdt");
    io::save_trajectory(back, again.string());
    CHECK(slurp(path) == slurp(again));
    CHECK(io::encode_trajectory(back) == io::encode_trajectory(tr));
}

TEST_CASE("damaged trajectory files are rejected") {
    const auto tr = march::run(config::make_problem(config::parse_config(kBase)));
    const auto bytes = io::encode_trajectory(tr);
    CHECK_THROWS_AS(io::decode_trajectory(bytes.substr(0, bytes.size() - 8)), FormatError);
    CHECK_THROWS_AS(io::decode_trajectory(bytes.substr(0, 12)), FormatError);
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(io::decode_trajectory(bad), FormatError);
    CHECK_THROWS_AS(io::decode_trajectory(bytes + "extra"), FormatError);
    CHECK_THROWS_AS(io::load_trajectory("/nonexistent/x.fdt"), FormatError);
}

TEST_CASE("CSV export") {
    const auto tr = march::run(config::make_problem(config::parse_config(kBase)));
    const auto path = scratch("traj.csv");
    io::write_csv(tr, path.string());
    std::ifstream in(path);
    std::string first, header;
    std::getline(in, first);
    std::getline(in, header);
    CHECK(first.rfind("#", 0) == 0);
    CHECK(header == "j,t,m,x,w");
    long rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == (tr.k() + 1) * tr.Nx());
}

TEST_CASE("report documents") {
    const auto build = [] {
        ReportDocument r("verify", {{"alpha", 0.5}});
        r.add({"one", true, 1.0, 2.0, ""});
        r.add({"two", false, std::numeric_limits<double>::infinity(), std::nan(""), "why"});
        r.data()["series"] = {1.0, 2.0};
        r.artifact("a.csv");
        return r;
    };
    const auto a = build(), b = build();
    CHECK(a.dump() == b.dump());
    CHECK(!a.all_pass());
    const std::string text = a.dump();
    CHECK(text.find("\"inf\"") != std::string::npos);
    CHECK(text.find("\"nan\"") != std::string::npos);
    CHECK(nlohmann::json::parse(text).is_object());

    const auto path = scratch("table.csv");
    write_table(path.string(), {"k", "osc"}, {{0.0, 1.5}, {1.0, 0.25}});
    const auto csv = slurp(path);
    CHECK(csv.rfind("#", 0) == 0);
    CHECK(csv.find("k,osc\n") != std::string::npos);
}
