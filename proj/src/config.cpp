#include "fracdiff/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace fracdiff::config {

using nlohmann::json;

namespace {

int line_at(const std::string& text, std::size_t pos) {
    int line = 1;
    for (std::size_t i = 0; i < pos && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

// Line of the last key in `path`, found by scanning for each quoted key in turn.
int line_of(const std::string& text, const std::vector<std::string>& path) {
    std::size_t pos = 0;
    for (const auto& key : path) {
        const std::string needle = "\"" + key + "\"";
        const std::size_t found = text.find(needle, pos);
        if (found == std::string::npos) return pos == 0 ? 0 : line_at(text, pos);
        pos = found + needle.size();
    }
    return path.empty() ? 1 : line_at(text, pos);
}

std::string dotted(const std::vector<std::string>& path) {
    std::string s;
    for (const auto& p : path) s += (s.empty() ? "" : ".") + p;
    return s;
}

// Walks one JSON object, remembering which keys were consumed.
class Obj {
public:
    Obj(const std::string& text, const json& j, std::vector<std::string> path)
        : text_(text), j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail_here("must be an object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        auto p = path_;
        p.push_back(key);
        throw ConfigError("field '" + dotted(p) + "' " + msg, line_of(text_, p));
    }
    [[noreturn]] void fail_here(const std::string& msg) const {
        throw ConfigError((path_.empty() ? std::string("configuration") : "field '" + dotted(path_) + "'") + " " + msg,
                          line_of(text_, path_));
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    template <class Pred>
    double num(const std::string& key, double def, Pred ok, const char* range) {
        seen_.insert(key);
        if (!j_.contains(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_number()) fail(key, "must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x) || !ok(x)) fail(key, std::string("must satisfy ") + range + ", got " + v.dump());
        return x;
    }

    template <class Pred>
    long integer(const std::string& key, long def, Pred ok, const char* range) {
        seen_.insert(key);
        if (!j_.contains(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) fail(key, "must be an integer");
        const long x = v.get<long>();
        if (!ok(x)) fail(key, std::string("must satisfy ") + range + ", got " + v.dump());
        return x;
    }

    std::string str(const std::string& key, const std::string& def) {
        seen_.insert(key);
        if (!j_.contains(key)) return def;
        if (!j_.at(key).is_string()) fail(key, "must be a string");
        return j_.at(key).get<std::string>();
    }

    std::optional<Obj> sub(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) return std::nullopt;
        auto p = path_;
        p.push_back(key);
        return Obj(text_, j_.at(key), p);
    }

    const json* raw(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    std::vector<double> numbers(const std::string& key) {
        const json* v = raw(key);
        if (!v) return {};
        if (!v->is_array()) fail(key, "must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : *v) {
            if (!e.is_number()) fail(key, "must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) fail(it.key(), "is not a recognized key");
    }

    const std::vector<std::string>& path() const { return path_; }
    const std::string& text() const { return text_; }

private:
    const std::string& text_;
    const json& j_;
    std::vector<std::string> path_;
    std::set<std::string> seen_;
};

const auto positive = [](double x) { return x > 0.0; };
const auto any = [](double) { return true; };

json forcing_normalized(Obj& o) {
    const std::string name = o.str("name", "zero");
    json out = {{"name", name}};
    if (name == "zero") {
    } else if (name == "constant") {
        out["value"] = o.num("value", 0.0, any, "finite");
    } else if (name == "cosine") {
        out["amplitude"] = o.num("amplitude", 1.0, any, "finite");
        out["mode"] = o.integer("mode", 1, [](long m) { return m >= 0; }, ">= 0");
        out["omega"] = o.num("omega", 0.0, any, "finite");
    } else {
        o.fail("name", "must be one of zero, constant, cosine; got '" + name + "'");
    }
    o.finish();
    return out;
}

json w0_normalized(Obj& o, double L) {
    const std::string name = o.str("name", "constant");
    json out = {{"name", name}};
    const auto in_torus = [L](double x) { return x >= 0.0 && x < L; };
    if (name == "constant") {
        out["value"] = o.num("value", 0.0, any, "finite");
    } else if (name == "cosine") {
        out["amplitude"] = o.num("amplitude", 1.0, any, "finite");
        out["mode"] = o.integer("mode", 1, [](long m) { return m >= 0; }, ">= 0");
        out["offset"] = o.num("offset", 0.0, any, "finite");
    } else if (name == "bump" || name == "indicator") {
        out[name == "bump" ? "amplitude" : "value"] =
            o.num(name == "bump" ? "amplitude" : "value", 1.0, any, "finite");
        out["center"] = o.num("center", L / 2.0, in_torus, "0 <= center < L");
        out["radius"] = o.num("radius", 1.0, [L](double r) { return r > 0.0 && r <= L / 2.0; }, "0 < radius <= L/2");
    } else if (name == "random") {
        out["seed"] = o.integer("seed", 1, [](long s) { return s >= 0; }, ">= 0");
        out["amplitude"] = o.num("amplitude", 1.0, any, "finite");
    } else {
        o.fail("name", "must be one of constant, cosine, bump, random, indicator; got '" + name + "'");
    }
    o.finish();
    return out;
}

spaceop::TimeMultiplier multiplier_from(Obj& o, double Lambda) {
    spaceop::TimeMultiplier m;
    const std::string kind = o.str("kind", "constant");
    if (kind == "constant") {
        m.kind = spaceop::TimeMultiplier::Kind::Constant;
        m.value = o.num("value", 1.0, positive, "> 0");
    } else if (kind == "sinusoid") {
        m.kind = spaceop::TimeMultiplier::Kind::Sinusoid;
        m.value = o.num("mean", 1.0, positive, "> 0");
        m.amplitude = o.num("amplitude", 0.0, [](double x) { return x >= 0.0; }, ">= 0");
        m.omega = o.num("omega", 1.0, any, "finite");
        m.phase = o.num("phase", 0.0, any, "finite");
    } else {
        o.fail("kind", "must be constant or sinusoid; got '" + kind + "'");
    }
    m.time_offset = o.num("time_offset", 0.0, any, "finite");
    m.time_scale = o.num("time_scale", 1.0, any, "finite");
    const double lo = m.value - m.amplitude, hi = m.value + m.amplitude;
    if (lo < 1.0 / Lambda * (1.0 - 1e-12) || hi > Lambda * (1.0 + 1e-12))
        o.fail_here("must stay within [1/Lambda, Lambda]");
    o.finish();
    return m;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what(), line_at(text, e.byte));
    }
    Obj top(text, doc, {});
    RunConfig c;
    c.a = top.num("a", 0.0, any, "finite");
    c.T = top.num("T", 1.0, [&](double T) { return T > c.a; }, "T > a");
    c.k = top.integer("k", 64, [](long k) { return k >= 1 && k <= 1000000; }, "1 <= k <= 1e6");
    c.L = top.num("L", 8.0, [](double L) { return L >= 8.0; }, "L >= 8");
    c.Nx = top.integer("Nx", 64, [](long n) { return n >= 8 && n <= 8192; }, "8 <= Nx <= 8192");
    c.alpha = top.num("alpha", 0.5, [](double a) { return a > 0.0 && a < 1.0; }, "0 < alpha < 1");
    c.sigma = top.num("sigma", 1.0, [](double s) { return s > 0.0 && s < 2.0; }, "0 < sigma < 2");
    c.Lambda = top.num("Lambda", 1.0, [](double l) { return l >= 1.0; }, "Lambda >= 1");

    c.kernel.sigma = c.sigma;
    c.kernel.Lambda = c.Lambda;
    c.kernel.period = c.L;
    if (auto k = top.sub("kernel")) {
        const std::string mode = k->str("mode", "full");
        try {
            c.kernel.mode = spaceop::kernel_mode_from_string(mode);
        } catch (const DomainError& e) {
            k->fail("mode", e.what());
        }
        c.kernel.truncation_radius = k->num("truncation_radius", 3.0, positive, "> 0");
        c.kernel.lower_radius = k->num("lower_radius", 3.0, positive, "> 0");
        if (auto t = k->sub("table")) {
            c.kernel.table.distances = t->numbers("distances");
            c.kernel.table.factors = t->numbers("factors");
            t->finish();
        }
        if (auto m = k->sub("multiplier")) c.kernel.multiplier = multiplier_from(*m, c.Lambda);
        try {
            c.kernel.validate();
        } catch (const DomainError& e) {
            k->fail_here(std::string("is invalid: ") + e.what());
        }
        k->finish();
    }

    if (auto f = top.sub("forcing")) c.forcing = forcing_normalized(*f);
    if (auto w = top.sub("w0")) c.w0 = w0_normalized(*w, c.L);

    if (auto d = top.sub("diagnostics")) {
        auto& p = c.diag;
        p.lambda = d->num("lambda", p.lambda, [](double x) { return x > 0.0 && x < 1.0 / 3.0; }, "0 < lambda < 1/3");
        p.mu = d->num("mu", p.mu, [](double x) { return x > 0.0 && x < 0.125; }, "0 < mu < 1/8");
        p.gamma = d->num("gamma", p.gamma, [](double x) { return x > 0.0 && x < 1.0; }, "0 < gamma < 1");
        p.kappa0 = d->num("kappa0", p.kappa0, positive, "> 0");
        p.tau = d->num("tau", p.tau, positive, "> 0");
        p.lambda_star = d->num("lambda_star", p.lambda_star, [](double x) { return x > 0.0 && x < 1.0; },
                               "0 < lambda_star < 1");
        p.depth = d->integer("depth", p.depth, [](long x) { return x >= 1 && x <= 64; }, "1 <= depth <= 64");
        p.beta_target = d->num("beta_target", p.beta_target, [](double x) { return x >= 0.0 && x < 1.0; },
                               "0 <= beta_target < 1");
        p.h_steps = d->integer("h_steps", p.h_steps, [](long x) { return x >= 1; }, ">= 1");
        if (d->has("t0")) p.t0 = d->num("t0", 0.0, [&](double t) { return t > c.a && t <= c.T; }, "a < t0 <= T");
        if (d->has("x0")) p.x0 = d->num("x0", 0.0, [&](double x) { return x >= 0.0 && x < c.L; }, "0 <= x0 < L");
        d->finish();
    }
    if (auto t = top.sub("tolerances")) {
        auto& q = c.tol;
        q.residual = t->num("residual", q.residual, positive, "> 0");
        q.max_principle = t->num("max_principle", q.max_principle, positive, "> 0");
        q.oracle = t->num("oracle", q.oracle, positive, "> 0");
        q.weak_ratio = t->num("weak_ratio", q.weak_ratio, positive, "> 0");
        q.energy = t->num("energy", q.energy, positive, "> 0");
        t->finish();
    }
    c.output = top.str("output", c.output);
    c.seed = static_cast<std::uint64_t>(top.integer("seed", 1, [](long s) { return s >= 0; }, ">= 0"));
    c.threads = static_cast<int>(top.integer("threads", 1, [](long t) { return t >= 1 && t <= 256; }, "1 <= threads <= 256"));
    c.energy_series = top.integer("energy_series", 50, [](long n) { return n >= 1; }, ">= 1");
    if (const json* lad = top.raw("ladder")) {
        if (!lad->is_array()) top.fail("ladder", "must be an array of [k, Nx] pairs");
        for (const auto& r : *lad) {
            if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer() ||
                r[0].get<long>() < 1 || r[1].get<long>() < 8)
                top.fail("ladder", "entries must be [k >= 1, Nx >= 8] integer pairs");
            const long k = r[0].get<long>(), n = r[1].get<long>();
            if (!c.ladder.empty() && (k < c.ladder.back().first || n < c.ladder.back().second))
                top.fail("ladder", "must be sorted by refinement (k and Nx nondecreasing)");
            c.ladder.emplace_back(k, n);
        }
    }
    top.finish();

    c.echo = {{"a", c.a},         {"T", c.T},         {"k", c.k},           {"L", c.L},
              {"Nx", c.Nx},       {"alpha", c.alpha}, {"sigma", c.sigma},   {"Lambda", c.Lambda},
              {"kernel", kernel_to_json(c.kernel)},   {"forcing", c.forcing}, {"w0", c.w0},
              {"seed", c.seed},   {"threads", c.threads}, {"output", c.output}};
    c.echo["diagnostics"] = {{"lambda", c.diag.lambda}, {"mu", c.diag.mu},         {"gamma", c.diag.gamma},
                             {"kappa0", c.diag.kappa0}, {"tau", c.diag.tau},       {"depth", c.diag.depth},
                             {"lambda_star", c.diag.lambda_star}, {"beta_target", c.diag.beta_target},
                             {"h_steps", c.diag.h_steps}};
    if (c.diag.t0) c.echo["diagnostics"]["t0"] = *c.diag.t0;
    if (c.diag.x0) c.echo["diagnostics"]["x0"] = *c.diag.x0;
    c.echo["tolerances"] = {{"residual", c.tol.residual}, {"max_principle", c.tol.max_principle},
                            {"oracle", c.tol.oracle},     {"weak_ratio", c.tol.weak_ratio},
                            {"energy", c.tol.energy}};
    json lad = json::array();
    for (auto [k, n] : c.ladder) lad.push_back({k, n});
    c.echo["ladder"] = lad;
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'", 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

march::Forcing make_forcing(const json& spec, double L) {
    const std::string name = spec.value("name", std::string("zero"));
    march::Forcing f;
    f.description = spec.dump();
    if (name == "zero") {
        f = march::Forcing::zero();
        f.description = spec.dump();
    } else if (name == "constant") {
        const double v = spec.at("value").get<double>();
        f.fn = [v](double, double) { return v; };
        f.sup_bound = std::abs(v);
        f.is_zero = v == 0.0;
    } else if (name == "cosine") {
        const double A = spec.at("amplitude").get<double>(), om = spec.at("omega").get<double>();
        const double kx = 2.0 * std::numbers::pi * spec.at("mode").get<double>() / L;
        f.fn = [A, om, kx](double t, double x) { return A * std::cos(kx * x) * std::cos(om * t); };
        f.sup_bound = std::abs(A);
        f.is_zero = A == 0.0;
    } else {
        throw FormatError("unknown forcing '" + name + "'");
    }
    return f;
}

Uniform::Uniform(std::uint64_t seed) : gen_(seed) {}

double Uniform::operator()() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

std::vector<double> make_w0(const json& spec, const spaceop::SpaceGrid& grid) {
    const std::string name = spec.value("name", std::string("constant"));
    const long N = grid.Nx();
    const double L = grid.L();
    std::vector<double> w(static_cast<std::size_t>(N));
    for (long m = 0; m < N; ++m) {
        const double x = grid.node(m);
        double v = 0.0;
        if (name == "constant") {
            v = spec.at("value").get<double>();
        } else if (name == "cosine") {
            v = spec.at("offset").get<double>() +
                spec.at("amplitude").get<double>() *
                    std::cos(2.0 * std::numbers::pi * spec.at("mode").get<double>() * x / L);
        } else if (name == "bump") {
            const double r = spaceop::torus_distance(x, spec.at("center").get<double>(), L) /
                             spec.at("radius").get<double>();
            v = r < 1.0 ? spec.at("amplitude").get<double>() * (1.0 - r * r) * (1.0 - r * r) : 0.0;
        } else if (name == "indicator") {
            const double d = spaceop::torus_distance(x, spec.at("center").get<double>(), L);
            v = d <= spec.at("radius").get<double>() ? spec.at("value").get<double>() : 0.0;
        } else if (name == "random") {
            continue;
        } else {
            throw FormatError("unknown initial field '" + name + "'");
        }
        w[static_cast<std::size_t>(m)] = v;
    }
    if (name == "random") {
        Uniform u(spec.at("seed").get<std::uint64_t>());
        const double A = spec.at("amplitude").get<double>();
        for (auto& v : w) v = A * (2.0 * u() - 1.0);
    }
    return w;
}

json kernel_to_json(const spaceop::KernelSpec& s) {
    json j = {{"mode", spaceop::to_string(s.mode)},
              {"sigma", s.sigma},
              {"Lambda", s.Lambda},
              {"period", s.period},
              {"truncation_radius", s.truncation_radius},
              {"lower_radius", s.lower_radius}};
    if (s.mode == spaceop::KernelMode::Tabulated)
        j["table"] = {{"distances", s.table.distances}, {"factors", s.table.factors}};
    const auto& m = s.multiplier;
    json mj = {{"time_offset", m.time_offset}, {"time_scale", m.time_scale}};
    if (m.kind == spaceop::TimeMultiplier::Kind::Constant) {
        mj["kind"] = "constant";
        mj["value"] = m.value;
    } else {
        mj["kind"] = "sinusoid";
        mj["mean"] = m.value;
        mj["amplitude"] = m.amplitude;
        mj["omega"] = m.omega;
        mj["phase"] = m.phase;
    }
    if (m.freeze_before) mj["freeze_before"] = *m.freeze_before;
    j["multiplier"] = mj;
    return j;
}

spaceop::KernelSpec kernel_from_json(const json& j) {
    try {
        spaceop::KernelSpec s;
        s.mode = spaceop::kernel_mode_from_string(j.at("mode").get<std::string>());
        s.sigma = j.at("sigma").get<double>();
        s.Lambda = j.at("Lambda").get<double>();
        s.period = j.at("period").get<double>();
        s.truncation_radius = j.at("truncation_radius").get<double>();
        s.lower_radius = j.at("lower_radius").get<double>();
        if (j.contains("table")) {
            s.table.distances = j.at("table").at("distances").get<std::vector<double>>();
            s.table.factors = j.at("table").at("factors").get<std::vector<double>>();
        }
        const json& m = j.at("multiplier");
        auto& tm = s.multiplier;
        tm.time_offset = m.at("time_offset").get<double>();
        tm.time_scale = m.at("time_scale").get<double>();
        if (m.at("kind").get<std::string>() == "constant") {
            tm.kind = spaceop::TimeMultiplier::Kind::Constant;
            tm.value = m.at("value").get<double>();
        } else {
            tm.kind = spaceop::TimeMultiplier::Kind::Sinusoid;
            tm.value = m.at("mean").get<double>();
            tm.amplitude = m.at("amplitude").get<double>();
            tm.omega = m.at("omega").get<double>();
            tm.phase = m.at("phase").get<double>();
        }
        if (m.contains("freeze_before")) tm.freeze_before = m.at("freeze_before").get<double>();
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw FormatError(std::string("invalid kernel description: ") + e.what());
    } catch (const DomainError& e) {
        throw FormatError(std::string("invalid kernel description: ") + e.what());
    }
}

march::Problem make_problem(const RunConfig& cfg, std::optional<long> k, std::optional<long> Nx) {
    spaceop::SpaceGrid sg(cfg.L, Nx.value_or(cfg.Nx));
    march::Problem p{fractime::TimeGrid(cfg.a, cfg.T, k.value_or(cfg.k)),
                     sg,
                     FracOrder(cfg.alpha),
                     cfg.kernel,
                     make_forcing(cfg.forcing, cfg.L),
                     make_w0(cfg.w0, sg),
                     cfg.w0.dump()};
    return p;
}

}  // namespace fracdiff::config
