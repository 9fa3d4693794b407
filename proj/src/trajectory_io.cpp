#include "fracdiff/trajectory_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fracdiff/config.hpp"

namespace fracdiff::io {

static_assert(std::endian::native == std::endian::little, "trajectory files assume a little-endian host");

using nlohmann::json;

namespace {
constexpr char kMagic[8] = {'F', 'D', 'T', 'R', 'A', 'J', '0', '1'};
}

std::string encode_trajectory(const march::Trajectory& traj) {
    const auto& p = traj.problem();
    json h;
    h["format_version"] = kFormatVersion;
    h["a"] = p.tgrid.a();
    h["T"] = p.tgrid.T();
    h["k"] = p.tgrid.k();
    h["Nx"] = p.sgrid.Nx();
    h["L"] = p.sgrid.L();
    h["alpha"] = p.alpha.value();
    h["sigma"] = p.kernel.sigma;
    h["Lambda"] = p.kernel.Lambda;
    h["kernel_mode"] = spaceop::to_string(p.kernel.mode);
    h["kernel"] = config::kernel_to_json(p.kernel);
    h["forcing"] = json::parse(p.f.description);
    h["forcing_sup"] = p.f.sup_bound;
    h["w0"] = json::parse(p.w0_description);
    h["residuals"] = traj.meta().residuals;
    h["iterations"] = traj.meta().iterations;
    const std::string header = h.dump();

    std::string out;
    out.append(kMagic, 8);
    const std::uint64_t n = header.size();
    out.append(reinterpret_cast<const char*>(&n), 8);
    out += header;
    out.append(reinterpret_cast<const char*>(traj.data().data()), traj.data().size() * sizeof(double));
    return out;
}

march::Trajectory decode_trajectory(const std::string& bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0)
        throw FormatError("not a trajectory container (bad magic)");
    std::uint64_t n = 0;
    std::memcpy(&n, bytes.data() + 8, 8);
    if (n > bytes.size() - 16) throw FormatError("trajectory header truncated");
    json h;
    try {
        h = json::parse(bytes.substr(16, n));
    } catch (const json::exception& e) {
        throw FormatError(std::string("trajectory header is not valid JSON: ") + e.what());
    }
    try {
        if (h.at("format_version").get<int>() != kFormatVersion)
            throw FormatError("unsupported trajectory format version");
        const long k = h.at("k").get<long>(), Nx = h.at("Nx").get<long>();
        const std::size_t count = static_cast<std::size_t>((k + 1) * Nx);
        if (bytes.size() - 16 - n != count * sizeof(double))
            throw FormatError("trajectory body has " + std::to_string(bytes.size() - 16 - n) + " bytes, expected " +
                              std::to_string(count * sizeof(double)));
        std::vector<double> data(count);
        std::memcpy(data.data(), bytes.data() + 16 + n, count * sizeof(double));

        spaceop::SpaceGrid sg(h.at("L").get<double>(), Nx);
        march::Forcing f = config::make_forcing(h.at("forcing"), sg.L());
        f.sup_bound = h.at("forcing_sup").get<double>();
        march::Problem p{fractime::TimeGrid(h.at("a").get<double>(), h.at("T").get<double>(), k),
                         sg,
                         FracOrder(h.at("alpha").get<double>()),
                         config::kernel_from_json(h.at("kernel")),
                         std::move(f),
                         std::vector<double>(data.begin(), data.begin() + Nx),
                         h.at("w0").dump()};
        march::SolverMeta meta;
        meta.residuals = h.at("residuals").get<std::vector<double>>();
        meta.iterations = h.at("iterations").get<std::vector<long>>();
        if (static_cast<long>(meta.residuals.size()) != k) throw FormatError("residual list length != k");
        return march::Trajectory(std::move(p), std::move(data), std::move(meta));
    } catch (const json::exception& e) {
        throw FormatError(std::string("trajectory header incomplete: ") + e.what());
    } catch (const DomainError& e) {
        throw FormatError(std::string("trajectory header invalid: ") + e.what());
    }
}

void save_trajectory(const march::Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + path + "'");
    const std::string bytes = encode_trajectory(traj);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed for '" + path + "'");
}

march::Trajectory load_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return decode_trajectory(ss.str());
}

void write_csv(const march::Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path + "'");
    const auto& p = traj.problem();
    out << "# fracdiff trajectory csv v1\n";
    out << "j,t,m,x,w\n";
    out << std::setprecision(17);
    for (long j = 0; j <= traj.k(); ++j)
        for (long m = 0; m < traj.Nx(); ++m)
            out << j << ',' << p.tgrid.node(j) << ',' << m << ',' << p.sgrid.node(m) << ',' << traj.at(j, m) << '\n';
}

}  // namespace fracdiff::io
