#include "fracdiff/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "fracdiff/errors.hpp"

namespace fracdiff {

namespace {
// JSON has no infinity/NaN; keep them readable instead of null.
nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}
}  // namespace

ReportDocument::ReportDocument(std::string command, nlohmann::json config)
    : command_(std::move(command)), config_(std::move(config)) {}

Check& ReportDocument::add(Check c) {
    checks_.push_back(std::move(c));
    return checks_.back();
}

bool ReportDocument::all_pass() const {
    for (const auto& c : checks_)
        if (!c.pass) return false;
    return true;
}

nlohmann::json ReportDocument::to_json() const {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : checks_)
        checks.push_back({{"name", c.name},
                          {"status", c.pass ? "pass" : "fail"},
                          {"measured", number(c.measured)},
                          {"threshold", number(c.threshold)},
                          {"detail", c.detail}});
    return {{"command", command_},       {"config", config_},       {"checks", checks},
            {"artifacts", artifacts_},   {"data", data_},           {"status", all_pass() ? "pass" : "fail"}};
}

void ReportDocument::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write report '" + path + "'");
    out << dump();
}

void write_table(const std::string& path, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write table '" + path + "'");
    out << "# fracdiff table v1\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n' << std::setprecision(17);
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
        out << '\n';
    }
}

}  // namespace fracdiff
