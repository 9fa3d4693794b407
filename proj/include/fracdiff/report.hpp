#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace fracdiff {

struct Check {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

/// Structured output of a verifier run: config echo, checks, tables, artifacts.
/// Serialized as JSON with sorted keys, so identical inputs give identical bytes.
class ReportDocument {
public:
    explicit ReportDocument(std::string command, nlohmann::json config = nlohmann::json::object());

    Check& add(Check c);
    void artifact(const std::string& path) { artifacts_.push_back(path); }
    nlohmann::json& data() { return data_; }

    bool all_pass() const;
    const std::vector<Check>& checks() const { return checks_; }

    nlohmann::json to_json() const;
    std::string dump() const { return to_json().dump(2) + "\n"; }
    void write(const std::string& path) const;

private:
    std::string command_;
    nlohmann::json config_;
    std::vector<Check> checks_;
    std::vector<std::string> artifacts_;
    nlohmann::json data_ = nlohmann::json::object();
};

/// Writes a CSV table: a version comment line, a header row, then rows.
void write_table(const std::string& path, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows);

}  // namespace fracdiff
