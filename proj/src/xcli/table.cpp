#include <cmath>
#include <sstream>

#include <json.hpp>

#include "ddslab/xcli.hpp"

#ifndef DDSLAB_VERSION
#define DDSLAB_VERSION "0.0.0"
#endif
#ifndef DDSLAB_GIT_REV
#define DDSLAB_GIT_REV "unknown"
#endif

namespace ddslab::xcli {

std::string provenance() { return std::string("ddslab ") + DDSLAB_VERSION + " (git " + DDSLAB_GIT_REV + ")"; }

ResultTable::ResultTable(std::string n, std::vector<std::string> cols) : name(std::move(n)), columns(std::move(cols)) {
    meta.emplace_back("provenance", provenance());
}

void ResultTable::add_row(std::vector<double> row) {
    if (row.size() != columns.size())
        throw StructuralError("table " + name + ": row has " + std::to_string(row.size()) + " values, expected " +
                              std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

double ResultTable::at(std::size_t row, const std::string& col) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
        if (columns[j] == col) return rows.at(row).at(j);
    throw StructuralError("table " + name + ": no column " + col);
}

std::vector<double> ResultTable::column(const std::string& col) const {
    std::vector<double> v;
    for (std::size_t i = 0; i < rows.size(); ++i) v.push_back(at(i, col));
    return v;
}

void ResultTable::add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }

std::string ResultTable::meta_value(const std::string& key) const {
    for (const auto& [k, v] : meta)
        if (k == key) return v;
    return "";
}

std::string ResultTable::to_csv() const {
    std::ostringstream os;
    os << "# table: " << name << "\n";
    for (const auto& [k, v] : meta) {
        std::istringstream lines(v);
        std::string line;
        while (std::getline(lines, line)) os << "# " << k << ": " << line << "\n";
    }
    for (std::size_t j = 0; j < columns.size(); ++j) os << (j ? "," : "") << columns[j];
    os << "\n";
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << format_double(r[j]);
        os << "\n";
    }
    return os.str();
}

std::string ResultTable::to_json() const {
    nlohmann::ordered_json j;
    j["table"] = name;
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta) m[k] = v;
    j["meta"] = m;
    j["columns"] = columns;
    auto rs = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        auto row = nlohmann::ordered_json::array();
        for (double x : r) {
            if (std::isfinite(x))
                row.push_back(x);
            else
                row.push_back(nullptr);
        }
        rs.push_back(row);
    }
    j["rows"] = rs;
    return j.dump(2) + "\n";
}

std::string ResultTable::to_plot_data() const {
    std::ostringstream os;
    os << "#";
    for (const auto& c : columns) os << " " << c;
    os << "\n";
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < r.size(); ++j) os << (j ? " " : "") << format_double(r[j]);
        os << "\n";
    }
    return os.str();
}

}  // namespace ddslab::xcli
