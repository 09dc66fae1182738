#include "output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#ifndef BLOCKPROP_VERSION
#define BLOCKPROP_VERSION "0.0.0"
#endif

namespace blockprop::report {

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match the columns");
    rows.push_back(std::move(row));
}

std::string tool_version() { return BLOCKPROP_VERSION; }

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_cell(const Cell& c) {
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    return std::get<std::string>(c);
}

namespace {

std::vector<std::pair<std::string, std::string>> header_lines(const Header& h) {
    std::vector<std::pair<std::string, std::string>> out{
        {"tool", "blockprop " + tool_version()},
        {"command", h.command},
        {"config_hash", h.config_hash},
        {"seed", std::to_string(h.seed)},
    };
    out.insert(out.end(), h.extra.begin(), h.extra.end());
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string to_csv(const Header& header, const Table& table) {
    std::string out;
    for (const auto& [k, v] : header_lines(header)) out += "# " + k + ": " + v + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out += (i ? "," : "") + csv_field(table.columns[i]);
    }
    out += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(format_cell(row[i]));
        out += "\n";
    }
    return out;
}

std::string to_json(const Header& header, const Table& table) {
    nlohmann::ordered_json doc;
    auto& meta = doc["meta"];
    meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : header_lines(header)) meta[k] = v;
    doc["columns"] = table.columns;
    auto& rows = doc["rows"];
    rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& c : row) {
            if (const auto* i = std::get_if<long long>(&c)) {
                r.push_back(*i);
            } else if (const auto* d = std::get_if<double>(&c)) {
                if (std::isfinite(*d)) {
                    r.push_back(*d);
                } else {
                    r.push_back(format_number(*d));
                }
            } else {
                r.push_back(std::get<std::string>(c));
            }
        }
        rows.push_back(std::move(r));
    }
    return doc.dump(1) + "\n";
}

std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem,
                                  const std::string& format, const Header& header, const Table& table) {
    std::filesystem::create_directories(dir);
    const auto path = dir / (stem + "." + format);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << (format == "json" ? to_json(header, table) : to_csv(header, table));
    if (!out) throw std::runtime_error("failed writing " + path.string());
    return path;
}

}  // namespace blockprop::report
