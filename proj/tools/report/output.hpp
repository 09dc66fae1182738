#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace blockprop::report {

using Cell = std::variant<long long, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

/// Provenance written at the top of every output file.
struct Header {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> extra;
};

std::string tool_version();

/// Shortest decimal that reads back to the same double; "nan"/"inf" for
/// non-finite values.
std::string format_number(double v);
std::string format_cell(const Cell& c);

std::string to_csv(const Header& header, const Table& table);
std::string to_json(const Header& header, const Table& table);

/// Writes `<dir>/<stem>.<format>`, creating directories as needed, and
/// returns the path.
std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem,
                                  const std::string& format, const Header& header, const Table& table);

}  // namespace blockprop::report
