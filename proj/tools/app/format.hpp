#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace nhxy::app {

using nlohmann::json;

/// Shortest representation that round-trips to the same double.
[[nodiscard]] std::string format_double(double v);

/// Comma-separated table with a header row and '\n' line endings.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    CsvTable& add_row(const std::vector<json>& cells);
    [[nodiscard]] std::string str() const;
    [[nodiscard]] const std::vector<std::string>& columns() const noexcept { return columns_; }
    [[nodiscard]] std::size_t rows() const noexcept { return n_rows_; }

private:
    std::vector<std::string> columns_;
    std::string body_;
    std::size_t n_rows_ = 0;
};

/// Cell text: numbers via format_double, null as empty, booleans as true/false.
[[nodiscard]] std::string format_cell(const json& v);

/// Deterministic JSON text: two-space indentation plus trailing newline.
[[nodiscard]] std::string dump_json(const json& j);

} // namespace nhxy::app
