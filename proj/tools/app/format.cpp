#include "format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace nhxy::app {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (res.ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
    return {buf.data(), res.ptr};
}

std::string format_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number()) return format_double(v.get<double>());
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string quoted = "\"";
        for (char c : s) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        return quoted + "\"";
    }
    return format_cell(json(v.dump()));
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

CsvTable& CsvTable::add_row(const std::vector<json>& cells) {
    if (cells.size() != columns_.size()) throw std::logic_error("CsvTable: row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) body_ += ',';
        body_ += format_cell(cells[i]);
    }
    body_ += '\n';
    ++n_rows_;
    return *this;
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    return out + body_;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

} // namespace nhxy::app
