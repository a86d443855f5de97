#pragma once

#include <charconv>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace pacbayes {

// Shortest decimal string that round-trips to the exact double value.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Fixed-point with the given number of decimals, for table output.
inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
    return std::string(buf, res.ptr);
}

inline std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline double parse_csv_double(std::string_view field, std::size_t row, const char* name) {
    double out = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), out);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw std::invalid_argument("row " + std::to_string(row) + ": field " + name +
                                    " is not a number: '" + std::string(field) + "'");
    return out;
}

inline unsigned long long parse_csv_count(std::string_view field, std::size_t row, const char* name) {
    unsigned long long out = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), out);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw std::invalid_argument("row " + std::to_string(row) + ": field " + name +
                                    " is not a count: '" + std::string(field) + "'");
    return out;
}

}  // namespace pacbayes
