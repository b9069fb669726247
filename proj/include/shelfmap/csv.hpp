#pragma once
// Minimal CSV plumbing for the canonical formats: unquoted fields, fixed
// headers, LF output. Number formatting is locale-independent.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "shelfmap/error.hpp"

namespace shelfmap::csv {

struct Row {
    std::size_t line_no = 0;  // 1-based, header is line 1
    std::vector<std::string> fields;
};

inline std::vector<std::string> split(std::string_view line, char delim = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileNotFound, path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::FileNotFound, path, "cannot open for writing");
    out << content;
}

// Splits text into lines, dropping a trailing '\r' and blank lines.
inline std::vector<std::pair<std::size_t, std::string>> lines(const std::string& text) {
    std::vector<std::pair<std::size_t, std::string>> out;
    std::size_t line_no = 0, start = 0;
    while (start <= text.size()) {
        auto pos = text.find('\n', start);
        std::string line = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.emplace_back(line_no, std::move(line));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

// Parses a file with an exact expected header into rows of header.size() fields.
inline std::vector<Row> parse(const std::string& path, std::string_view header) {
    const auto text = read_file(path);
    auto ls = lines(text);
    if (ls.empty() || ls.front().second != header)
        throw Error(ErrorCode::BadHeader, path, "expected '" + std::string(header) + "'");
    const auto width = split(header).size();
    std::vector<Row> rows;
    rows.reserve(ls.size() - 1);
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto fields = split(ls[i].second);
        if (fields.size() != width)
            throw Error(ErrorCode::MalformedRow, std::to_string(ls[i].first), "wrong field count");
        rows.push_back({ls[i].first, std::move(fields)});
    }
    return rows;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
    Int v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::optional<double> parse_double(std::string_view s) {
    double v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

// Exact decimal parse into an integer count of 10^-decimals units. Rejects
// inputs carrying non-zero digits beyond the allowed precision.
inline std::optional<std::int64_t> parse_fixed(std::string_view s, int decimals) {
    if (s.empty()) return std::nullopt;
    bool neg = false;
    if (s.front() == '-') {
        neg = true;
        s.remove_prefix(1);
    }
    auto dot = s.find('.');
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (whole.empty() && frac.empty()) return std::nullopt;
    if (dot != std::string_view::npos && frac.empty()) return std::nullopt;
    std::int64_t value = 0;
    for (char c : whole) {
        if (c < '0' || c > '9') return std::nullopt;
        value = value * 10 + (c - '0');
    }
    for (int i = 0; i < decimals; ++i) {
        int digit = 0;
        if (static_cast<std::size_t>(i) < frac.size()) {
            char c = frac[i];
            if (c < '0' || c > '9') return std::nullopt;
            digit = c - '0';
        }
        value = value * 10 + digit;
    }
    for (std::size_t i = static_cast<std::size_t>(decimals); i < frac.size(); ++i)
        if (frac[i] != '0') return std::nullopt;
    return neg ? -value : value;
}

// Shortest round-trip representation.
inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

inline std::string format_cents(std::int64_t cents) {
    const bool neg = cents < 0;
    std::uint64_t a = neg ? static_cast<std::uint64_t>(-(cents + 1)) + 1 : static_cast<std::uint64_t>(cents);
    std::string frac = std::to_string(a % 100);
    if (frac.size() < 2) frac.insert(0, "0");
    return (neg ? "-" : "") + std::to_string(a / 100) + "." + frac;
}

inline std::optional<std::string> opt_field(const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

}  // namespace shelfmap::csv
