#pragma once

#include "gofmc/core/dataset.hpp"
#include "gofmc/core/error.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace gofmc::cli {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

inline std::int64_t parse_count(std::string_view token, std::size_t line, const char* what) {
    std::int64_t v = 0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (ec != std::errc{} || ptr != end || token.empty())
        throw ParseError(line, std::string("expected an integer ") + what + ", got '" + std::string(token) + "'");
    if (v < 0) throw ParseError(line, std::string(what) + " must be nonnegative, got " + std::string(token));
    return v;
}

inline double parse_real(std::string_view token, std::size_t line) {
    double v = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (ec != std::errc{} || ptr != end || token.empty())
        throw ParseError(line, "expected a real number, got '" + std::string(token) + "'");
    return v;
}

struct Line {
    std::size_t number;
    std::string_view text;
};

/// Non-blank lines with their 1-based line numbers.
inline std::vector<Line> content_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0, start = 0;
    while (start <= text.size()) {
        const std::size_t pos = text.find('\n', start);
        const std::size_t stop = pos == std::string_view::npos ? text.size() : pos;
        ++number;
        const auto t = trim(text.substr(start, stop - start));
        if (!t.empty()) lines.push_back({number, t});
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return lines;
}

}  // namespace detail

/// Parses dataset text in the given shape:
///  - counts: one integer per line, or one comma-separated row
///  - real: one number per line
///  - pairs: CSV with an `x,y` header, y a nonnegative integer
inline Dataset parse_dataset(std::string_view text, DataShape shape) {
    const auto lines = detail::content_lines(text);
    if (lines.empty()) throw ParseError(1, "empty input");

    switch (shape) {
        case DataShape::Counts: {
            Counts counts;
            if (lines.size() == 1 && lines[0].text.find(',') != std::string_view::npos) {
                for (auto token : detail::split(lines[0].text, ','))
                    counts.bins.push_back(detail::parse_count(token, lines[0].number, "count"));
            } else {
                for (const auto& l : lines) counts.bins.push_back(detail::parse_count(l.text, l.number, "count"));
            }
            if (counts.total() < 1) throw ParseError(lines.back().number, "counts must total at least 1");
            return Dataset(std::move(counts));
        }
        case DataShape::RealSamples: {
            RealSamples samples;
            for (const auto& l : lines) samples.values.push_back(detail::parse_real(l.text, l.number));
            return Dataset(std::move(samples));
        }
        case DataShape::RegressionPairs: {
            const auto header = detail::split(lines[0].text, ',');
            if (header.size() != 2 || header[0] != "x" || header[1] != "y")
                throw ParseError(lines[0].number, "expected header 'x,y'");
            RegressionPairs pairs;
            for (std::size_t i = 1; i < lines.size(); ++i) {
                const auto fields = detail::split(lines[i].text, ',');
                if (fields.size() != 2) throw ParseError(lines[i].number, "expected two columns");
                pairs.x.push_back(detail::parse_real(fields[0], lines[i].number));
                pairs.y.push_back(detail::parse_count(fields[1], lines[i].number, "response"));
            }
            if (pairs.y.empty()) throw ParseError(lines[0].number, "no data rows after header");
            return Dataset(std::move(pairs));
        }
    }
    throw DataError("unknown data shape");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline Dataset ingest_dataset(const std::string& path, DataShape shape) {
    return parse_dataset(read_file(path), shape);
}

/// 17 significant digits, the precision that round-trips any double.
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Inverse of parse_dataset.
inline std::string format_dataset(const Dataset& data) {
    std::string out;
    switch (data.shape()) {
        case DataShape::Counts:
            for (auto c : data.counts().bins) out += std::to_string(c) + "\n";
            break;
        case DataShape::RealSamples:
            for (double v : data.samples().values) out += format_real(v) + "\n";
            break;
        case DataShape::RegressionPairs: {
            const auto& p = data.pairs();
            out += "x,y\n";
            for (std::size_t k = 0; k < p.y.size(); ++k) out += format_real(p.x[k]) + "," + std::to_string(p.y[k]) + "\n";
            break;
        }
    }
    return out;
}

}  // namespace gofmc::cli
