#pragma once

#include "gofmc/cli/io.hpp"

#include <cmath>
#include <concepts>
#include <cstdio>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gofmc::cli {

inline std::string json_escape(std::string_view s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out + "\"";
}

inline std::string json_real(double v) { return std::isfinite(v) ? format_real(v) : "null"; }

/// Insertion-ordered JSON object with reals written at 17 significant
/// digits, so output bytes are stable across runs.
class JsonObject {
public:
    JsonObject& add(std::string key, double v) { return raw(std::move(key), json_real(v)); }
    template <std::integral I>
        requires(!std::same_as<I, bool>)
    JsonObject& add(std::string key, I v) { return raw(std::move(key), std::to_string(v)); }
    JsonObject& add(std::string key, bool v) { return raw(std::move(key), v ? "true" : "false"); }
    JsonObject& add(std::string key, std::string_view v) { return raw(std::move(key), json_escape(v)); }
    JsonObject& add(std::string key, const char* v) { return raw(std::move(key), json_escape(v)); }
    JsonObject& add(std::string key, const std::vector<double>& values) {
        std::string s = "[";
        for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + json_real(values[i]);
        return raw(std::move(key), s + "]");
    }
    JsonObject& add(std::string key, const std::vector<std::size_t>& values) {
        std::string s = "[";
        for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + std::to_string(values[i]);
        return raw(std::move(key), s + "]");
    }
    JsonObject& add(std::string key, const JsonObject& nested) { return raw(std::move(key), nested.str(1)); }

    JsonObject& raw(std::string key, std::string value) {
        entries_.emplace_back(std::move(key), std::move(value));
        return *this;
    }

    std::string str(int depth = 0) const {
        const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
        const std::string close(static_cast<std::size_t>(2 * depth), ' ');
        std::string out = "{\n";
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            out += pad + json_escape(entries_[i].first) + ": " + entries_[i].second;
            out += i + 1 < entries_.size() ? ",\n" : "\n";
        }
        return out + close + "}";
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace gofmc::cli
