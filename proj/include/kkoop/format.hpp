#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "kkoop/errors.hpp"

namespace kkoop {

/// Shortest decimal string that parses back to exactly `value`.
inline std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        throw Error("format_double: conversion failed");
    }
    return {buf, ptr};
}

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

/// Strict parse: the whole (trimmed) field must be a number. Accepts
/// nan/inf spellings; an empty field yields NaN.
inline bool try_parse_double(std::string_view field, double& out) {
    field = trim(field);
    if (field.empty()) {
        out = std::nan("");
        return true;
    }
    if (field.front() == '+') {
        field.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc{} && ptr == field.data() + field.size();
}

inline double parse_double(std::string_view field, std::string_view what) {
    double v = 0.0;
    if (!try_parse_double(field, v) || trim(field).empty()) {
        throw ParseError(std::string(what) + ": not a number: '" + std::string(field) + "'");
    }
    return v;
}

inline std::size_t parse_index(std::string_view field, std::string_view what) {
    field = trim(field);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        throw ParseError(std::string(what) + ": not a nonnegative integer: '" +
                         std::string(field) + "'");
    }
    return v;
}

}  // namespace kkoop
