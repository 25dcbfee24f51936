#pragma once

// Reader and writer for the subset of TOML used by experiment configs:
// [table] and [a.b] headers, bare or quoted keys, basic and literal strings,
// integers, floats, booleans and (nested, multi-line) arrays.

#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

namespace deepritz::cli {

struct TomlDocument {
    nlohmann::json root = nlohmann::json::object();
    /// Dotted key path -> 1-based line of its definition.
    std::map<std::string, std::size_t> lines;

    std::size_t line_of(const std::string& path) const {
        const auto it = lines.find(path);
        return it == lines.end() ? 0 : it->second;
    }
};

/// Throws ParseError with line and column on malformed input.
TomlDocument parse_toml(std::string_view text);
TomlDocument load_toml(const std::string& path);

/// Serialises a two-level object (scalars at the top, tables of scalars and
/// arrays below) so that parse_toml reproduces it exactly.
std::string to_toml(const nlohmann::json& root);

}  // namespace deepritz::cli
