#include "toml.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include "deepritz/errors.hpp"

namespace deepritz::cli {

namespace {

using nlohmann::json;

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    TomlDocument parse() {
        TomlDocument doc;
        std::vector<std::string> table;
        while (true) {
            skip_blank_lines();
            if (at_end()) break;
            if (peek() == '[') {
                if (peek(1) == '[') fail("arrays of tables are not supported");
                get();
                table = parse_key_path(']');
                expect(']');
                json* node = &doc.root;
                std::string path;
                for (const auto& k : table) {
                    path += (path.empty() ? "" : ".") + k;
                    if (!node->contains(k)) {
                        (*node)[k] = json::object();
                        doc.lines.emplace(path, line_);
                    } else if (!(*node)[k].is_object()) {
                        fail("'" + path + "' is already defined as a value");
                    }
                    node = &(*node)[k];
                }
                if (!defined_tables_.insert(path).second) fail("table [" + path + "] defined twice");
            } else {
                const std::size_t key_line = line_;
                const auto key = parse_key_path('=');
                skip_spaces();
                expect('=');
                skip_spaces();
                json value = parse_value();
                json* node = &doc.root;
                std::string path;
                for (const auto& t : table) {
                    path += (path.empty() ? "" : ".") + t;
                    node = &(*node)[t];
                }
                for (std::size_t i = 0; i < key.size(); ++i) {
                    path += (path.empty() ? "" : ".") + key[i];
                    if (i + 1 < key.size()) {
                        if (!node->contains(key[i])) (*node)[key[i]] = json::object();
                        if (!(*node)[key[i]].is_object()) fail("'" + path + "' is not a table");
                        node = &(*node)[key[i]];
                    } else {
                        if (node->contains(key[i])) fail("duplicate key '" + path + "'");
                        (*node)[key[i]] = std::move(value);
                        doc.lines.emplace(path, key_line);
                    }
                }
            }
            end_of_line();
        }
        return doc;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }
    char get() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            line_start_ = pos_;
        }
        return c;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what, line_, pos_ - line_start_ + 1);
    }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        get();
    }
    void skip_spaces() {
        while (peek() == ' ' || peek() == '\t') get();
    }
    void skip_comment() {
        if (peek() == '#') {
            while (!at_end() && peek() != '\n') get();
        }
    }
    void skip_blank_lines() {
        while (!at_end()) {
            skip_spaces();
            skip_comment();
            if (peek() == '\r') get();
            if (peek() == '\n') {
                get();
            } else {
                break;
            }
        }
    }
    // Whitespace, newlines and comments inside arrays.
    void skip_array_space() {
        while (!at_end()) {
            skip_spaces();
            skip_comment();
            if (peek() == '\n' || peek() == '\r') {
                get();
            } else {
                break;
            }
        }
    }
    void end_of_line() {
        skip_spaces();
        skip_comment();
        if (peek() == '\r') get();
        if (at_end()) return;
        if (peek() != '\n') fail("unexpected text after value");
        get();
    }

    static bool bare_key_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    }

    std::vector<std::string> parse_key_path(char terminator) {
        std::vector<std::string> parts;
        while (true) {
            skip_spaces();
            std::string part;
            if (peek() == '"') {
                part = parse_basic_string();
            } else if (peek() == '\'') {
                part = parse_literal_string();
            } else {
                while (bare_key_char(peek())) part += get();
                if (part.empty()) fail("expected a key");
            }
            parts.push_back(std::move(part));
            skip_spaces();
            if (peek() == '.') {
                get();
                continue;
            }
            if (peek() != terminator) fail(std::string("expected '.' or '") + terminator + "' after key");
            return parts;
        }
    }

    std::string parse_basic_string() {
        expect('"');
        std::string out;
        while (true) {
            if (at_end() || peek() == '\n') fail("unterminated string");
            const char c = get();
            if (c == '"') return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            const char e = at_end() ? '\0' : get();
            switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                default: fail(std::string("unsupported escape '\\") + e + "'");
            }
        }
    }

    std::string parse_literal_string() {
        expect('\'');
        std::string out;
        while (true) {
            if (at_end() || peek() == '\n') fail("unterminated string");
            const char c = get();
            if (c == '\'') return out;
            out += c;
        }
    }

    json parse_value() {
        const char c = peek();
        if (c == '"') return parse_basic_string();
        if (c == '\'') return parse_literal_string();
        if (c == '[') return parse_array();
        if (c == '{') fail("inline tables are not supported");
        std::string token;
        while (!at_end() && (bare_key_char(peek()) || peek() == '.' || peek() == '+')) token += get();
        if (token.empty()) fail("expected a value");
        if (token == "true") return true;
        if (token == "false") return false;
        return parse_number(token);
    }

    json parse_array() {
        expect('[');
        json arr = json::array();
        while (true) {
            skip_array_space();
            if (peek() == ']') {
                get();
                return arr;
            }
            arr.push_back(parse_value());
            skip_array_space();
            if (peek() == ',') {
                get();
            } else if (peek() != ']') {
                fail("expected ',' or ']' in array");
            }
        }
    }

    json parse_number(std::string token) {
        std::string digits;
        for (std::size_t i = 0; i < token.size(); ++i) {
            if (token[i] != '_') {
                digits += token[i];
                continue;
            }
            const bool ok = i > 0 && i + 1 < token.size() && std::isdigit(static_cast<unsigned char>(token[i - 1])) &&
                            std::isdigit(static_cast<unsigned char>(token[i + 1]));
            if (!ok) fail("misplaced '_' in number '" + token + "'");
        }
        std::string body = digits;
        double sign = 1.0;
        if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
            sign = body[0] == '-' ? -1.0 : 1.0;
            body.erase(0, 1);
        }
        if (body == "inf") return sign * std::numeric_limits<double>::infinity();
        if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
        const bool is_float = digits.find_first_of(".eE") != std::string::npos;
        errno = 0;
        char* end = nullptr;
        if (is_float) {
            const double v = std::strtod(digits.c_str(), &end);
            if (end != digits.c_str() + digits.size() || errno == ERANGE) fail("invalid number '" + token + "'");
            return v;
        }
        const long long v = std::strtoll(digits.c_str(), &end, 10);
        if (digits.empty() || end != digits.c_str() + digits.size() || errno == ERANGE) {
            fail("invalid value '" + token + "'");
        }
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t line_start_ = 0;
    std::set<std::string> defined_tables_;
};

std::string format_key(const std::string& key) {
    bool bare = !key.empty();
    for (char c : key) bare = bare && ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                                       c == '_' || c == '-');
    return bare ? key : json(key).dump();
}

std::string format_value(const json& v) {
    if (v.is_array()) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_value(v[i]);
        return s + "]";
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isnan(d)) return "nan";
        if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", d);
        std::string s = buf;
        if (s.find_first_of(".eE") == std::string::npos) s += ".0";
        return s;
    }
    if (v.is_object()) throw ConfigError("nested tables below the second level cannot be written");
    // Strings, integers and booleans print identically in JSON and TOML.
    return v.dump();
}

}  // namespace

TomlDocument parse_toml(std::string_view text) { return Parser(text).parse(); }

TomlDocument load_toml(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_toml(ss.str());
}

std::string to_toml(const nlohmann::json& root) {
    std::string out;
    for (const auto& [key, value] : root.items()) {
        if (!value.is_object()) out += format_key(key) + " = " + format_value(value) + "\n";
    }
    for (const auto& [key, value] : root.items()) {
        if (!value.is_object()) continue;
        out += "\n[" + format_key(key) + "]\n";
        for (const auto& [k, v] : value.items()) out += format_key(k) + " = " + format_value(v) + "\n";
    }
    return out;
}

}  // namespace deepritz::cli
