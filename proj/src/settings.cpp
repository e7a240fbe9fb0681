#include "settings.hpp"

#include <algorithm>

#include "common.hpp"

namespace qoqa {

void Settings::set(const std::string& key, const std::string& value) {
    if (key.empty()) {
        throw Error(ErrorCode::InvalidArgument, "settings: empty key");
    }
    values_[key] = value;
}

void Settings::load_file(const std::string& path) {
    std::string text = read_file(path);
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') return;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw Error::malformed_line(path, line_no, "expected `key = value`");
        }
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw Error::malformed_line(path, line_no, "empty key");
        }
        set(key, value);
    });
}

bool Settings::has(const std::string& key) const {
    return values_.contains(key);
}

std::optional<std::string> Settings::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string Settings::get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

std::string Settings::require(const std::string& key) const {
    auto v = get(key);
    if (!v || v->empty()) {
        throw Error(ErrorCode::InvalidArgument, "missing required setting \"" + key + "\"");
    }
    return *v;
}

double Settings::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    double out = 0.0;
    if (!parse_double(*v, out)) {
        throw Error(ErrorCode::InvalidArgument,
                    "setting \"" + key + "\" is not a number: \"" + *v + "\"");
    }
    return out;
}

long long Settings::get_int(const std::string& key, long long fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    long long out = 0;
    if (!parse_int(*v, out)) {
        throw Error(ErrorCode::InvalidArgument,
                    "setting \"" + key + "\" is not an integer: \"" + *v + "\"");
    }
    return out;
}

bool Settings::get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::string s = *v;
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw Error(ErrorCode::InvalidArgument,
                "setting \"" + key + "\" is not a boolean: \"" + *v + "\"");
}

}  // namespace qoqa
