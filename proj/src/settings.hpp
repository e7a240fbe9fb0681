#pragma once

#include <optional>
#include <string>
#include <unordered_map>

namespace qoqa {

/// Flat key=value configuration shared by the config file, the CLI flags and
/// the C API. Later sets override earlier ones, so callers load the config
/// file first and then apply flag overrides.
class Settings {
public:
    void set(const std::string& key, const std::string& value);

    /// `key = value` lines; blank lines and lines starting with '#' ignored.
    void load_file(const std::string& path);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;

    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

private:
    std::unordered_map<std::string, std::string> values_;
};

}  // namespace qoqa
