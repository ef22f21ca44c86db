#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace calbench {

/// One parsed configuration value.
struct ConfigValue {
    enum class Type { String, Number, Boolean, Array };
    Type type = Type::String;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<ConfigValue> array;
};

/// Flat view of a TOML-style config document: `[section.sub]` headers plus
/// `key = value` lines become dotted keys. Supports strings, numbers,
/// booleans, arrays and `#` comments — the subset the experiment configs use.
class ConfigMap {
public:
    static ConfigMap parse_file(const std::string& path);
    static ConfigMap parse_string(const std::string& text);

    /// Applies a `section.key=value` override (CLI --override). Unquoted
    /// values that are not numbers, booleans or arrays are taken as strings.
    void apply_override(const std::string& assignment);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_number(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_string_array(const std::string& key) const;
    std::vector<double> get_number_array(const std::string& key) const;
    std::optional<double> get_optional_number(const std::string& key) const;

    /// Keys beginning with `prefix.`.
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

    const std::map<std::string, ConfigValue>& entries() const { return entries_; }
    void set(const std::string& key, ConfigValue value);

private:
    const ConfigValue* find(const std::string& key) const;
    std::map<std::string, ConfigValue> entries_;
};

}  // namespace calbench
