#include "calbench/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace calbench {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// strips a trailing comment, respecting double-quoted strings
std::string strip_comment(const std::string& s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_string = !in_string;
        if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
            return false;
    return true;
}

ConfigValue parse_scalar(const std::string& raw, std::size_t line, bool allow_bare);

ConfigValue parse_value(const std::string& raw, std::size_t line, bool allow_bare) {
    const std::string v = trim(raw);
    if (v.empty()) fail(line, "missing value");
    if (v.front() == '[') {
        if (v.back() != ']') fail(line, "unterminated array");
        ConfigValue out;
        out.type = ConfigValue::Type::Array;
        std::string inner = v.substr(1, v.size() - 2);
        std::string item;
        bool in_string = false;
        for (char c : inner) {
            if (c == '"') in_string = !in_string;
            if (c == ',' && !in_string) {
                if (!trim(item).empty()) out.array.push_back(parse_scalar(item, line, allow_bare));
                item.clear();
            } else {
                item += c;
            }
        }
        if (!trim(item).empty()) out.array.push_back(parse_scalar(item, line, allow_bare));
        return out;
    }
    return parse_scalar(v, line, allow_bare);
}

ConfigValue parse_scalar(const std::string& raw, std::size_t line, bool allow_bare) {
    const std::string v = trim(raw);
    ConfigValue out;
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
        out.type = ConfigValue::Type::String;
        out.str = v.substr(1, v.size() - 2);
        return out;
    }
    if (v == "true" || v == "false") {
        out.type = ConfigValue::Type::Boolean;
        out.boolean = (v == "true");
        return out;
    }
    char* end = nullptr;
    const double num = std::strtod(v.c_str(), &end);
    if (end != nullptr && *end == '\0' && end != v.c_str()) {
        out.type = ConfigValue::Type::Number;
        out.num = num;
        return out;
    }
    if (allow_bare && valid_key(v)) {
        out.type = ConfigValue::Type::String;
        out.str = v;
        return out;
    }
    fail(line, "cannot parse value: " + v);
}

}  // namespace

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

ConfigMap ConfigMap::parse_string(const std::string& text) {
    ConfigMap out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line_no, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (!valid_key(section)) fail(line_no, "bad section name: " + section);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        if (!valid_key(key)) fail(line_no, "bad key: " + key);
        const std::string full = section.empty() ? key : section + "." + key;
        if (out.entries_.count(full)) fail(line_no, "duplicate key: " + full);
        out.entries_[full] = parse_value(s.substr(eq + 1), line_no, false);
    }
    return out;
}

void ConfigMap::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must look like section.key=value: " + assignment);
    const std::string key = trim(assignment.substr(0, eq));
    if (!valid_key(key)) throw std::invalid_argument("bad override key: " + key);
    entries_[key] = parse_value(assignment.substr(eq + 1), 0, true);
}

const ConfigValue* ConfigMap::find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

bool ConfigMap::has(const std::string& key) const { return find(key) != nullptr; }

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    if (v->type != ConfigValue::Type::String)
        throw std::invalid_argument("config key " + key + " must be a string");
    return v->str;
}

double ConfigMap::get_number(const std::string& key, double fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    if (v->type != ConfigValue::Type::Number)
        throw std::invalid_argument("config key " + key + " must be a number");
    return v->num;
}

std::int64_t ConfigMap::get_int(const std::string& key, std::int64_t fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    if (v->type != ConfigValue::Type::Number)
        throw std::invalid_argument("config key " + key + " must be a number");
    const auto i = static_cast<std::int64_t>(v->num);
    if (static_cast<double>(i) != v->num)
        throw std::invalid_argument("config key " + key + " must be an integer");
    return i;
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    if (v->type != ConfigValue::Type::Boolean)
        throw std::invalid_argument("config key " + key + " must be a boolean");
    return v->boolean;
}

std::vector<std::string> ConfigMap::get_string_array(const std::string& key) const {
    const auto* v = find(key);
    if (!v) return {};
    if (v->type != ConfigValue::Type::Array)
        throw std::invalid_argument("config key " + key + " must be an array");
    std::vector<std::string> out;
    for (const auto& item : v->array) {
        if (item.type != ConfigValue::Type::String)
            throw std::invalid_argument("config key " + key + " must hold strings");
        out.push_back(item.str);
    }
    return out;
}

std::vector<double> ConfigMap::get_number_array(const std::string& key) const {
    const auto* v = find(key);
    if (!v) return {};
    if (v->type != ConfigValue::Type::Array)
        throw std::invalid_argument("config key " + key + " must be an array");
    std::vector<double> out;
    for (const auto& item : v->array) {
        if (item.type != ConfigValue::Type::Number)
            throw std::invalid_argument("config key " + key + " must hold numbers");
        out.push_back(item.num);
    }
    return out;
}

std::optional<double> ConfigMap::get_optional_number(const std::string& key) const {
    const auto* v = find(key);
    if (!v) return std::nullopt;
    if (v->type != ConfigValue::Type::Number)
        throw std::invalid_argument("config key " + key + " must be a number");
    return v->num;
}

std::vector<std::string> ConfigMap::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    const std::string p = prefix + ".";
    for (const auto& [k, v] : entries_)
        if (k.rfind(p, 0) == 0) out.push_back(k);
    return out;
}

void ConfigMap::set(const std::string& key, ConfigValue value) { entries_[key] = std::move(value); }

}  // namespace calbench
