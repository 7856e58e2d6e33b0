#include "nue/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nue {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text,
                                            const std::string& origin) {
    KeyValueConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (cfg.entries_.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");
        cfg.entries_[key] = val;
    }
    return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::lookup(const std::string& key) const {
    consumed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    consumed_.insert(key);
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    consumed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0')
        throw ConfigError("config key '" + key + "' is not a number: " + it->second);
    return v;
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
    consumed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    char* end = nullptr;
    const long v = std::strtol(it->second.c_str(), &end, 10);
    if (end == it->second.c_str() || *end != '\0')
        throw ConfigError("config key '" + key + "' is not an integer: " + it->second);
    return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    consumed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("config key '" + key + "' is not a boolean: " + it->second);
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    std::vector<double> fallback) const {
    consumed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0')
            throw ConfigError("config key '" + key + "' has a non-numeric entry: " + item);
        out.push_back(v);
    }
    if (out.empty())
        throw ConfigError("config key '" + key + "' is an empty list");
    return out;
}

std::string KeyValueConfig::require_string(const std::string& key) const {
    return lookup(key);
}

double KeyValueConfig::require_double(const std::string& key) const {
    lookup(key);
    return get_double(key, 0.0);
}

long KeyValueConfig::require_long(const std::string& key) const {
    lookup(key);
    return get_long(key, 0);
}

void KeyValueConfig::reject_unknown() const {
    std::string unknown;
    for (const auto& [key, value] : entries_) {
        if (!consumed_.count(key)) {
            if (!unknown.empty()) unknown += ", ";
            unknown += key;
        }
    }
    if (!unknown.empty())
        throw ConfigError(origin_ + ": unknown config keys: " + unknown);
}

}  // namespace nue
