#pragma once

// Plain key=value configuration with '#' comments and dotted section
// prefixes (map., params., run.). Unknown keys are rejected after the
// pipeline has read everything it understands.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nue/errors.hpp"

namespace nue {

class KeyValueConfig {
  public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text,
                                       const std::string& origin = "<string>");

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        std::vector<double> fallback) const;

    std::string require_string(const std::string& key) const;
    double require_double(const std::string& key) const;
    long require_long(const std::string& key) const;

    // Throws ConfigError naming every key that was never consumed.
    void reject_unknown() const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

  private:
    std::string lookup(const std::string& key) const;

    std::map<std::string, std::string> entries_;
    mutable std::set<std::string> consumed_;
    std::string origin_;
};

}  // namespace nue
