#pragma once

// Flat machine-parseable run record: resolved parameters, fitted constants,
// seeds and artifact paths. Keys are emitted in sorted order so identical
// runs produce byte-identical files.

#include <cstdint>
#include <string>

#include <json.hpp>

namespace nue {

class Summary {
  public:
    void set(const std::string& key, double v) { j_[key] = v; }
    void set(const std::string& key, long v) { j_[key] = v; }
    void set(const std::string& key, unsigned long v) { j_[key] = v; }
    void set(const std::string& key, long long v) { j_[key] = v; }
    void set(const std::string& key, unsigned long long v) { j_[key] = v; }
    void set(const std::string& key, int v) { j_[key] = v; }
    void set(const std::string& key, bool v) { j_[key] = v; }
    void set(const std::string& key, const std::string& v) { j_[key] = v; }
    void set(const std::string& key, const char* v) { j_[key] = v; }

    std::string str() const { return j_.dump(); }
    void write(const std::string& path) const;

  private:
    nlohmann::json j_ = nlohmann::json::object();
};

}  // namespace nue
