#pragma once

// CSV output with the fixed artifact conventions: '.' decimal point, ','
// separator, floating values at 12 significant digits.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "nue/errors.hpp"

namespace nue {

std::string csv_num(double v);  // %.12g

class CsvFile {
  public:
    explicit CsvFile(const std::string& path) : out_(path) {
        if (!out_) throw Error("cannot open for writing: " + path);
    }

    void raw_line(const std::string& line) { out_ << line << '\n'; }

    template <class... Ts>
    void row(const Ts&... fields) {
        bool first = true;
        ((append(first, fields)), ...);
        out_ << '\n';
    }

  private:
    void put(const std::string& s) { out_ << s; }
    void put(const char* s) { out_ << s; }
    void put(double v) { out_ << csv_num(v); }
    void put(float v) { out_ << csv_num(v); }
    void put(bool v) { out_ << (v ? 1 : 0); }
    template <class T>
    void put(T v) {
        out_ << v;  // integral types
    }
    template <class T>
    void append(bool& first, const T& v) {
        if (!first) out_ << ',';
        first = false;
        put(v);
    }

    std::ofstream out_;
};

// Single-column sequence files: a 'value' header, one entry per line,
// index implicit in the row order.
void write_sequence_csv(const std::string& path, const std::vector<double>& values);
std::vector<double> read_sequence_csv(const std::string& path);

}  // namespace nue
