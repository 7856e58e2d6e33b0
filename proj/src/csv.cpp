#include "nue/csv.hpp"

#include <cstdio>
#include <cstdlib>

namespace nue {

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_sequence_csv(const std::string& path, const std::vector<double>& values) {
    CsvFile f(path);
    f.raw_line("value");
    for (double v : values) f.raw_line(csv_num(v));
}

std::vector<double> read_sequence_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open sequence file: " + path);
    std::vector<double> out;
    std::string line;
    bool first = true;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (first) {  // header or first value
            first = false;
            char* end = nullptr;
            const double v = std::strtod(line.c_str(), &end);
            if (end != line.c_str() && *end == '\0') out.push_back(v);
            continue;
        }
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || *end != '\0')
            throw Error(path + ":" + std::to_string(lineno) + ": not a number: " + line);
        out.push_back(v);
    }
    return out;
}

}  // namespace nue
