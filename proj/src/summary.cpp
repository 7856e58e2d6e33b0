#include "nue/summary.hpp"

#include <fstream>

#include "nue/errors.hpp"

namespace nue {

void Summary::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << j_.dump(2) << '\n';
}

}  // namespace nue
