#include "crsn/trace.hpp"

#include <cstdio>

namespace crsn {

std::string fmt_exact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9f", t);
    return buf;
}

}  // namespace crsn
