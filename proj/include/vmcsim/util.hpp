#pragma once

#include <cstdio>
#include <string>

namespace vmc {

// 17 significant digits: enough for exact double round-trips through text.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace vmc
