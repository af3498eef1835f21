#pragma once

#include <cmath>

namespace bflab::detail {

// Reentrant log|Gamma(x)|; std::lgamma writes the global signgam.
inline double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

}  // namespace bflab::detail
