#pragma once

// Extended-precision scalar for the generating-function solver. Its partial
// fraction coefficients grow roughly geometrically in c and cancel against each
// other, so double precision is not enough beyond a dozen servers.

#if defined(__SIZEOF_FLOAT128__) && __has_include(<quadmath.h>) && !defined(MMCSETUP_NO_QUADMATH)
#include <quadmath.h>
#define MMCSETUP_HAS_FLOAT128 1
#else
#include <cmath>
#endif

namespace mmcsetup {

#ifdef MMCSETUP_HAS_FLOAT128
using wide_real = __float128;
inline wide_real wide_sqrt(wide_real x) { return sqrtq(x); }
#else
using wide_real = long double;
inline wide_real wide_sqrt(wide_real x) { return std::sqrt(x); }
#endif

inline wide_real wide_abs(wide_real x) { return x < 0 ? -x : x; }

/// x^n for integer n by repeated squaring.
inline wide_real wide_pow(wide_real x, int n) {
    if (n < 0)
        return 1 / wide_pow(x, -n);
    wide_real out = 1;
    while (n > 0) {
        if (n & 1)
            out *= x;
        x *= x;
        n >>= 1;
    }
    return out;
}

inline double to_double(wide_real x) { return static_cast<double>(x); }

}  // namespace mmcsetup
