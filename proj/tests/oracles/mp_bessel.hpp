#pragma once

// Test-only reference: J_nu by its power series in 100-digit binary floats.

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using mp = boost::multiprecision::cpp_bin_float_100;

inline mp bessel_j_mp(const mp& nu, const mp& x) {
    if (x == 0) return nu == 0 ? mp(1) : mp(0);
    mp half = x / 2;
    mp t = boost::multiprecision::pow(half, nu) / boost::math::tgamma(nu + 1);
    mp q = half * half;
    mp s = t;
    for (int n = 0; n < 4000; ++n) {
        t = -t * q / (mp(n + 1) * (mp(n + 1) + nu));
        s += t;
        if (n > 80 && n > x && boost::multiprecision::abs(t) < boost::multiprecision::abs(s) * mp("1e-90"))
            break;
    }
    return s;
}

inline double bessel_j(double nu, double x) {
    return static_cast<double>(bessel_j_mp(mp(nu), mp(x)));
}

}  // namespace oracle
