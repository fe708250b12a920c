#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "errors.hpp"

namespace halfline {

namespace detail {

// Double-double arithmetic used to accumulate alternating series.
struct dd {
    double hi = 0.0;
    double lo = 0.0;
};

inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double e = (a - (s - bb)) + (b - bb);
    return {s, e};
}

inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd operator+(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    dd t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }

inline dd operator*(dd a, dd b) {
    dd p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline dd operator*(dd a, double b) {
    dd p = two_prod(a.hi, b);
    p.lo += a.lo * b;
    return quick_two_sum(p.hi, p.lo);
}

inline dd operator/(dd a, dd b) {
    double q1 = a.hi / b.hi;
    dd r = a - b * q1;
    double q2 = r.hi / b.hi;
    r = r - b * q2;
    double q3 = r.hi / b.hi;
    dd q = quick_two_sum(q1, q2);
    return q + dd{q3, 0.0};
}

inline dd make_dd(double a) { return {a, 0.0}; }

inline bool is_integer(double v) { return std::floor(v) == v; }

// cos(f*pi), sin(f*pi) with the argument reduced exactly first.
inline void cospi_sinpi(double f, double& c, double& s) {
    double r = std::fmod(f, 2.0);
    if (r < 0) r += 2.0;
    if (r == 0.0) { c = 1; s = 0; return; }
    if (r == 0.5) { c = 0; s = 1; return; }
    if (r == 1.0) { c = -1; s = 0; return; }
    if (r == 1.5) { c = 0; s = -1; return; }
    c = std::cos(r * std::numbers::pi);
    s = std::sin(r * std::numbers::pi);
}

constexpr double lanczos_g = 7.0;
constexpr double lanczos_p[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double lanczos_sum(double zm1) {
    double s = lanczos_p[0];
    for (int i = 1; i < 9; ++i) s += lanczos_p[i] / (zm1 + i);
    return s;
}

}  // namespace detail

// Gamma function by the Lanczos approximation (g = 7, 9 terms), with
// reflection below 1/2.
inline double gamma_fn(double z) {
    using std::numbers::pi;
    if (detail::is_integer(z) && z <= 0) throw domain_error("gamma pole");
    if (z < 0.5) {
        double c, s;
        detail::cospi_sinpi(z, c, s);
        return pi / (s * gamma_fn(1.0 - z));
    }
    double zm1 = z - 1.0;
    double t = zm1 + detail::lanczos_g + 0.5;
    double a = detail::lanczos_sum(zm1);
    if (z < 140.0)
        return std::sqrt(2 * pi) * std::pow(t, zm1 + 0.5) * std::exp(-t) * a;
    return std::exp(0.5 * std::log(2 * pi) + (zm1 + 0.5) * std::log(t) - t +
                    std::log(a));
}

inline double lgamma_abs(double z) {
    using std::numbers::pi;
    if (z < 0.5) {
        double c, s;
        detail::cospi_sinpi(z, c, s);
        return std::log(pi / std::abs(s)) - lgamma_abs(1.0 - z);
    }
    double zm1 = z - 1.0;
    double t = zm1 + detail::lanczos_g + 0.5;
    return 0.5 * std::log(2 * pi) + (zm1 + 0.5) * std::log(t) - t +
           std::log(detail::lanczos_sum(zm1));
}

// 1/Gamma(z), zero at the poles.
inline double rgamma(double z) {
    if (detail::is_integer(z) && z <= 0) return 0.0;
    return 1.0 / gamma_fn(z);
}

namespace detail {

inline double series_scale(double nu, double x) {
    // (x/2)^nu / Gamma(nu+1)
    if (std::abs(nu) < 100.0) return std::pow(0.5 * x, nu) * rgamma(nu + 1.0);
    return std::exp(nu * std::log(0.5 * x) - lgamma_abs(nu + 1.0));
}

inline double bessel_j_series(double nu, double x) {
    double scale = series_scale(nu, x);
    if (scale == 0.0) return 0.0;
    dd q = two_prod(x, x) * 0.25;
    dd t = make_dd(1.0);
    dd s = t;
    for (int n = 0; n < 2000; ++n) {
        double np1 = n + 1.0;
        dd den = two_sum(np1, nu) * np1;
        t = -(t * q / den);
        s = s + t;
        if (np1 > 0.5 * x && std::abs(t.hi) < 1e-34 * std::abs(s.hi)) break;
        if (s.hi == 0.0 && t.hi == 0.0) break;
    }
    return (s.hi + s.lo) * scale;
}

struct asym_pq {
    double p = 1.0;
    double q = 0.0;
    bool converged = false;
};

// Hankel asymptotic series P, Q truncated at the smallest term.
inline asym_pq hankel_pq(double nu, double x) {
    double mu = 4.0 * nu * nu;
    asym_pq r;
    double term = 1.0;
    double last = 1.0;
    double p = 1.0, q = 0.0;
    for (int k = 1; k < 200; ++k) {
        double odd = 2.0 * k - 1.0;
        double next = term * (mu - odd * odd) / (k * 8.0 * x);
        if (next == 0.0) {
            r.converged = true;
            break;
        }
        if (std::abs(next) >= last) {
            r.converged = last < 1e-15 * std::abs(p);
            break;
        }
        term = next;
        last = std::abs(term);
        switch (k % 4) {
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
            default: p += term; break;
        }
        if (last < 1e-18 * std::abs(p)) {
            r.converged = true;
            break;
        }
    }
    r.p = p;
    r.q = q;
    return r;
}

inline void asym_phase(double nu, double x, double& cchi, double& schi) {
    double cphi, sphi;
    cospi_sinpi(0.5 * nu + 0.25, cphi, sphi);
    double cx = std::cos(x), sx = std::sin(x);
    cchi = cx * cphi + sx * sphi;
    schi = sx * cphi - cx * sphi;
}

inline bool use_asymptotic(double nu, double x) { return x > std::abs(nu) + 20.0; }

inline double bessel_j_asym(double nu, double x, const asym_pq& pq) {
    double c, s;
    asym_phase(nu, x, c, s);
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (pq.p * c - pq.q * s);
}

inline double bessel_y_asym(double nu, double x, const asym_pq& pq) {
    double c, s;
    asym_phase(nu, x, c, s);
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (pq.p * s + pq.q * c);
}

// J of any real order, x >= 0.
inline double bessel_j_any(double nu, double x) {
    if (x < 0) throw domain_error("bessel_j: x < 0");
    if (nu < 0 && is_integer(nu)) {
        double m = -nu;
        double v = bessel_j_any(m, x);
        return std::fmod(m, 2.0) == 0.0 ? v : -v;
    }
    if (x == 0.0) {
        if (nu == 0.0) return 1.0;
        if (nu > 0.0) return 0.0;
        return HUGE_VAL;
    }
    if (use_asymptotic(nu, x)) {
        asym_pq pq = hankel_pq(nu, x);
        if (pq.converged) return bessel_j_asym(nu, x, pq);
    }
    return bessel_j_series(nu, x);
}

inline double neumann_y0_series(double x) {
    using std::numbers::pi;
    dd q = two_prod(x, x) * 0.25;
    dd t = make_dd(1.0);
    dd h = make_dd(0.0);
    dd s = make_dd(0.0);
    for (int k = 1; k < 2000; ++k) {
        dd kk = make_dd(static_cast<double>(k));
        h = h + make_dd(1.0) / kk;
        t = t * q / (kk * kk);
        dd term = t * h;
        s = (k % 2 == 1) ? s + term : s - term;
        if (k > 0.5 * x && std::abs(term.hi) < 1e-34 * std::abs(s.hi) + 1e-300) break;
    }
    double j0 = bessel_j_any(0.0, x);
    return (2.0 / pi) * ((std::log(0.5 * x) + std::numbers::egamma) * j0 +
                         (s.hi + s.lo));
}

inline double neumann_y1_series(double x) {
    using std::numbers::pi;
    // sum_k (-1)^k (psi(k+1)+psi(k+2)) (x/2)^{2k+1} / (k!(k+1)!)
    dd q = two_prod(x, x) * 0.25;
    dd t = make_dd(0.5 * x);
    dd hk = make_dd(0.0);
    dd hk1 = make_dd(1.0);
    dd two_g = make_dd(-2.0 * std::numbers::egamma);
    dd s = t * (two_g + hk + hk1);
    for (int k = 1; k < 2000; ++k) {
        dd kk = make_dd(static_cast<double>(k));
        hk = hk + make_dd(1.0) / kk;
        hk1 = hk1 + make_dd(1.0) / make_dd(k + 1.0);
        t = -(t * q / (kk * make_dd(k + 1.0)));
        dd term = t * (two_g + hk + hk1);
        s = s + term;
        if (k > 0.5 * x && std::abs(term.hi) < 1e-34 * std::abs(s.hi) + 1e-300) break;
    }
    double j1 = bessel_j_any(1.0, x);
    return (2.0 / pi) * std::log(0.5 * x) * j1 - 2.0 / (pi * x) -
           (s.hi + s.lo) / pi;
}

// Y of any real order, x > 0.
inline double bessel_y_any(double nu, double x) {
    if (x <= 0) throw domain_error("bessel_y: x <= 0");
    if (nu < 0 && is_integer(nu)) {
        double m = -nu;
        double v = bessel_y_any(m, x);
        return std::fmod(m, 2.0) == 0.0 ? v : -v;
    }
    if (use_asymptotic(nu, x)) {
        asym_pq pq = hankel_pq(nu, x);
        if (pq.converged) return bessel_y_asym(nu, x, pq);
    }
    if (!is_integer(nu)) {
        double c, s;
        cospi_sinpi(nu, c, s);
        return (bessel_j_any(nu, x) * c - bessel_j_any(-nu, x)) / s;
    }
    int n = static_cast<int>(nu);
    double y0 = use_asymptotic(0.0, x) ? bessel_y_any(0.0, x) : neumann_y0_series(x);
    if (n == 0) return y0;
    double y1 = use_asymptotic(1.0, x) ? bessel_y_any(1.0, x) : neumann_y1_series(x);
    for (int m = 1; m < n; ++m) {
        double y2 = (2.0 * m / x) * y1 - y0;
        y0 = y1;
        y1 = y2;
    }
    return y1;
}

}  // namespace detail

inline void check_order(double nu) {
    if (!(nu >= 0) || !std::isfinite(nu)) throw domain_error("Bessel order must be finite and >= 0");
}

// J_nu(x) for nu >= 0, x >= 0.
inline double bessel_j(double nu, double x) {
    check_order(nu);
    if (!(x >= 0)) throw domain_error("bessel_j: x must be >= 0");
    return detail::bessel_j_any(nu, x);
}

// d/dx J_nu(x), x > 0.
inline double bessel_j_prime(double nu, double x) {
    check_order(nu);
    if (!(x > 0)) throw domain_error("bessel_j_prime: x must be > 0");
    return detail::bessel_j_any(nu - 1.0, x) - (nu / x) * detail::bessel_j_any(nu, x);
}

struct AsymptoticSplit {
    double leading = 0.0;
    double remainder = 0.0;
    double x = 0.0;
};

inline AsymptoticSplit asymptotic_split(double nu, double x) {
    check_order(nu);
    if (!(x > 0)) throw domain_error("asymptotic_split: x must be > 0");
    double c, s;
    detail::asym_phase(nu, x, c, s);
    AsymptoticSplit out;
    out.x = x;
    out.leading = std::sqrt(2.0 / (std::numbers::pi * x)) * c;
    out.remainder = bessel_j(nu, x) - out.leading;
    return out;
}

// H^+ = J + iY, H^- = J - iY.
inline std::complex<double> hankel_h(int sign, double nu, double x) {
    check_order(nu);
    if (sign != 1 && sign != -1) throw invalid_parameter("hankel_h: sign must be +1 or -1");
    if (!(x > 0)) throw domain_error("hankel_h: x must be > 0");
    double j = detail::bessel_j_any(nu, x);
    double y = detail::bessel_y_any(nu, x);
    return {j, sign * y};
}

inline std::complex<double> hankel_h_prime(int sign, double nu, double x) {
    check_order(nu);
    if (!(x > 0)) throw domain_error("hankel_h_prime: x must be > 0");
    double jp = detail::bessel_j_any(nu - 1.0, x) - (nu / x) * detail::bessel_j_any(nu, x);
    double yp = detail::bessel_y_any(nu - 1.0, x) - (nu / x) * detail::bessel_y_any(nu, x);
    return {jp, sign * yp};
}

}  // namespace halfline
