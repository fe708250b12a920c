#pragma once

// Test-only reference: window densities by direct overlap sums over the
// unrolled cell list, scanned on a uniform grid of window positions.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

struct Cell {
    double lo, hi;
};

inline std::vector<Cell> unroll(const std::vector<Cell>& base, double period, double limit) {
    std::vector<Cell> out;
    if (period <= 0) return base;
    for (int k = 0; k * period <= limit; ++k)
        for (auto c : base) out.push_back({c.lo + k * period, c.hi + k * period});
    return out;
}

inline double overlap(const std::vector<Cell>& cells, double a, double b, double cutoff = 0.0) {
    double s = 0.0;
    for (auto c : cells) {
        double lo = std::max({c.lo, a, cutoff}), hi = std::min(c.hi, b);
        if (hi > lo) s += hi - lo;
    }
    return s;
}

// min over x = 0, step, 2 step, ... <= end of |cells cap [x, x+L]| / L
inline double scan_profile(const std::vector<Cell>& cells, double L, double end, double step,
                           double cutoff = 0.0) {
    double best = 1.0;
    long long n = static_cast<long long>(std::floor(end / step + 1e-9));
    for (long long i = 0; i <= n; ++i) {
        double x = i * step;
        best = std::min(best, overlap(cells, x, x + L, cutoff) / L);
    }
    return best;
}

}  // namespace oracle
