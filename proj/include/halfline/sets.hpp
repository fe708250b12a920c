#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace halfline {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Finite or periodic union of closed intervals in [0, inf), optionally
// intersected with [cutoff, inf).
class IntervalSet {
public:
    IntervalSet() = default;

    IntervalSet(std::vector<Interval> cells, std::optional<double> period = std::nullopt,
                double cutoff = 0.0)
        : cells_(std::move(cells)), period_(period), cutoff_(cutoff) {
        validate();
    }

    static IntervalSet half_line() { return IntervalSet({{0.0, 1.0}}, 1.0); }
    static IntervalSet empty() { return IntervalSet(std::vector<Interval>{}); }

    // [offset + n*period, offset + n*period + width]
    static IntervalSet periodic(double period, double width, double offset = 0.0) {
        return IntervalSet({{offset, offset + width}}, period);
    }

    // [n^2, n^2 + 1] for n = 0..n_max.
    static IntervalSet squares(int n_max) {
        std::vector<Interval> v;
        for (int n = 0; n <= n_max; ++n) {
            double a = static_cast<double>(n) * n;
            if (!v.empty() && a <= v.back().hi) {
                v.back().hi = a + 1.0;
                continue;
            }
            v.push_back({a, a + 1.0});
        }
        return IntervalSet(std::move(v));
    }

    const std::vector<Interval>& cells() const { return cells_; }
    const std::optional<double>& period() const { return period_; }
    double cutoff() const { return cutoff_; }
    bool is_periodic() const { return period_.has_value(); }
    bool is_empty() const { return cells_.empty(); }

    IntervalSet with_cutoff(double c) const {
        return IntervalSet(cells_, period_, std::max(cutoff_, c));
    }

    // Largest point of the set, infinity when periodic.
    double sup() const {
        if (cells_.empty()) return 0.0;
        if (period_) return std::numeric_limits<double>::infinity();
        return cells_.back().hi;
    }

    bool contains(double x) const {
        if (x < cutoff_ || x < 0 || cells_.empty()) return false;
        double y = x;
        if (period_) {
            double p = *period_;
            y = x - std::floor(x / p) * p;
            // closed cells touching the period boundary
            for (const auto& c : cells_)
                if ((y >= c.lo && y <= c.hi) || (y + p >= c.lo && y + p <= c.hi)) return true;
            return false;
        }
        for (const auto& c : cells_)
            if (y >= c.lo && y <= c.hi) return true;
        return false;
    }

    // Pieces of the set inside [a, b], in increasing order.
    std::vector<Interval> pieces(double a, double b) const {
        std::vector<Interval> out;
        a = std::max({a, 0.0, cutoff_});
        if (!(b > a) || cells_.empty()) return out;
        auto push = [&](double lo, double hi) {
            lo = std::max(lo, a);
            hi = std::min(hi, b);
            if (hi > lo) {
                if (!out.empty() && lo <= out.back().hi)
                    out.back().hi = std::max(out.back().hi, hi);
                else
                    out.push_back({lo, hi});
            }
        };
        if (!period_) {
            for (const auto& c : cells_) push(c.lo, c.hi);
            return out;
        }
        double p = *period_;
        long long k0 = static_cast<long long>(std::floor(a / p)) - 1;
        long long k1 = static_cast<long long>(std::floor(b / p)) + 1;
        for (long long k = std::max(0LL, k0); k <= k1; ++k)
            for (const auto& c : cells_) push(c.lo + k * p, c.hi + k * p);
        return out;
    }

    // Lebesgue measure of the set inside [a, b].
    double measure(double a, double b) const {
        if (!(b > a)) return 0.0;
        if (period_) {
            double p = *period_;
            double start = std::max({a, 0.0, cutoff_});
            if (!(b > start)) return 0.0;
            double whole = std::floor((b - start) / p);
            if (whole >= 2) return whole * measure_cell() + measure_direct(start + whole * p, b);
        }
        return measure_direct(a, b);
    }

    // Weighted measure int_{set cap [a,b]} t^kappa dt.
    double mu_measure(double a, double b, double kappa) const {
        double s = 0.0;
        for (const auto& iv : pieces(a, b))
            s += (std::pow(iv.hi, kappa + 1) - std::pow(iv.lo, kappa + 1)) / (kappa + 1);
        return s;
    }

    // Endpoints in [0, limit], cutoff included.
    std::vector<double> endpoints(double limit) const {
        std::vector<double> e;
        if (cutoff_ > 0) e.push_back(cutoff_);
        for (const auto& iv : pieces(0.0, limit)) {
            e.push_back(iv.lo);
            e.push_back(iv.hi);
        }
        return e;
    }

private:
    double measure_cell() const {
        double s = 0.0;
        for (const auto& c : cells_) s += c.hi - c.lo;
        return s;
    }

    double measure_direct(double a, double b) const {
        double s = 0.0;
        for (const auto& iv : pieces(a, b)) s += iv.hi - iv.lo;
        return s;
    }

    void validate() {
        if (!(cutoff_ >= 0) || !std::isfinite(cutoff_)) throw invalid_parameter("cutoff must be finite and >= 0");
        if (period_ && !(*period_ > 0 && std::isfinite(*period_)))
            throw invalid_parameter("period must be positive and finite");
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            const auto& c = cells_[i];
            if (!std::isfinite(c.lo) || !std::isfinite(c.hi)) throw invalid_parameter("interval endpoints must be finite");
            if (c.lo < 0) throw invalid_parameter("interval endpoints must be nonnegative");
            if (!(c.hi > c.lo)) throw invalid_parameter("zero-length or reversed interval");
            if (i > 0 && c.lo <= cells_[i - 1].hi) throw invalid_parameter("intervals must be sorted and disjoint");
            if (period_ && c.hi > *period_) throw invalid_parameter("periodic cells must lie in [0, period]");
        }
    }

    std::vector<Interval> cells_;
    std::optional<double> period_;
    double cutoff_ = 0.0;
};

struct ThicknessWitness {
    double gamma = 0.0;
    double L = 0.0;
};

namespace detail {

inline void add_candidate(std::vector<double>& v, double x, double lo, double hi) {
    if (x >= lo && x <= hi) v.push_back(x);
}

// Window positions where x -> |set cap [x, x+L]| can change slope, over [lo, hi].
inline std::vector<double> window_breakpoints(const IntervalSet& s, double L, double lo, double hi) {
    std::vector<double> v{lo, hi};
    for (double e : s.endpoints(hi + L)) {
        add_candidate(v, e, lo, hi);
        add_candidate(v, e - L, lo, hi);
    }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

inline double scan_end(const IntervalSet& s, std::optional<double> horizon, double L) {
    if (s.is_periodic()) return s.cutoff() + *s.period();
    if (!horizon) throw invalid_parameter("thickness of an aperiodic set needs a scan horizon");
    if (!(*horizon >= L)) throw invalid_parameter("scan horizon must be at least L");
    return *horizon - L;
}

}  // namespace detail

// inf_x |set cap [x, x+L]| / L, exact for interval unions.
inline double thickness_profile(const IntervalSet& s, double L,
                                std::optional<double> horizon = std::nullopt) {
    if (!(L > 0)) throw invalid_parameter("L must be positive");
    if (s.is_empty()) return 0.0;
    double end = detail::scan_end(s, horizon, L);
    double best = 1.0;
    for (double x : detail::window_breakpoints(s, L, 0.0, end))
        best = std::min(best, s.measure(x, x + L) / L);
    return std::clamp(best, 0.0, 1.0);
}

// inf_x mu(set cap [x, x+L]) / mu([x, x+L]) with mu = t^(2 nu + 1) dt.
// The ratio is not piecewise linear, so each breakpoint segment is sampled
// and the best sample refined by golden-section search. For periodic sets
// the large-x limit (the plain density profile) is included.
inline double mu_thickness_profile(const IntervalSet& s, double nu, double L,
                                   std::optional<double> horizon = std::nullopt) {
    if (!(L > 0)) throw invalid_parameter("L must be positive");
    if (!(nu >= 0)) throw invalid_parameter("nu must be >= 0");
    if (s.is_empty()) return 0.0;
    const double kappa = 2 * nu + 1;
    auto ratio = [&](double x) {
        double full = (std::pow(x + L, kappa + 1) - std::pow(x, kappa + 1)) / (kappa + 1);
        return s.mu_measure(x, x + L, kappa) / full;
    };
    double end;
    double best = 1.0;
    if (s.is_periodic()) {
        end = s.cutoff() + 64 * *s.period() + 16 * L;
        best = thickness_profile(s, L);
    } else {
        end = detail::scan_end(s, horizon, L);
    }
    auto bp = detail::window_breakpoints(s, L, 0.0, end);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        double a = bp[i], b = bp[i + 1];
        const int m = 16;
        double xbest = a, vbest = ratio(a);
        for (int j = 1; j <= m; ++j) {
            double x = a + (b - a) * j / m;
            double v = ratio(x);
            if (v < vbest) { vbest = v; xbest = x; }
        }
        double lo = std::max(a, xbest - (b - a) / m), hi = std::min(b, xbest + (b - a) / m);
        const double g = 0.5 * (std::sqrt(5.0) - 1);
        for (int it = 0; it < 60 && hi - lo > 1e-12 * (1 + hi); ++it) {
            double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
            if (ratio(c) < ratio(d)) hi = d; else lo = c;
        }
        best = std::min({best, vbest, ratio(0.5 * (lo + hi))});
    }
    if (bp.size() == 1) best = std::min(best, ratio(bp[0]));
    return std::clamp(best, 0.0, 1.0);
}

inline bool is_thick(const IntervalSet& s, const ThicknessWitness& w,
                     std::optional<double> horizon = std::nullopt) {
    return thickness_profile(s, w.L, horizon) >= w.gamma - 1e-12;
}

enum class Transfer { mu_to_thick, thick_to_mu };

// Largest eps in (0, rL] with
// (x+rL)^(k+1) - x^(k+1) > (r^(k+1)/2) ((x+L)^(k+1) - x^(k+1)) on [0, eps].
inline double transfer_epsilon(double r, double L, double nu) {
    const double k1 = 2 * nu + 2;
    auto pred = [&](double x) {
        double lhs = std::pow(x + r * L, k1) - std::pow(x, k1);
        double rhs = 0.5 * std::pow(r, k1) * (std::pow(x + L, k1) - std::pow(x, k1));
        return lhs > rhs;
    };
    const double cap = r * L;
    const int samples = 4096;
    double good = 0.0;
    for (int i = 1; i <= samples; ++i) {
        double x = cap * i / samples;
        if (!pred(x)) {
            double lo = good, hi = x;
            while (hi - lo > 1e-6) {
                double mid = 0.5 * (lo + hi);
                if (pred(mid)) lo = mid; else hi = mid;
            }
            return std::max(lo, 1e-300);
        }
        good = x;
    }
    return cap;
}

// mu_to_thick: a mu_nu-thick set with constant (r, L) is thick with the
// returned constant. thick_to_mu: a thick set with constant (r, L) is
// mu_nu-thick with the returned constant.
inline double thickness_transfer_constant(Transfer dir, double r, double L, double nu) {
    if (!(r > 0 && r <= 1)) throw invalid_parameter("r must lie in (0, 1]");
    if (!(L > 0)) throw invalid_parameter("L must be positive");
    if (!(nu >= 0)) throw invalid_parameter("nu must be >= 0");
    const double kappa = 2 * nu + 1;
    if (dir == Transfer::mu_to_thick) return r / (kappa + 1);
    double eps = transfer_epsilon(r, L, nu);
    double t4 = (std::pow(2.0, kappa + 1) - 1) / std::pow(1 + L / eps, kappa + 1);
    return std::min({std::pow(0.5, kappa) * r, std::pow(0.5, kappa) * std::pow(r, kappa + 1),
                     0.5 * std::pow(r, kappa + 1), t4});
}

struct TrimResult {
    IntervalSet set;
    double L1 = 0.0;
    double r1 = 0.0;
};

// Removes [0, c]; the result is thick with window L1 and density r1.
inline TrimResult trim_tail(const IntervalSet& s, double c, std::optional<ThicknessWitness> w,
                            std::optional<double> horizon = std::nullopt) {
    if (!w) throw invalid_parameter("trim_tail needs a thickness witness (r, L)");
    if (!(c >= 0)) throw invalid_parameter("c must be >= 0");
    if (!(w->L > 0) || !(w->gamma > 0 && w->gamma <= 1)) throw invalid_parameter("bad witness");
    if (!is_thick(s, *w, horizon)) throw invalid_parameter("witness does not hold for this set");
    double m = std::floor(c / w->L) + 2;
    return {c > 0 ? s.with_cutoff(c) : s, m * w->L, w->gamma / m};
}

}  // namespace halfline
