#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "sets.hpp"
#include "spectral.hpp"
#include "transforms.hpp"

namespace halfline {

struct PropagatorSpec {
    SpectralSetup setup;
    double T = 1.0;
    int n_t = 64;

    void validate() const {
        if (!(T > 0)) throw invalid_parameter("T must be positive");
        if (n_t < 4) throw invalid_parameter("n_t must be at least 4");
    }
};

// Spectral data of an initial state: transform of its continuous part plus
// the bound-state coefficient.
struct SpectralState {
    Vec g;
    cplx bound = 0.0;
    std::optional<SampledFunction> phi;
};

inline SpectralState decompose(const SpectralSetup& s, const SampledFunction& u0) {
    check_same_grid(*s.x, *u0.grid);
    SpectralState st;
    if (s.op.has_bound_state()) {
        st.phi = bound_state({s.op.beta}, s.x);
        st.bound = inner_product(*st.phi, u0);
        st.g = s.forward.matrix * (u0.values - st.bound * st.phi->values);
    } else {
        st.g = s.forward.matrix * u0.values;
    }
    return st;
}

// Under i u_t = H u the bound state picks up e^{+i t beta^2}.
inline SampledFunction synthesize(const SpectralSetup& s, const SpectralState& st, double t) {
    const Grid& kg = *s.k;
    Vec h(kg.n);
    for (int i = 0; i < kg.n; ++i) h[i] = std::exp(cplx(0, -t * kg.nodes[i] * kg.nodes[i])) * st.g[i];
    Vec u = s.adjoint.matrix * h;
    if (st.phi) u += std::exp(cplx(0, t * s.op.beta * s.op.beta)) * st.bound * st.phi->values;
    return SampledFunction(s.x, std::move(u));
}

inline void require_initial_decay(const SampledFunction& u0) {
    require_decay(u0, 0.1 * u0.grid->x_max, 1e-8);
}

inline SampledFunction evolve(const SpectralSetup& s, const SampledFunction& u0, double t) {
    require_initial_decay(u0);
    return synthesize(s, decompose(s, u0), t);
}

struct MassSeries {
    std::vector<double> t;
    std::vector<double> mass;
};

inline MassSeries mass_series(const SpectralSetup& s, const SampledFunction& u0, const IntervalSet& omega,
                              double T, int n_t) {
    SpectralState st = decompose(s, u0);
    Eigen::VectorXd wm = weight_vector(*s.x).cwiseProduct(indicator(*s.x, omega));
    MassSeries ms;
    ms.t.resize(n_t + 1);
    ms.mass.resize(n_t + 1);
    parallel_for(static_cast<std::size_t>(n_t + 1), [&](std::size_t j) {
        double t = T * static_cast<double>(j) / n_t;
        SampledFunction u = synthesize(s, st, t);
        double m = 0.0;
        for (int i = 0; i < s.x->n; ++i) m += wm[i] * std::norm(u.values[i]);
        ms.t[j] = t;
        ms.mass[j] = m;
    });
    return ms;
}

inline double trapezoid(const MassSeries& ms) {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < ms.t.size(); ++j) s += 0.5 * (ms.t[j + 1] - ms.t[j]) * (ms.mass[j] + ms.mass[j + 1]);
    return s;
}

// (int_0^T int_omega |u|^2 dx dt) / ||u0||^2
inline double observability_ratio(const PropagatorSpec& p, const SampledFunction& u0, const IntervalSet& omega) {
    p.validate();
    require_initial_decay(u0);
    double n0 = norm(u0);
    if (n0 == 0.0) throw invalid_parameter("zero initial datum");
    return trapezoid(mass_series(p.setup, u0, omega, p.T, p.n_t)) / (n0 * n0);
}

struct EnsembleOptions {
    int size = 40;
    std::uint64_t seed = 0x5EED;
    double k_lo = 0.0;
    double k_hi = 3.0;  // packets stay inside the box for moderate T
    double adversarial_fraction = 0.3;
};

struct ObservabilityReport {
    double c_obs_estimate = 0.0;
    int worst_index = -1;
    std::string worst_kind;
    SampledFunction worst_initial_datum;
    double T = 0.0;
    IntervalSet omega;
    std::optional<double> miller_T_bound;
    std::map<std::string, double> residuals;
    std::vector<double> ratios;
};

// Gaps of omega inside [0, limit], longest first.
inline std::vector<Interval> gaps_of(const IntervalSet& omega, double limit) {
    std::vector<Interval> g;
    double prev = 0.0;
    for (const auto& p : omega.pieces(0.0, limit)) {
        if (p.lo > prev) g.push_back({prev, p.lo});
        prev = p.hi;
    }
    if (prev < limit) g.push_back({prev, limit});
    std::stable_sort(g.begin(), g.end(), [](const Interval& a, const Interval& b) {
        return (a.hi - a.lo) > (b.hi - b.lo);
    });
    return g;
}

// Adjoint image of a Gaussian profile centred in [a, b], tapered to the band
// by the smooth window and modulated by sum_m amp_m e^{i k c_m}. Quadrature
// noise the adjoint leaves near the far edge is cleared.
inline Vec band_packet(const SpectralSetup& s, double a, double b, double sk, const std::vector<double>& cs,
                       const std::vector<cplx>& amp) {
    const Grid& kg = *s.k;
    double kc = 0.5 * (a + b);
    Vec g = Vec::Zero(kg.n);
    for (int i = 0; i < kg.n; ++i) {
        double k = kg.nodes[i];
        double w = band_window((k - a) / (b - a));
        if (w == 0.0) continue;
        double d = (k - kc) / sk;
        cplx acc = 0.0;
        for (std::size_t m = 0; m < cs.size(); ++m) acc += amp[m] * std::exp(cplx(0, k * cs[m]));
        g[i] = w * std::exp(-0.5 * d * d) * acc;
    }
    Vec v = s.adjoint.matrix * g;
    for (int i = 0; i < s.x->n; ++i)
        if (s.x->nodes[i] > 0.9 * s.x->x_max) v[i] = 0.0;
    return v;
}

struct EnsembleMember {
    std::string kind;
    SampledFunction u0;
};

inline std::vector<EnsembleMember> build_ensemble(const SpectralSetup& s, const IntervalSet& omega,
                                                  const EnsembleOptions& opt) {
    if (opt.size < 1) throw invalid_parameter("ensemble size must be positive");
    if (!(opt.k_hi > opt.k_lo) || opt.k_lo < 0 || opt.k_hi > s.k->x_max)
        throw invalid_parameter("ensemble band range must satisfy 0 <= k_lo < k_hi <= k_max");
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double xm = s.x->x_max;
    int n_adv = static_cast<int>(std::round(opt.adversarial_fraction * opt.size));
    int n_rand = opt.size - n_adv;
    auto gaps = gaps_of(omega, 0.5 * xm);
    std::vector<EnsembleMember> out;
    for (int e = 0; e < n_rand; ++e) {
        double span = opt.k_hi - opt.k_lo;
        double len = std::min(span, 2.0) + (span - std::min(span, 2.0)) * u01(rng);
        double a = opt.k_lo + (span - len) * u01(rng);
        double sk = len / 8.0;
        int terms = 1 + static_cast<int>(2 * u01(rng));
        std::vector<double> cs;
        std::vector<cplx> amp;
        for (int m = 0; m < terms; ++m) {
            cs.push_back(xm * (0.25 + 0.1 * u01(rng)));
            double r = u01(rng), th = 2 * std::numbers::pi * u01(rng);
            amp.push_back(std::polar(0.2 + r, th));
        }
        Vec v = band_packet(s, a, a + len, sk, cs, amp);
        SampledFunction u = to_ac(s, SampledFunction(s.x, std::move(v)));
        out.push_back({"band_limited", SampledFunction(s.x, u.values / norm(u))});
    }
    for (int e = 0; e < n_adv; ++e) {
        double center, width;
        if (!gaps.empty()) {
            const auto& gp = gaps[static_cast<std::size_t>(e) % gaps.size()];
            double len = gp.hi - gp.lo;
            center = gp.lo + len * (0.35 + 0.3 * u01(rng));
            width = std::max(0.5, len / 6.0);
        } else {
            center = xm * (0.2 + 0.15 * u01(rng));
            width = 1.0 + u01(rng);
        }
        center = std::max(center, 4 * width);
        double k0 = opt.k_lo + (opt.k_hi - opt.k_lo) * u01(rng) * 0.25;
        SampledFunction u = SampledFunction::from(s.x, [&](double x) {
            double d = (x - center) / width;
            return std::exp(-0.5 * d * d) * std::exp(cplx(0, k0 * x));
        });
        u = to_ac(s, u);
        out.push_back({"gap_concentrated", SampledFunction(s.x, u.values / norm(u))});
    }
    return out;
}

inline double miller_time(double k, double D) {
    if (!(k > 0) || !(D > 0)) throw invalid_parameter("miller_time needs k > 0 and D > 0");
    return std::numbers::pi * std::sqrt((1 + k) / D);
}

// c_obs = max over the ensemble of 1 / observability_ratio; ties resolve to
// the lowest index.
inline ObservabilityReport estimate_cobs(const PropagatorSpec& p, const IntervalSet& omega,
                                         const EnsembleOptions& opt) {
    p.validate();
    auto members = build_ensemble(p.setup, omega, opt);
    std::vector<double> ratios(members.size());
    std::vector<double> tails(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        tails[i] = tail_mass(members[i].u0, 0.1 * p.setup.x->x_max);
        ratios[i] = trapezoid(mass_series(p.setup, members[i].u0, omega, p.T, p.n_t));
    }
    ObservabilityReport r;
    r.T = p.T;
    r.omega = omega;
    r.ratios = ratios;
    double best = -1.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        double c = ratios[i] > 0 ? 1.0 / ratios[i] : std::numeric_limits<double>::infinity();
        if (c > best) {
            best = c;
            r.worst_index = static_cast<int>(i);
        }
    }
    r.c_obs_estimate = best;
    r.worst_kind = members[r.worst_index].kind;
    r.worst_initial_datum = members[r.worst_index].u0;
    r.residuals["max_initial_tail_mass"] = *std::max_element(tails.begin(), tails.end());
    SampledFunction uT = evolve(p.setup, members[r.worst_index].u0, p.T);
    r.residuals["worst_norm_drift"] = std::abs(norm(uT) - 1.0);
    r.residuals["worst_final_tail_mass"] = tail_mass(uT, 0.1 * p.setup.x->x_max);
    return r;
}

// (H - lambda) u applied spectrally.
inline SampledFunction apply_shifted(const SpectralSetup& s, const SampledFunction& u, double lambda) {
    SpectralState st = decompose(s, u);
    const Grid& kg = *s.k;
    Vec h(kg.n);
    for (int i = 0; i < kg.n; ++i) h[i] = (kg.nodes[i] * kg.nodes[i] - lambda) * st.g[i];
    Vec v = s.adjoint.matrix * h;
    if (st.phi) v += (-s.op.beta * s.op.beta - lambda) * st.bound * st.phi->values;
    return SampledFunction(s.x, std::move(v));
}

// M ||(H - lambda) u||^2 + m ||u||_E^2 - ||u||^2
inline double hautus_residual(const SpectralSetup& s, const SampledFunction& u, double lambda, double M,
                              double m, const IntervalSet& E) {
    if (!(M > 0) || !(m > 0)) throw invalid_parameter("M and m must be positive");
    require_initial_decay(u);
    double a = norm(apply_shifted(s, u, lambda));
    double e = norm(restrict(u, E));
    double n0 = norm(u);
    return M * a * a + m * e * e - n0 * n0;
}

// (1 + lambda)^{-1} ||((H + 1) - lambda) f||^2 + ||f||_omega^2 - C ||f||^2
inline double resolvent_gap_residual(const SpectralSetup& s, const SampledFunction& f, double lambda, double C,
                                     const IntervalSet& omega) {
    if (s.op.is_point()) throw invalid_parameter("resolvent-gap check is for the inverse-square operator");
    if (!(lambda >= 0)) throw invalid_parameter("lambda must be >= 0");
    require_initial_decay(f);
    double a = norm(apply_shifted(s, f, lambda - 1.0));
    double e = norm(restrict(f, omega));
    double n0 = norm(f);
    return a * a / (1 + lambda) + e * e - C * n0 * n0;
}

}  // namespace halfline
