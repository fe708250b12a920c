#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "specialfn.hpp"

namespace halfline {

inline constexpr double sqrt_2_over_pi = 0.79788456080286535588;
inline constexpr long long default_entry_cap = 4096LL * 4096LL;

enum class KernelKind { hankel, modified_hankel, point_interaction, point_interaction_adjoint, cos_phase };

inline const char* kernel_name(KernelKind k) {
    switch (k) {
        case KernelKind::hankel: return "hankel";
        case KernelKind::modified_hankel: return "modified_hankel";
        case KernelKind::point_interaction: return "point_interaction";
        case KernelKind::point_interaction_adjoint: return "point_interaction_adjoint";
        default: return "cos_phase";
    }
}

// Generalized eigenfunction of H^beta:
// (1/2i) (beta+ik)/(beta-ik) e^{ikx} - (1/2i) e^{-ikx}.
inline cplx psi_beta(double beta, double x, double k) {
    if (k == 0.0) return beta == 0.0 ? cplx(0, 1) : cplx(0, 0);
    const cplx i(0, 1);
    cplx r = (beta + i * k) / (beta - i * k);
    return (r * std::exp(i * k * x) - std::exp(-i * k * x)) / (2.0 * i);
}

inline cplx psi_beta_dx(double beta, double x, double k) {
    if (k == 0.0) return 0.0;
    const cplx i(0, 1);
    cplx r = (beta + i * k) / (beta - i * k);
    return (r * i * k * std::exp(i * k * x) + i * k * std::exp(-i * k * x)) / (2.0 * i);
}

// Closed forms at the boundary.
inline cplx psi_beta_at_zero(double beta, double k) { return k / (beta - cplx(0, k)); }
inline cplx psi_beta_dx_at_zero(double beta, double k) { return beta * k / (beta - cplx(0, k)); }

struct PointInteractionSpec {
    double beta = 0.0;
    bool bound_state_present() const { return beta < 0; }
};

struct TransformKernel {
    KernelKind kind = KernelKind::hankel;
    double param = 0.0;  // nu, beta, or phase b
    GridPtr source;
    GridPtr target;
    Mat matrix;
};

inline cplx kernel_value(KernelKind kind, double param, double x, double k) {
    switch (kind) {
        case KernelKind::hankel:
            return std::sqrt(x * k) * bessel_j(param, x * k);
        case KernelKind::modified_hankel: {
            double z = x * k;
            double j = bessel_j(param, z);
            return (z == 0.0 ? (param == 0.0 ? 1.0 : std::pow(0.5, param) / gamma_fn(param + 1))
                             : std::pow(z, -param) * j);
        }
        case KernelKind::point_interaction:
            return sqrt_2_over_pi * psi_beta(param, x, k);
        case KernelKind::point_interaction_adjoint:
            return sqrt_2_over_pi * std::conj(psi_beta(param, x, k));
        default:
            return sqrt_2_over_pi * std::cos(x * k - param);
    }
}

// Entry (i, j) = K(source_j, target_i) * w_j. For the modified Hankel kernel
// the weight also carries source_j^(2 nu + 1).
inline TransformKernel build_kernel(KernelKind kind, double param, GridPtr source, GridPtr target,
                                    long long entry_cap = default_entry_cap) {
    if (!source || !target) throw invalid_parameter("null grid");
    if (static_cast<long long>(source->n) * target->n > entry_cap)
        throw resource_error("kernel size " + std::to_string(source->n) + "x" +
                             std::to_string(target->n) + " exceeds the configured cap");
    if (kind == KernelKind::hankel || kind == KernelKind::modified_hankel) check_order(param);
    TransformKernel K{kind, param, source, target, Mat(target->n, source->n)};
    const auto& xs = source->nodes;
    const auto& ws = source->weights;
    const auto& ks = target->nodes;
    parallel_for(static_cast<std::size_t>(target->n), [&](std::size_t i) {
        for (int j = 0; j < source->n; ++j) {
            double w = ws[j];
            if (kind == KernelKind::modified_hankel) w *= std::pow(xs[j], 2 * param + 1);
            // the adjoint's first argument is the position variable
            cplx v = kind == KernelKind::point_interaction_adjoint
                         ? kernel_value(kind, param, ks[i], xs[j])
                         : kernel_value(kind, param, xs[j], ks[i]);
            K.matrix(static_cast<Eigen::Index>(i), j) = v * w;
        }
    });
    return K;
}

inline SampledFunction apply(const TransformKernel& K, const SampledFunction& f) {
    check_same_grid(*K.source, *f.grid);
    return SampledFunction(K.target, K.matrix * f.values);
}

inline SampledFunction bound_state(const PointInteractionSpec& spec, GridPtr g) {
    if (!spec.bound_state_present()) throw invalid_parameter("bound state exists only for beta < 0");
    double b = spec.beta;
    double c = std::sqrt(2 * std::abs(b));
    return SampledFunction::from(g, [&](double x) { return c * std::exp(b * x); });
}

inline SampledFunction project_ac(const PointInteractionSpec& spec, const SampledFunction& f) {
    if (!spec.bound_state_present()) return f;
    SampledFunction phi = bound_state(spec, f.grid);
    cplx c = inner_product(phi, f);
    return SampledFunction(f.grid, f.values - c * phi.values);
}

// L^2(t^(2 nu + 1) dt) norm, used for the modified Hankel transform.
inline double weighted_norm(const SampledFunction& f, double nu) {
    double s = 0.0;
    const auto& g = *f.grid;
    for (int j = 0; j < g.n; ++j) s += g.weights[j] * std::pow(g.nodes[j], 2 * nu + 1) * std::norm(f.values[j]);
    return std::sqrt(s);
}

// max_f | ||K f|| - ||P_ac f|| | / ||f||
inline double plancherel_defect(const TransformKernel& K, const std::vector<SampledFunction>& family) {
    double worst = 0.0;
    for (const auto& f : family) {
        double out, in, ref;
        if (K.kind == KernelKind::modified_hankel) {
            out = weighted_norm(apply(K, f), K.param);
            in = ref = weighted_norm(f, K.param);
        } else {
            in = norm(f);
            ref = in;
            if (K.kind == KernelKind::point_interaction && K.param < 0)
                ref = norm(project_ac({K.param}, f));
            out = norm(apply(K, f));
        }
        if (in == 0.0) continue;
        worst = std::max(worst, std::abs(out - ref) / in);
    }
    return worst;
}

// max_f || K2 K1 f - P f || / ||f|| with P the identity or the ac projection.
inline double roundtrip_defect(const TransformKernel& first, const TransformKernel& second,
                               const std::vector<SampledFunction>& family, double beta_ac = 1.0) {
    double worst = 0.0;
    for (const auto& f : family) {
        SampledFunction back = apply(second, apply(first, f));
        SampledFunction ref = project_ac({beta_ac}, f);
        double d = norm(SampledFunction(f.grid, back.values - ref.values));
        double n0 = norm(f);
        if (n0 > 0) worst = std::max(worst, d / n0);
    }
    return worst;
}

// x * exp(-(x - c)^2 / (2 s^2)) for a spread of centers and widths.
inline std::vector<SampledFunction> gaussian_x_family(GridPtr g) {
    std::vector<SampledFunction> fam;
    for (double c : {0.0, 3.0, 6.0, 10.0})
        for (double s : {0.7, 1.0, 1.5, 2.0})
            fam.push_back(SampledFunction::from(g, [=](double x) {
                return x * std::exp(-(x - c) * (x - c) / (2 * s * s));
            }));
    return fam;
}

// Members with the small-x behaviour x^(nu + 1/2) that the Hankel transform
// maps to rapidly decaying functions, plus Gaussians held away from 0.
inline std::vector<SampledFunction> hankel_test_family(GridPtr g, double nu) {
    std::vector<SampledFunction> fam;
    for (double s : {0.7, 1.0, 1.5, 2.0, 3.0})
        fam.push_back(SampledFunction::from(g, [=](double x) {
            return std::pow(x, nu + 0.5) * std::exp(-x * x / (2 * s * s));
        }));
    for (double c : {6.0, 10.0})
        for (double s : {0.8, 1.0, 1.5, 2.0, 2.5})
            fam.push_back(SampledFunction::from(g, [=](double x) {
                return x * std::exp(-(x - c) * (x - c) / (2 * s * s));
            }));
    return fam;
}

// Smooth bump supported in log x on [log lo, log hi].
inline double log_bump(double x, double lo, double hi) {
    if (x <= lo || x >= hi) return 0.0;
    double t = (std::log(x) - std::log(lo)) / (std::log(hi) - std::log(lo));
    double s = 2 * t - 1;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

// Fifty decaying test functions: Gaussian packets (plain and modulated),
// polynomial-exponential profiles, and windowed x^(-1/2 + i s) profiles,
// whose cosine and sine transforms approach the extremal frame ratios.
inline std::vector<SampledFunction> frame_test_family(GridPtr g) {
    std::vector<SampledFunction> fam;
    for (double c : {4.0, 8.0, 12.0})
        for (double s : {0.6, 1.2})
            fam.push_back(SampledFunction::from(g, [=](double x) {
                return std::exp(-(x - c) * (x - c) / (2 * s * s));
            }));
    for (int m = 1; m <= 6; ++m)
        fam.push_back(SampledFunction::from(g, [=](double x) { return std::pow(x, m) * std::exp(-x * 6.0 / m); }));
    for (double w : {2.0, 5.0, 9.0, 14.0, 20.0})
        for (double c : {6.0, 12.0})
            fam.push_back(SampledFunction::from(g, [=](double x) {
                return std::exp(-(x - c) * (x - c) / 8.0) * std::exp(cplx(0, w * x));
            }));
    for (double w : {3.0, 8.0, 15.0, 25.0})
        fam.push_back(SampledFunction::from(g, [=](double x) {
            return std::exp(-(x - 10) * (x - 10) / 18.0) * std::cos(w * x);
        }));
    for (double s : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 12.0}) {
        fam.push_back(SampledFunction::from(g, [=](double x) {
            return log_bump(x, 0.25, 25.0) * std::pow(x, -0.5) * std::exp(cplx(0, s * std::log(x)));
        }));
    }
    for (double s : {-1.0, -3.0, -6.0, -10.0, 2.5, 7.0, 9.0, 11.0, 14.0, 16.0, 18.0, 20.0})
        fam.push_back(SampledFunction::from(g, [=](double x) {
            return log_bump(x, 0.4, 22.0) * std::pow(x, -0.5) * std::exp(cplx(0, s * std::log(x)));
        }));
    return fam;
}

struct FrameBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// Empirical min and max of ||T_b f|| / ||f|| over the family.
inline FrameBounds t_beta_frame_bounds(double b, GridPtr x_grid, GridPtr k_grid,
                                       const std::vector<SampledFunction>& family) {
    if (family.empty()) throw invalid_parameter("empty test family");
    TransformKernel T = build_kernel(KernelKind::cos_phase, b, x_grid, k_grid);
    FrameBounds fb{1e300, 0.0};
    for (const auto& f : family) {
        double n0 = norm(f);
        if (n0 == 0.0) continue;
        double r = norm(apply(T, f)) / n0;
        fb.lower = std::min(fb.lower, r);
        fb.upper = std::max(fb.upper, r);
    }
    return fb;
}

inline std::string kernel_csv(const TransformKernel& K) {
    std::string out = "row,col,re,im\n";
    for (Eigen::Index i = 0; i < K.matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < K.matrix.cols(); ++j)
            out += std::to_string(i) + "," + std::to_string(j) + "," + format_real(K.matrix(i, j).real()) + "," +
                   format_real(K.matrix(i, j).imag()) + "\n";
    return out;
}

}  // namespace halfline
