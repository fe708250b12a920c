#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "sets.hpp"
#include "specialfn.hpp"
#include "transforms.hpp"

namespace halfline {

struct OperatorSpec {
    enum class Kind { point_interaction, inverse_square };
    Kind kind = Kind::point_interaction;
    double beta = 0.0;
    double alpha = 0.0;

    static OperatorSpec point_interaction(double beta) { return {Kind::point_interaction, beta, 0.0}; }
    static OperatorSpec inverse_square(double alpha) {
        if (!(alpha >= -0.25)) throw invalid_parameter("alpha must be >= -1/4");
        return {Kind::inverse_square, 0.0, alpha};
    }
    static OperatorSpec inverse_square_nu(double nu) {
        if (!(nu >= 0)) throw invalid_parameter("nu must be >= 0");
        return inverse_square(nu * nu - 0.25);
    }

    bool is_point() const { return kind == Kind::point_interaction; }
    double nu() const { return std::sqrt(std::max(0.0, alpha + 0.25)); }
    bool has_bound_state() const { return is_point() && beta < 0; }
    std::string describe() const {
        return is_point() ? "point_interaction(beta=" + format_real(beta) + ")"
                          : "inverse_square(alpha=" + format_real(alpha) + ")";
    }
};

struct BandSpec {
    OperatorSpec op;
    double a = 0.0;
    double b = 0.0;
    double length() const { return b - a; }
};

struct EnergyWindow {
    double lambda = 0.0;
    double D = 1.0;
};

enum class BandVariant { plain, shifted };

// plain: {xi >= 0 : |xi^2 - lambda| <= sqrt(D)}
// shifted: {xi >= 0 : |sqrt(xi^2 + 1) - sqrt(lambda)| <= 1}
// An empty set is returned as nullopt.
inline std::optional<BandSpec> band_from_energy(const EnergyWindow& w, const OperatorSpec& op,
                                                BandVariant variant) {
    if (!(w.D > 0)) throw invalid_parameter("D must be positive");
    if (variant == BandVariant::plain) {
        double r = std::sqrt(w.D);
        if (w.lambda + r <= 0) return std::nullopt;
        double a = std::sqrt(std::max(0.0, w.lambda - r));
        double b = std::sqrt(w.lambda + r);
        return BandSpec{op, a, b};
    }
    if (w.lambda < 0) return std::nullopt;
    double sl = std::sqrt(w.lambda);
    double s_lo = std::max(1.0, sl - 1.0), s_hi = sl + 1.0;
    if (s_hi <= 1.0) return std::nullopt;
    return BandSpec{op, std::sqrt(s_lo * s_lo - 1.0), std::sqrt(s_hi * s_hi - 1.0)};
}

// Operator together with its diagonalizing transform realized on (x, k) grids.
struct SpectralSetup {
    OperatorSpec op;
    GridPtr x;
    GridPtr k;
    TransformKernel forward;  // x -> k
    TransformKernel adjoint;  // k -> x
};

inline SpectralSetup make_setup(const OperatorSpec& op, GridPtr x, GridPtr k,
                                long long entry_cap = default_entry_cap) {
    if (op.is_point())
        return {op, x, k, build_kernel(KernelKind::point_interaction, op.beta, x, k, entry_cap),
                build_kernel(KernelKind::point_interaction_adjoint, op.beta, k, x, entry_cap)};
    return {op, x, k, build_kernel(KernelKind::hankel, op.nu(), x, k, entry_cap),
            build_kernel(KernelKind::hankel, op.nu(), k, x, entry_cap)};
}

inline SampledFunction to_ac(const SpectralSetup& s, const SampledFunction& f) {
    return s.op.has_bound_state() ? project_ac({s.op.beta}, f) : f;
}

struct BandOptions {
    double localization = 0.0;  // packet centers lie in [0, localization]; 0 means x_max / 2
    double rank_tol = 1e-5;     // relative residual below which a direction is dropped
    int max_dim = 64;
};

struct BandSubspace {
    BandSpec band;
    GridPtr grid;
    Mat basis;  // columns orthonormal in the grid inner product
    int requested = 0;
    int dropped = 0;
    double min_residual = 1.0;
    std::vector<double> centers;
    int dim() const { return static_cast<int>(basis.cols()); }
};

inline double band_window(double t) {
    if (t <= 0 || t >= 1) return 0.0;
    double s = 2 * t - 1;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

inline int default_band_dim(const BandSpec& band, double localization, int count, int cap) {
    int d = static_cast<int>(std::floor(localization * band.length() / std::numbers::pi)) + 1;
    return std::max(1, std::min({d, count, cap}));
}

// Candidate members are transform-side packets w((k - a)/(b - a)) e^{i k c_m}
// mapped back by the adjoint transform; their images concentrate near x = c_m,
// so the subspace lives inside the truncated box. Orthonormalized by modified
// Gram-Schmidt with one re-orthogonalization pass.
inline BandSubspace build_band_subspace(const SpectralSetup& s, const BandSpec& band, int dim = 0,
                                        BandOptions opt = {}) {
    if (!(band.a >= 0) || !(band.b > band.a)) throw invalid_parameter("band needs 0 <= a < b");
    const Grid& kg = *s.k;
    std::vector<int> inside;
    for (int i = 0; i < kg.n; ++i)
        if (kg.nodes[i] >= band.a && kg.nodes[i] <= band.b) inside.push_back(i);
    if (inside.empty()) throw empty_band("band [" + format_real(band.a) + ", " + format_real(band.b) +
                                         "] holds no transform-side nodes");
    double loc = opt.localization > 0 ? opt.localization : 0.5 * s.x->x_max;
    int count = static_cast<int>(inside.size());
    if (dim > count) throw invalid_parameter("dim exceeds the number of transform-side nodes in the band");
    if (dim <= 0) dim = default_band_dim(band, loc, count, opt.max_dim);

    BandSubspace sub;
    sub.band = band;
    sub.grid = s.x;
    sub.requested = dim;
    for (int m = 0; m < dim; ++m) sub.centers.push_back(dim == 1 ? 0.0 : loc * m / (dim - 1));

    Mat g = Mat::Zero(kg.n, dim);
    for (int m = 0; m < dim; ++m)
        for (int i : inside) {
            double k = kg.nodes[i];
            g(i, m) = band_window((k - band.a) / band.length()) * std::exp(cplx(0, k * sub.centers[m]));
        }
    Mat cand = s.adjoint.matrix * g;
    if (s.op.has_bound_state()) {
        SampledFunction phi = bound_state({s.op.beta}, s.x);
        Eigen::VectorXd w = weight_vector(*s.x);
        Vec wphi = phi.values.cwiseProduct(w.cast<cplx>());
        for (int m = 0; m < dim; ++m) {
            cplx c = wphi.dot(cand.col(m));
            cand.col(m) -= c * phi.values;
        }
    }

    Eigen::VectorXd w = weight_vector(*s.x);
    auto ip = [&](const Vec& a, const Vec& b) { return a.dot(b.cwiseProduct(w.cast<cplx>())); };
    std::vector<Vec> kept;
    for (int m = 0; m < dim; ++m) {
        Vec v = cand.col(m);
        double n0 = std::sqrt(std::max(0.0, ip(v, v).real()));
        if (n0 == 0.0) { ++sub.dropped; continue; }
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : kept) v -= ip(q, v) * q;
        double n1 = std::sqrt(std::max(0.0, ip(v, v).real()));
        if (n1 < opt.rank_tol * n0) { ++sub.dropped; continue; }
        sub.min_residual = std::min(sub.min_residual, n1 / n0);
        kept.push_back(v / n1);
    }
    if (kept.empty()) throw rank_deficiency("band subspace has numerical rank 0", std::numeric_limits<double>::infinity());
    sub.basis.resize(s.x->n, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) sub.basis.col(static_cast<Eigen::Index>(j)) = kept[j];
    return sub;
}

// B^H diag(w * m) B for a mask m on the grid nodes.
inline Mat compress(const Mat& basis, const Grid& g, const Eigen::VectorXd& mask) {
    Eigen::VectorXd wm = weight_vector(g).cwiseProduct(mask);
    Mat scaled = wm.cast<cplx>().asDiagonal() * basis;
    Mat G = basis.adjoint() * scaled;
    return 0.5 * (G + G.adjoint());
}

inline Mat gram(const BandSubspace& sub) {
    return compress(sub.basis, *sub.grid, Eigen::VectorXd::Ones(sub.grid->n));
}

struct SharpConstant {
    double c_star = 1.0;
    double lambda_min = 1.0;
    double lambda_max = 1.0;
    int dim = 0;
    bool infinite = false;
};

// C* = 1 / lambda_min of the compression of the indicator of omega.
inline SharpConstant sharp_constant(const BandSubspace& sub, const IntervalSet& omega) {
    if (sub.dim() == 0) throw degenerate_subspace("empty band subspace");
    Mat G = compress(sub.basis, *sub.grid, indicator(*sub.grid, omega));
    Eigen::SelfAdjointEigenSolver<Mat> es(G, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw degenerate_subspace("eigensolver failed");
    SharpConstant r;
    r.dim = sub.dim();
    r.lambda_min = es.eigenvalues()(0);
    r.lambda_max = es.eigenvalues()(es.eigenvalues().size() - 1);
    if (r.lambda_min < 1e-12) {
        r.infinite = true;
        r.c_star = std::numeric_limits<double>::infinity();
    } else {
        r.c_star = std::max(1.0, 1.0 / r.lambda_min);
    }
    return r;
}

struct SweepRow {
    double a = 0.0;
    double b = 0.0;
    double c_star = 0.0;
    double lambda_min = 0.0;
    int dim = 0;
    int n_grid = 0;
};

inline std::vector<SweepRow> sweep_constant(const SpectralSetup& s, const IntervalSet& omega, double ell,
                                            const std::vector<double>& a_values, int dim = 0,
                                            BandOptions opt = {}) {
    if (!(ell > 0)) throw invalid_parameter("band length must be positive");
    for (double a : a_values)
        if (!(a >= 0) || a + ell > s.k->x_max + 1e-12)
            throw invalid_parameter("band [" + format_real(a) + ", " + format_real(a + ell) +
                                    "] does not fit inside [0, k_max]");
    return parallel_map<SweepRow>(a_values.size(), [&](std::size_t i) {
        BandSpec band{s.op, a_values[i], a_values[i] + ell};
        BandSubspace sub = build_band_subspace(s, band, dim, opt);
        SharpConstant c = sharp_constant(sub, omega);
        return SweepRow{band.a, band.b, c.c_star, c.lambda_min, c.dim, s.x->n};
    });
}

struct SweepSummary {
    double max_over_min = 1.0;
    double blowup_ratio = 1.0;  // largest C*(a_j) / C*(a_i) with i < j
    double c_min = 0.0;
    double c_max = 0.0;
};

inline SweepSummary summarize(const std::vector<SweepRow>& rows) {
    SweepSummary s;
    if (rows.empty()) return s;
    s.c_min = s.c_max = rows[0].c_star;
    double running_min = rows[0].c_star;
    for (std::size_t j = 1; j < rows.size(); ++j) {
        double c = rows[j].c_star;
        s.blowup_ratio = std::max(s.blowup_ratio, c / running_min);
        running_min = std::min(running_min, c);
        s.c_min = std::min(s.c_min, c);
        s.c_max = std::max(s.c_max, c);
    }
    s.max_over_min = s.c_max / s.c_min;
    return s;
}

// log10 of (2/3) (r / (300 * 9^nu))^((160 sqrt3 pi / ln 2) h L + nu ln3/ln2 + 1)
inline double ls_predicted_log10(double nu, double r, double L, double h) {
    if (!(r > 0 && r <= 1)) throw invalid_parameter("r must lie in (0, 1]");
    if (!(L > 0) || !(h > 0)) throw invalid_parameter("L and h must be positive");
    if (!(nu >= 0)) throw invalid_parameter("nu must be >= 0");
    using std::numbers::ln2;
    using std::numbers::pi;
    double expo = (160.0 * std::sqrt(3.0) * pi / ln2) * h * L + nu * (std::log(3.0) / ln2) + 1.0;
    double base = std::log10(r) - std::log10(300.0) - nu * std::log10(9.0);
    return std::log10(2.0 / 3.0) + expo * base;
}

inline double ls_predicted_exponent(double nu, double L, double h) {
    using std::numbers::ln2;
    return (160.0 * std::sqrt(3.0) * std::numbers::pi / ln2) * h * L + nu * (std::log(3.0) / ln2) + 1.0;
}

struct KovrijkineConstants {
    double C0 = 0.0;
    double B = 0.0;
    double series_log = 0.0;     // ln sum_n B^n (5L)^n (C_beta (b-a))^n / n!, summed term by term
    double series_closed = 0.0;  // same quantity in closed form
    double log_C1 = 0.0;         // ln C1 = ln C0 + series_log + ln(L)/2
    double prefactor = 0.0;      // ((s-L)^2 + beta^2) / ((s+L)^2 + beta^2), s = sqrt(L^2 + 4 beta^2)
    double exponent = 0.0;       // 2 ln C1 / ln 2 + 1
    double log10_C2 = 0.0;
};

inline double kovrijkine_c0(double L, double beta) {
    if (beta == 0.0) throw invalid_parameter("C0 diverges at beta = 0");
    if (!(L > 0)) throw invalid_parameter("L must be positive");
    double s = std::sqrt(L * L + 4 * beta * beta);
    double num = (s + L) * (s + L) + 4 * beta * beta;
    double den = (s - L) * (s - L) + 4 * beta * beta;
    return std::sqrt(num / den);
}

inline KovrijkineConstants kovrijkine_constants(double beta, double r, double L, double b_minus_a,
                                                double c_beta) {
    if (!(r > 0 && r <= 1)) throw invalid_parameter("r must lie in (0, 1]");
    if (!(L > 0.5)) throw invalid_parameter("L must exceed 1/2 for B = sqrt(4L/(2L-1))");
    if (!(b_minus_a > 0)) throw invalid_parameter("b - a must be positive");
    if (!(c_beta > 0)) throw invalid_parameter("C_beta must be positive");
    KovrijkineConstants k;
    k.C0 = kovrijkine_c0(L, beta);
    k.B = std::sqrt(4 * L / (2 * L - 1));
    double z = k.B * 5 * L * c_beta * b_minus_a;
    double lz = std::log(z);
    // log-sum-exp over n of n ln z - ln n!
    double peak = -std::numeric_limits<double>::infinity();
    int nmax = static_cast<int>(z + 40 * std::sqrt(z + 1) + 50);
    std::vector<double> terms(nmax + 1);
    for (int n = 0; n <= nmax; ++n) {
        terms[n] = n * lz - std::lgamma(n + 1.0);
        peak = std::max(peak, terms[n]);
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - peak);
    k.series_log = peak + std::log(acc);
    k.series_closed = z;
    k.log_C1 = std::log(k.C0) + k.series_log + 0.5 * std::log(L);
    double s = std::sqrt(L * L + 4 * beta * beta);
    k.prefactor = ((s - L) * (s - L) + beta * beta) / ((s + L) * (s + L) + beta * beta);
    k.exponent = 2 * k.log_C1 / std::numbers::ln2 + 1;
    k.log10_C2 = std::log10(k.prefactor) + k.exponent * std::log10(r / 300.0);
    return k;
}

// Spectral projection kernel for the energy window [a, b] (a >= 0), as an
// integral over k in [sqrt a, sqrt b] with 64 Gauss-Legendre nodes per unit k.
//   inverse square: int k sqrt(xy) J_nu(kx) J_nu(ky) dk
//   point interaction: (2/pi) int conj(psi(x,k)) psi(y,k) dk
inline cplx projection_kernel_value(const OperatorSpec& op, double a, double b, double x, double y) {
    if (!(a >= 0) || !(b > a)) throw invalid_parameter("energy window needs 0 <= a < b");
    if (!(x > 0) || !(y > 0)) throw invalid_parameter("x and y must be positive");
    double k0 = std::sqrt(a), k1 = std::sqrt(b);
    int panels = std::max(1, static_cast<int>(std::ceil((k1 - k0) * 8)));
    std::vector<double> t, w;
    gauss_legendre(panel_size, t, w);
    double h = (k1 - k0) / panels;
    cplx s = 0.0;
    double nu = op.nu();
    for (int p = 0; p < panels; ++p)
        for (int j = 0; j < panel_size; ++j) {
            double k = k0 + (p + 0.5) * h + 0.5 * h * t[j];
            double wk = 0.5 * h * w[j];
            if (op.is_point())
                s += wk * (2.0 / std::numbers::pi) * std::conj(psi_beta(op.beta, x, k)) * psi_beta(op.beta, y, k);
            else
                s += wk * k * std::sqrt(x * y) * bessel_j(nu, k * x) * bessel_j(nu, k * y);
        }
    return s;
}

// R(lambda +- i0; x, y) = +-(i pi / 2) sqrt(xy) J(sqrt(lambda) min) H^+-(sqrt(lambda) max)
inline cplx resolvent_kernel(int sign, double alpha, double lambda, double x, double y) {
    if (!(lambda > 0)) throw invalid_parameter("lambda must be positive");
    double nu = std::sqrt(alpha + 0.25);
    double sl = std::sqrt(lambda);
    double lo = std::min(x, y), hi = std::max(x, y);
    return double(sign) * cplx(0, std::numbers::pi / 2) * std::sqrt(x * y) * bessel_j(nu, sl * lo) *
           hankel_h(sign, nu, sl * hi);
}

inline double stone_formula_defect(double alpha, double lambda, double x, double y) {
    if (!(alpha >= -0.25)) throw invalid_parameter("alpha must be >= -1/4");
    if (!(x > 0) || !(y > 0)) throw invalid_parameter("x and y must be positive");
    double nu = std::sqrt(alpha + 0.25);
    double sl = std::sqrt(lambda);
    cplx jump = (resolvent_kernel(1, alpha, lambda, x, y) - resolvent_kernel(-1, alpha, lambda, x, y)) /
                cplx(0, 2 * std::numbers::pi);
    double ref = 0.5 * std::sqrt(x * y) * bessel_j(nu, sl * x) * bessel_j(nu, sl * y);
    return std::abs(jump - ref);
}

// (1/4 int |u|^2 / x^2) / int |u'|^2, u' by local centered differences.
inline double hardy_ratio(const SampledFunction& u) {
    SampledFunction du = differentiate(u, 1);
    const auto& g = *u.grid;
    double lhs = 0.0, rhs = 0.0;
    for (int j = 0; j < g.n; ++j) {
        double x = g.nodes[j];
        lhs += g.weights[j] * std::norm(u.values[j]) / (x * x);
        rhs += g.weights[j] * std::norm(du.values[j]);
    }
    if (rhs == 0.0) throw domain_error("function has zero derivative energy");
    return 0.25 * lhs / rhs;
}

// -u'' + alpha u / x^2 by local finite differences.
inline SampledFunction apply_h_alpha_fd(double alpha, const SampledFunction& u) {
    SampledFunction d2 = differentiate(u, 2);
    const auto& g = *u.grid;
    Vec v(g.n);
    for (int j = 0; j < g.n; ++j) v[j] = -d2.values[j] + alpha / (g.nodes[j] * g.nodes[j]) * u.values[j];
    return SampledFunction(u.grid, std::move(v));
}

inline double diagonalization_defect(const SpectralSetup& s, const SampledFunction& f) {
    if (s.op.is_point()) throw invalid_parameter("diagonalization check is for the inverse-square operator");
    SampledFunction hf = apply_h_alpha_fd(s.op.alpha, f);
    SampledFunction lhs = apply(s.forward, hf);
    SampledFunction ff = apply(s.forward, f);
    Vec rhs = ff.values;
    for (int i = 0; i < s.k->n; ++i) rhs[i] *= s.k->nodes[i] * s.k->nodes[i];
    double num = norm(SampledFunction(s.k, lhs.values - rhs));
    return num / norm(hf);
}

}  // namespace halfline
