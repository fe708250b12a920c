#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "sets.hpp"

namespace halfline {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

enum class Scheme { gauss_legendre, midpoint };

inline const char* scheme_name(Scheme s) {
    return s == Scheme::gauss_legendre ? "gauss_legendre" : "midpoint";
}

constexpr int panel_size = 8;

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int m, std::vector<double>& t, std::vector<double>& w) {
    t.assign(m, 0.0);
    w.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= m; ++k) {
            double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = m * (z * p1 - p0) / (z * z - 1.0);
        t[m - 1 - i] = z;
        w[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

struct Grid {
    double x_max = 0.0;
    int n = 0;
    Scheme scheme = Scheme::gauss_legendre;
    std::vector<double> nodes;
    std::vector<double> weights;

    bool same_as(const Grid& o) const {
        return this == &o || (n == o.n && x_max == o.x_max && scheme == o.scheme);
    }
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(double x_max, int n, Scheme scheme = Scheme::gauss_legendre) {
    if (!(x_max > 0) || !std::isfinite(x_max)) throw invalid_parameter("x_max must be positive");
    if (n < 8) throw invalid_parameter("n must be at least 8");
    auto g = std::make_shared<Grid>();
    g->x_max = x_max;
    g->n = n;
    g->scheme = scheme;
    g->nodes.reserve(n);
    g->weights.reserve(n);
    if (scheme == Scheme::midpoint) {
        double h = x_max / n;
        for (int i = 0; i < n; ++i) {
            g->nodes.push_back((i + 0.5) * h);
            g->weights.push_back(h);
        }
        return g;
    }
    if (n % panel_size != 0) throw invalid_parameter("Gauss-Legendre grids need n divisible by 8");
    std::vector<double> t, w;
    gauss_legendre(panel_size, t, w);
    int panels = n / panel_size;
    double h = x_max / panels;
    for (int p = 0; p < panels; ++p)
        for (int j = 0; j < panel_size; ++j) {
            g->nodes.push_back((p + 0.5) * h + 0.5 * h * t[j]);
            g->weights.push_back(0.5 * h * w[j]);
        }
    return g;
}

struct SampledFunction {
    GridPtr grid;
    Vec values;

    SampledFunction() = default;
    SampledFunction(GridPtr g, Vec v) : grid(std::move(g)), values(std::move(v)) {
        if (!grid) throw invalid_parameter("null grid");
        if (values.size() != grid->n) throw grid_mismatch("values length differs from node count");
    }

    template <class F>
    static SampledFunction from(GridPtr g, F&& f) {
        Vec v(g->n);
        for (int i = 0; i < g->n; ++i) v[i] = cplx(f(g->nodes[i]));
        return SampledFunction(g, std::move(v));
    }

    static SampledFunction zero(GridPtr g) { return SampledFunction(g, Vec::Zero(g->n)); }
};

inline void check_same_grid(const Grid& a, const Grid& b) {
    if (!a.same_as(b)) throw grid_mismatch("functions live on different grids");
}

inline Eigen::VectorXd weight_vector(const Grid& g) {
    return Eigen::Map<const Eigen::VectorXd>(g.weights.data(), g.n);
}

// sum_j w_j conj(f_j) g_j
inline cplx inner_product(const SampledFunction& f, const SampledFunction& g) {
    check_same_grid(*f.grid, *g.grid);
    cplx s = 0.0;
    const auto& w = f.grid->weights;
    for (int j = 0; j < f.grid->n; ++j) s += w[j] * std::conj(f.values[j]) * g.values[j];
    return s;
}

inline double norm(const SampledFunction& f) {
    double s = 0.0;
    const auto& w = f.grid->weights;
    for (int j = 0; j < f.grid->n; ++j) s += w[j] * std::norm(f.values[j]);
    return std::sqrt(s);
}

inline Eigen::VectorXd indicator(const Grid& g, const IntervalSet& omega) {
    Eigen::VectorXd m(g.n);
    for (int j = 0; j < g.n; ++j) m[j] = omega.contains(g.nodes[j]) ? 1.0 : 0.0;
    return m;
}

inline SampledFunction restrict(const SampledFunction& f, const IntervalSet& omega) {
    Vec v = f.values.cwiseProduct(indicator(*f.grid, omega).cast<cplx>());
    return SampledFunction(f.grid, std::move(v));
}

// Fraction of squared norm carried by nodes with x > x_max - margin.
inline double tail_mass(const SampledFunction& f, double margin) {
    double tot = 0.0, tail = 0.0;
    const auto& g = *f.grid;
    for (int j = 0; j < g.n; ++j) {
        double m = g.weights[j] * std::norm(f.values[j]);
        tot += m;
        if (g.nodes[j] > g.x_max - margin) tail += m;
    }
    return tot > 0 ? tail / tot : 0.0;
}

inline void require_decay(const SampledFunction& f, double margin, double tol = 1e-8) {
    double t = tail_mass(f, margin);
    if (t > tol) {
        std::ostringstream os;
        os << "tail mass " << t << " exceeds " << tol;
        throw domain_error(os.str());
    }
}

// Fornberg weights for the m-th derivative at z from nodes x[0..n-1].
inline std::vector<double> fd_weights(double z, const std::vector<double>& x, int m) {
    const int n = static_cast<int>(x.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = x[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

// m-th derivative by local finite differences on the nearest nodes
// (centered stencil of the given width, shifted at the ends).
inline SampledFunction differentiate(const SampledFunction& f, int m, int width = 7) {
    const auto& g = *f.grid;
    Vec out(g.n);
    int half = width / 2;
    for (int i = 0; i < g.n; ++i) {
        int lo = std::clamp(i - half, 0, g.n - width);
        std::vector<double> xs(g.nodes.begin() + lo, g.nodes.begin() + lo + width);
        auto w = fd_weights(g.nodes[i], xs, m);
        cplx s = 0.0;
        for (int j = 0; j < width; ++j) s += w[j] * f.values[lo + j];
        out[i] = s;
    }
    return SampledFunction(f.grid, std::move(out));
}

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string to_csv(const SampledFunction& f) {
    std::string out = "x,re,im\n";
    for (int j = 0; j < f.grid->n; ++j) {
        out += format_real(f.grid->nodes[j]) + "," + format_real(f.values[j].real()) + "," +
               format_real(f.values[j].imag()) + "\n";
    }
    return out;
}

// Reads x,re,im rows; the x column must reproduce the grid's nodes.
inline SampledFunction from_csv(GridPtr g, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "x,re,im") throw invalid_parameter("CSV header must be x,re,im");
    Vec v(g->n);
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= g->n) throw grid_mismatch("CSV has more rows than grid nodes");
        double x, re, im;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &re, &im) != 3)
            throw invalid_parameter("malformed CSV row " + std::to_string(row + 1));
        if (std::abs(x - g->nodes[row]) > 1e-12 * (1 + std::abs(x)))
            throw grid_mismatch("CSV x column does not match grid node " + std::to_string(row));
        v[row++] = cplx(re, im);
    }
    if (row != g->n) throw grid_mismatch("CSV has fewer rows than grid nodes");
    return SampledFunction(g, std::move(v));
}

}  // namespace halfline
