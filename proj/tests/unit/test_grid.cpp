#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <halfline/grid.hpp>

using namespace halfline;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    std::vector<double> t, w;
    gauss_legendre(8, t, w);
    for (int p = 0; p <= 15; ++p) {
        double s = 0.0;
        for (int i = 0; i < 8; ++i) s += w[i] * std::pow(t[i], p);
        double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
        EXPECT_NEAR(s, exact, 1e-14) << p;
    }
}

TEST(Grid, NodesAndWeights) {
    auto g = make_grid(40, 1024);
    EXPECT_EQ(g->n, 1024);
    double s = 0.0;
    for (double w : g->weights) s += w;
    EXPECT_NEAR(s, 40.0, 1e-12);
    EXPECT_GT(g->nodes.front(), 0.0);
    EXPECT_LT(g->nodes.back(), 40.0);
    EXPECT_TRUE(std::is_sorted(g->nodes.begin(), g->nodes.end()));
    auto m = make_grid(2, 8, Scheme::midpoint);
    EXPECT_DOUBLE_EQ(m->nodes[0], 0.125);
}

TEST(Grid, RejectsBadParameters) {
    EXPECT_THROW(make_grid(0, 64), invalid_parameter);
    EXPECT_THROW(make_grid(10, 4), invalid_parameter);
    EXPECT_THROW(make_grid(10, 60), invalid_parameter);
    EXPECT_NO_THROW(make_grid(10, 60, Scheme::midpoint));
}

TEST(Grid, InnerProductAndNorm) {
    auto g = make_grid(30, 512);
    auto f = SampledFunction::from(g, [](double x) { return std::exp(-x); });
    EXPECT_NEAR(norm(f), std::sqrt(0.5 * (1 - std::exp(-60.0))), 1e-13);
    auto h = SampledFunction::from(g, [](double x) { return cplx(0, 1) * std::exp(-x); });
    EXPECT_NEAR(inner_product(f, h).imag(), 0.5, 1e-12);
    auto other = make_grid(30, 256);
    EXPECT_THROW(inner_product(f, SampledFunction::zero(other)), grid_mismatch);
    EXPECT_THROW(SampledFunction(g, Vec::Zero(3)), grid_mismatch);
}

TEST(Grid, RestrictionsAndTails) {
    auto g = make_grid(8, 256);  // panel edges at multiples of 1/4
    auto f = SampledFunction::from(g, [](double) { return 1.0; });
    auto r = restrict(f, IntervalSet::periodic(2, 1));
    EXPECT_NEAR(norm(r) * norm(r), 4.0, 1e-12);
    EXPECT_NEAR(tail_mass(f, 2.0), 0.25, 1e-12);
    EXPECT_THROW(require_decay(f, 2.0), domain_error);
}

TEST(FiniteDifferences, WeightsAndDerivatives) {
    auto w = fd_weights(0.0, {-1.0, 0.0, 1.0}, 2);
    EXPECT_NEAR(w[0], 1.0, 1e-14);
    EXPECT_NEAR(w[1], -2.0, 1e-14);
    EXPECT_NEAR(w[2], 1.0, 1e-14);
    auto g = make_grid(10, 800);
    auto f = SampledFunction::from(g, [](double x) { return std::sin(x); });
    auto d2 = differentiate(f, 2);
    double worst = 0.0;
    for (int i = 0; i < g->n; ++i) worst = std::max(worst, std::abs(d2.values[i] + std::sin(g->nodes[i])));
    EXPECT_LT(worst, 1e-6);
}

TEST(Csv, RoundTrip) {
    auto g = make_grid(5, 16);
    auto f = SampledFunction::from(g, [](double x) { return cplx(std::cos(x), std::sin(3 * x)); });
    std::string text = to_csv(f);
    EXPECT_EQ(text.substr(0, 8), "x,re,im\n");
    auto back = from_csv(g, text);
    EXPECT_EQ((back.values - f.values).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(from_csv(make_grid(5, 24), text), grid_mismatch);
    EXPECT_THROW(from_csv(g, "a,b\n"), invalid_parameter);
}
