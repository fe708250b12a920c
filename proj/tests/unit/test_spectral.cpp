#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <halfline/spectral.hpp>

#include "jacobi_eigen.hpp"

using namespace halfline;

namespace {

const SpectralSetup& point_setup() {
    static SpectralSetup s = make_setup(OperatorSpec::point_interaction(1.0), make_grid(40, 512), make_grid(40, 512));
    return s;
}

}  // namespace

TEST(BandSubspace, HalfLineConstantIsOne) {
    auto sub = build_band_subspace(point_setup(), {point_setup().op, 2.0, 4.0});
    auto c = sharp_constant(sub, IntervalSet::half_line());
    EXPECT_NEAR(c.c_star, 1.0, 1e-10);
    EXPECT_FALSE(c.infinite);
}

TEST(BandSubspace, BasisIsOrthonormal) {
    auto sub = build_band_subspace(point_setup(), {point_setup().op, 1.0, 3.5});
    Mat G = gram(sub);
    EXPECT_LT((G - Mat::Identity(sub.dim(), sub.dim())).norm(), 1e-10);
    EXPECT_EQ(sub.dim() + sub.dropped, sub.requested);
}

TEST(BandSubspace, EigenvaluesMatchJacobi) {
    auto sub = build_band_subspace(point_setup(), {point_setup().op, 2.0, 4.0});
    auto omega = IntervalSet::periodic(2, 1);
    Mat G = compress(sub.basis, *sub.grid, indicator(*sub.grid, omega));
    std::vector<std::vector<cplx>> h(G.rows(), std::vector<cplx>(G.cols()));
    for (Eigen::Index i = 0; i < G.rows(); ++i)
        for (Eigen::Index j = 0; j < G.cols(); ++j) h[i][j] = G(i, j);
    auto ev = oracle::hermitian_eigenvalues(h);
    auto c = sharp_constant(sub, omega);
    EXPECT_NEAR(c.lambda_min, ev.front(), 1e-10);
    EXPECT_NEAR(c.lambda_max, ev.back(), 1e-10);
    EXPECT_NEAR(c.c_star, 1.0 / ev.front(), 1e-8);
}

TEST(BandSubspace, BoundStateIsRemoved) {
    auto s = make_setup(OperatorSpec::point_interaction(-1.0), make_grid(40, 512), make_grid(40, 512));
    auto sub = build_band_subspace(s, {s.op, 0.5, 2.5});
    auto phi = bound_state({-1.0}, s.x);
    Eigen::VectorXd w = weight_vector(*s.x);
    Vec wphi = phi.values.cwiseProduct(w.cast<cplx>());
    for (int j = 0; j < sub.dim(); ++j) EXPECT_LT(std::abs(wphi.dot(sub.basis.col(j))), 1e-10);
}

TEST(BandSubspace, Errors) {
    const auto& s = point_setup();
    EXPECT_THROW(build_band_subspace(s, {s.op, 3.0, 2.0}), invalid_parameter);
    EXPECT_THROW(build_band_subspace(s, {s.op, 50.0, 51.0}), empty_band);
    EXPECT_THROW(build_band_subspace(s, {s.op, 2.0, 2.2}, 1000), invalid_parameter);
    EXPECT_THROW(sweep_constant(s, IntervalSet::half_line(), 2.0, {39.0}), invalid_parameter);
    EXPECT_THROW(OperatorSpec::inverse_square(-0.3), invalid_parameter);
    auto sub = build_band_subspace(s, {s.op, 2.0, 4.0});
    EXPECT_TRUE(sharp_constant(sub, IntervalSet::empty()).infinite);
}

TEST(Sweep, SummaryRatios) {
    std::vector<SweepRow> rows{{0, 1, 2.0}, {1, 2, 1.0}, {2, 3, 4.0}, {3, 4, 3.0}};
    auto s = summarize(rows);
    EXPECT_DOUBLE_EQ(s.max_over_min, 4.0);
    EXPECT_DOUBLE_EQ(s.blowup_ratio, 4.0);
    EXPECT_DOUBLE_EQ(s.c_min, 1.0);
    EXPECT_DOUBLE_EQ(s.c_max, 4.0);
    auto rows2 = sweep_constant(point_setup(), IntervalSet::half_line(), 2.0, {0.0, 4.0});
    ASSERT_EQ(rows2.size(), 2u);
    for (const auto& r : rows2) EXPECT_NEAR(r.c_star, 1.0, 1e-10);
}

TEST(EnergyBands, PlainAndShifted) {
    auto op = OperatorSpec::inverse_square_nu(0.5);
    auto b = band_from_energy({25, 100}, op, BandVariant::plain);
    ASSERT_TRUE(b);
    EXPECT_NEAR(b->a, std::sqrt(15.0), 1e-14);
    EXPECT_NEAR(b->b, std::sqrt(35.0), 1e-14);
    auto z = band_from_energy({0, 100}, op, BandVariant::plain);
    EXPECT_DOUBLE_EQ(z->a, 0.0);
    EXPECT_NEAR(z->b, std::sqrt(10.0), 1e-14);
    EXPECT_FALSE(band_from_energy({0, 1}, op, BandVariant::shifted));
    auto s5 = band_from_energy({5, 1}, op, BandVariant::shifted);
    EXPECT_NEAR(s5->a, std::sqrt(std::pow(std::sqrt(5.0) - 1, 2) - 1), 1e-14);
    EXPECT_NEAR(s5->b, std::sqrt(std::pow(std::sqrt(5.0) + 1, 2) - 1), 1e-14);
    EXPECT_FALSE(band_from_energy({-5, 1}, op, BandVariant::plain));
    EXPECT_THROW(band_from_energy({1, 0}, op, BandVariant::plain), invalid_parameter);
}

TEST(Constants, C0IsGoldenRatioAtUnitParameters) {
    EXPECT_NEAR(kovrijkine_c0(1, 1), (1 + std::sqrt(5.0)) / 2, 1e-12);
    EXPECT_THROW(kovrijkine_c0(1, 0), invalid_parameter);
}

TEST(Constants, KovrijkineSeriesMatchesClosedForm) {
    for (double z : {0.5, 1.0, 3.0}) {
        auto k = kovrijkine_constants(1.0, 0.5, 1.0, z, 1.0);
        EXPECT_NEAR(k.series_log, k.series_closed, 1e-10);
        EXPECT_NEAR(k.B, 2.0, 1e-15);
    }
    EXPECT_THROW(kovrijkine_constants(1.0, 0.5, 0.5, 1.0, 1.0), invalid_parameter);
    EXPECT_THROW(kovrijkine_constants(1.0, 1.5, 1.0, 1.0, 1.0), invalid_parameter);
}

TEST(Constants, PredictedConstantValueAndMonotonicity) {
    EXPECT_NEAR(ls_predicted_log10(0, 0.3, 1, 1), -3771.2, 0.5);
    EXPECT_LT(ls_predicted_log10(0, 0.3, 2, 1), ls_predicted_log10(0, 0.3, 1, 1));
    EXPECT_LT(ls_predicted_log10(0, 0.2, 1, 1), ls_predicted_log10(0, 0.3, 1, 1));
    EXPECT_LT(ls_predicted_log10(1, 0.3, 1, 1), ls_predicted_log10(0, 0.3, 1, 1));
    EXPECT_THROW(ls_predicted_log10(0, 0, 1, 1), invalid_parameter);
}

TEST(ProjectionKernel, HalfOrderClosedForm) {
    auto op = OperatorSpec::inverse_square_nu(0.5);
    double a = 1.0, b = 9.0;
    for (auto [x, y] : {std::pair{0.5, 1.7}, {2.0, 2.0}, {3.3, 0.4}}) {
        auto F = [&](double k) {
            double s = x == y ? k : std::sin((x - y) * k) / (x - y);
            return (s - std::sin((x + y) * k) / (x + y)) / std::numbers::pi;
        };
        double ref = F(3.0) - F(1.0);
        EXPECT_NEAR(projection_kernel_value(op, a, b, x, y).real(), ref, 1e-12);
    }
    EXPECT_THROW(projection_kernel_value(op, 2, 1, 1, 1), invalid_parameter);
}

TEST(ProjectionKernel, PointInteractionIsHermitian) {
    auto op = OperatorSpec::point_interaction(0.7);
    cplx p = projection_kernel_value(op, 0.5, 4, 1.2, 2.9);
    cplx q = projection_kernel_value(op, 0.5, 4, 2.9, 1.2);
    EXPECT_LT(std::abs(p - std::conj(q)), 1e-13);
}

TEST(Resolvent, StoneFormula) {
    for (double x : {0.3, 1.0, 4.0})
        for (double y : {0.5, 2.5}) {
            EXPECT_LT(stone_formula_defect(0.0, 2.0, x, y), 1e-8);
            EXPECT_LT(stone_formula_defect(0.3 * 0.3 - 0.25, 2.0, x, y), 1e-6);
        }
    EXPECT_THROW(resolvent_kernel(1, 0, 0, 1, 1), invalid_parameter);
}

TEST(Hardy, RatioBelowOne) {
    auto g = make_grid(20, 1024);
    for (double p : {1.0, 1.5, 3.0}) {
        auto u = SampledFunction::from(g, [=](double x) { return std::pow(x, p) * std::exp(-x); });
        double r = hardy_ratio(u);
        EXPECT_GT(r, 0.0);
        EXPECT_LE(r, 1.0);
    }
    EXPECT_THROW(hardy_ratio(SampledFunction::zero(g)), domain_error);
}

TEST(Diagonalization, ForwardTransformTurnsOperatorIntoMultiplication) {
    for (double nu : {0.5, 1.0}) {
        auto s = make_setup(OperatorSpec::inverse_square_nu(nu), make_grid(40, 1024), make_grid(40, 1024));
        for (double c : {6.0, 10.0}) {
            auto f = SampledFunction::from(s.x, [=](double x) { return std::exp(-(x - c) * (x - c) / 2); });
            EXPECT_LT(diagonalization_defect(s, f), 1e-2) << nu << " " << c;
        }
    }
    EXPECT_THROW(diagonalization_defect(point_setup(), SampledFunction::zero(point_setup().x)), invalid_parameter);
}
