#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <halfline/transforms.hpp>

using namespace halfline;

namespace {

GridPtr ref_x() {
    static GridPtr g = make_grid(40, 1024);
    return g;
}

}  // namespace

TEST(PsiBeta, BoundaryConditionHolds) {
    for (double beta : {-2.0, -1.0, 0.0, 0.5, 3.0})
        for (double k : {0.1, 1.0, 4.0, 25.0}) {
            EXPECT_LT(std::abs(psi_beta_dx(beta, 0, k) - beta * psi_beta(beta, 0, k)), 1e-10);
            EXPECT_LT(std::abs(psi_beta(beta, 0, k) - psi_beta_at_zero(beta, k)), 1e-12);
            EXPECT_LT(std::abs(psi_beta_dx(beta, 0, k) - psi_beta_dx_at_zero(beta, k)), 1e-12);
        }
}

TEST(PsiBeta, SolvesHelmholtz) {
    double beta = 0.7, k = 2.3, x = 1.9, h = 1e-3;
    cplx d2 = (psi_beta(beta, x + h, k) - 2.0 * psi_beta(beta, x, k) + psi_beta(beta, x - h, k)) / (h * h);
    EXPECT_LT(std::abs(-d2 - k * k * psi_beta(beta, x, k)), 1e-5);
}

TEST(Kernels, HalfOrderIsSineKernel) {
    for (double x : {0.01, 0.7, 5.0, 39.0})
        for (double k : {0.02, 1.3, 17.0, 40.0})
            EXPECT_NEAR(kernel_value(KernelKind::hankel, 0.5, x, k).real(), sqrt_2_over_pi * std::sin(x * k), 1e-10);
}

TEST(Kernels, CapIsEnforced) {
    auto g = make_grid(10, 64);
    EXPECT_THROW(build_kernel(KernelKind::hankel, 0.0, g, g, 64 * 63), resource_error);
    EXPECT_THROW(build_kernel(KernelKind::hankel, -1.0, g, g), domain_error);
}

TEST(Transforms, HankelPlancherelAndInvolution) {
    auto x = ref_x();
    for (double nu : {0.0, 0.5, 1.0}) {
        auto F = build_kernel(KernelKind::hankel, nu, x, x);
        auto fam = hankel_test_family(x, nu);
        EXPECT_LT(plancherel_defect(F, fam), 1e-3) << nu;
        EXPECT_LT(roundtrip_defect(F, F, fam), 1e-3) << nu;
    }
}

TEST(Transforms, PointInteractionAdjointPair) {
    auto x = ref_x();
    for (double beta : {1.0, 0.0, -1.0}) {
        auto P = build_kernel(KernelKind::point_interaction, beta, x, x);
        auto Q = build_kernel(KernelKind::point_interaction_adjoint, beta, x, x);
        auto fam = gaussian_x_family(x);
        EXPECT_LT(plancherel_defect(P, fam), 1e-3) << beta;
        EXPECT_LT(roundtrip_defect(P, Q, fam, beta), 1e-2) << beta;
        EXPECT_LT(roundtrip_defect(Q, P, fam), 1e-2) << beta;
    }
}

TEST(Transforms, BoundStateIsOrthogonalToContinuum) {
    auto x = ref_x();
    auto phi = bound_state({-1.0}, x);
    EXPECT_NEAR(norm(phi), 1.0, 1e-12);
    auto P = build_kernel(KernelKind::point_interaction, -1.0, x, x);
    EXPECT_LT(norm(apply(P, phi)), 1e-3);
    EXPECT_THROW(bound_state({1.0}, x), invalid_parameter);
}

TEST(Transforms, IndicatorClosedForm) {
    auto x = make_grid(40, 1280);  // x = 1 is a panel edge
    auto k = make_grid(40, 512);
    auto P = build_kernel(KernelKind::point_interaction, 0.0, x, k);
    auto f = SampledFunction::from(x, [](double t) { return t <= 1.0 ? 1.0 : 0.0; });
    auto Ff = apply(P, f);
    for (int i = 0; i < k->n; ++i) {
        double kk = k->nodes[i];
        EXPECT_NEAR(std::abs(Ff.values[i]), sqrt_2_over_pi * std::abs(std::sin(kk)) / kk, 1e-3);
    }
}

TEST(Transforms, ModifiedHankelWeightedPlancherel) {
    auto x = make_grid(30, 768);
    double nu = 1.0;
    auto M = build_kernel(KernelKind::modified_hankel, nu, x, x);
    std::vector<SampledFunction> fam;
    for (double s : {1.0, 1.5, 2.0})
        fam.push_back(SampledFunction::from(x, [=](double t) { return std::exp(-t * t / (2 * s * s)); }));
    EXPECT_LT(plancherel_defect(M, fam), 1e-6);
}

TEST(FrameFamily, HasFiftyMembers) {
    EXPECT_EQ(frame_test_family(ref_x()).size(), 50u);
    EXPECT_THROW(t_beta_frame_bounds(0.3, ref_x(), ref_x(), {}), invalid_parameter);
}

TEST(Csv, KernelDump) {
    auto g = make_grid(2, 8);
    auto K = build_kernel(KernelKind::cos_phase, 0.0, g, g);
    std::string s = kernel_csv(K);
    EXPECT_EQ(s.substr(0, 14), "row,col,re,im\n");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 65);
}
