#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <halfline/specialfn.hpp>

#include "mp_bessel.hpp"

using namespace halfline;

namespace {

double rel(double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Gamma, IntegerAndHalfInteger) {
    EXPECT_NEAR(gamma_fn(5.0), 24.0, 1e-12);
    EXPECT_NEAR(gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-14);
    EXPECT_NEAR(gamma_fn(-0.5), -2 * std::sqrt(std::numbers::pi), 1e-13);
    EXPECT_EQ(rgamma(0.0), 0.0);
    EXPECT_EQ(rgamma(-3.0), 0.0);
    EXPECT_NEAR(lgamma_abs(30.0), std::lgamma(30.0), 1e-12);
}

TEST(BesselJ, MatchesSeriesOracle) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 200.0);
    for (double nu : {0.0, 0.3, 0.5, 1.0, 2.0, 3.7}) {
        for (int i = 0; i < 120; ++i) {
            double x = U(rng);
            EXPECT_LT(rel(bessel_j(nu, x), oracle::bessel_j(nu, x)), 1e-10) << "nu=" << nu << " x=" << x;
        }
    }
}

TEST(BesselJ, BranchSeamIsContinuous) {
    for (double nu : {0.0, 0.3, 1.0, 2.0}) {
        double x = std::abs(nu) + 20.0;
        double jump = bessel_j(nu, x + 1e-9) - bessel_j(nu, x - 1e-9);
        EXPECT_LT(std::abs(jump - 2e-9 * bessel_j_prime(nu, x)), 1e-12);
    }
}

TEST(BesselJ, KnownValues) {
    EXPECT_NEAR(bessel_j(0.5, std::numbers::pi / 2), 2 / std::numbers::pi, 1e-12);
    EXPECT_NEAR(bessel_j(0, 0), 1.0, 0.0);
    EXPECT_EQ(bessel_j(1, 0), 0.0);
    EXPECT_NEAR(bessel_j(1, 1), 0.44005058574493355, 1e-14);
    EXPECT_NEAR(bessel_j(0, 2.404825557695773), 0.0, 1e-15);
}

TEST(BesselJ, HalfOrderIsElementary) {
    for (double x : {0.1, 1.0, 7.5, 33.0, 150.0})
        EXPECT_NEAR(bessel_j(0.5, x), std::sqrt(2 / (std::numbers::pi * x)) * std::sin(x), 1e-13);
}

TEST(BesselJ, Derivative) {
    for (double nu : {0.0, 0.3, 1.0, 2.0})
        for (double x : {0.7, 3.0, 12.0, 40.0}) {
            double h = 1e-5;
            double fd = (bessel_j(nu, x + h) - bessel_j(nu, x - h)) / (2 * h);
            EXPECT_NEAR(bessel_j_prime(nu, x), fd, 1e-8);
        }
}

TEST(BesselJ, RejectsBadInput) {
    EXPECT_THROW(bessel_j(0.5, -1.0), domain_error);
    EXPECT_THROW(bessel_j(std::nan(""), 1.0), domain_error);
    EXPECT_THROW(bessel_j(-1.0, 1.0), domain_error);
}

TEST(HankelFunctions, Wronskian) {
    for (double nu : {0.0, 0.3, 0.5, 1.0, 2.0})
        for (double x : {0.5, 2.0, 9.0, 30.0, 120.0}) {
            double j0 = bessel_j(nu, x), j1 = bessel_j(nu + 1, x);
            double y0 = hankel_h(1, nu, x).imag(), y1 = hankel_h(1, nu + 1, x).imag();
            EXPECT_NEAR(j1 * y0 - j0 * y1, 2 / (std::numbers::pi * x), 1e-12 * (1 + 1 / x)) << nu << " " << x;
        }
}

TEST(HankelFunctions, ConjugatePairAndKnownY) {
    auto hp = hankel_h(1, 0.0, 1.0), hm = hankel_h(-1, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(hp.real(), hm.real());
    EXPECT_DOUBLE_EQ(hp.imag(), -hm.imag());
    EXPECT_NEAR(hp.imag(), 0.08825696421567696, 1e-14);
    EXPECT_NEAR(hankel_h(1, 1.0, 1.0).imag(), -0.7812128213002887, 1e-14);
}

TEST(AsymptoticSplit, HalfOrderRemainderVanishes) {
    auto s = asymptotic_split(0.5, 10.0);
    EXPECT_NEAR(s.remainder, 0.0, 1e-12);
    EXPECT_NEAR(s.leading + s.remainder, bessel_j(0.5, 10.0), 1e-15);
}

TEST(AsymptoticSplit, OrderZeroAtOne) {
    auto s = asymptotic_split(0.0, 1.0);
    double lead = std::sqrt(2 / std::numbers::pi) * std::cos(1 - std::numbers::pi / 4);
    EXPECT_NEAR(s.leading, lead, 1e-15);
    EXPECT_NEAR(s.remainder, oracle::bessel_j(0.0, 1.0) - lead, 1e-14);
}

TEST(AsymptoticSplit, RemainderDecaysLikeThreeHalves) {
    const std::pair<double, double> recorded[] = {{0.0, 0.1}, {0.5, 1e-12}, {1.0, 0.3}, {2.0, 1.6}};
    for (auto [nu, c] : recorded)
        for (double x : {1.0, 2.0, 5.0, 10.0, 50.0}) {
            auto s = asymptotic_split(nu, x);
            EXPECT_LE(std::abs(s.remainder) * std::pow(x, 1.5), c) << "nu=" << nu << " x=" << x;
        }
    EXPECT_THROW(asymptotic_split(0.0, 0.0), domain_error);
}
