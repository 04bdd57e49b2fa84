#include "cmetric/kernel.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <limits>

#include <random>

namespace cmetric {
namespace {

using testing::reference_psi;

constexpr double c = 0.9;

TEST(WendlandC8, ValueAtOriginIs25ForAnyScale) {
    for (double scale : {0.1, 0.9, 1.0, 7.5}) {
        EXPECT_DOUBLE_EQ(wendland_c8(scale).psi(0.0), 25.0);
    }
}

TEST(WendlandC8, VanishesOnAndBeyondSupport) {
    const auto k = wendland_c8(c);
    EXPECT_EQ(k.psi(1.0 / c), 0.0);
    EXPECT_EQ(k.psi(2.0 / c), 0.0);
    EXPECT_EQ(k.psi1(1.0 / c), 0.0);
    EXPECT_EQ(k.psi2(1.0 / c), 0.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> r(1.0 / c, 10.0);
    for (int t = 0; t < 100; ++t) {
        const double v = r(rng);
        EXPECT_EQ(k.psi(v), 0.0);
        EXPECT_EQ(k.psi1(v), 0.0);
        EXPECT_EQ(k.psi2(v), 0.0);
    }
}

TEST(WendlandC8, PositiveInsideSupport) {
    const auto k = wendland_c8(c);
    for (int t = 0; t < 1000; ++t) {
        EXPECT_GT(k.psi(t * (1.0 / c) / 1000.0), 0.0);
    }
}

TEST(WendlandC8, RejectsNonpositiveScale) {
    EXPECT_THROW(wendland_c8(0.0), InvalidParameter);
    EXPECT_THROW(wendland_c8(-1.0), InvalidParameter);
}

TEST(WendlandC8, MatchesExtendedPrecisionValues) {
    // 30-digit evaluations of the printed formula at c = 0.9.
    const auto k = wendland_c8(c);
    EXPECT_NEAR(k.psi(0.3), 9.65810435591548760249686133050, 1e-14 * 9.66);
    EXPECT_NEAR(k.psi(0.5), 1.62897831116039144592285156250, 1e-14 * 1.63);
    EXPECT_NEAR(k.psi(0.7), 0.0721168289223178057800581905000, 1e-14 * 0.0722);
    EXPECT_NEAR(k.psi(0.3), static_cast<double>(reference_psi(0.3L, 0.9L)), 1e-14 * 9.66);
}

TEST(WendlandC8, DerivedHelperProfiles) {
    // psi1 = -130 c^2 (1-s)^9 (231 s^3 + 159 s^2 + 45 s + 5),
    // psi2 = 17160 c^4 (1-s)^8 (21 s^2 + 8 s + 1), from symbolic differentiation.
    const auto k = wendland_c8(c);
    EXPECT_EQ(k.psi1_profile().power, 9);
    EXPECT_EQ(k.psi1_profile().coeffs, (std::vector<double>{-650, -5850, -20670, -30030}));
    EXPECT_EQ(k.psi2_profile().power, 8);
    EXPECT_EQ(k.psi2_profile().coeffs, (std::vector<double>{17160, 137280, 360360}));
}

TEST(WendlandC8, HelperLimitsAtOrigin) {
    const auto k = wendland_c8(c);
    // -650 c^2 and 17160 c^4
    EXPECT_NEAR(k.psi1(0.0), -526.5, 1e-12);
    EXPECT_NEAR(k.psi2(0.0), 11258.676, 1e-9);
}

TEST(WendlandC8, HelpersMatchExtendedPrecisionValues) {
    const auto k = wendland_c8(c);
    EXPECT_NEAR(k.psi1(0.4), -99.7473181151054129918902272000, 1e-13 * 99.75);
    EXPECT_NEAR(k.psi2(0.7), 56.8467899758268275720640400000, 1e-13 * 56.85);
}

TEST(WendlandC8, Psi1AgreesWithCentralDifference) {
    const auto k = wendland_c8(c);
    const long double r = 0.4L, h = 1e-6L;
    const double fd = static_cast<double>((reference_psi(r + h, c) - reference_psi(r - h, c)) / (2 * h * r));
    EXPECT_NEAR(k.psi1(0.4), fd, 1e-6 * std::abs(fd));
}

TEST(WendlandC8, Psi2AgreesWithSecondDifferences) {
    const auto k = wendland_c8(c);
    const long double r = 0.7L, h = 1e-4L;
    const long double d1 = (reference_psi(r + h, c) - reference_psi(r - h, c)) / (2 * h);
    const long double d2 = (reference_psi(r + h, c) - 2 * reference_psi(r, c) + reference_psi(r - h, c)) / (h * h);
    const double fd = static_cast<double>((d2 - d1 / r) / (r * r));
    EXPECT_NEAR(k.psi2(0.7), fd, 1e-5 * std::abs(fd));
}

TEST(WendlandC8, OddDerivativeVanishesAtOrigin) {
    // psi'(r) = r psi1(r) -> 0 as r -> 0
    double previous = std::numeric_limits<double>::infinity();
    for (double r = 1e-1; r > 1e-7; r /= 10.0) {
        const long double fd = (reference_psi(r, c) - reference_psi(0.0L, c)) / r;
        EXPECT_LT(std::abs(static_cast<double>(fd)), previous);
        previous = std::abs(static_cast<double>(fd));
    }
    EXPECT_LT(previous, 1e-3);
}

TEST(RadialKernel, PhiIsRadialAndSymmetric) {
    const auto k = wendland_c8(c);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        const Vector x = testing::random_point(rng, 2), y = testing::random_point(rng, 2);
        EXPECT_EQ(k.phi(x, y), k.phi(y, x));
        EXPECT_EQ(k.phi(x, x), 25.0);
    }
    Vector o(2), p(2);
    o << 0.0, 0.0;
    p << 0.5, 0.0;
    EXPECT_DOUBLE_EQ(k.phi(o, p), k.psi(0.5));
    EXPECT_NEAR(k.phi(o, p), 1.62897831116039144592285156250, 1e-14 * 1.63);
}

TEST(RadialKernel, DimensionMismatchThrows) {
    const auto k = wendland_c8(c);
    EXPECT_THROW(k.phi(Vector::Zero(2), Vector::Zero(3)), PreconditionError);
    EXPECT_THROW(k.grad1_phi(Vector::Zero(2), Vector::Zero(3)), PreconditionError);
    EXPECT_THROW(k.hess12_phi(Vector::Zero(3), Vector::Zero(2)), PreconditionError);
}

TEST(RadialKernel, GradientAtCoincidentPointsIsZeroAndAntisymmetric) {
    const auto k = wendland_c8(c);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const Vector x = testing::random_point(rng, 2), y = testing::random_point(rng, 2);
        EXPECT_EQ(k.grad1_phi(x, x), Vector::Zero(2));
        EXPECT_TRUE(k.grad1_phi(x, y).isApprox(-k.grad1_phi(y, x), 1e-15));
    }
}

TEST(RadialKernel, MixedHessianAtCoincidentPoints) {
    const auto k = wendland_c8(c);
    Vector x(2);
    x << 0.2, -0.4;
    const Matrix h = k.hess12_phi(x, x);
    EXPECT_EQ(h, -k.psi1(0.0) * Matrix::Identity(2, 2));
    const Matrix fd = testing::fd_hess12_phi(x, x, c);
    EXPECT_LT(testing::relative_error(h, fd), 1e-5);
}

TEST(RadialKernel, MixedHessianTransposeSymmetry) {
    const auto k = wendland_c8(c);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const Vector x = testing::random_point(rng, 2), y = testing::random_point(rng, 2);
        EXPECT_TRUE(k.hess12_phi(x, y).isApprox(k.hess12_phi(y, x).transpose(), 1e-14));
        EXPECT_LT(asymmetry(k.hess12_phi(x, y)), 1e-12);
    }
}

TEST(RadialKernel, DerivativesAgreeWithFiniteDifferences) {
    const auto k = wendland_c8(c);
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 100; ++t) {
        const Vector x = testing::random_point(rng, 2);
        const Vector y = testing::random_point_near(rng, x, 0.02, 0.9 / c);
        EXPECT_LT(testing::relative_error(k.grad1_phi(x, y), testing::fd_grad1_phi(x, y, c)), 1e-6);
        EXPECT_LT(testing::relative_error(k.hess12_phi(x, y), testing::fd_hess12_phi(x, y, c)), 1e-5);
    }
}

TEST(RadialKernel, ScalarGramMatrixIsPositiveDefinite) {
    const auto k = wendland_c8(c);
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> count(2, 15);
    for (int set = 0; set < 20; ++set) {
        const int n = count(rng);
        PointList pts;
        for (int i = 0; i < n; ++i) pts.push_back(testing::random_point(rng, 2));
        Matrix g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = k.phi(pts[i], pts[j]);
        EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(g).eigenvalues().minCoeff(), 0.0);
    }
}

TEST(RadialKernel, CustomTruncatedPowerProfile) {
    // Wendland C^4 in R^3: (1 - s)^6 (35 s^2 + 18 s + 3);
    // psi1 = -56 c^2 (1 - s)^5 (5 s + 1), psi2 = 1680 c^4 (1 - s)^4.
    const RadialKernel k(1.0, 3.0, 6, {3, 18, 35});
    EXPECT_EQ(k.psi1_profile().power, 5);
    EXPECT_EQ(k.psi1_profile().coeffs, (std::vector<double>{-56, -280}));
    EXPECT_EQ(k.psi2_profile().power, 4);
    EXPECT_EQ(k.psi2_profile().coeffs, std::vector<double>{1680});
    EXPECT_DOUBLE_EQ(k.psi1(0.5), -56.0 * 3.5 / 32.0);
}

TEST(RadialKernel, RejectsProfileWithoutSecondOrderLimit) {
    // Wendland C^2: psi'(r)/r is finite but (psi'' - psi'/r)/r^2 is not.
    EXPECT_THROW(RadialKernel(1.0, 2.0, 4, {1, 4}), InvalidParameter);
}

TEST(RadialKernel, RejectsProfileWithoutSmoothOrigin) {
    // (1 - s)^2: psi'(0) != 0, so psi'(r)/r has no finite limit.
    EXPECT_THROW(RadialKernel(1.0, 1.0, 2, {1}), InvalidParameter);
}

}  // namespace
}  // namespace cmetric
