#include <gtest/gtest.h>

#include <cstdint>

#include "support.hpp"

using namespace eg_test;

namespace {

// Exact horizon values of the Fibonacci game by a hand recurrence on integers:
// d1 loops on itself with weight 1, d2 and d3 follow F_{k+2} and F_{k+1}.
std::vector<std::uint64_t> fibonacci_horizon(std::size_t k) {
    std::uint64_t a = 1, b = 1, c = 1;  // V(d1), V(d2), V(d3) at horizon 0
    for (std::size_t i = 0; i < k; ++i) {
        // d2 -> t2 -> max(a: V(d1), b: V(d2) + V(d3)); d3 -> min(t3, t4) with t4 -> c: V(d2)
        const std::uint64_t nb = std::max(a, b + c);
        const std::uint64_t t3 = std::max(b, b + c);
        const std::uint64_t nc = std::min(t3, b);
        b = nb;
        c = nc;
    }
    return {a, b, c};
}

ValueVector random_vector(SplitMix64& rng, std::size_t n, double lo, double hi) {
    ValueVector x(n);
    for (double& v : x) v = lo + (hi - lo) * rng.uniform();
    return x;
}

}  // namespace

TEST(ValueIterate, FibonacciHorizonsAreExact) {
    const EntropyGame g = fibonacci();
    for (std::size_t k = 0; k <= 40; ++k) {
        const auto expected = fibonacci_horizon(k);
        const ValueVector v = value_iterate(g, k);
        for (Index d = 0; d < 3; ++d) EXPECT_EQ(v[d], static_cast<double>(expected[d])) << "k=" << k << " d=" << d;
    }
    const ValueVector v5 = value_iterate(g, 5);
    EXPECT_EQ(v5, (ValueVector{1, 13, 8}));
}

TEST(ValueIterate, SingleLoopGrowsGeometrically) {
    const EntropyGame g = single_loop(5);
    EXPECT_EQ(value_iterate(g, 0), (ValueVector{1}));
    EXPECT_EQ(value_iterate(g, 7), (ValueVector{78125}));
}

TEST(ValueIterate, OverflowIsReportedAndLogScaleSurvives) {
    const EntropyGame g = single_loop(15);
    EXPECT_THROW(value_iterate(g, 300), Overflow);
    const ValueVector lv = log_value_iterate(g, 300);
    EXPECT_NEAR(lv[0], 300 * std::log(15.0), 1e-9);
}

TEST(ValueIterate, GrowthRateApproachesTheValue) {
    const EntropyGame g = fibonacci();
    const ValueVector lv = log_value_iterate(g, 2000);
    EXPECT_NEAR(lv[1] / 2000.0, std::log(phi), 1e-3);
    EXPECT_NEAR(lv[0], 0.0, 1e-12);
}

TEST(Operators, FibonacciAtOnes) {
    const EntropyGame g = fibonacci();
    const ValueVector e(3, 1.0);
    EXPECT_EQ(apply_F(g, e), (ValueVector{1, 2, 1}));
    const auto f = apply_f(g, ValueVector(3, 0.0));
    EXPECT_NEAR(f[1], std::log(2.0), 1e-15);
}

TEST(Operators, PolicyMatrixOfFibonacciOptimum) {
    const EntropyGame g = fibonacci();
    // t1 -> a, t2 -> b, t3 -> d, t4 -> c
    const Matrix m = policy_matrix(g, fibonacci_delta_star(), TribunePolicy({0, 1, 3, 2}));
    const double expected[3][3] = {{1, 0, 0}, {0, 1, 1}, {0, 1, 0}};
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) EXPECT_EQ(m(i, j), expected[i][j]);
    EXPECT_NEAR(eigen_spectral_radius(m), phi, 1e-12);
}

class OperatorProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(OperatorProperties, MonotoneHomogeneousAndSandwiched) {
    const std::uint64_t seed = GetParam();
    const EntropyGame g = random_sparse_game(seed, 1 + seed % 9, 3, 3, 12);
    SplitMix64 rng(seed ^ 0xabcdefULL);
    const std::size_t n = g.num_despot();
    for (int trial = 0; trial < 10; ++trial) {
        const ValueVector x = random_vector(rng, n, 0.0, 5.0);
        ValueVector y = x;
        for (double& v : y) v += 2.0 * rng.uniform();
        const ValueVector fx = apply_F(g, x), fy = apply_F(g, y);
        for (Index d = 0; d < n; ++d) EXPECT_LE(fx[d], fy[d] * (1 + 1e-15));

        const double alpha = 0.1 + 10.0 * rng.uniform();
        ValueVector ax = x;
        for (double& v : ax) v *= alpha;
        const ValueVector fax = apply_F(g, ax);
        for (Index d = 0; d < n; ++d) EXPECT_NEAR(fax[d], alpha * fx[d], 1e-12 * std::max(1.0, fax[d]));

        const DespotPolicy delta = first_despot_policy(g);
        const TribunePolicy tau = first_tribune_policy(g);
        const ValueVector upper = apply_F_delta(g, delta, x), lower = apply_F_tau(g, tau, x);
        const ValueVector linear = multiply(policy_matrix(g, delta, tau), x);
        for (Index d = 0; d < n; ++d) {
            EXPECT_LE(fx[d], upper[d] * (1 + 1e-15));
            EXPECT_GE(fx[d], lower[d] * (1 - 1e-15));
            EXPECT_LE(lower[d], linear[d] * (1 + 1e-15));
            EXPECT_LE(linear[d], upper[d] * (1 + 1e-15));
        }
    }
}

TEST_P(OperatorProperties, LogOperatorIsAdditivelyHomogeneousAndNonexpansive) {
    const std::uint64_t seed = GetParam();
    const EntropyGame g = random_sparse_game(seed + 1000, 1 + seed % 9, 3, 3, 12);
    SplitMix64 rng(seed * 31 + 7);
    const std::size_t n = g.num_despot();
    for (int trial = 0; trial < 10; ++trial) {
        const ValueVector x = random_vector(rng, n, -3.0, 3.0), z = random_vector(rng, n, -3.0, 3.0);
        const double c = -5.0 + 10.0 * rng.uniform();
        ValueVector xc = x;
        for (double& v : xc) v += c;
        const ValueVector fx = apply_f(g, x), fz = apply_f(g, z), fxc = apply_f(g, xc);
        double dist = 0.0, fdist = 0.0;
        for (Index d = 0; d < n; ++d) {
            EXPECT_NEAR(fxc[d], fx[d] + c, 1e-12);
            dist = std::max(dist, std::abs(x[d] - z[d]));
            fdist = std::max(fdist, std::abs(fx[d] - fz[d]));
        }
        EXPECT_LE(fdist, dist + 1e-12);

        ValueVector ex = x;
        for (double& v : ex) v = std::exp(v);
        const ValueVector Fex = apply_F(g, ex);
        for (Index d = 0; d < n; ++d) EXPECT_NEAR(fx[d], std::log(Fex[d]), 1e-12);
    }
}

TEST_P(OperatorProperties, LogOperatorHandlesHugeExponents) {
    const EntropyGame g = random_sparse_game(GetParam() + 77, 4, 2, 2, 9);
    ValueVector x(4, 800.0);
    const ValueVector fx = apply_f(g, x), f0 = apply_f(g, ValueVector(4, 0.0));
    for (Index d = 0; d < 4; ++d) {
        EXPECT_TRUE(std::isfinite(fx[d]));
        EXPECT_NEAR(fx[d], f0[d] + 800.0, 1e-9);
    }
}

INSTANTIATE_TEST_SUITE_P(RandomGames, OperatorProperties, ::testing::Range<std::uint64_t>(0, 25));

TEST(Operators, PolicyValidation) {
    const EntropyGame g = fibonacci();
    const ValueVector e(3, 1.0);
    EXPECT_THROW(apply_F_delta(g, DespotPolicy({2, 1, 3}), e), InvalidPolicy);
    EXPECT_THROW(apply_F_tau(g, TribunePolicy({0, 1}), e), InvalidPolicy);
}
