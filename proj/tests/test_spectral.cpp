#include <gtest/gtest.h>

#include "support.hpp"

using namespace eg_test;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size());
    Index i = 0;
    for (const auto& r : rows) {
        Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix random_matrix(SplitMix64& rng, std::size_t n, double density, std::int64_t w) {
    Matrix m(n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (rng.uniform() < density) m(i, j) = static_cast<double>(rng.between(1, w));
    return m;
}

/// Random irreducible matrix: a Hamiltonian cycle plus random extra arcs.
Matrix random_irreducible(SplitMix64& rng, std::size_t n, double density, std::int64_t w) {
    Matrix m = random_matrix(rng, n, density, w);
    for (Index i = 0; i < n; ++i)
        if (m(i, (i + 1) % n) == 0.0) m(i, (i + 1) % n) = static_cast<double>(rng.between(1, w));
    return m;
}

double right_residual(const Matrix& m, const Vector& x, double rho) {
    const Vector mx = multiply(m, x);
    double r = 0.0;
    for (Index i = 0; i < m.size(); ++i) r = std::max(r, std::abs(mx[i] - rho * x[i]));
    return r;
}

double left_residual(const Matrix& m, const Vector& y, double rho) {
    const Vector ym = multiply_left(y, m);
    double r = 0.0;
    for (Index i = 0; i < m.size(); ++i) r = std::max(r, std::abs(ym[i] - rho * y[i]));
    return r;
}

}  // namespace

TEST(PerronPair, OneByOne) {
    const PerronPair pp = perron_pair(from_rows({{5}}));
    EXPECT_DOUBLE_EQ(pp.rho, 5.0);
    EXPECT_EQ(pp.right, (Vector{1.0}));
    EXPECT_DOUBLE_EQ(pp.left[0] * pp.right[0], 1.0);
}

TEST(PerronPair, FibonacciBlockHasGoldenRoot) {
    const PerronPair pp = perron_pair(from_rows({{1, 1}, {1, 0}}));
    EXPECT_NEAR(pp.rho, phi, 1e-13);
    EXPECT_NEAR(pp.right[0], 1.0, 1e-13);
    EXPECT_NEAR(pp.right[1], 1.0 / phi, 1e-13);
    EXPECT_NEAR(dot(pp.left, pp.right), 1.0, 1e-13);
    EXPECT_LE(pp.residual, 1e-12);
}

TEST(PerronPair, PeriodicMatrixConverges) {
    // A cyclic permutation has all eigenvalues on the unit circle; the shift makes it primitive.
    Matrix cycle(6);
    for (Index i = 0; i < 6; ++i) cycle(i, (i + 1) % 6) = 2.0;
    const PerronPair pp = perron_pair(cycle);
    EXPECT_NEAR(pp.rho, 2.0, 1e-12);
    for (double v : pp.right) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(PerronPair, ReducibleMatrixIsRejectedWithClassInformation) {
    const Matrix m = from_rows({{1, 1}, {0, 1}});
    try {
        perron_pair(m);
        FAIL() << "expected ReducibleMatrix";
    } catch (const ReducibleMatrix& e) {
        EXPECT_NE(std::string(e.what()).find("irreducibility assumption violated"), std::string::npos);
        EXPECT_EQ(e.classes.size(), 2u);
    }
    EXPECT_THROW(perron_root(Matrix(3)), ReducibleMatrix);
    EXPECT_FALSE(is_irreducible(Matrix(1)));
}

TEST(PerronPair, AgreesWithDenseEigensolver) {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(30);
        const Matrix m = random_irreducible(rng, n, rng.uniform() * 0.5, 1 + static_cast<std::int64_t>(rng.below(20)));
        const PerronPair pp = perron_pair(m);
        const double reference = eigen_spectral_radius(m);
        EXPECT_NEAR(pp.rho, reference, 1e-10 * std::max(1.0, reference)) << "trial " << trial;
        EXPECT_LE(right_residual(m, pp.right, pp.rho), 1e-9 * std::max(1.0, pp.rho));
        EXPECT_LE(left_residual(m, pp.left, pp.rho), 1e-9 * std::max(1.0, pp.rho) * sup_norm(pp.left));
        EXPECT_NEAR(*std::max_element(pp.right.begin(), pp.right.end()), 1.0, 1e-15);
        EXPECT_NEAR(dot(pp.left, pp.right), 1.0, 1e-12);
        for (double v : pp.right) EXPECT_GT(v, 0.0);
        for (double v : pp.left) EXPECT_GT(v, 0.0);
    }
}

TEST(PerronPair, WarmStartFromEigenvectorIsImmediate) {
    SplitMix64 rng(11);
    const Matrix m = random_irreducible(rng, 40, 0.3, 15);
    const PerronPair cold = perron_root(m);
    const PerronPair warm = perron_root(m, std::span<const double>(cold.right));
    EXPECT_LE(warm.iterations, cold.iterations);
    EXPECT_LE(warm.iterations, 3u);
    EXPECT_NEAR(warm.rho, cold.rho, 1e-12 * cold.rho);
}

TEST(ClassStructure, BlockTriangularExample) {
    // Classes {0,1} (root phi) -> {2} (root 3) -> {3} (root 3); {4} trivial feeding {0,1}.
    const Matrix m = from_rows({{1, 1, 1, 0, 0}, {1, 0, 0, 0, 0}, {0, 0, 3, 1, 0}, {0, 0, 0, 3, 0}, {1, 0, 0, 0, 0}});
    const ClassStructure cs = class_structure(m);
    EXPECT_NEAR(cs.rho, 3.0, 1e-14);
    ASSERT_EQ(cs.classes.size(), 4u);
    const Index k2 = cs.condensation.component_of[2], k3 = cs.condensation.component_of[3];
    EXPECT_TRUE(cs.basic[k2]);
    EXPECT_TRUE(cs.basic[k3]);
    EXPECT_FALSE(cs.basic[cs.condensation.component_of[0]]);
    EXPECT_EQ(cs.final_basic, k3);
    EXPECT_EQ(cs.support, (std::vector<Index>{3}));
    EXPECT_LE(left_residual(m, cs.left, cs.rho), 1e-12);

    const Vector x = nonnegative_right_eigenvector(m, cs);
    EXPECT_LE(right_residual(m, x, cs.rho), 1e-12);
    // Basic class {2} is not reachable from another basic class, so x lives upstream of it.
    EXPECT_GT(x[2], 0.0);
    EXPECT_EQ(x[3], 0.0);
    EXPECT_GT(x[0], 0.0);
    EXPECT_GT(x[4], 0.0);
}

TEST(ClassStructure, LeftVectorSupportAndEquationOnRandomMatrices) {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        const Matrix m = random_matrix(rng, n, 0.05 + 0.3 * rng.uniform(), 1 + static_cast<std::int64_t>(rng.below(4)));
        const ClassStructure cs = class_structure(m);
        // Whole-matrix eigensolvers lose accuracy on Jordan blocks, so compare per class.
        const std::vector<double> per_state = oracle_pair_values(m);
        const double expected = *std::max_element(per_state.begin(), per_state.end());
        EXPECT_NEAR(cs.rho, expected, 1e-9 * std::max(1.0, cs.rho)) << "trial " << trial;
        if (cs.rho == 0.0) {
            EXPECT_TRUE(cs.left.empty());
            continue;
        }
        const Vector x = nonnegative_right_eigenvector(m, cs);
        EXPECT_LE(right_residual(m, x, cs.rho), 1e-8 * std::max(1.0, cs.rho)) << "trial " << trial;
        EXPECT_NEAR(sup_norm(x), 1.0, 1e-15);
        for (double v : x) EXPECT_GE(v, 0.0);

        EXPECT_LE(left_residual(m, cs.left, cs.rho), 1e-8 * std::max(1.0, cs.rho) * sup_norm(cs.left))
            << "trial " << trial;
        std::vector<bool> in_support(n, false);
        for (Index v : cs.support) in_support[v] = true;
        for (Index v = 0; v < n; ++v) {
            if (!in_support[v]) {
                EXPECT_EQ(cs.left[v], 0.0);
            }
            EXPECT_GE(cs.left[v], 0.0);
        }
    }
}

TEST(StateValues, MatchFloydWarshallOracle) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const EntropyGame g = random_sparse_game(seed, 1 + seed % 10, 2, 3, 7);
        SplitMix64 rng(seed);
        std::vector<Index> delta(g.num_despot()), tau(g.num_tribune());
        for (Index d = 0; d < delta.size(); ++d)
            delta[d] = g.despot_actions(d)[rng.below(g.despot_actions(d).size())];
        for (Index t = 0; t < tau.size(); ++t) tau[t] = g.tribune_actions(t)[rng.below(g.tribune_actions(t).size())];
        const DespotPolicy dp(delta);
        const TribunePolicy tp(tau);
        const auto v = state_values(g, dp, tp);
        const auto ref = oracle_pair_values(policy_matrix(g, dp, tp));
        EXPECT_LE(max_rel_diff(v, ref), 1e-10) << "seed " << seed;
    }
}

TEST(StateValues, FibonacciOptimalPair) {
    const auto v = state_values(fibonacci(), fibonacci_delta_star(), TribunePolicy({0, 1, 3, 2}));
    EXPECT_NEAR(v[0], 1.0, 1e-14);
    EXPECT_NEAR(v[1], phi, 1e-13);
    EXPECT_NEAR(v[2], phi, 1e-13);
}
