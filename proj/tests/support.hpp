#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// deliberately avoid the library's own numerics: spectral radii come from
// Eigen's general eigensolver, values of small games from exhaustive search
// over policy pairs using those radii.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entropy_games.hpp"

namespace eg_test {

using namespace entropy_games;

inline const double phi = (1.0 + std::sqrt(5.0)) / 2.0;

inline const char* fibonacci_json = R"({
  "despot": ["d1", "d2", "d3"],
  "tribune": ["t1", "t2", "t3", "t4"],
  "people": ["a", "b", "c", "d"],
  "arcs": [
    {"from": "d1", "to": "t1"}, {"from": "d1", "to": "t2"}, {"from": "d2", "to": "t2"},
    {"from": "d3", "to": "t3"}, {"from": "d3", "to": "t4"},
    {"from": "t1", "to": "a"}, {"from": "t2", "to": "a"}, {"from": "t2", "to": "b"},
    {"from": "t3", "to": "c"}, {"from": "t3", "to": "d"}, {"from": "t4", "to": "c"},
    {"from": "a", "to": "d1"}, {"from": "b", "to": "d2"}, {"from": "b", "to": "d3"},
    {"from": "c", "to": "d2"}, {"from": "d", "to": "d2"}, {"from": "d", "to": "d3"}
  ]
})";

inline EntropyGame fibonacci() { return parse_game(std::string_view(fibonacci_json)); }

/// Despot's optimal policy in the Fibonacci game: d1 -> t1, d2 -> t2, d3 -> t4.
inline DespotPolicy fibonacci_delta_star() { return DespotPolicy({0, 1, 3}); }

/// Restriction of the Fibonacci game under delta* to the component {d2, d3}.
inline EntropyGame fibonacci_subgame() {
    const EntropyGame g = fix_despot_policy(fibonacci(), fibonacci_delta_star());
    return subgame(g, {1, 2});
}

inline EntropyGame single_loop(double weight) {
    std::vector<ArcSpec> arcs{{"d", "t", std::nullopt}, {"t", "p", std::nullopt}, {"p", "d", weight}};
    return EntropyGame({"d"}, {"t"}, {"p"}, arcs);
}

/// Game with sparse random structure: each Despot state gets 1..max_d Tribune
/// successors, each Tribune node 1..max_t People successors, each People node
/// 1..n Despot successors with weights in 1..W. Frequently reducible.
inline EntropyGame random_sparse_game(std::uint64_t seed, std::size_t n, std::size_t max_d, std::size_t max_t,
                                      std::int64_t w) {
    SplitMix64 rng(seed);
    const std::size_t nt = n + rng.below(n + 1), np = nt + rng.below(nt + 1);
    std::vector<std::string> d_ids, t_ids, p_ids;
    for (Index i = 0; i < n; ++i) d_ids.push_back("d" + std::to_string(i));
    for (Index i = 0; i < nt; ++i) t_ids.push_back("t" + std::to_string(i));
    for (Index i = 0; i < np; ++i) p_ids.push_back("p" + std::to_string(i));
    auto pick = [&](std::size_t universe, std::size_t count) {
        std::vector<Index> pool(universe);
        for (Index i = 0; i < universe; ++i) pool[i] = i;
        for (Index k = 0; k < count; ++k) std::swap(pool[k], pool[k + rng.below(universe - k)]);
        pool.resize(count);
        return pool;
    };
    std::vector<std::vector<Index>> da(n), ta(nt);
    std::vector<std::vector<WeightedArc>> pa(np);
    for (Index d = 0; d < n; ++d) da[d] = pick(nt, 1 + rng.below(std::min(max_d, nt)));
    for (Index t = 0; t < nt; ++t) ta[t] = pick(np, 1 + rng.below(std::min(max_t, np)));
    for (Index p = 0; p < np; ++p)
        for (Index d : pick(n, 1 + rng.below(n))) pa[p].push_back({d, static_cast<double>(rng.between(1, w))});
    return EntropyGame(d_ids, t_ids, p_ids, da, ta, pa);
}

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd e(m.size(), m.size());
    for (Index i = 0; i < m.size(); ++i)
        for (Index j = 0; j < m.size(); ++j) e(i, j) = m(i, j);
    return e;
}

/// Spectral radius from Eigen's general (Hessenberg-QR) eigensolver.
inline double eigen_spectral_radius(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(m), false);
    double r = 0.0;
    for (Index i = 0; i < m.size(); ++i) r = std::max(r, std::abs(es.eigenvalues()[i]));
    return r;
}

/// Per-state value of a policy pair: largest spectral radius among classes reachable from the state.
/// Reachability computed by Floyd-Warshall on the support, radii by Eigen on each class.
inline std::vector<double> oracle_pair_values(const Matrix& m) {
    const std::size_t n = m.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (Index i = 0; i < n; ++i) {
        reach[i][i] = true;
        for (Index j = 0; j < n; ++j)
            if (m(i, j) > 0) reach[i][j] = true;
    }
    for (Index k = 0; k < n; ++k)
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    std::vector<double> class_root(n, 0.0);
    for (Index i = 0; i < n; ++i) {
        std::vector<Index> cls;
        for (Index j = 0; j < n; ++j)
            if (reach[i][j] && reach[j][i]) cls.push_back(j);
        Matrix sub(cls.size());
        for (Index a = 0; a < cls.size(); ++a)
            for (Index b = 0; b < cls.size(); ++b) sub(a, b) = m(cls[a], cls[b]);
        class_root[i] = eigen_spectral_radius(sub);
    }
    std::vector<double> v(n, 0.0);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (reach[i][j]) v[i] = std::max(v[i], class_root[j]);
    return v;
}

/// Exhaustive min over Despot policies of max over Tribune policies, per state.
inline std::vector<double> oracle_values(const EntropyGame& g) {
    const std::size_t n = g.num_despot();
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<Index> dd(n, 0);
    while (true) {
        std::vector<double> worst(n, 0.0);
        std::vector<Index> tt(g.num_tribune(), 0);
        std::vector<Index> delta(n);
        for (Index d = 0; d < n; ++d) delta[d] = g.despot_actions(d)[dd[d]];
        while (true) {
            std::vector<Index> tau(g.num_tribune());
            for (Index t = 0; t < tau.size(); ++t) tau[t] = g.tribune_actions(t)[tt[t]];
            const auto v = oracle_pair_values(policy_matrix(g, DespotPolicy(delta), TribunePolicy(tau)));
            for (Index d = 0; d < n; ++d) worst[d] = std::max(worst[d], v[d]);
            Index i = 0;
            for (; i < tt.size(); ++i) {
                if (++tt[i] < g.tribune_actions(i).size()) break;
                tt[i] = 0;
            }
            if (i == tt.size()) break;
        }
        for (Index d = 0; d < n; ++d) best[d] = std::min(best[d], worst[d]);
        Index i = 0;
        for (; i < n; ++i) {
            if (++dd[i] < g.despot_actions(i).size()) break;
            dd[i] = 0;
        }
        if (i == n) break;
    }
    return best;
}

inline double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double r = 0.0;
    for (Index i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    return r;
}

/// Random dense Despot-free spec with n <= 8, m <= 3, W <= 15.
inline RandomSpec small_despot_free_spec(std::uint64_t seed) {
    SplitMix64 rng(seed * 7919 + 17);
    RandomSpec s;
    s.n = 1 + rng.below(8);
    s.m = 1 + rng.below(3);
    s.W = 1 + static_cast<std::int64_t>(rng.below(15));
    s.seed = seed;
    return s;
}

/// Random dense two-player spec with n <= 5, two Despot actions, m <= 2.
inline RandomSpec small_two_player_spec(std::uint64_t seed) {
    SplitMix64 rng(seed * 104729 + 3);
    RandomSpec s;
    s.n = 2 + rng.below(4);
    s.m = 1 + rng.below(2);
    s.W = 1 + static_cast<std::int64_t>(rng.below(15));
    s.two_player = true;
    s.despot_actions = 2;
    s.seed = seed;
    return s;
}

}  // namespace eg_test
