#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entropy_games/error.hpp"
#include "entropy_games/graph.hpp"
#include "entropy_games/matrix.hpp"
#include "entropy_games/operators.hpp"

namespace entropy_games {

/// Perron root with right and left eigenvectors of an irreducible nonnegative matrix.
struct PerronPair {
    double rho = 0.0;
    Vector right;  ///< max entry 1
    Vector left;   ///< normalized so that left . right = 1
    double residual = 0.0;  ///< ||M right - rho right||_inf / ||right||_inf
    std::size_t iterations = 0;
};

struct PowerOptions {
    double gap_tolerance = 1e-14;  ///< relative Collatz-Wielandt gap
    std::size_t max_iterations = 200000;
};

namespace detail {

struct PowerResult {
    double rho;
    Vector vector;
    std::size_t iterations;
};

/**
 * Power iteration on M + cI for an irreducible M. The shift makes the
 * iteration matrix primitive without changing eigenvectors. Stops when the
 * Collatz-Wielandt bounds min_i (Mx)_i/x_i <= rho <= max_i (Mx)_i/x_i are
 * within the relative gap tolerance, or when the gap stops improving.
 */
inline PowerResult shifted_power(const Matrix& m, std::optional<std::span<const double>> guess,
                                 const PowerOptions& options) {
    const std::size_t n = m.size();
    Vector x(n, 1.0);
    if (guess && guess->size() == n && std::all_of(guess->begin(), guess->end(), [](double v) {
            return v > 0.0 && std::isfinite(v);
        }))
        x.assign(guess->begin(), guess->end());

    double total = 0.0;
    for (Index i = 0; i < n; ++i)
        for (double v : m.row(i)) total += v;
    const double shift = std::min(1.0, total / static_cast<double>(n));

    double best_gap = std::numeric_limits<double>::infinity();
    std::size_t since_improvement = 0;
    double lo = 0.0, hi = 0.0;
    std::size_t it = 0;
    for (; it < options.max_iterations; ++it) {
        Vector y = multiply(m, x);
        lo = std::numeric_limits<double>::infinity();
        hi = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double r = y[i] / x[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        const double gap = hi - lo;
        if (gap <= options.gap_tolerance * hi) break;
        if (gap < best_gap * (1.0 - 1e-3)) {
            best_gap = gap;
            since_improvement = 0;
        } else if (++since_improvement > 200 && gap <= 1e-10 * hi) {
            break;
        }
        double top = 0.0;
        for (Index i = 0; i < n; ++i) {
            x[i] = y[i] + shift * x[i];
            top = std::max(top, x[i]);
        }
        for (double& v : x) v /= top;
    }
    double top = *std::max_element(x.begin(), x.end());
    for (double& v : x) v /= top;
    return {0.5 * (lo + hi), std::move(x), it + 1};
}

}  // namespace detail

inline bool is_irreducible(const Matrix& m) {
    const Condensation c = scc_condense(digraph_of(m));
    return c.size() == 1 && c.nontrivial[0];
}

/// Throws ReducibleMatrix unless the digraph of `m` is strongly connected with at least one arc.
inline void require_irreducible(const Matrix& m) {
    if (m.size() == 0) throw std::invalid_argument("empty matrix");
    const Condensation c = scc_condense(digraph_of(m));
    if (c.size() == 1 && c.nontrivial[0]) return;
    std::string what = "irreducibility assumption violated: matrix has " + std::to_string(c.size()) + " classes";
    if (c.size() > 1) {
        what += "; class {";
        const auto& first = c.components.front();
        for (Index i = 0; i < first.size(); ++i) what += (i ? "," : "") + std::to_string(first[i]);
        what += "} does not communicate with every state";
    } else {
        what += "; the matrix has no positive entry";
    }
    throw ReducibleMatrix(what, c.components);
}

/// Perron root and right eigenvector only (left left empty). Throws ReducibleMatrix.
inline PerronPair perron_root(const Matrix& m, std::optional<std::span<const double>> guess = std::nullopt,
                              const PowerOptions& options = {}) {
    require_irreducible(m);
    PerronPair out;
    auto right = detail::shifted_power(m, guess, options);
    out.right = std::move(right.vector);
    out.iterations = right.iterations;
    out.rho = right.rho;
    const Vector mx = multiply(m, out.right);
    double res = 0.0;
    for (Index i = 0; i < m.size(); ++i) res = std::max(res, std::abs(mx[i] - out.rho * out.right[i]));
    out.residual = res / sup_norm(out.right);
    return out;
}

/// Perron pair of an irreducible nonnegative matrix; throws ReducibleMatrix otherwise.
inline PerronPair perron_pair(const Matrix& m, std::optional<std::span<const double>> guess = std::nullopt,
                              const PowerOptions& options = {}) {
    PerronPair out = perron_root(m, guess, options);
    auto left = detail::shifted_power(transpose(m), std::nullopt, options);
    out.iterations += left.iterations;
    const double scale = dot(left.vector, out.right);
    out.left = std::move(left.vector);
    for (double& v : out.left) v /= scale;
    return out;
}

/// Perron root of every diagonal block of `m`; 0 for classes without arcs.
inline std::vector<double> class_roots(const Matrix& m, const Condensation& c) {
    std::vector<double> roots(c.size(), 0.0);
    for (Index k = 0; k < c.size(); ++k) {
        if (!c.nontrivial[k]) continue;
        const auto& nodes = c.components[k];
        roots[k] = nodes.size() == 1 ? m(nodes[0], nodes[0]) : perron_root(submatrix(m, nodes)).rho;
    }
    return roots;
}

/// Class decomposition of a (possibly reducible) nonnegative matrix.
struct ClassStructure {
    std::vector<std::vector<Index>> classes;  ///< strongly connected components of the matrix digraph
    std::vector<double> class_root;           ///< Perron root of each diagonal block (0 for trivial classes)
    std::vector<bool> basic;                  ///< class root equals rho (relative tolerance 1e-9)
    Index final_basic = 0;                    ///< basic class from which no other basic class is reachable
    std::vector<Index> support;               ///< S: states reachable from the final basic class
    Vector left;                              ///< nonnegative left eigenvector with support exactly S (empty if rho = 0)
    double rho = 0.0;
    Condensation condensation;
};

inline constexpr double basic_class_tolerance = 1e-9;

inline ClassStructure class_structure(const Matrix& m) {
    ClassStructure cs;
    cs.condensation = scc_condense(digraph_of(m));
    const Condensation& c = cs.condensation;
    cs.classes = c.components;
    cs.class_root = class_roots(m, c);
    cs.rho = *std::max_element(cs.class_root.begin(), cs.class_root.end());
    const double gate = basic_class_tolerance * std::max(1.0, cs.rho);
    cs.basic.assign(c.size(), false);
    for (Index k = 0; k < c.size(); ++k) cs.basic[k] = cs.class_root[k] >= cs.rho - gate;

    bool found = false;
    for (Index k = 0; k < c.size() && !found; ++k) {
        if (!cs.basic[k]) continue;
        bool final_class = true;
        for (Index j = 0; j < c.size(); ++j)
            if (j != k && cs.basic[j] && c.has_access(k, j)) final_class = false;
        if (final_class) {
            cs.final_basic = k;
            found = true;
        }
    }
    for (Index j = 0; j < c.size(); ++j)
        if (c.has_access(cs.final_basic, j))
            cs.support.insert(cs.support.end(), c.components[j].begin(), c.components[j].end());
    std::sort(cs.support.begin(), cs.support.end());

    if (cs.rho > 0.0) {
        const auto& basic_nodes = c.components[cs.final_basic];
        cs.left.assign(m.size(), 0.0);
        if (basic_nodes.size() == 1) {
            cs.left[basic_nodes[0]] = 1.0;
        } else {
            const PerronPair pp = perron_pair(submatrix(m, basic_nodes));
            for (Index i = 0; i < basic_nodes.size(); ++i) cs.left[basic_nodes[i]] = pp.left[i];
        }
        std::vector<Index> rest;
        for (Index v : cs.support)
            if (c.component_of[v] != cs.final_basic) rest.push_back(v);
        if (!rest.empty()) {
            // pi_R (rho I - M_RR) = pi_B M_BR, solved on the transpose.
            Matrix a(rest.size());
            Vector b(rest.size(), 0.0);
            for (Index i = 0; i < rest.size(); ++i) {
                for (Index j = 0; j < rest.size(); ++j) a(j, i) = (i == j ? cs.rho : 0.0) - m(rest[i], rest[j]);
                for (Index v : basic_nodes) b[i] += cs.left[v] * m(v, rest[i]);
            }
            const Vector pi_rest = solve_linear(a, b);
            for (Index i = 0; i < rest.size(); ++i) cs.left[rest[i]] = std::max(0.0, pi_rest[i]);
        }
    }
    return cs;
}

/// Per-state value of a fixed policy pair: the largest class root accessible from each state.
inline ValueVector state_values(const EntropyGame& g, const DespotPolicy& delta, const TribunePolicy& tau) {
    const Matrix m = policy_matrix(g, delta, tau);
    const Condensation c = scc_condense(digraph_of(m));
    const std::vector<double> roots = class_roots(m, c);
    std::vector<double> best(c.size(), 0.0);
    for (auto it = c.topological_order.rbegin(); it != c.topological_order.rend(); ++it) {
        const Index k = *it;
        best[k] = roots[k];
        for (Index j : c.dag[k]) best[k] = std::max(best[k], best[j]);
    }
    ValueVector v(g.num_despot());
    for (Index d = 0; d < g.num_despot(); ++d) v[d] = best[c.component_of[d]];
    return v;
}

/// Nonnegative right eigenvector for rho(M), supported on the states with access
/// to a basic class that no other basic class can reach. Max entry 1.
inline Vector nonnegative_right_eigenvector(const Matrix& m, const ClassStructure& cs) {
    const Condensation& c = cs.condensation;
    Index initial = cs.final_basic;
    for (Index k = 0; k < c.size(); ++k) {
        if (!cs.basic[k]) continue;
        bool reached_by_other = false;
        for (Index j = 0; j < c.size(); ++j)
            if (j != k && cs.basic[j] && c.has_access(j, k)) reached_by_other = true;
        if (!reached_by_other) {
            initial = k;
            break;
        }
    }
    Vector x(m.size(), 0.0);
    const auto& nodes = c.components[initial];
    if (cs.rho <= 0.0) {
        x[nodes.front()] = 1.0;
        return x;
    }
    if (nodes.size() == 1) {
        x[nodes[0]] = 1.0;
    } else {
        const PerronPair pp = perron_root(submatrix(m, nodes));
        for (Index i = 0; i < nodes.size(); ++i) x[nodes[i]] = pp.right[i];
    }
    std::vector<Index> upstream;
    for (Index v = 0; v < m.size(); ++v) {
        const Index k = c.component_of[v];
        if (k != initial && c.has_access(k, initial)) upstream.push_back(v);
    }
    if (!upstream.empty()) {
        // (rho I - M_UU) x_U = M_UB x_B
        Matrix a(upstream.size());
        Vector b(upstream.size(), 0.0);
        for (Index i = 0; i < upstream.size(); ++i) {
            for (Index j = 0; j < upstream.size(); ++j)
                a(i, j) = (i == j ? cs.rho : 0.0) - m(upstream[i], upstream[j]);
            for (Index v : nodes) b[i] += m(upstream[i], v) * x[v];
        }
        const Vector xu = solve_linear(a, b);
        for (Index i = 0; i < upstream.size(); ++i) x[upstream[i]] = std::max(0.0, xu[i]);
    }
    const double top = *std::max_element(x.begin(), x.end());
    for (double& v : x) v /= top;
    return x;
}

}  // namespace entropy_games
