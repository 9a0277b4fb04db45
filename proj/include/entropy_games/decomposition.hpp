#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "entropy_games/convex.hpp"
#include "entropy_games/error.hpp"
#include "entropy_games/game.hpp"
#include "entropy_games/solvers.hpp"
#include "entropy_games/spectral.hpp"
#include "entropy_games/structure.hpp"

namespace entropy_games {

/// Inner solver used on each strongly connected piece of a Despot-free game.
enum class InnerSolver { pi, simplex, simplex_dantzig, ellipsoid };

struct DespotFreeOptions {
    InnerSolver inner = InnerSolver::pi;
    std::optional<std::uint64_t> seed;
    double eps = 1e-6;                       ///< ellipsoid precision (first attempt)
    std::size_t eps_retries = 3;             ///< eps is divided by 10 after each failed synthesis
    double policy_cap = default_policy_cap;  ///< brute-force fallback for pieces with reducible policy matrices
};

inline const char* to_string(InnerSolver s) {
    switch (s) {
        case InnerSolver::pi: return "pi";
        case InnerSolver::simplex: return "simplex";
        case InnerSolver::simplex_dantzig: return "simplex-d";
        case InnerSolver::ellipsoid: return "ellipsoid";
    }
    return "?";
}

/**
 * Ellipsoid method followed by policy synthesis on an irreducible Despot-free
 * game with integer weights. The value reported is the spectral radius of the
 * synthesized policy; `residual` is |exp(mu) - value| / value.
 */
inline SolveReport ellipsoid_despot_free(const EntropyGame& g, double eps = 1e-6, std::size_t retries = 3) {
    const auto start = detail::Clock::now();
    const ConvexProgram k(g);
    SolveReport rep;
    rep.algorithm = "ellipsoid";
    double current = eps;
    for (std::size_t attempt = 0;; ++attempt) {
        const EllipsoidResult er = ellipsoid_solve(k, current);
        rep.iterations += er.iterations;
        rep.trace.push_back(std::exp(er.point.mu));
        try {
            const SynthesisResult syn = synthesize_tribune_policy(g, er.point, current);
            rep.inner_iterations += syn.sweeps;
            rep.values.assign(g.num_despot(), syn.rho);
            rep.despot_policy = k.sigma();
            rep.tribune_policy = syn.tau;
            rep.converged = er.converged;
            rep.residual = std::abs(std::exp(er.point.mu) - syn.rho) / syn.rho;
            break;
        } catch (const VerificationFailed&) {
            if (attempt >= retries) throw;
            current /= 10.0;
        }
    }
    rep.wall_time = detail::seconds_since(start);
    return rep;
}

namespace detail {

inline SolveReport solve_piece(const EntropyGame& piece, const DespotFreeOptions& opt) {
    try {
        switch (opt.inner) {
            case InnerSolver::pi: return pi_despot_free(piece, Optimize::max, opt.seed);
            case InnerSolver::simplex: return spectral_simplex(piece, PivotRule::first, opt.seed);
            case InnerSolver::simplex_dantzig: return spectral_simplex(piece, PivotRule::dantzig, opt.seed);
            case InnerSolver::ellipsoid: return ellipsoid_despot_free(piece, opt.eps, opt.eps_retries);
        }
    } catch (const ReducibleMatrix&) {
        // Some Tribune policy of this piece has a reducible matrix; fall back to enumeration.
        SolveReport rep = brute_force(piece, opt.policy_cap);
        rep.algorithm = std::string(to_string(opt.inner)) + "+oracle";
        return rep;
    }
    throw std::logic_error("unknown inner solver");
}

}  // namespace detail

/**
 * Despot-free games of any shape. Each nontrivial strongly connected
 * component of the projected graph is solved as an irreducible subgame; the
 * value of a state is the largest subgame value it can reach. Tribune follows
 * the subgame policy where its own component attains the value, and otherwise
 * steps toward the nearest state of equal value lying in such a component.
 * The assembled policy is checked against the per-state values.
 */
inline SolveReport solve_despot_free(const EntropyGame& g, const DespotFreeOptions& opt = {}) {
    const auto start = detail::Clock::now();
    const DespotPolicy sigma = despot_free_successor(g);
    const std::size_t n = g.num_despot();
    const Digraph h = projected_graph(g);
    const Condensation c = scc_condense(h);

    SolveReport rep;
    rep.algorithm = to_string(opt.inner);
    rep.converged = true;
    std::vector<double> comp_value(c.size(), 0.0);
    std::vector<Index> tau(g.num_tribune());
    for (Index t = 0; t < g.num_tribune(); ++t) tau[t] = g.tribune_actions(t).front();
    std::vector<bool> tau_set(g.num_tribune(), false);
    std::unordered_map<std::string, Index> tribune_index, people_index;
    for (Index t = 0; t < g.num_tribune(); ++t) tribune_index.emplace(g.tribune_ids()[t], t);
    for (Index p = 0; p < g.num_people(); ++p) people_index.emplace(g.people_ids()[p], p);

    std::vector<SolveReport> pieces(c.size());
    std::size_t solved = 0;
    for (Index k = 0; k < c.size(); ++k) {
        if (!c.nontrivial[k]) continue;
        const EntropyGame piece = c.size() == 1 ? g : subgame(g, c.components[k]);
        pieces[k] = detail::solve_piece(piece, opt);
        ++solved;
        comp_value[k] = pieces[k].values.front();
        rep.iterations += pieces[k].iterations;
        rep.inner_iterations += pieces[k].inner_iterations;
        rep.converged = rep.converged && pieces[k].converged;
        if (c.size() == 1) {
            rep.trace = pieces[k].trace;
            rep.eigenvector = pieces[k].eigenvector;
        }
    }

    // Per-state values: largest component value reachable in the condensation.
    std::vector<double> reach_value(c.size(), 0.0);
    for (auto it = c.topological_order.rbegin(); it != c.topological_order.rend(); ++it) {
        reach_value[*it] = comp_value[*it];
        for (Index j : c.dag[*it]) reach_value[*it] = std::max(reach_value[*it], reach_value[j]);
    }
    rep.values.resize(n);
    for (Index d = 0; d < n; ++d) rep.values[d] = reach_value[c.component_of[d]];

    // Tribune nodes of components attaining their own value keep the subgame policy.
    for (Index k = 0; k < c.size(); ++k) {
        if (!c.nontrivial[k] || comp_value[k] != reach_value[k]) continue;
        const EntropyGame& piece_game = c.size() == 1 ? g : subgame(g, c.components[k]);
        const TribunePolicy& sub_tau = *pieces[k].tribune_policy;
        for (Index t = 0; t < piece_game.num_tribune(); ++t) {
            const Index gt = tribune_index.at(piece_game.tribune_ids()[t]);
            tau[gt] = people_index.at(piece_game.people_ids()[sub_tau[t]]);
            tau_set[gt] = true;
        }
    }
    // Distance to an attaining component along arcs that preserve the value.
    constexpr std::size_t far = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> dist(n, far);
    std::deque<Index> queue;
    for (Index d = 0; d < n; ++d) {
        const Index k = c.component_of[d];
        if (c.nontrivial[k] && comp_value[k] == reach_value[k]) {
            dist[d] = 0;
            queue.push_back(d);
        }
    }
    const Digraph back = transpose(h);
    while (!queue.empty()) {
        const Index v = queue.front();
        queue.pop_front();
        for (Index u : back[v])
            if (dist[u] == far && rep.values[u] == rep.values[v]) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
    }
    for (Index d = 0; d < n; ++d) {
        const Index t = sigma[d];
        if (tau_set[t] || dist[d] == 0) continue;
        std::size_t best = far;
        for (Index p : g.tribune_actions(t))
            for (const WeightedArc& a : g.people_arcs(p))
                if (rep.values[a.despot] == rep.values[d] && dist[a.despot] < best) {
                    best = dist[a.despot];
                    tau[t] = p;
                }
        tau_set[t] = true;
    }

    rep.despot_policy = sigma;
    rep.tribune_policy = TribunePolicy(std::move(tau));
    const ValueVector check = state_values(g, sigma, *rep.tribune_policy);
    double gap = 0.0;
    for (Index d = 0; d < n; ++d)
        gap = std::max(gap, std::abs(check[d] - rep.values[d]) / std::max(1.0, rep.values[d]));
    rep.residual = std::max(gap, c.size() == 1 && solved == 1 ? pieces.front().residual : 0.0);
    if (gap > 1e-8) rep.converged = false;
    rep.wall_time = detail::seconds_since(start);
    return rep;
}

struct EnumerationOptions {
    std::size_t max_significant = 8;
    DespotFreeOptions inner;
};

/**
 * Enumerates Despot's choices at significant states only, solves each
 * resulting Despot-free game, and takes the per-state minimum. Returns a
 * Despot policy attaining the minimum from every state and Tribune's best
 * response to it.
 */
inline SolveReport solve_by_despot_enumeration(const EntropyGame& g, const EnumerationOptions& opt = {}) {
    const auto start = detail::Clock::now();
    const GameClassification cls = classify(g);
    const auto& sig = cls.significant_despot_states;
    if (sig.size() > opt.max_significant)
        throw CapExceeded("despot enumeration: " + std::to_string(sig.size()) +
                          " significant states exceed the cap of " + std::to_string(opt.max_significant));
    std::vector<std::size_t> radix;
    for (Index d : sig) radix.push_back(g.despot_actions(d).size());
    const std::size_t n = g.num_despot();

    std::vector<DespotPolicy> candidates;
    std::vector<SolveReport> results;
    detail::PolicyOdometer o(radix);
    SolveReport rep;
    rep.algorithm = "enum";
    rep.converged = true;
    do {
        DespotPolicy delta = first_despot_policy(g);
        for (Index i = 0; i < sig.size(); ++i) delta[sig[i]] = g.despot_actions(sig[i])[o.digits()[i]];
        const EntropyGame fixed = fix_despot_policy(g, delta);
        SolveReport r = solve_despot_free(fixed, opt.inner);
        rep.inner_iterations += r.iterations;
        rep.converged = rep.converged && r.converged;
        candidates.push_back(std::move(delta));
        results.push_back(std::move(r));
    } while (o.next());

    ValueVector v(n, std::numeric_limits<double>::infinity());
    for (const SolveReport& r : results)
        for (Index d = 0; d < n; ++d) v[d] = std::min(v[d], r.values[d]);
    std::optional<Index> chosen;
    double best_gap = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < results.size(); ++i) {
        double gap = 0.0;
        for (Index d = 0; d < n; ++d)
            gap = std::max(gap, (results[i].values[d] - v[d]) / std::max(1.0, v[d]));
        if (gap < best_gap) {
            best_gap = gap;
            chosen = i;
        }
    }
    rep.values = v;
    rep.despot_policy = candidates[*chosen];
    rep.tribune_policy = results[*chosen].tribune_policy;
    rep.iterations = candidates.size();
    rep.residual = best_gap;
    if (best_gap > 1e-9) rep.converged = false;
    rep.wall_time = detail::seconds_since(start);
    return rep;
}

enum class Algorithm { pi, simplex, simplex_dantzig, hk, km, oracle, enumeration, ellipsoid, automatic };

inline Algorithm parse_algorithm(const std::string& s) {
    if (s == "pi") return Algorithm::pi;
    if (s == "simplex") return Algorithm::simplex;
    if (s == "simplex-d") return Algorithm::simplex_dantzig;
    if (s == "hk") return Algorithm::hk;
    if (s == "km") return Algorithm::km;
    if (s == "oracle") return Algorithm::oracle;
    if (s == "enum") return Algorithm::enumeration;
    if (s == "ellipsoid") return Algorithm::ellipsoid;
    if (s == "auto") return Algorithm::automatic;
    throw std::invalid_argument("unknown algorithm '" + s + "'");
}

struct SolveOptions {
    Algorithm algorithm = Algorithm::automatic;
    std::optional<std::uint64_t> seed;
    double eps = 1e-10;  ///< km Hilbert tolerance; ellipsoid uses max(eps, 1e-6)
    std::size_t max_iter = 1000000;
};

/**
 * Front door used by the command line. Policy iteration variants run through
 * the SCC wrapper on Despot-free games and in min mode on Tribune-free ones;
 * `automatic` picks the wrapper for Despot-free games, otherwise
 * Hoffman-Karp, falling back to Despot enumeration (few significant states)
 * or the brute-force oracle when a reducible policy matrix shows up.
 */
inline SolveReport solve(const EntropyGame& g, const SolveOptions& opt = {}) {
    const GameClassification cls = classify(g);
    DespotFreeOptions df;
    df.seed = opt.seed;
    df.eps = std::max(opt.eps, 1e-6);
    auto one_player = [&](InnerSolver inner, PivotRule rule) {
        if (cls.despot_free) {
            df.inner = inner;
            return solve_despot_free(g, df);
        }
        if (cls.tribune_free && rule == PivotRule::all) return pi_despot_free(g, Optimize::min, opt.seed);
        throw PreconditionViolated(std::string(to_string(inner)) + ": game is not Despot-free");
    };
    switch (opt.algorithm) {
        case Algorithm::pi: return one_player(InnerSolver::pi, PivotRule::all);
        case Algorithm::simplex: return one_player(InnerSolver::simplex, PivotRule::first);
        case Algorithm::simplex_dantzig: return one_player(InnerSolver::simplex_dantzig, PivotRule::dantzig);
        case Algorithm::ellipsoid: return one_player(InnerSolver::ellipsoid, PivotRule::first);
        case Algorithm::hk: return hoffman_karp(g, opt.seed);
        case Algorithm::km: return km_power(g, opt.eps, opt.max_iter);
        case Algorithm::oracle: return brute_force(g);
        case Algorithm::enumeration: {
            EnumerationOptions eo;
            eo.inner = df;
            return solve_by_despot_enumeration(g, eo);
        }
        case Algorithm::automatic: {
            if (cls.despot_free) return solve_despot_free(g, df);
            try {
                SolveReport r = hoffman_karp(g, opt.seed);
                r.algorithm = "auto:hk";
                return r;
            } catch (const ReducibleMatrix&) {
                EnumerationOptions eo;
                eo.inner = df;
                SolveReport r = cls.significant_despot_states.size() <= eo.max_significant
                                    ? solve_by_despot_enumeration(g, eo)
                                    : brute_force(g);
                r.algorithm = "auto:" + r.algorithm;
                return r;
            }
        }
    }
    throw std::logic_error("unknown algorithm");
}

}  // namespace entropy_games
