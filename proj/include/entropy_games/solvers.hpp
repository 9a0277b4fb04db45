#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "entropy_games/error.hpp"
#include "entropy_games/game.hpp"
#include "entropy_games/operators.hpp"
#include "entropy_games/random.hpp"
#include "entropy_games/spectral.hpp"
#include "entropy_games/structure.hpp"

namespace entropy_games {

/// Outcome of a solver run.
struct SolveReport {
    ValueVector values;
    std::optional<DespotPolicy> despot_policy;
    std::optional<TribunePolicy> tribune_policy;
    std::size_t iterations = 0;        ///< outer iterations
    std::size_t inner_iterations = 0;  ///< Perron solves, inner policy-iteration sweeps or power steps
    double wall_time = 0.0;            ///< seconds
    std::string algorithm;
    bool converged = false;
    double residual = 0.0;
    std::vector<double> trace;           ///< lambda of each evaluated policy, in order
    std::optional<Vector> eigenvector;   ///< X with F(X) = lambda X when the solver produces one

    double max_value() const { return *std::max_element(values.begin(), values.end()); }
};

/// Relative improvement required before a policy changes (floating-point anti-cycling gate).
inline constexpr double improvement_gate = 1e-9;

enum class Optimize { max, min };

enum class PivotRule { all, first, dantzig };

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ActionRow {
    Index id;      ///< People node (max mode) or Tribune node (min mode)
    Index people;  ///< People node whose arcs form the matrix row
};

/**
 * One-player policy iteration problem. Each controller (a Tribune node when
 * maximizing, a Despot node when minimizing) chooses one action; every row
 * it controls becomes the arc list of the chosen People node.
 */
struct OnePlayerProblem {
    const EntropyGame* game = nullptr;
    Optimize sense = Optimize::max;
    std::vector<Index> row_controller;
    std::vector<std::vector<ActionRow>> actions;
    std::vector<std::vector<Index>> rows_of;
};

struct OnePlayerResult {
    std::vector<Index> choice;  ///< position in actions[c]
    double lambda = 0.0;
    Vector x;
    std::vector<double> trace;
    std::size_t evaluations = 0;
    std::size_t perron_steps = 0;
    bool converged = false;
};

inline OnePlayerProblem max_problem(const EntropyGame& g, const DespotPolicy& sigma) {
    OnePlayerProblem pb;
    pb.game = &g;
    pb.sense = Optimize::max;
    pb.row_controller = sigma.choices();
    pb.actions.resize(g.num_tribune());
    pb.rows_of.resize(g.num_tribune());
    for (Index t = 0; t < g.num_tribune(); ++t)
        for (Index p : g.tribune_actions(t)) pb.actions[t].push_back({p, p});
    for (Index d = 0; d < g.num_despot(); ++d) pb.rows_of[sigma[d]].push_back(d);
    return pb;
}

inline OnePlayerProblem min_problem(const EntropyGame& g) {
    OnePlayerProblem pb;
    pb.game = &g;
    pb.sense = Optimize::min;
    pb.actions.resize(g.num_despot());
    pb.rows_of.resize(g.num_despot());
    for (Index d = 0; d < g.num_despot(); ++d) {
        pb.row_controller.push_back(d);
        pb.rows_of[d].push_back(d);
        for (Index t : g.despot_actions(d)) pb.actions[d].push_back({t, g.tribune_actions(t).front()});
    }
    return pb;
}

inline Matrix build_matrix(const OnePlayerProblem& pb, const std::vector<Index>& choice) {
    const EntropyGame& g = *pb.game;
    Matrix m(g.num_despot());
    for (Index d = 0; d < g.num_despot(); ++d) {
        const Index c = pb.row_controller[d];
        for (const WeightedArc& a : g.people_arcs(pb.actions[c][choice[c]].people)) m(d, a.despot) = a.weight;
    }
    return m;
}

inline std::vector<Index> initial_choice(const OnePlayerProblem& pb, std::optional<std::uint64_t> seed) {
    std::vector<Index> choice(pb.actions.size(), 0);
    if (seed) {
        SplitMix64 rng(*seed);
        for (Index c = 0; c < choice.size(); ++c) choice[c] = rng.below(pb.actions[c].size());
    }
    return choice;
}

/**
 * Policy iteration with the given pivot rule. `all` switches every improvable
 * controller (multiplicative policy iteration), `first` the first improvable
 * one in index order, `dantzig` the one with the largest improvement.
 */
inline OnePlayerResult run_policy_iteration(const OnePlayerProblem& pb, std::vector<Index> choice, PivotRule rule,
                                            std::optional<Vector> warm = std::nullopt,
                                            std::size_t max_evaluations = 1000000) {
    const EntropyGame& g = *pb.game;
    const bool maximize = pb.sense == Optimize::max;
    OnePlayerResult out;
    Vector x = warm ? *warm : Vector(g.num_despot(), 1.0);
    while (out.evaluations < max_evaluations) {
        const Matrix m = build_matrix(pb, choice);
        const PerronPair pp = perron_root(m, std::span<const double>(x));
        ++out.evaluations;
        out.perron_steps += pp.iterations;
        out.trace.push_back(pp.rho);
        x = pp.right;
        const double lambda = pp.rho;

        Index pick = static_cast<Index>(-1);
        double pick_gain = 0.0;
        std::vector<std::pair<Index, Index>> switches;
        for (Index c = 0; c < pb.actions.size(); ++c) {
            if (pb.rows_of[c].empty() || pb.actions[c].size() < 2) continue;
            double x_ref = 0.0;
            for (Index d : pb.rows_of[c]) x_ref = std::max(x_ref, x[d]);
            const double current = people_sum(g, pb.actions[c][choice[c]].people, x);
            Index best = choice[c];
            double best_value = current;
            for (Index a = 0; a < pb.actions[c].size(); ++a) {
                const double v = people_sum(g, pb.actions[c][a].people, x);
                if (maximize ? v > best_value : v < best_value) {
                    best_value = v;
                    best = a;
                }
            }
            const double gain = maximize ? best_value - current : current - best_value;
            if (!(gain > improvement_gate * (1.0 + lambda) * x_ref)) continue;
            // Among the actions attaining the optimum, prefer the smallest index.
            for (Index a = 0; a < pb.actions[c].size(); ++a)
                if (people_sum(g, pb.actions[c][a].people, x) == best_value) {
                    best = a;
                    break;
                }
            if (rule == PivotRule::all) {
                switches.emplace_back(c, best);
            } else if (rule == PivotRule::first) {
                switches.emplace_back(c, best);
                break;
            } else if (pick == static_cast<Index>(-1) || gain > pick_gain) {
                pick = c;
                pick_gain = gain;
                switches.assign(1, {c, best});
            }
        }
        if (switches.empty()) {
            out.converged = true;
            out.lambda = lambda;
            break;
        }
        for (auto [c, a] : switches) choice[c] = a;
        out.lambda = lambda;
    }
    out.choice = std::move(choice);
    out.x = std::move(x);
    return out;
}

inline std::string with_context(const char* algorithm, const ReducibleMatrix& e) {
    return std::string(algorithm) + ": " + e.what() +
           "; solve reducible games with the SCC wrapper, despot enumeration or the brute-force oracle";
}

inline double eigen_residual(const EntropyGame& g, std::span<const double> x, double lambda) {
    const ValueVector fx = apply_F(g, x);
    double r = 0.0;
    for (Index d = 0; d < fx.size(); ++d) r = std::max(r, std::abs(fx[d] - lambda * x[d]));
    return r / sup_norm(x);
}

inline OnePlayerResult one_player(const char* name, const OnePlayerProblem& pb, std::vector<Index> choice,
                                  PivotRule rule, std::optional<Vector> warm = std::nullopt) {
    try {
        return run_policy_iteration(pb, std::move(choice), rule, std::move(warm));
    } catch (const ReducibleMatrix& e) {
        throw ReducibleMatrix(with_context(name, e), e.classes);
    }
}

inline SolveReport one_player_report(const EntropyGame& g, const char* name, Optimize sense, PivotRule rule,
                                     std::optional<std::uint64_t> seed) {
    const auto start = Clock::now();
    const GameClassification cls = classify(g);
    OnePlayerProblem pb;
    if (sense == Optimize::max) {
        if (!cls.despot_free) throw PreconditionViolated(std::string(name) + ": game is not Despot-free");
        pb = max_problem(g, despot_free_successor(g));
    } else {
        if (!cls.tribune_free) throw PreconditionViolated(std::string(name) + ": game is not Tribune-free");
        pb = min_problem(g);
    }
    OnePlayerResult r = one_player(name, pb, initial_choice(pb, seed), rule);

    SolveReport rep;
    rep.algorithm = name;
    rep.values.assign(g.num_despot(), r.lambda);
    if (sense == Optimize::max) {
        rep.despot_policy = despot_free_successor(g);
        std::vector<Index> tau(g.num_tribune());
        for (Index t = 0; t < g.num_tribune(); ++t) tau[t] = pb.actions[t][r.choice[t]].id;
        rep.tribune_policy = TribunePolicy(std::move(tau));
    } else {
        std::vector<Index> delta(g.num_despot());
        for (Index d = 0; d < g.num_despot(); ++d) delta[d] = pb.actions[d][r.choice[d]].id;
        rep.despot_policy = DespotPolicy(std::move(delta));
        rep.tribune_policy = first_tribune_policy(g);
    }
    rep.iterations = r.converged ? r.evaluations + 1 : r.evaluations;
    rep.inner_iterations = r.evaluations;
    rep.trace = std::move(r.trace);
    rep.residual = eigen_residual(g, r.x, r.lambda);
    rep.converged = r.converged;
    rep.eigenvector = std::move(r.x);
    rep.wall_time = seconds_since(start);
    return rep;
}

}  // namespace detail

/**
 * Multiplicative policy iteration. In max mode the game must be Despot-free
 * and Tribune improves; in min mode it must be Tribune-free and Despot
 * improves. Every policy matrix met must be irreducible.
 *
 * `iterations` counts the generated policies including the final repeated one,
 * so a run whose initial policy is optimal reports 2.
 */
inline SolveReport pi_despot_free(const EntropyGame& g, Optimize mode = Optimize::max,
                                  std::optional<std::uint64_t> seed = std::nullopt) {
    return detail::one_player_report(g, mode == Optimize::max ? "pi" : "pi-min", mode, PivotRule::all, seed);
}

/// Spectral simplex: one policy change per iteration, first improvable state or Dantzig's steepest rule.
inline SolveReport spectral_simplex(const EntropyGame& g, PivotRule rule = PivotRule::first,
                                    std::optional<std::uint64_t> seed = std::nullopt) {
    if (rule == PivotRule::all) throw std::invalid_argument("spectral_simplex: pivot rule must be first or dantzig");
    return detail::one_player_report(g, rule == PivotRule::first ? "simplex" : "simplex-d", Optimize::max, rule,
                                     seed);
}

/**
 * Two-player policy iteration: for the current Despot policy, Tribune's best
 * response is computed by policy iteration (warm-started from the previous
 * response), then Despot switches every state where another action is
 * strictly better against the resulting eigenvector.
 */
inline SolveReport hoffman_karp(const EntropyGame& g, std::optional<std::uint64_t> seed = std::nullopt) {
    const auto start = detail::Clock::now();
    std::vector<Index> delta(g.num_despot());
    std::vector<Index> tau_choice(g.num_tribune(), 0);
    {
        std::optional<SplitMix64> rng;
        if (seed) rng.emplace(*seed);
        for (Index d = 0; d < g.num_despot(); ++d) {
            const auto& acts = g.despot_actions(d);
            delta[d] = acts[rng ? rng->below(acts.size()) : 0];
        }
        for (Index t = 0; t < g.num_tribune(); ++t)
            tau_choice[t] = rng ? rng->below(g.tribune_actions(t).size()) : 0;
    }

    SolveReport rep;
    rep.algorithm = "hk";
    Vector x(g.num_despot(), 1.0);
    double lambda = 0.0;
    const std::size_t max_outer = 100000;
    std::size_t outer = 0;
    for (; outer < max_outer; ++outer) {
        const DespotPolicy current(delta);
        const detail::OnePlayerProblem pb = detail::max_problem(g, current);
        detail::OnePlayerResult inner = detail::one_player("hk", pb, tau_choice, PivotRule::all, x);
        rep.inner_iterations += inner.evaluations;
        tau_choice = inner.choice;
        x = inner.x;
        lambda = inner.lambda;
        rep.trace.push_back(lambda);

        bool changed = false;
        std::vector<double> cache(g.num_tribune(), std::numeric_limits<double>::quiet_NaN());
        auto value_of = [&](Index t) {
            if (std::isnan(cache[t])) cache[t] = tribune_value(g, t, x);
            return cache[t];
        };
        for (Index d = 0; d < g.num_despot(); ++d) {
            const auto& acts = g.despot_actions(d);
            if (acts.size() < 2) continue;
            const double cur = value_of(delta[d]);
            double best_value = cur;
            for (Index t : acts) best_value = std::min(best_value, value_of(t));
            if (!(cur - best_value > improvement_gate * (1.0 + lambda) * x[d])) continue;
            for (Index t : acts)
                if (value_of(t) == best_value) {
                    delta[d] = t;
                    break;
                }
            changed = true;
        }
        if (!changed) {
            rep.converged = true;
            break;
        }
    }
    rep.iterations = rep.converged ? outer + 2 : outer;
    rep.values.assign(g.num_despot(), lambda);
    rep.despot_policy = DespotPolicy(delta);
    std::vector<Index> tau(g.num_tribune());
    for (Index t = 0; t < g.num_tribune(); ++t) tau[t] = g.tribune_actions(t)[tau_choice[t]];
    rep.tribune_policy = TribunePolicy(std::move(tau));
    rep.residual = detail::eigen_residual(g, x, lambda) / lambda;
    rep.eigenvector = std::move(x);
    rep.wall_time = detail::seconds_since(start);
    return rep;
}

/**
 * Krasnoselskii-Mann power iteration in log coordinates:
 * x <- (x + f(x) - mean(f(x))) / 2, which keeps prod_d X_d = 1. Returns
 * lambda = geometric mean of F(X) and X = exp(x). Stops once the Hilbert
 * seminorm of f(x) - x is at most eps and ||F(X) - lambda X|| <= 10 eps ||X||
 * (both sup norms); `residual` is ||F(X) - lambda X|| / ||X||. The second
 * test matters when lambda > 10, where a Hilbert gap of eps alone only gives
 * a residual of about lambda eps.
 */
inline SolveReport km_power(const EntropyGame& g, double eps = 1e-10, std::size_t max_iter = 1000000) {
    if (!(eps > 0.0)) throw std::invalid_argument("km_power: eps must be positive");
    const auto start = detail::Clock::now();
    const std::size_t n = g.num_despot();
    SolveReport rep;
    rep.algorithm = "km";
    Vector x(n, 0.0);
    ValueVector fx;
    double mean = 0.0;
    std::size_t it = 0;
    // Residual of the max-normalized vector exp(x - max x), which stays in range.
    auto residual_at = [&](double lambda) {
        const double top = *std::max_element(x.begin(), x.end());
        Vector scaled(n);
        for (Index d = 0; d < n; ++d) scaled[d] = std::exp(x[d] - top);
        return detail::eigen_residual(g, scaled, lambda);
    };
    while (true) {
        fx = apply_f(g, x);
        ++it;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        mean = 0.0;
        for (Index d = 0; d < n; ++d) {
            lo = std::min(lo, fx[d] - x[d]);
            hi = std::max(hi, fx[d] - x[d]);
            mean += fx[d];
        }
        mean /= static_cast<double>(n);
        rep.trace.push_back(hi - lo);
        if (!std::isfinite(hi - lo)) break;
        if (hi - lo <= eps && residual_at(std::exp(mean)) <= 10.0 * eps) {
            rep.converged = true;
            break;
        }
        if (it >= max_iter) break;
        for (Index d = 0; d < n; ++d) x[d] = 0.5 * (x[d] + fx[d] - mean);
    }
    const double lambda = std::exp(mean);
    rep.residual = residual_at(lambda);
    Vector big(n);
    for (Index d = 0; d < n; ++d) big[d] = std::exp(x[d]);
    rep.eigenvector = std::move(big);
    rep.values.assign(n, lambda);
    rep.iterations = it;
    rep.inner_iterations = it;
    rep.wall_time = detail::seconds_since(start);
    return rep;
}

namespace detail {

/// Odometer enumeration over per-state action lists.
class PolicyOdometer {
public:
    explicit PolicyOdometer(std::vector<std::size_t> radix) : radix_(std::move(radix)), digits_(radix_.size(), 0) {}
    const std::vector<std::size_t>& digits() const { return digits_; }
    bool next() {
        for (Index i = 0; i < digits_.size(); ++i) {
            if (++digits_[i] < radix_[i]) return true;
            digits_[i] = 0;
        }
        return false;
    }

private:
    std::vector<std::size_t> radix_;
    std::vector<std::size_t> digits_;
};

inline double count_policies(const std::vector<std::size_t>& radix) {
    double c = 1.0;
    for (std::size_t r : radix) c *= static_cast<double>(r);
    return c;
}

inline bool close_values(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(a, b)); }

}  // namespace detail

inline constexpr double default_policy_cap = 1e6;

/**
 * Exhaustive min-max over all policy pairs: V_d = min_delta max_tau of the
 * per-state value of the pair. The max-min order is computed as well and
 * must agree (saddle point check). Returns a Despot policy optimal from every
 * state and a Tribune policy optimal from every state.
 */
inline SolveReport brute_force(const EntropyGame& g, double cap = default_policy_cap) {
    const auto start = detail::Clock::now();
    std::vector<std::size_t> dr, tr;
    for (Index d = 0; d < g.num_despot(); ++d) dr.push_back(g.despot_actions(d).size());
    for (Index t = 0; t < g.num_tribune(); ++t) tr.push_back(g.tribune_actions(t).size());
    const double n_delta = detail::count_policies(dr), n_tau = detail::count_policies(tr);
    if (n_delta * n_tau > cap)
        throw CapExceeded("brute_force: " + std::to_string(static_cast<long double>(n_delta * n_tau)) +
                          " policy pairs exceed the cap of " + std::to_string(static_cast<long double>(cap)));
    const std::size_t nd = static_cast<std::size_t>(n_delta), nt = static_cast<std::size_t>(n_tau);
    const std::size_t n = g.num_despot();

    auto delta_at = [&](const std::vector<std::size_t>& digits) {
        std::vector<Index> c(n);
        for (Index d = 0; d < n; ++d) c[d] = g.despot_actions(d)[digits[d]];
        return DespotPolicy(std::move(c));
    };
    auto tau_at = [&](const std::vector<std::size_t>& digits) {
        std::vector<Index> c(g.num_tribune());
        for (Index t = 0; t < g.num_tribune(); ++t) c[t] = g.tribune_actions(t)[digits[t]];
        return TribunePolicy(std::move(c));
    };
    std::vector<TribunePolicy> taus;
    taus.reserve(nt);
    {
        detail::PolicyOdometer o(tr);
        do taus.push_back(tau_at(o.digits()));
        while (o.next());
    }
    std::vector<DespotPolicy> deltas;
    deltas.reserve(nd);
    {
        detail::PolicyOdometer o(dr);
        do deltas.push_back(delta_at(o.digits()));
        while (o.next());
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<ValueVector> max_over_tau(nd, ValueVector(n, -inf));
    std::vector<ValueVector> min_over_delta(nt, ValueVector(n, inf));
    std::size_t evaluations = 0;
    for (Index i = 0; i < nd; ++i)
        for (Index j = 0; j < nt; ++j) {
            const ValueVector v = state_values(g, deltas[i], taus[j]);
            ++evaluations;
            for (Index d = 0; d < n; ++d) {
                max_over_tau[i][d] = std::max(max_over_tau[i][d], v[d]);
                min_over_delta[j][d] = std::min(min_over_delta[j][d], v[d]);
            }
        }
    ValueVector upper(n, inf), lower(n, -inf);
    for (Index i = 0; i < nd; ++i)
        for (Index d = 0; d < n; ++d) upper[d] = std::min(upper[d], max_over_tau[i][d]);
    for (Index j = 0; j < nt; ++j)
        for (Index d = 0; d < n; ++d) lower[d] = std::max(lower[d], min_over_delta[j][d]);

    SolveReport rep;
    rep.algorithm = "oracle";
    double gap = 0.0;
    for (Index d = 0; d < n; ++d) {
        gap = std::max(gap, (upper[d] - lower[d]) / std::max(1.0, upper[d]));
        if (!detail::close_values(upper[d], lower[d]))
            throw VerificationFailed("brute_force: saddle point check failed at state " + g.despot_ids()[d] +
                                     " (min-max " + std::to_string(upper[d]) + ", max-min " +
                                     std::to_string(lower[d]) + ")");
    }
    auto uniform = [&](const ValueVector& v) {
        for (Index d = 0; d < n; ++d)
            if (!detail::close_values(v[d], upper[d])) return false;
        return true;
    };
    for (Index i = 0; i < nd && !rep.despot_policy; ++i)
        if (uniform(max_over_tau[i])) rep.despot_policy = deltas[i];
    for (Index j = 0; j < nt && !rep.tribune_policy; ++j)
        if (uniform(min_over_delta[j])) rep.tribune_policy = taus[j];
    if (!rep.despot_policy || !rep.tribune_policy)
        throw VerificationFailed("brute_force: no policy is optimal from every state");
    rep.values = upper;
    rep.iterations = evaluations;
    rep.inner_iterations = evaluations;
    rep.converged = true;
    rep.residual = gap;
    rep.wall_time = detail::seconds_since(start);
    return rep;
}

}  // namespace entropy_games
