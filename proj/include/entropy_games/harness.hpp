#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "entropy_games/decomposition.hpp"
#include "entropy_games/game.hpp"
#include "entropy_games/random.hpp"

namespace entropy_games {

/// Parameters of a random instance.
struct RandomSpec {
    std::size_t n = 10;             ///< Despot states, one Tribune node each
    std::size_t m = 2;              ///< Tribune actions per Tribune node
    std::int64_t W = 15;            ///< weights uniform on {1, ..., W}
    std::uint64_t seed = 0;
    bool two_player = false;
    std::size_t despot_actions = 2; ///< Tribune successors of each Despot state (two-player mode)
};

/**
 * Random dense game. Tribune node t_i has m People successors, each with
 * arcs to every Despot state and weights uniform on {1..W}. In Despot-free
 * mode d_i moves to t_i; in two-player mode each d_i gets `despot_actions`
 * distinct Tribune successors drawn without replacement (listed in index order).
 */
inline EntropyGame generate(const RandomSpec& spec) {
    if (spec.n < 1 || spec.m < 1 || spec.W < 1) throw std::invalid_argument("generate: need n, m, W >= 1");
    if (spec.two_player && (spec.despot_actions < 1 || spec.despot_actions > spec.n))
        throw std::invalid_argument("generate: despot_actions must lie in [1, n]");
    SplitMix64 root(spec.seed);
    SplitMix64 weights = root.split();
    SplitMix64 moves = root.split();
    const std::size_t n = spec.n, m = spec.m;

    std::vector<std::string> d_ids, t_ids, p_ids;
    for (Index i = 0; i < n; ++i) {
        d_ids.push_back("d" + std::to_string(i));
        t_ids.push_back("t" + std::to_string(i));
    }
    std::vector<std::vector<Index>> tribune_actions(n);
    std::vector<std::vector<WeightedArc>> people_arcs;
    for (Index t = 0; t < n; ++t)
        for (Index a = 0; a < m; ++a) {
            tribune_actions[t].push_back(p_ids.size());
            p_ids.push_back("p" + std::to_string(t) + "_" + std::to_string(a));
            std::vector<WeightedArc> arcs(n);
            for (Index d = 0; d < n; ++d) arcs[d] = {d, static_cast<double>(weights.between(1, spec.W))};
            people_arcs.push_back(std::move(arcs));
        }
    std::vector<std::vector<Index>> despot_actions(n);
    for (Index d = 0; d < n; ++d) {
        if (!spec.two_player) {
            despot_actions[d] = {d};
            continue;
        }
        std::vector<Index> pool(n);
        std::iota(pool.begin(), pool.end(), Index{0});
        for (Index k = 0; k < spec.despot_actions; ++k) {
            const Index j = k + moves.below(n - k);
            std::swap(pool[k], pool[j]);
        }
        pool.resize(spec.despot_actions);
        std::sort(pool.begin(), pool.end());
        despot_actions[d] = std::move(pool);
    }
    return EntropyGame(std::move(d_ids), std::move(t_ids), std::move(p_ids), std::move(despot_actions),
                       std::move(tribune_actions), std::move(people_arcs));
}

struct BenchConfig {
    std::vector<RandomSpec> grid;
    std::vector<std::string> algorithms;
    std::size_t repetitions = 1;
    double eps = 1e-10;
};

/// One CSV row. Aggregate rows carry rep = "mean" or "median".
struct BenchRecord {
    RandomSpec spec;
    std::string algorithm;
    std::string rep;
    double wall_time = 0.0;
    double outer_iterations = 0.0;
    double inner_solves = 0.0;
    double value = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    std::string error;
};

inline const char* bench_csv_header = "n,m,W,seed,two_player,algo,rep,wall_time_s,outer_iters,inner_solves,value,converged";

inline BenchConfig parse_bench_config(const nlohmann::json& doc) {
    auto fail = [](const std::string& what) { throw InvalidGame("bench config schema violation: " + what); };
    if (!doc.is_object()) fail("top level must be an object");
    BenchConfig c;
    if (doc.contains("repetitions")) {
        if (!doc["repetitions"].is_number_unsigned()) fail("\"repetitions\" must be a nonnegative integer");
        c.repetitions = doc["repetitions"].get<std::size_t>();
    }
    if (doc.contains("eps")) c.eps = doc["eps"].get<double>();
    if (doc.contains("algorithms")) {
        if (!doc["algorithms"].is_array()) fail("\"algorithms\" must be an array");
        for (const auto& a : doc["algorithms"]) {
            if (!a.is_string()) fail("algorithm names must be strings");
            parse_algorithm(a.get<std::string>());
            c.algorithms.push_back(a.get<std::string>());
        }
    }
    if (doc.contains("grid")) {
        if (!doc["grid"].is_array()) fail("\"grid\" must be an array");
        for (const auto& item : doc["grid"]) {
            if (!item.is_object()) fail("grid entries must be objects");
            RandomSpec s;
            if (!item.contains("n") || !item.contains("m")) fail("grid entries need \"n\" and \"m\"");
            s.n = item["n"].get<std::size_t>();
            s.m = item["m"].get<std::size_t>();
            if (item.contains("W")) s.W = item["W"].get<std::int64_t>();
            if (item.contains("seed")) s.seed = item["seed"].get<std::uint64_t>();
            if (item.contains("two_player")) s.two_player = item["two_player"].get<bool>();
            if (item.contains("despot_actions")) s.despot_actions = item["despot_actions"].get<std::size_t>();
            c.grid.push_back(s);
        }
    }
    return c;
}

namespace detail {

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace detail

inline void write_csv_row(std::ostream& out, const BenchRecord& r) {
    char wall[64];
    std::snprintf(wall, sizeof wall, "%.6f", r.wall_time);
    out << r.spec.n << ',' << r.spec.m << ',' << r.spec.W << ',' << r.spec.seed << ','
        << (r.spec.two_player ? 1 : 0) << ',' << r.algorithm << ',' << r.rep << ',' << wall << ','
        << detail::format_number(r.outer_iterations) << ',' << detail::format_number(r.inner_solves) << ','
        << detail::format_number(r.value) << ',' << (r.converged ? 1 : 0) << '\n';
}

/**
 * Runs every (spec, algorithm, repetition) sequentially in grid order.
 * Repetition r uses instance seed spec.seed + r; the clock covers the solve
 * call only. A failing solve is recorded with converged = 0 and value nan.
 * After the repetitions of each (spec, algorithm), a mean and a median row
 * follow. Rows are streamed to `csv` (if given) as they complete.
 */
inline std::vector<BenchRecord> run_bench(const BenchConfig& config, std::ostream* csv = nullptr) {
    std::vector<BenchRecord> rows;
    if (csv) *csv << bench_csv_header << '\n';
    for (const RandomSpec& base : config.grid)
        for (const std::string& algo : config.algorithms) {
            std::vector<BenchRecord> reps;
            SolveOptions opt;
            opt.algorithm = parse_algorithm(algo);
            opt.eps = config.eps;
            for (std::size_t r = 0; r < config.repetitions; ++r) {
                BenchRecord rec;
                rec.spec = base;
                rec.spec.seed = base.seed + r;
                rec.algorithm = algo;
                rec.rep = std::to_string(r);
                const EntropyGame g = generate(rec.spec);
                const auto start = std::chrono::steady_clock::now();
                try {
                    const SolveReport rep = solve(g, opt);
                    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                    rec.outer_iterations = static_cast<double>(rep.iterations);
                    rec.inner_solves = static_cast<double>(rep.inner_iterations);
                    rec.value = rep.max_value();
                    rec.converged = rep.converged;
                } catch (const std::exception& e) {
                    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                    rec.error = e.what();
                }
                if (csv) write_csv_row(*csv, rec);
                reps.push_back(rec);
            }
            rows.insert(rows.end(), reps.begin(), reps.end());
            if (reps.empty()) continue;
            std::vector<double> wall, outer, inner, value;
            bool all_converged = true;
            for (const BenchRecord& r : reps) {
                wall.push_back(r.wall_time);
                outer.push_back(r.outer_iterations);
                inner.push_back(r.inner_solves);
                value.push_back(r.value);
                all_converged = all_converged && r.converged;
            }
            for (const char* kind : {"mean", "median"}) {
                const bool is_mean = std::string(kind) == "mean";
                auto agg = [&](const std::vector<double>& v) { return is_mean ? detail::mean(v) : detail::median(v); };
                BenchRecord a;
                a.spec = base;
                a.algorithm = algo;
                a.rep = kind;
                a.wall_time = agg(wall);
                a.outer_iterations = agg(outer);
                a.inner_solves = agg(inner);
                a.value = agg(value);
                a.converged = all_converged;
                if (csv) write_csv_row(*csv, a);
                rows.push_back(a);
            }
        }
    return rows;
}

}  // namespace entropy_games
