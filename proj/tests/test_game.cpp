#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "support.hpp"

using namespace eg_test;

namespace {

std::set<std::pair<Index, Index>> arcs_of(const Digraph& h) {
    std::set<std::pair<Index, Index>> out;
    for (Index v = 0; v < h.size(); ++v)
        for (Index w : h[v]) out.insert({v, w});
    return out;
}

// Brute-force projected graph: enumerate every path (d, t, p, d') directly from the JSON arc list.
std::set<std::pair<Index, Index>> paths_from_json(const char* text) {
    const auto doc = nlohmann::json::parse(text);
    std::vector<std::pair<std::string, std::string>> arcs;
    for (const auto& a : doc["arcs"]) arcs.emplace_back(a["from"], a["to"]);
    std::vector<std::string> despot = doc["despot"];
    auto index_of = [&](const std::string& id) {
        return static_cast<Index>(std::find(despot.begin(), despot.end(), id) - despot.begin());
    };
    std::set<std::pair<Index, Index>> out;
    for (const auto& [d, t] : arcs)
        for (const auto& [t2, p] : arcs)
            for (const auto& [p2, d2] : arcs)
                if (t == t2 && p == p2 && index_of(d) < despot.size() && index_of(d2) < despot.size())
                    out.insert({index_of(d), index_of(d2)});
    return out;
}

}  // namespace

TEST(ParseGame, FibonacciGameHasExpectedShape) {
    const EntropyGame g = fibonacci();
    EXPECT_EQ(g.num_despot(), 3u);
    EXPECT_EQ(g.num_tribune(), 4u);
    EXPECT_EQ(g.num_people(), 4u);
    EXPECT_EQ(g.num_arcs(), 17u);
    EXPECT_EQ(g.max_weight(), 1.0);
    EXPECT_TRUE(g.integral_weights());
    EXPECT_EQ(g.integer_max_weight(), 1);
}

TEST(ParseGame, SingleLoopIsSmallestLegalGame) {
    const EntropyGame g = parse_game(std::string_view(
        R"({"despot":["d"],"tribune":["t"],"people":["p"],"arcs":[{"from":"d","to":"t"},{"from":"t","to":"p"},{"from":"p","to":"d","weight":5}]})"));
    EXPECT_EQ(g.num_despot(), 1u);
    EXPECT_EQ(g.max_weight(), 5.0);
}

TEST(ParseGame, MissingSuccessorIsRejected) {
    const char* text =
        R"({"despot":["d"],"tribune":["t"],"people":["p"],"arcs":[{"from":"d","to":"t"},{"from":"t","to":"p"}]})";
    try {
        parse_game(std::string_view(text));
        FAIL() << "expected InvalidGame";
    } catch (const InvalidGame& e) {
        EXPECT_NE(std::string(e.what()).find("node without successor"), std::string::npos) << e.what();
    }
}

TEST(ParseGame, RejectsDanglingEndpointsBadWeightsAndOrientation) {
    auto bad = [](const char* arcs) {
        const std::string text =
            std::string(R"({"despot":["d"],"tribune":["t"],"people":["p"],"arcs":)") + arcs + "}";
        EXPECT_THROW(parse_game(std::string_view(text)), InvalidGame) << arcs;
    };
    bad(R"([{"from":"d","to":"t"},{"from":"t","to":"p"},{"from":"p","to":"x"}])");
    bad(R"([{"from":"d","to":"t"},{"from":"t","to":"p"},{"from":"p","to":"d","weight":0}])");
    bad(R"([{"from":"d","to":"t"},{"from":"t","to":"p"},{"from":"p","to":"d","weight":-2}])");
    bad(R"([{"from":"d","to":"p"},{"from":"t","to":"p"},{"from":"p","to":"d"}])");
    bad(R"([{"from":"d","to":"t","weight":2},{"from":"t","to":"p"},{"from":"p","to":"d"}])");
    bad(R"([{"from":"d","to":"t"},{"from":"d","to":"t"},{"from":"t","to":"p"},{"from":"p","to":"d"}])");
    EXPECT_THROW(parse_game(std::string_view("not json")), InvalidGame);
    EXPECT_THROW(parse_game(std::string_view(R"({"despot":["d"]})")), InvalidGame);
}

TEST(ParseGame, RealWeightsAreAcceptedButNotIntegral) {
    const EntropyGame g = single_loop(2.5);
    EXPECT_FALSE(g.integral_weights());
    EXPECT_THROW(g.integer_max_weight(), PreconditionViolated);
}

TEST(ParseGame, CanonicalRoundTripIsIdentity) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const EntropyGame g = random_sparse_game(seed, 1 + seed % 6, 3, 3, 9);
        const std::string once = serialize_game(g);
        const EntropyGame back = parse_game(std::string_view(once));
        EXPECT_EQ(back, g);
        EXPECT_EQ(serialize_game(back), once);
    }
    const EntropyGame fib = fibonacci();
    EXPECT_EQ(parse_game(std::string_view(serialize_game(fib))), fib);
}

TEST(ProjectedGraph, FibonacciMatchesPathEnumeration) {
    const auto arcs = arcs_of(projected_graph(fibonacci()));
    EXPECT_EQ(arcs, paths_from_json(fibonacci_json));
    for (auto [a, b] : std::vector<std::pair<Index, Index>>{{0, 0}, {1, 0}, {1, 1}, {1, 2}, {2, 1}, {2, 2}})
        EXPECT_TRUE(arcs.count({a, b})) << a << "->" << b;
}

TEST(ProjectedGraph, SingleLoopAndDisjointLoops) {
    EXPECT_EQ(arcs_of(projected_graph(single_loop(5))), (std::set<std::pair<Index, Index>>{{0, 0}}));
    std::vector<ArcSpec> arcs{{"d1", "t1", {}}, {"t1", "p1", {}}, {"p1", "d1", {}},
                              {"d2", "t2", {}}, {"t2", "p2", {}}, {"p2", "d2", {}}};
    const EntropyGame g({"d1", "d2"}, {"t1", "t2"}, {"p1", "p2"}, arcs);
    EXPECT_EQ(arcs_of(projected_graph(g)), (std::set<std::pair<Index, Index>>{{0, 0}, {1, 1}}));
}

TEST(SccCondense, FibonacciComponents) {
    // d1 -> t2 -> b -> d2 and d2 -> t2 -> a -> d1 make the full game strongly connected.
    EXPECT_EQ(scc_condense(projected_graph(fibonacci())).size(), 1u);
    // Fixing Despot's optimal policy cuts d1 off from {d2, d3}.
    const Condensation c = scc_condense(projected_graph(fix_despot_policy(fibonacci(), fibonacci_delta_star())));
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c.components[0], (std::vector<Index>{0}));
    EXPECT_EQ(c.components[1], (std::vector<Index>{1, 2}));
    EXPECT_TRUE(c.has_access(1, 0));
    EXPECT_FALSE(c.has_access(0, 1));
    EXPECT_TRUE(c.has_access(0, 0));
}

TEST(SccCondense, StronglyConnectedAndDag) {
    const Digraph cycle{{1}, {2}, {0}};
    EXPECT_EQ(scc_condense(cycle).size(), 1u);
    const Digraph dag{{1, 2}, {2}, {}};
    const Condensation c = scc_condense(dag);
    EXPECT_EQ(c.size(), 3u);
    for (Index k = 0; k < 3; ++k) EXPECT_FALSE(c.nontrivial[k]);
    EXPECT_TRUE(c.has_access(0, 2));
    EXPECT_FALSE(c.has_access(2, 0));
    // Topological order lists sources first.
    EXPECT_EQ(c.topological_order, (std::vector<Index>{0, 1, 2}));
}

TEST(SccCondense, DeepChainDoesNotOverflowTheStack) {
    const std::size_t n = 200000;
    Digraph chain(n);
    for (Index i = 0; i + 1 < n; ++i) chain[i].push_back(i + 1);
    chain[n - 1].push_back(0);
    EXPECT_EQ(scc_condense(chain).size(), 1u);
}

TEST(SccCondense, AgreesWithReachabilityOnRandomGraphs) {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        Digraph g(n);
        for (Index v = 0; v < n; ++v)
            for (Index w = 0; w < n; ++w)
                if (rng.below(5) == 0) g[v].push_back(w);
        const Condensation c = scc_condense(g);
        for (Index v = 0; v < n; ++v) {
            const auto from_v = reachable_from(g, {v});
            for (Index w = 0; w < n; ++w) {
                const bool same = from_v[w] && reachable_from(g, {w})[v];
                EXPECT_EQ(same, c.component_of[v] == c.component_of[w]);
                EXPECT_EQ(bool(from_v[w]), c.has_access(c.component_of[v], c.component_of[w]));
            }
        }
    }
}

TEST(Classify, Examples) {
    const GameClassification fib = classify(fibonacci());
    EXPECT_FALSE(fib.despot_free);
    EXPECT_TRUE(fib.irreducible);
    EXPECT_EQ(fib.significant_despot_states, (std::vector<Index>{0, 2}));

    const GameClassification loop = classify(single_loop(5));
    EXPECT_TRUE(loop.despot_free);
    EXPECT_TRUE(loop.tribune_free);
    EXPECT_TRUE(loop.irreducible);

    const GameClassification df = classify(fix_despot_policy(fibonacci(), fibonacci_delta_star()));
    EXPECT_TRUE(df.despot_free);
    EXPECT_FALSE(df.irreducible);
    EXPECT_TRUE(df.significant_despot_states.empty());
}

TEST(Classify, IrreducibleIffSingleComponent) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const EntropyGame g = random_sparse_game(seed, 1 + seed % 7, 2, 3, 5);
        const Condensation c = scc_condense(projected_graph(g));
        EXPECT_EQ(classify(g).irreducible, c.size() == 1 && c.nontrivial[0]);
        EXPECT_EQ(classify(g).despot_free, classify(g).significant_despot_states.empty());
    }
}

TEST(Subgame, FibonacciComponentIsIrreducibleWithGoldenValue) {
    const EntropyGame sub = fibonacci_subgame();
    EXPECT_EQ(sub.despot_ids(), (std::vector<std::string>{"d2", "d3"}));
    EXPECT_TRUE(classify(sub).irreducible);
    EXPECT_TRUE(classify(sub).despot_free);
    const auto v = oracle_values(sub);
    EXPECT_NEAR(v[0], phi, 1e-12);
    EXPECT_NEAR(v[1], phi, 1e-12);
}

TEST(Subgame, WholeComponentGivesIdenticalGame) {
    const EntropyGame loop = single_loop(5);
    EXPECT_EQ(subgame(loop, {0}), loop);
    const EntropyGame g = generate({4, 2, 9, 3, false, 2});
    EXPECT_EQ(subgame(g, {0, 1, 2, 3}), g);
}

TEST(Subgame, EveryComponentYieldsAnIrreducibleGame) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        // Components are taken after fixing Despot, as in the decomposition.
        const EntropyGame two = random_sparse_game(seed, 2 + seed % 6, 2, 3, 5);
        const EntropyGame g = fix_despot_policy(two, first_despot_policy(two));
        const Condensation c = scc_condense(projected_graph(g));
        for (Index k = 0; k < c.size(); ++k) {
            if (!c.nontrivial[k]) continue;
            const EntropyGame sub = subgame(g, c.components[k]);
            EXPECT_EQ(scc_condense(projected_graph(sub)).size(), 1u);
        }
    }
}

TEST(Subgame, NonComponentIsRejected) {
    // {d3} is only part of the component {d2, d3}.
    EXPECT_THROW(subgame(fix_despot_policy(fibonacci(), fibonacci_delta_star()), {2}), InvalidGame);
}

TEST(Policies, ValidationAndFixing) {
    const EntropyGame g = fibonacci();
    EXPECT_NO_THROW(validate(g, fibonacci_delta_star()));
    EXPECT_THROW(validate(g, DespotPolicy({0, 0, 3})), InvalidPolicy);
    EXPECT_THROW(validate(g, DespotPolicy({0, 1})), InvalidPolicy);
    EXPECT_THROW(validate(g, TribunePolicy({0, 0, 2, 3})), InvalidPolicy);
    const EntropyGame fixed = fix_despot_policy(g, fibonacci_delta_star());
    EXPECT_EQ(despot_free_successor(fixed), fibonacci_delta_star());
    EXPECT_THROW(despot_free_successor(g), PreconditionViolated);
}
