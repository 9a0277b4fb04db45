#pragma once

#include <algorithm>
#include <vector>

#include "entropy_games/game.hpp"
#include "entropy_games/graph.hpp"

namespace entropy_games {

/// Despot-to-Despot graph: d -> d' iff some path (d, t, p, d') exists.
inline Digraph projected_graph(const EntropyGame& g) {
    Digraph h(g.num_despot());
    for (Index d = 0; d < g.num_despot(); ++d) {
        auto& succ = h[d];
        for (Index t : g.despot_actions(d))
            for (Index p : g.tribune_actions(t))
                for (const WeightedArc& a : g.people_arcs(p)) succ.push_back(a.despot);
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    }
    return h;
}

struct GameClassification {
    bool despot_free = false;   ///< no Despot node with two or more actions
    bool tribune_free = false;  ///< no Tribune node with two or more actions
    bool irreducible = false;   ///< projected graph strongly connected
    std::vector<Index> significant_despot_states;
    std::vector<Index> significant_tribune_states;
};

inline GameClassification classify(const EntropyGame& g) {
    GameClassification c;
    for (Index d = 0; d < g.num_despot(); ++d)
        if (g.despot_actions(d).size() >= 2) c.significant_despot_states.push_back(d);
    for (Index t = 0; t < g.num_tribune(); ++t)
        if (g.tribune_actions(t).size() >= 2) c.significant_tribune_states.push_back(t);
    c.despot_free = c.significant_despot_states.empty();
    c.tribune_free = c.significant_tribune_states.empty();
    const Condensation cond = scc_condense(projected_graph(g));
    c.irreducible = cond.size() == 1 && cond.nontrivial[0];
    return c;
}

/// The unique Tribune successor of each Despot node of a Despot-free game.
inline DespotPolicy despot_free_successor(const EntropyGame& g) {
    std::vector<Index> sigma(g.num_despot());
    for (Index d = 0; d < g.num_despot(); ++d) {
        if (g.despot_actions(d).size() != 1)
            throw PreconditionViolated("game is not Despot-free (state " + g.despot_ids()[d] + ")");
        sigma[d] = g.despot_actions(d).front();
    }
    return DespotPolicy(std::move(sigma));
}

/**
 * Restriction of `g` to the Despot states of `component`, a strongly
 * connected component of the projected graph. Tribune keeps the actions that
 * may lead back into the component, People keeps only arcs into it. Node
 * identifiers are preserved; unused Tribune and People nodes are dropped.
 * Meant for Despot-free games: with several Despot actions, an action whose
 * Tribune node cannot return to the component leaves a dead end and the
 * restriction is rejected.
 */
inline EntropyGame subgame(const EntropyGame& g, std::vector<Index> component) {
    std::sort(component.begin(), component.end());
    constexpr Index absent = static_cast<Index>(-1);
    std::vector<Index> despot_map(g.num_despot(), absent);
    for (Index i = 0; i < component.size(); ++i) despot_map[component[i]] = i;

    std::vector<bool> people_used(g.num_people(), false), tribune_used(g.num_tribune(), false);
    auto leads_inside = [&](Index p) {
        for (const WeightedArc& a : g.people_arcs(p))
            if (despot_map[a.despot] != absent) return true;
        return false;
    };
    for (Index d : component)
        for (Index t : g.despot_actions(d)) {
            tribune_used[t] = true;
            for (Index p : g.tribune_actions(t))
                if (leads_inside(p)) people_used[p] = true;
        }

    std::vector<Index> tribune_map(g.num_tribune(), absent), people_map(g.num_people(), absent);
    std::vector<std::string> despot_ids, tribune_ids, people_ids;
    for (Index d : component) despot_ids.push_back(g.despot_ids()[d]);
    for (Index t = 0; t < g.num_tribune(); ++t)
        if (tribune_used[t]) {
            tribune_map[t] = tribune_ids.size();
            tribune_ids.push_back(g.tribune_ids()[t]);
        }
    for (Index p = 0; p < g.num_people(); ++p)
        if (people_used[p]) {
            people_map[p] = people_ids.size();
            people_ids.push_back(g.people_ids()[p]);
        }

    std::vector<std::vector<Index>> despot_actions(component.size());
    for (Index i = 0; i < component.size(); ++i)
        for (Index t : g.despot_actions(component[i])) despot_actions[i].push_back(tribune_map[t]);
    std::vector<std::vector<Index>> tribune_actions(tribune_ids.size());
    for (Index t = 0; t < g.num_tribune(); ++t) {
        if (tribune_map[t] == absent) continue;
        for (Index p : g.tribune_actions(t))
            if (people_map[p] != absent) tribune_actions[tribune_map[t]].push_back(people_map[p]);
    }
    std::vector<std::vector<WeightedArc>> people_arcs(people_ids.size());
    for (Index p = 0; p < g.num_people(); ++p) {
        if (people_map[p] == absent) continue;
        for (const WeightedArc& a : g.people_arcs(p))
            if (despot_map[a.despot] != absent) people_arcs[people_map[p]].push_back({despot_map[a.despot], a.weight});
    }
    std::optional<Index> initial;
    if (g.initial() && despot_map[*g.initial()] != absent) initial = despot_map[*g.initial()];

    EntropyGame result = [&] {
        try {
            return EntropyGame(std::move(despot_ids), std::move(tribune_ids), std::move(people_ids),
                               std::move(despot_actions), std::move(tribune_actions), std::move(people_arcs), initial);
        } catch (const InvalidGame& e) {
            throw InvalidGame(std::string("subgame: component is not a strongly connected component (") + e.what() + ")");
        }
    }();
    const Condensation cond = scc_condense(projected_graph(result));
    if (cond.size() != 1 || !cond.nontrivial[0])
        throw InvalidGame("subgame: component is not a strongly connected component");
    return result;
}

/// The Despot-free game obtained by fixing Despot's policy. Node indices are unchanged.
inline EntropyGame fix_despot_policy(const EntropyGame& g, const DespotPolicy& delta) {
    validate(g, delta);
    std::vector<std::vector<Index>> despot_actions(g.num_despot());
    std::vector<std::vector<Index>> tribune_actions(g.num_tribune());
    std::vector<std::vector<WeightedArc>> people_arcs(g.num_people());
    for (Index d = 0; d < g.num_despot(); ++d) despot_actions[d] = {delta[d]};
    for (Index t = 0; t < g.num_tribune(); ++t) tribune_actions[t] = g.tribune_actions(t);
    for (Index p = 0; p < g.num_people(); ++p) people_arcs[p] = g.people_arcs(p);
    return EntropyGame(g.despot_ids(), g.tribune_ids(), g.people_ids(), std::move(despot_actions),
                       std::move(tribune_actions), std::move(people_arcs), g.initial());
}

}  // namespace entropy_games
