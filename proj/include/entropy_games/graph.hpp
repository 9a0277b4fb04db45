#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace entropy_games {

using Index = std::size_t;

/// Adjacency-list digraph over nodes 0..n-1. Successor lists are sorted and unique.
using Digraph = std::vector<std::vector<Index>>;

/// Strongly connected components with their condensation DAG.
struct Condensation {
    /// Components ordered by their smallest node; nodes sorted inside each component.
    std::vector<std::vector<Index>> components;
    /// component_of[v] is the index in `components` of the component containing v.
    std::vector<Index> component_of;
    /// Successor components in the condensation DAG (sorted, self excluded).
    std::vector<std::vector<Index>> dag;
    /// access[i][j] != 0 iff component j is reachable from component i (reflexive).
    std::vector<std::vector<char>> access;
    /// True when the component carries at least one arc (size > 1 or a self-loop).
    std::vector<bool> nontrivial;
    /// Components in a topological order of the DAG (sources first).
    std::vector<Index> topological_order;

    bool has_access(Index from, Index to) const { return access[from][to] != 0; }
    std::size_t size() const { return components.size(); }
};

/// Tarjan's algorithm, iterative so that deep graphs do not exhaust the stack.
inline Condensation scc_condense(const Digraph& graph) {
    const std::size_t n = graph.size();
    constexpr Index unvisited = static_cast<Index>(-1);
    std::vector<Index> number(n, unvisited), lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<Index> stack;
    std::vector<std::vector<Index>> found;  // reverse topological order
    Index counter = 0;

    struct Frame {
        Index node;
        std::size_t next_edge;
    };
    std::vector<Frame> call_stack;

    for (Index root = 0; root < n; ++root) {
        if (number[root] != unvisited) continue;
        call_stack.push_back({root, 0});
        number[root] = lowlink[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call_stack.empty()) {
            Frame& frame = call_stack.back();
            const Index v = frame.node;
            if (frame.next_edge < graph[v].size()) {
                const Index w = graph[v][frame.next_edge++];
                if (number[w] == unvisited) {
                    number[w] = lowlink[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call_stack.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], number[w]);
                }
                continue;
            }
            if (lowlink[v] == number[v]) {
                std::vector<Index> component;
                Index w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    component.push_back(w);
                } while (w != v);
                std::sort(component.begin(), component.end());
                found.push_back(std::move(component));
            }
            call_stack.pop_back();
            if (!call_stack.empty()) {
                const Index parent = call_stack.back().node;
                lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
            }
        }
    }

    // Tarjan emits sinks first; reversing gives a topological order.
    const std::size_t k = found.size();
    std::vector<Index> order(k);
    for (Index i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return found[a].front() < found[b].front(); });

    Condensation c;
    c.components.resize(k);
    std::vector<Index> renumber(k);
    for (Index i = 0; i < k; ++i) {
        renumber[order[i]] = i;
        c.components[i] = found[order[i]];
    }
    c.topological_order.resize(k);
    for (Index i = 0; i < k; ++i) c.topological_order[i] = renumber[k - 1 - i];

    c.component_of.assign(n, 0);
    for (Index i = 0; i < k; ++i)
        for (Index v : c.components[i]) c.component_of[v] = i;

    c.dag.assign(k, {});
    c.nontrivial.assign(k, false);
    for (Index v = 0; v < n; ++v) {
        const Index cv = c.component_of[v];
        for (Index w : graph[v]) {
            const Index cw = c.component_of[w];
            if (cw == cv)
                c.nontrivial[cv] = true;
            else
                c.dag[cv].push_back(cw);
        }
    }
    for (auto& succ : c.dag) {
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    }

    c.access.assign(k, std::vector<char>(k, 0));
    for (auto it = c.topological_order.rbegin(); it != c.topological_order.rend(); ++it) {
        const Index i = *it;
        c.access[i][i] = 1;
        for (Index j : c.dag[i])
            for (Index x = 0; x < k; ++x) c.access[i][x] |= c.access[j][x];
    }
    return c;
}

/// Nodes reachable from `sources` (sources included).
inline std::vector<bool> reachable_from(const Digraph& graph, const std::vector<Index>& sources) {
    std::vector<bool> seen(graph.size(), false);
    std::vector<Index> todo;
    for (Index s : sources)
        if (!seen[s]) {
            seen[s] = true;
            todo.push_back(s);
        }
    while (!todo.empty()) {
        const Index v = todo.back();
        todo.pop_back();
        for (Index w : graph[v])
            if (!seen[w]) {
                seen[w] = true;
                todo.push_back(w);
            }
    }
    return seen;
}

inline Digraph transpose(const Digraph& graph) {
    Digraph out(graph.size());
    for (Index v = 0; v < graph.size(); ++v)
        for (Index w : graph[v]) out[w].push_back(v);
    for (auto& succ : out) std::sort(succ.begin(), succ.end());
    return out;
}

}  // namespace entropy_games
