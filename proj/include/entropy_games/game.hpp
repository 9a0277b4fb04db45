#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "entropy_games/error.hpp"

namespace entropy_games {

using Index = std::size_t;

enum class Player { despot, tribune, people };

/// People -> Despot arc with its (positive) weight.
struct WeightedArc {
    Index despot;
    double weight;

    friend bool operator==(const WeightedArc&, const WeightedArc&) = default;
};

/// Arc given by node identifiers, as found in the JSON interchange format.
struct ArcSpec {
    std::string from;
    std::string to;
    std::optional<double> weight;
};

/**
 * Weighted tripartite game graph. Despot nodes move to Tribune nodes, Tribune
 * nodes to People nodes and People nodes back to Despot nodes along weighted
 * arcs. Nodes are addressed by dense indices assigned in input order; the
 * successor lists keep the arc input order, which is the tie-breaking order
 * used by every argmin/argmax in the library.
 *
 * Instances are immutable once constructed.
 */
class EntropyGame {
public:
    EntropyGame(std::vector<std::string> despot_ids, std::vector<std::string> tribune_ids,
                std::vector<std::string> people_ids, const std::vector<ArcSpec>& arcs,
                std::optional<std::string> initial = std::nullopt)
        : despot_ids_(std::move(despot_ids)),
          tribune_ids_(std::move(tribune_ids)),
          people_ids_(std::move(people_ids)) {
        std::unordered_map<std::string, std::pair<Player, Index>> lookup;
        auto add_ids = [&](const std::vector<std::string>& ids, Player who) {
            for (Index i = 0; i < ids.size(); ++i) {
                if (!lookup.emplace(ids[i], std::make_pair(who, i)).second)
                    throw InvalidGame("duplicate node id '" + ids[i] + "'");
            }
        };
        add_ids(despot_ids_, Player::despot);
        add_ids(tribune_ids_, Player::tribune);
        add_ids(people_ids_, Player::people);

        despot_actions_.resize(despot_ids_.size());
        tribune_actions_.resize(tribune_ids_.size());
        people_arcs_.resize(people_ids_.size());

        for (const ArcSpec& arc : arcs) {
            auto from = lookup.find(arc.from);
            auto to = lookup.find(arc.to);
            if (from == lookup.end())
                throw InvalidGame("dangling arc endpoint '" + arc.from + "'");
            if (to == lookup.end())
                throw InvalidGame("dangling arc endpoint '" + arc.to + "'");
            const auto [from_kind, i] = from->second;
            const auto [to_kind, j] = to->second;
            const std::string label = "arc " + arc.from + " -> " + arc.to;
            if (from_kind == Player::despot && to_kind == Player::tribune) {
                if (arc.weight) throw InvalidGame(label + ": weight only allowed on People -> Despot arcs");
                despot_actions_[i].push_back(j);
            } else if (from_kind == Player::tribune && to_kind == Player::people) {
                if (arc.weight) throw InvalidGame(label + ": weight only allowed on People -> Despot arcs");
                tribune_actions_[i].push_back(j);
            } else if (from_kind == Player::people && to_kind == Player::despot) {
                people_arcs_[i].push_back({j, arc.weight.value_or(1.0)});
            } else {
                throw InvalidGame(label + " does not follow the Despot -> Tribune -> People -> Despot orientation");
            }
        }
        initial_ = resolve_initial(initial, lookup);
        validate();
    }

    /// Index-based construction, used by generators and game transformations.
    EntropyGame(std::vector<std::string> despot_ids, std::vector<std::string> tribune_ids,
                std::vector<std::string> people_ids, std::vector<std::vector<Index>> despot_actions,
                std::vector<std::vector<Index>> tribune_actions,
                std::vector<std::vector<WeightedArc>> people_arcs, std::optional<Index> initial = std::nullopt)
        : despot_ids_(std::move(despot_ids)),
          tribune_ids_(std::move(tribune_ids)),
          people_ids_(std::move(people_ids)),
          despot_actions_(std::move(despot_actions)),
          tribune_actions_(std::move(tribune_actions)),
          people_arcs_(std::move(people_arcs)),
          initial_(initial) {
        if (despot_actions_.size() != despot_ids_.size() || tribune_actions_.size() != tribune_ids_.size() ||
            people_arcs_.size() != people_ids_.size())
            throw InvalidGame("adjacency lists do not match the node sets");
        for (const auto& acts : despot_actions_)
            for (Index t : acts)
                if (t >= tribune_ids_.size()) throw InvalidGame("dangling arc endpoint (tribune index)");
        for (const auto& acts : tribune_actions_)
            for (Index p : acts)
                if (p >= people_ids_.size()) throw InvalidGame("dangling arc endpoint (people index)");
        for (const auto& arcs : people_arcs_)
            for (const WeightedArc& a : arcs)
                if (a.despot >= despot_ids_.size()) throw InvalidGame("dangling arc endpoint (despot index)");
        if (initial_ && *initial_ >= despot_ids_.size()) throw InvalidGame("initial state is not a Despot node");
        {
            std::set<std::string> seen;
            for (const auto* ids : {&despot_ids_, &tribune_ids_, &people_ids_})
                for (const auto& id : *ids)
                    if (!seen.insert(id).second) throw InvalidGame("duplicate node id '" + id + "'");
        }
        validate();
    }

    std::size_t num_despot() const { return despot_ids_.size(); }
    std::size_t num_tribune() const { return tribune_ids_.size(); }
    std::size_t num_people() const { return people_ids_.size(); }

    /// Tribune successors of Despot node `d`, in arc order.
    const std::vector<Index>& despot_actions(Index d) const { return despot_actions_[d]; }
    /// People successors of Tribune node `t`, in arc order.
    const std::vector<Index>& tribune_actions(Index t) const { return tribune_actions_[t]; }
    /// Weighted Despot successors of People node `p`, in arc order.
    const std::vector<WeightedArc>& people_arcs(Index p) const { return people_arcs_[p]; }

    const std::vector<std::string>& despot_ids() const { return despot_ids_; }
    const std::vector<std::string>& tribune_ids() const { return tribune_ids_; }
    const std::vector<std::string>& people_ids() const { return people_ids_; }

    std::optional<Index> initial() const { return initial_; }

    /// W, the largest People -> Despot weight.
    double max_weight() const { return max_weight_; }

    /// True when every weight is a positive integer (exactly representable).
    bool integral_weights() const { return integral_; }

    /// W as an integer; throws when some weight is not integral.
    std::int64_t integer_max_weight() const {
        if (!integral_) throw PreconditionViolated("operation requires integer weights");
        return static_cast<std::int64_t>(max_weight_);
    }

    std::size_t num_arcs() const {
        std::size_t count = 0;
        for (const auto& a : despot_actions_) count += a.size();
        for (const auto& a : tribune_actions_) count += a.size();
        for (const auto& a : people_arcs_) count += a.size();
        return count;
    }

    friend bool operator==(const EntropyGame& a, const EntropyGame& b) {
        return a.despot_ids_ == b.despot_ids_ && a.tribune_ids_ == b.tribune_ids_ &&
               a.people_ids_ == b.people_ids_ && a.despot_actions_ == b.despot_actions_ &&
               a.tribune_actions_ == b.tribune_actions_ && a.people_arcs_ == b.people_arcs_ &&
               a.initial_ == b.initial_;
    }

private:
    static std::optional<Index> resolve_initial(
        const std::optional<std::string>& initial,
        const std::unordered_map<std::string, std::pair<Player, Index>>& lookup) {
        if (!initial) return std::nullopt;
        auto it = lookup.find(*initial);
        if (it == lookup.end() || it->second.first != Player::despot)
            throw InvalidGame("initial state '" + *initial + "' is not a Despot node");
        return it->second.second;
    }

    void validate() {
        auto check_unique = [](std::vector<Index> v, const std::string& where) {
            std::sort(v.begin(), v.end());
            if (std::adjacent_find(v.begin(), v.end()) != v.end()) throw InvalidGame("duplicate arc out of " + where);
        };
        for (Index d = 0; d < despot_actions_.size(); ++d) {
            if (despot_actions_[d].empty()) throw InvalidGame("node without successor: " + despot_ids_[d]);
            check_unique(despot_actions_[d], despot_ids_[d]);
        }
        for (Index t = 0; t < tribune_actions_.size(); ++t) {
            if (tribune_actions_[t].empty()) throw InvalidGame("node without successor: " + tribune_ids_[t]);
            check_unique(tribune_actions_[t], tribune_ids_[t]);
        }
        max_weight_ = 0.0;
        integral_ = true;
        for (Index p = 0; p < people_arcs_.size(); ++p) {
            if (people_arcs_[p].empty()) throw InvalidGame("node without successor: " + people_ids_[p]);
            std::vector<Index> targets;
            for (const WeightedArc& a : people_arcs_[p]) {
                if (!(a.weight > 0.0) || !std::isfinite(a.weight))
                    throw InvalidGame("nonpositive weight on arc " + people_ids_[p] + " -> " + despot_ids_[a.despot]);
                max_weight_ = std::max(max_weight_, a.weight);
                if (a.weight != std::floor(a.weight) || a.weight > 9007199254740992.0) integral_ = false;
                targets.push_back(a.despot);
            }
            check_unique(targets, people_ids_[p]);
        }
        if (despot_ids_.empty()) throw InvalidGame("game has no Despot node");
    }

    std::vector<std::string> despot_ids_;
    std::vector<std::string> tribune_ids_;
    std::vector<std::string> people_ids_;
    std::vector<std::vector<Index>> despot_actions_;
    std::vector<std::vector<Index>> tribune_actions_;
    std::vector<std::vector<WeightedArc>> people_arcs_;
    std::optional<Index> initial_;
    double max_weight_ = 0.0;
    bool integral_ = true;
};

/// Stationary positional strategy of Despot: one Tribune successor per Despot node.
class DespotPolicy {
public:
    DespotPolicy() = default;
    explicit DespotPolicy(std::vector<Index> choice) : choice_(std::move(choice)) {}

    Index operator[](Index d) const { return choice_[d]; }
    Index& operator[](Index d) { return choice_[d]; }
    std::size_t size() const { return choice_.size(); }
    const std::vector<Index>& choices() const { return choice_; }

    friend bool operator==(const DespotPolicy&, const DespotPolicy&) = default;

private:
    std::vector<Index> choice_;
};

/// Stationary positional strategy of Tribune: one People successor per Tribune node.
class TribunePolicy {
public:
    TribunePolicy() = default;
    explicit TribunePolicy(std::vector<Index> choice) : choice_(std::move(choice)) {}

    Index operator[](Index t) const { return choice_[t]; }
    Index& operator[](Index t) { return choice_[t]; }
    std::size_t size() const { return choice_.size(); }
    const std::vector<Index>& choices() const { return choice_; }

    friend bool operator==(const TribunePolicy&, const TribunePolicy&) = default;

private:
    std::vector<Index> choice_;
};

inline void validate(const EntropyGame& g, const DespotPolicy& delta) {
    if (delta.size() != g.num_despot()) throw InvalidPolicy("Despot policy is not total");
    for (Index d = 0; d < g.num_despot(); ++d) {
        const auto& acts = g.despot_actions(d);
        if (std::find(acts.begin(), acts.end(), delta[d]) == acts.end())
            throw InvalidPolicy("Despot policy selects a missing arc at " + g.despot_ids()[d]);
    }
}

inline void validate(const EntropyGame& g, const TribunePolicy& tau) {
    if (tau.size() != g.num_tribune()) throw InvalidPolicy("Tribune policy is not total");
    for (Index t = 0; t < g.num_tribune(); ++t) {
        const auto& acts = g.tribune_actions(t);
        if (std::find(acts.begin(), acts.end(), tau[t]) == acts.end())
            throw InvalidPolicy("Tribune policy selects a missing arc at " + g.tribune_ids()[t]);
    }
}

/// Policy choosing the first listed action everywhere.
inline DespotPolicy first_despot_policy(const EntropyGame& g) {
    std::vector<Index> choice(g.num_despot());
    for (Index d = 0; d < g.num_despot(); ++d) choice[d] = g.despot_actions(d).front();
    return DespotPolicy(std::move(choice));
}

inline TribunePolicy first_tribune_policy(const EntropyGame& g) {
    std::vector<Index> choice(g.num_tribune());
    for (Index t = 0; t < g.num_tribune(); ++t) choice[t] = g.tribune_actions(t).front();
    return TribunePolicy(std::move(choice));
}

}  // namespace entropy_games
