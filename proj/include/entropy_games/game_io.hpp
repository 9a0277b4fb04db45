#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "entropy_games/game.hpp"

namespace entropy_games {

using json = nlohmann::json;

namespace detail {

inline std::vector<std::string> read_id_list(const json& doc, const char* key) {
    if (!doc.contains(key)) throw InvalidGame(std::string("schema violation: missing \"") + key + "\"");
    const json& list = doc.at(key);
    if (!list.is_array()) throw InvalidGame(std::string("schema violation: \"") + key + "\" must be an array");
    std::vector<std::string> ids;
    for (const json& item : list) {
        if (!item.is_string())
            throw InvalidGame(std::string("schema violation: \"") + key + "\" entries must be strings");
        ids.push_back(item.get<std::string>());
    }
    return ids;
}

}  // namespace detail

/// Builds a game from a parsed JSON document.
inline EntropyGame parse_game(const json& doc) {
    if (!doc.is_object()) throw InvalidGame("schema violation: top level must be an object");
    auto despot = detail::read_id_list(doc, "despot");
    auto tribune = detail::read_id_list(doc, "tribune");
    auto people = detail::read_id_list(doc, "people");
    if (!doc.contains("arcs") || !doc.at("arcs").is_array())
        throw InvalidGame("schema violation: \"arcs\" must be an array");
    std::vector<ArcSpec> arcs;
    for (const json& a : doc.at("arcs")) {
        if (!a.is_object() || !a.contains("from") || !a.contains("to") || !a.at("from").is_string() ||
            !a.at("to").is_string())
            throw InvalidGame("schema violation: arc needs string \"from\" and \"to\"");
        ArcSpec spec{a.at("from").get<std::string>(), a.at("to").get<std::string>(), std::nullopt};
        if (a.contains("weight")) {
            if (!a.at("weight").is_number()) throw InvalidGame("schema violation: \"weight\" must be a number");
            spec.weight = a.at("weight").get<double>();
        }
        arcs.push_back(std::move(spec));
    }
    std::optional<std::string> initial;
    if (doc.contains("initial") && !doc.at("initial").is_null()) {
        if (!doc.at("initial").is_string()) throw InvalidGame("schema violation: \"initial\" must be a string");
        initial = doc.at("initial").get<std::string>();
    }
    return EntropyGame(std::move(despot), std::move(tribune), std::move(people), arcs, initial);
}

inline EntropyGame parse_game(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidGame(std::string("schema violation: ") + e.what());
    }
    return parse_game(doc);
}

inline EntropyGame load_game(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidGame("cannot open game file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    return parse_game(std::string_view(text));
}

/// Canonical form: arcs grouped Despot, Tribune then People, each in node and
/// successor order; weights written only when different from 1.
inline json to_json(const EntropyGame& g) {
    json arcs = json::array();
    for (Index d = 0; d < g.num_despot(); ++d)
        for (Index t : g.despot_actions(d)) arcs.push_back({{"from", g.despot_ids()[d]}, {"to", g.tribune_ids()[t]}});
    for (Index t = 0; t < g.num_tribune(); ++t)
        for (Index p : g.tribune_actions(t)) arcs.push_back({{"from", g.tribune_ids()[t]}, {"to", g.people_ids()[p]}});
    for (Index p = 0; p < g.num_people(); ++p) {
        for (const WeightedArc& a : g.people_arcs(p)) {
            json arc = {{"from", g.people_ids()[p]}, {"to", g.despot_ids()[a.despot]}};
            if (a.weight != 1.0) {
                if (a.weight == std::floor(a.weight) && a.weight < 9.0e15)
                    arc["weight"] = static_cast<std::int64_t>(a.weight);
                else
                    arc["weight"] = a.weight;
            }
            arcs.push_back(std::move(arc));
        }
    }
    json doc = {{"despot", g.despot_ids()}, {"tribune", g.tribune_ids()}, {"people", g.people_ids()}, {"arcs", arcs}};
    if (g.initial()) doc["initial"] = g.despot_ids()[*g.initial()];
    return doc;
}

inline std::string serialize_game(const EntropyGame& g, int indent = -1) { return to_json(g).dump(indent); }

inline json to_json(const EntropyGame& g, const DespotPolicy& delta) {
    json out = json::object();
    for (Index d = 0; d < delta.size(); ++d) out[g.despot_ids()[d]] = g.tribune_ids()[delta[d]];
    return out;
}

inline json to_json(const EntropyGame& g, const TribunePolicy& tau) {
    json out = json::object();
    for (Index t = 0; t < tau.size(); ++t) out[g.tribune_ids()[t]] = g.people_ids()[tau[t]];
    return out;
}

}  // namespace entropy_games
