#pragma once
// JSON model specifications.
//
//   {"type": "finite_periodic", "atoms": [{"id": "a", "mass": 0.25}, ...],
//    "events": [["a", "b"], ...]}                     one event per period position
//   {"type": "independent", "probs": {"kind": "constant", "p": 0.5}}
//   {"type": "independent", "probs": {"kind": "list", "values": [0.5, ...]}}
//   {"type": "independent", "probs": {"kind": "harmonic", "c": 1.0}}
//   {"type": "pairwise_parity", "bits": 3}
//   {"type": "markov", "states": 2, "transition": [[...], ...],
//    "initial": [...], "target": [0]}                 target lists 0-based states
//
// Parsing is strict: unknown keys are rejected and every error names the
// offending JSON path.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evb/models.hpp"

namespace evb::models {

class ParseError : public ModelError {
public:
    using ModelError::ModelError;
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
    throw ParseError("model spec: " + path + ": " + what);
}

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) fail(path + "." + key, "unknown key");
    }
}

inline const json& member(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing");
    return *it;
}

inline double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

inline std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

inline const json& as_array(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array");
    return v;
}

inline const json& as_object(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    return v;
}

inline PeriodicModel parse_periodic(const json& obj, const std::string& path) {
    reject_unknown(obj, path, {"type", "atoms", "events"});
    PeriodicModel model;
    const json& atoms = as_array(member(obj, path, "atoms"), path + ".atoms");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string apath = path + ".atoms[" + std::to_string(i) + "]";
        const json& a = as_object(atoms[i], apath);
        reject_unknown(a, apath, {"id", "mass"});
        model.space.atoms.push_back({as_string(member(a, apath, "id"), apath + ".id"),
                                     as_number(member(a, apath, "mass"), apath + ".mass")});
    }
    model.space.validate();
    const json& events = as_array(member(obj, path, "events"), path + ".events");
    for (std::size_t i = 0; i < events.size(); ++i) {
        const std::string epath = path + ".events[" + std::to_string(i) + "]";
        const json& e = as_array(events[i], epath);
        AtomMask mask(model.space.atoms.size(), 0);
        for (std::size_t k = 0; k < e.size(); ++k) {
            const std::string id = as_string(e[k], epath + "[" + std::to_string(k) + "]");
            try {
                mask[model.space.index_of(id)] = 1;
            } catch (const ModelError&) {
                fail(epath + "[" + std::to_string(k) + "]", "unknown atom id '" + id + "'");
            }
        }
        model.events.push_back(std::move(mask));
    }
    model.validate();
    return model;
}

inline IndependentModel parse_independent(const json& obj, const std::string& path) {
    reject_unknown(obj, path, {"type", "probs"});
    const std::string ppath = path + ".probs";
    const json& probs = as_object(member(obj, path, "probs"), ppath);
    const std::string kind = as_string(member(probs, ppath, "kind"), ppath + ".kind");
    IndependentModel model;
    if (kind == "constant") {
        reject_unknown(probs, ppath, {"kind", "p"});
        model.rule.kind = ProbRule::Kind::constant;
        model.rule.value = as_number(member(probs, ppath, "p"), ppath + ".p");
    } else if (kind == "list") {
        reject_unknown(probs, ppath, {"kind", "values"});
        model.rule.kind = ProbRule::Kind::list;
        const json& values = as_array(member(probs, ppath, "values"), ppath + ".values");
        for (std::size_t i = 0; i < values.size(); ++i)
            model.rule.values.push_back(
                as_number(values[i], ppath + ".values[" + std::to_string(i) + "]"));
    } else if (kind == "harmonic") {
        reject_unknown(probs, ppath, {"kind", "c"});
        model.rule.kind = ProbRule::Kind::harmonic;
        model.rule.c = as_number(member(probs, ppath, "c"), ppath + ".c");
    } else {
        fail(ppath + ".kind", "expected constant, list or harmonic");
    }
    model.validate();
    return model;
}

inline ParityModel parse_parity(const json& obj, const std::string& path) {
    reject_unknown(obj, path, {"type", "bits"});
    const double bits = as_number(member(obj, path, "bits"), path + ".bits");
    if (bits < 1 || bits != static_cast<double>(static_cast<unsigned>(bits)))
        fail(path + ".bits", "expected a positive integer");
    ParityModel model{static_cast<unsigned>(bits)};
    model.validate();
    return model;
}

inline MarkovModel parse_markov(const json& obj, const std::string& path) {
    reject_unknown(obj, path, {"type", "states", "transition", "initial", "target"});
    MarkovModel model;
    const double states = as_number(member(obj, path, "states"), path + ".states");
    if (states < 1 || states != static_cast<double>(static_cast<std::size_t>(states)))
        fail(path + ".states", "expected a positive integer");
    model.states = static_cast<std::size_t>(states);

    const json& rows = as_array(member(obj, path, "transition"), path + ".transition");
    if (rows.size() != model.states) fail(path + ".transition", "expected one row per state");
    model.transition = Matrix(model.states, model.states);
    for (std::size_t i = 0; i < model.states; ++i) {
        const std::string rpath = path + ".transition[" + std::to_string(i) + "]";
        const json& row = as_array(rows[i], rpath);
        if (row.size() != model.states) fail(rpath, "expected one entry per state");
        for (std::size_t j = 0; j < model.states; ++j)
            model.transition(i, j) = as_number(row[j], rpath + "[" + std::to_string(j) + "]");
    }

    const json& initial = as_array(member(obj, path, "initial"), path + ".initial");
    if (initial.size() != model.states) fail(path + ".initial", "expected one entry per state");
    for (std::size_t i = 0; i < model.states; ++i)
        model.initial.push_back(as_number(initial[i], path + ".initial[" + std::to_string(i) + "]"));

    model.target.assign(model.states, 0);
    const json& target = as_array(member(obj, path, "target"), path + ".target");
    for (std::size_t i = 0; i < target.size(); ++i) {
        const std::string tpath = path + ".target[" + std::to_string(i) + "]";
        const double s = as_number(target[i], tpath);
        if (s < 0 || s != static_cast<double>(static_cast<std::size_t>(s)) ||
            static_cast<std::size_t>(s) >= model.states)
            fail(tpath, "expected a state index below " + std::to_string(model.states));
        model.target[static_cast<std::size_t>(s)] = 1;
    }
    model.validate();
    return model;
}

} // namespace detail

inline EventSeqModel parse_model_json(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("model spec: invalid JSON: ") + e.what());
    }
    const std::string path = "$";
    const auto& obj = detail::as_object(root, path);
    const std::string type = detail::as_string(detail::member(obj, path, "type"), path + ".type");
    if (type == "finite_periodic") return detail::parse_periodic(obj, path);
    if (type == "independent") return detail::parse_independent(obj, path);
    if (type == "pairwise_parity") return detail::parse_parity(obj, path);
    if (type == "markov") return detail::parse_markov(obj, path);
    detail::fail(path + ".type",
                 "expected finite_periodic, independent, pairwise_parity or markov");
}

inline EventSeqModel load_model_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw ParseError("model spec: cannot open '" + filename + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_json(buf.str());
}

// Weight files are JSON arrays of reals.
inline std::vector<double> load_weights_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw ParseError("weights: cannot open '" + filename + "'");
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("weights: invalid JSON: ") + e.what());
    }
    if (!root.is_array()) throw ParseError("weights: expected a JSON array of reals");
    std::vector<double> w;
    for (std::size_t i = 0; i < root.size(); ++i) {
        if (!root[i].is_number())
            throw ParseError("weights: entry " + std::to_string(i) + " is not a number");
        w.push_back(root[i].get<double>());
    }
    return w;
}

} // namespace evb::models
