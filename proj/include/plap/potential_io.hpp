#pragma once

// Potential-spec documents:
//
//   {"type": "constant", "value": -2}
//   {"type": "piecewise_linear", "knots": [[0, -5], [0.5, -3], [1, -5]]}
//   {"type": "table", "xs": [0, 0.5, 1], "qs": [-1, -0.5, -1]}
//   {"type": "scaled_tent", "depth": -5, "rise": 4}     q = depth + rise*min(x, 1-x)
//   {"type": "scaled_well", "height": 5, "dip": 4}      q = height - dip*min(x, 1-x)
//
// Optional "shift" (added to q) and "ell" (restriction length) keys let a
// document describe exactly what a report used.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "plap/errors.hpp"
#include "plap/potential.hpp"

namespace plap {

namespace detail {

inline double read_number(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError("expected a number", where);
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError("number is not finite", where);
    return v;
}

inline const nlohmann::json& member(const nlohmann::json& obj, const char* key,
                                    const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(std::string("missing key \"") + key + "\"", where);
    return *it;
}

inline std::vector<double> read_array(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError("expected an array", where);
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(read_number(j[i], where + "/" + std::to_string(i)));
    return out;
}

/// `at(i)` names the location of the i-th x value.
template <class Loc>
void check_grid(const std::vector<double>& xs, const std::string& where, Loc&& at) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < 0.0 || xs[i] > 1.0) throw ParseError("x value outside [0, 1]", at(i));
        if (i > 0 && !(xs[i] > xs[i - 1])) throw ParseError("x values out of order", at(i));
    }
    if (xs.size() < 2) throw ParseError("need at least 2 nodes", where);
    if (xs.front() != 0.0) throw ParseError("first node must be at x = 0", at(0));
    if (xs.back() != 1.0) throw ParseError("last node must be at x = 1", at(xs.size() - 1));
}

}  // namespace detail

inline Potential potential_from_json(const nlohmann::json& doc) {
    using detail::member;
    using detail::read_number;
    if (!doc.is_object()) throw ParseError("potential spec must be an object", "/");
    const auto& type_j = member(doc, "type", "/");
    if (!type_j.is_string()) throw ParseError("expected a string", "/type");
    const std::string type = type_j.get<std::string>();

    Potential q;
    if (type == "constant") {
        q = Potential::constant(read_number(member(doc, "value", "/"), "/value"));
    } else if (type == "piecewise_linear") {
        const auto& ks = member(doc, "knots", "/");
        if (!ks.is_array()) throw ParseError("expected an array of [x, q] pairs", "/knots");
        std::vector<double> xs, qs;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const std::string at = "/knots/" + std::to_string(i);
            if (!ks[i].is_array() || ks[i].size() != 2)
                throw ParseError("expected an [x, q] pair", at);
            xs.push_back(read_number(ks[i][0], at + "/0"));
            qs.push_back(read_number(ks[i][1], at + "/1"));
        }
        detail::check_grid(xs, "/knots",
                           [](std::size_t i) { return "/knots/" + std::to_string(i) + "/0"; });
        std::vector<Knot> knots;
        for (std::size_t i = 0; i < xs.size(); ++i) knots.push_back({xs[i], qs[i]});
        q = Potential::piecewise_linear(std::move(knots));
    } else if (type == "table") {
        const auto xs = detail::read_array(member(doc, "xs", "/"), "/xs");
        const auto qs = detail::read_array(member(doc, "qs", "/"), "/qs");
        detail::check_grid(xs, "/xs", [](std::size_t i) { return "/xs/" + std::to_string(i); });
        if (xs.size() != qs.size()) throw ParseError("xs and qs differ in length", "/qs");
        q = Potential::table(xs, qs);
    } else if (type == "scaled_tent") {
        const double d = read_number(member(doc, "depth", "/"), "/depth");
        const double r = read_number(member(doc, "rise", "/"), "/rise");
        if (!(d < 0.0)) throw ParseError("depth must be negative", "/depth");
        if (!(r >= 0.0)) throw ParseError("rise must be nonnegative", "/rise");
        q = Potential::scaled_tent(d, r);
    } else if (type == "scaled_well") {
        const double h = read_number(member(doc, "height", "/"), "/height");
        const double r = read_number(member(doc, "dip", "/"), "/dip");
        if (!(h >= 0.0)) throw ParseError("height must be nonnegative", "/height");
        if (!(r >= 0.0)) throw ParseError("dip must be nonnegative", "/dip");
        q = Potential::scaled_well(h, r);
    } else {
        throw ParseError("unknown potential type \"" + type + "\"", "/type");
    }

    if (auto it = doc.find("shift"); it != doc.end()) q = q.shifted(read_number(*it, "/shift"));
    if (auto it = doc.find("ell"); it != doc.end()) {
        const double ell = read_number(*it, "/ell");
        if (ell <= 0.0 || ell > 1.0) throw ParseError("ell must lie in (0, 1]", "/ell");
        q = q.restricted(ell);
    }
    return q;
}

/// Parses a potential-spec document. Syntax errors report the byte offset.
inline Potential parse_potential_spec(std::string_view document) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what(), "byte " + std::to_string(e.byte));
    }
    return potential_from_json(doc);
}

/// Inverse of potential_from_json for knot-backed potentials. Function-backed
/// potentials serialize as a descriptive record that cannot be parsed back.
inline nlohmann::ordered_json potential_to_json(const Potential& q) {
    nlohmann::ordered_json j;
    auto param = [&](const char* name) {
        for (const auto& [k, v] : q.params())
            if (k == name) return v;
        return 0.0;
    };
    if (q.is_function_backed()) {
        j["type"] = "function";
        j["name"] = q.family();
    } else if (q.kind() == PotentialKind::constant) {
        j["type"] = "constant";
        j["value"] = param("value");
    } else if (q.family() == "scaled_tent") {
        j["type"] = "scaled_tent";
        j["depth"] = param("depth");
        j["rise"] = param("rise");
    } else if (q.family() == "scaled_well") {
        j["type"] = "scaled_well";
        j["height"] = param("height");
        j["dip"] = param("dip");
    } else if (q.kind() == PotentialKind::sampled_table) {
        j["type"] = "table";
        std::vector<double> xs, qs;
        for (const Knot& k : q.knots()) {
            xs.push_back(k.x);
            qs.push_back(k.q);
        }
        j["xs"] = xs;
        j["qs"] = qs;
    } else {
        j["type"] = "piecewise_linear";
        auto arr = nlohmann::ordered_json::array();
        for (const Knot& k : q.knots()) arr.push_back({k.x, k.q});
        j["knots"] = arr;
    }
    if (q.shift() != 0.0) j["shift"] = q.shift();
    if (q.domain_end() != 1.0) j["ell"] = q.domain_end();
    return j;
}

}  // namespace plap
