#pragma once

/// Scene and curve-family descriptions: the JSON schemas the CLI reads.
///
/// Scene:  {"ambient_dim": n,
///          "charts": [{"param_dim": m, "domain": [[lo,hi],...],
///                      "map": ["expr", ...]}, ...]}
/// Family: {"ambient_dim": n,
///          "family": <chart whose map strings may reference k>,
///          "limit":  <chart>}

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmt/errors.hpp"
#include "gmt/expr.hpp"
#include "gmt/geometry.hpp"
#include "gmt/measures.hpp"

namespace gmt {

/// Schema violations in scene or family files.
class SceneError : public Error {
public:
    using Error::Error;
};

namespace detail {

/// Replace every standalone identifier `name` with the parenthesized
/// numeric literal for `value`. Number tokens are skipped whole so an
/// exponent 'e' is never mistaken for an identifier.
inline std::string substitute_parameter(const std::string& source, const std::string& name,
                                        double value) {
    std::string out;
    out.reserve(source.size() + 24);
    const std::string literal = "(" + format_double(value) + ")";
    std::size_t i = 0;
    const auto is_ident_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    while (i < source.size()) {
        const char c = source[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            const std::size_t start = i;
            while (i < source.size() && std::isdigit(static_cast<unsigned char>(source[i]))) ++i;
            if (i < source.size() && source[i] == '.') {
                ++i;
                while (i < source.size() && std::isdigit(static_cast<unsigned char>(source[i]))) ++i;
            }
            if (i < source.size() && (source[i] == 'e' || source[i] == 'E')) {
                std::size_t p = i + 1;
                if (p < source.size() && (source[p] == '+' || source[p] == '-')) ++p;
                if (p < source.size() && std::isdigit(static_cast<unsigned char>(source[p]))) {
                    i = p;
                    while (i < source.size() && std::isdigit(static_cast<unsigned char>(source[i])))
                        ++i;
                }
            }
            out.append(source, start, i - start);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = i;
            while (i < source.size() && is_ident_char(source[i])) ++i;
            const std::string ident = source.substr(start, i - start);
            out += ident == name ? literal : ident;
            continue;
        }
        out += c;
        ++i;
    }
    return out;
}

inline ParamBox parse_domain(const nlohmann::json& j) {
    if (!j.is_array() || j.empty())
        throw SceneError("chart 'domain' must be a non-empty array of [lo, hi] pairs");
    ParamBox box;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw SceneError("each domain entry must be a numeric [lo, hi] pair");
        box.bounds.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    return box;
}

} // namespace detail

/// Raw chart descriptor: bounds plus component source strings, possibly
/// still containing a free family parameter.
struct ChartDescriptor {
    ParamBox domain;
    std::vector<std::string> map;

    static ChartDescriptor from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw SceneError("chart descriptor must be an object");
        if (!j.contains("param_dim") || !j["param_dim"].is_number_integer())
            throw SceneError("chart needs an integer 'param_dim'");
        if (!j.contains("domain")) throw SceneError("chart needs a 'domain'");
        if (!j.contains("map") || !j["map"].is_array())
            throw SceneError("chart needs a 'map' array of expression strings");
        ChartDescriptor d;
        d.domain = detail::parse_domain(j["domain"]);
        const int m = j["param_dim"].get<int>();
        if (m != d.domain.dim())
            throw SceneError("'param_dim' does not match the number of domain bounds");
        for (const auto& component : j["map"]) {
            if (!component.is_string())
                throw SceneError("chart 'map' entries must be expression strings");
            d.map.push_back(component.get<std::string>());
        }
        return d;
    }

    Chart instantiate(int ambient_dim) const {
        if (static_cast<int>(map.size()) != ambient_dim)
            throw SceneError("chart 'map' needs exactly one expression per ambient coordinate");
        std::vector<Expression> components;
        components.reserve(map.size());
        for (const auto& source : map)
            components.push_back(parse(source, domain.dim(), "u"));
        return Chart::make(domain, std::move(components), ambient_dim);
    }
};

/// A validated scene: ambient dimension plus the disjoint chart list.
struct Scene {
    int ambient_dim = 0;
    DisjointManifold manifold;

    static Scene from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw SceneError("scene must be a JSON object");
        if (!j.contains("ambient_dim") || !j["ambient_dim"].is_number_integer())
            throw SceneError("scene needs an integer 'ambient_dim'");
        if (!j.contains("charts") || !j["charts"].is_array() || j["charts"].empty())
            throw SceneError("scene needs a non-empty 'charts' array");
        Scene s;
        s.ambient_dim = j["ambient_dim"].get<int>();
        std::vector<Chart> charts;
        for (const auto& cj : j["charts"])
            charts.push_back(ChartDescriptor::from_json(cj).instantiate(s.ambient_dim));
        s.manifold = DisjointManifold::make(s.ambient_dim, std::move(charts));
        return s;
    }

    static Scene from_text(const std::string& text) {
        nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_discarded()) throw SceneError("scene file is not valid JSON");
        return from_json(j);
    }

    static Scene from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw SceneError("cannot open scene file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return from_text(buf.str());
    }
};

/// Chart template with one free parameter k plus the explicitly given
/// limit chart. Materializing an instance substitutes k textually as a
/// constant before parsing.
struct CurveFamily {
    int ambient_dim = 0;
    ChartDescriptor family;
    ChartDescriptor limit;

    static CurveFamily from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw SceneError("family must be a JSON object");
        if (!j.contains("ambient_dim") || !j["ambient_dim"].is_number_integer())
            throw SceneError("family needs an integer 'ambient_dim'");
        if (!j.contains("family") || !j.contains("limit"))
            throw SceneError("family needs 'family' and 'limit' chart descriptors");
        CurveFamily f;
        f.ambient_dim = j["ambient_dim"].get<int>();
        f.family = ChartDescriptor::from_json(j["family"]);
        f.limit = ChartDescriptor::from_json(j["limit"]);
        f.limit_chart();  // validate the limit chart eagerly
        return f;
    }

    static CurveFamily from_text(const std::string& text) {
        nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_discarded()) throw SceneError("family file is not valid JSON");
        return from_json(j);
    }

    static CurveFamily from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw SceneError("cannot open family file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return from_text(buf.str());
    }

    Chart materialize(int k) const {
        ChartDescriptor instance = family;
        for (auto& source : instance.map)
            source = detail::substitute_parameter(source, "k", static_cast<double>(k));
        return instance.instantiate(ambient_dim);
    }

    Chart limit_chart() const { return limit.instantiate(ambient_dim); }
};

} // namespace gmt
