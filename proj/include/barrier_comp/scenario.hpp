#pragma once

#include "barrier_comp/compose.hpp"
#include "barrier_comp/dynamics.hpp"
#include "barrier_comp/filter.hpp"
#include "barrier_comp/spec.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace barrier_comp {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Buffer as written in a scenario file: a number, an exact "ln(k)" literal,
// or an automatic choice resolved from the composition error bounds.
struct BufferSpec {
    enum class Kind { Value, LnLiteral, AutoSubset, AutoSuperset };

    Kind kind = Kind::Value;
    double value = 0.0;  // the number, or k for ln(k)

    double resolve(const LayeredSpec& spec, double kappa) const {
        switch (kind) {
            case Kind::Value: return value;
            case Kind::LnLiteral: return std::log(value);
            case Kind::AutoSubset:
                return error_bounds(spec, CompositionParams(kappa, 0.0)).buffer_subset();
            case Kind::AutoSuperset:
                return error_bounds(spec, CompositionParams(kappa, 0.0)).buffer_superset();
        }
        return value;
    }
};

// Saturated proportional law sat(Kp (x_d - x)) or a constant input.
struct DesiredController {
    enum class Kind { Proportional, Constant, Custom };

    Kind kind = Kind::Proportional;
    double gain = 1.0;
    double u_max = 1.0;
    Vec target;
    Vec constant_value;
    std::function<Vec(const Vec&)> custom;

    static DesiredController saturated_proportional(double kp, Vec xd, double umax) {
        if (!(kp > 0.0) || !(umax > 0.0))
            throw SpecError("saturated_proportional: gain and u_max must be positive");
        DesiredController c;
        c.kind = Kind::Proportional;
        c.gain = kp;
        c.target = std::move(xd);
        c.u_max = umax;
        return c;
    }
    static DesiredController constant(Vec u0) {
        DesiredController c;
        c.kind = Kind::Constant;
        c.constant_value = std::move(u0);
        return c;
    }

    Vec operator()(const Vec& x) const {
        switch (kind) {
            case Kind::Proportional: {
                Vec u = gain * (target - x);
                const double norm = u.norm();
                if (norm > u_max) u *= u_max / norm;
                return u;
            }
            case Kind::Constant: return constant_value;
            case Kind::Custom: return custom(x);
        }
        return constant_value;
    }
};

struct Scenario {
    Dynamics dynamics;
    int dynamics_dim = 0;  // SingleIntegrator size, for serialization
    SpecNode spec_tree;
    LayeredSpec layered;
    double kappa = 1.0;
    BufferSpec buffer;
    AlphaFn alpha = AlphaFn::linear(1.0);
    DesiredController controller;
    std::vector<Vec> initial_states;
    double dt = 1e-3;
    double horizon = 30.0;
    std::string output_dir = ".";
    bool emit_svg = true;

    CompositionParams composition_params() const {
        return CompositionParams(kappa, buffer.resolve(layered, kappa));
    }
};

// --- JSON (de)serialization -------------------------------------------------

namespace detail {

using json = nlohmann::json;

inline Vec vec_from_json(const json& j, const std::string& key) {
    if (!j.is_array()) throw ParseError("expected array at '" + key + "'");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ParseError("expected number in '" + key + "'");
        v[static_cast<int>(i)] = j[i].get<double>();
    }
    return v;
}

inline json vec_to_json(const Vec& v) {
    json j = json::array();
    for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

inline const json& require(const json& j, const std::string& key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError("missing key '" + key + "' in " + ctx);
    return *it;
}

inline SpecNode spec_node_from_json(const json& j) {
    const std::string kind = require(j, "kind", "spec node").get<std::string>();
    if (kind == "union" || kind == "intersection") {
        const json& ch = require(j, "children", "spec node");
        std::vector<SpecNode> children;
        for (const json& c : ch) children.push_back(spec_node_from_json(c));
        return kind == "union" ? SpecNode::union_of(std::move(children))
                               : SpecNode::intersection_of(std::move(children));
    }
    if (kind != "leaf") throw ParseError("unknown spec node kind '" + kind + "'");

    const std::string type = require(j, "type", "leaf").get<std::string>();
    BarrierPrimitive prim;
    if (type == "halfspace") {
        prim = HalfSpace{vec_from_json(require(j, "normal", "halfspace"), "normal"),
                         vec_from_json(require(j, "anchor", "halfspace"), "anchor")};
    } else if (type == "circle") {
        const std::string side = require(j, "side", "circle").get<std::string>();
        if (side != "inner" && side != "outer")
            throw ParseError("circle side must be 'inner' or 'outer'");
        prim = Circle{vec_from_json(require(j, "center", "circle"), "center"),
                      require(j, "radius", "circle").get<double>(),
                      side == "inner" ? CircleSide::Inner : CircleSide::Outer};
    } else if (type == "affine") {
        prim = Affine{vec_from_json(require(j, "coefficients", "affine"), "coefficients"),
                      require(j, "offset", "affine").get<double>()};
    } else {
        throw ParseError("unknown leaf type '" + type + "'");
    }

    ScalingFn scaling = ScalingFn::identity();
    if (j.contains("scaling")) {
        const std::string s = j.at("scaling").get<std::string>();
        if (s == "tanh") scaling = ScalingFn::tanh_scale();
        else if (s != "identity") throw ParseError("unknown scaling '" + s + "'");
    }
    const bool negated = j.value("negated", false);
    return SpecNode::make_leaf(std::move(prim), std::move(scaling), negated);
}

inline json spec_node_to_json(const SpecNode& n) {
    json j;
    if (n.kind != SpecNode::Kind::Leaf) {
        j["kind"] = n.kind == SpecNode::Kind::Union ? "union" : "intersection";
        j["children"] = json::array();
        for (const SpecNode& c : n.children) j["children"].push_back(spec_node_to_json(c));
        return j;
    }
    j["kind"] = "leaf";
    const LeafSpec& leaf = *n.leaf;
    if (const auto* hs = std::get_if<HalfSpace>(&leaf.primitive)) {
        j["type"] = "halfspace";
        j["normal"] = vec_to_json(hs->normal);
        j["anchor"] = vec_to_json(hs->anchor);
    } else if (const auto* c = std::get_if<Circle>(&leaf.primitive)) {
        j["type"] = "circle";
        j["center"] = vec_to_json(c->center);
        j["radius"] = c->radius;
        j["side"] = c->side == CircleSide::Inner ? "inner" : "outer";
    } else if (const auto* a = std::get_if<Affine>(&leaf.primitive)) {
        j["type"] = "affine";
        j["coefficients"] = vec_to_json(a->coefficients);
        j["offset"] = a->offset;
    } else {
        throw ParseError("custom leaves are not serializable");
    }
    if (leaf.negated) j["negated"] = true;
    if (leaf.scaling.kind == ScalingFn::Kind::Tanh) j["scaling"] = "tanh";
    else if (leaf.scaling.kind == ScalingFn::Kind::Custom)
        throw ParseError("custom scalings are not serializable");
    return j;
}

inline BufferSpec buffer_from_json(const json& j) {
    BufferSpec buf;
    if (j.is_number()) {
        buf.kind = BufferSpec::Kind::Value;
        buf.value = j.get<double>();
        return buf;
    }
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "auto_subset") {
            buf.kind = BufferSpec::Kind::AutoSubset;
            return buf;
        }
        if (s == "auto_superset") {
            buf.kind = BufferSpec::Kind::AutoSuperset;
            return buf;
        }
        if (s.size() > 4 && s.substr(0, 3) == "ln(" && s.back() == ')') {
            size_t consumed = 0;
            const std::string inner = s.substr(3, s.size() - 4);
            const double k = std::stod(inner, &consumed);
            if (consumed != inner.size() || !(k > 0.0))
                throw ParseError("malformed buffer literal '" + s + "'");
            buf.kind = BufferSpec::Kind::LnLiteral;
            buf.value = k;
            return buf;
        }
        throw ParseError("unknown buffer value '" + s + "'");
    }
    throw ParseError("buffer must be a number, 'ln(k)', 'auto_subset' or 'auto_superset'");
}

inline json buffer_to_json(const BufferSpec& buf) {
    switch (buf.kind) {
        case BufferSpec::Kind::Value: return json(buf.value);
        case BufferSpec::Kind::LnLiteral: {
            std::ostringstream os;
            os << "ln(" << buf.value << ")";
            return json(os.str());
        }
        case BufferSpec::Kind::AutoSubset: return json("auto_subset");
        case BufferSpec::Kind::AutoSuperset: return json("auto_superset");
    }
    return json(0.0);
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j) {
    using detail::require;
    Scenario sc;

    const auto& dyn = require(j, "dynamics", "scenario");
    const std::string dtype = require(dyn, "type", "dynamics").get<std::string>();
    if (dtype != "single_integrator")
        throw ParseError("unsupported dynamics type '" + dtype + "'");
    sc.dynamics_dim = require(dyn, "n", "dynamics").get<int>();
    sc.dynamics = Dynamics::single_integrator(sc.dynamics_dim);

    sc.spec_tree = detail::spec_node_from_json(require(j, "spec", "scenario"));
    const ValidationReport rep = validate(sc.spec_tree);
    if (!rep.ok) throw ParseError("invalid spec: " + rep.issues[0].detail);
    if (rep.dimension != sc.dynamics_dim)
        throw ParseError("spec dimension does not match dynamics dimension");
    sc.layered = layerize(sc.spec_tree);

    const auto& comp = require(j, "composition", "scenario");
    sc.kappa = require(comp, "kappa", "composition").get<double>();
    if (!(sc.kappa > 0.0)) throw ParseError("kappa must be positive");
    sc.buffer = detail::buffer_from_json(require(comp, "buffer", "composition"));

    const auto& al = require(j, "alpha", "scenario");
    const std::string atype = require(al, "type", "alpha").get<std::string>();
    if (atype != "linear") throw ParseError("unsupported alpha type '" + atype + "'");
    sc.alpha = AlphaFn::linear(require(al, "slope", "alpha").get<double>());

    const auto& ctrl = require(j, "controller", "scenario");
    const std::string ctype = require(ctrl, "type", "controller").get<std::string>();
    if (ctype == "proportional") {
        sc.controller = DesiredController::saturated_proportional(
            require(ctrl, "gain", "controller").get<double>(),
            detail::vec_from_json(require(ctrl, "target", "controller"), "target"),
            require(ctrl, "u_max", "controller").get<double>());
    } else if (ctype == "constant") {
        sc.controller = DesiredController::constant(
            detail::vec_from_json(require(ctrl, "value", "controller"), "value"));
    } else {
        throw ParseError("unsupported controller type '" + ctype + "'");
    }

    const auto& init = require(j, "init", "scenario");
    if (!init.is_array() || init.empty()) throw ParseError("init must be a nonempty array");
    if (init[0].is_number()) {
        sc.initial_states.push_back(detail::vec_from_json(init, "init"));
    } else {
        for (const auto& e : init)
            sc.initial_states.push_back(detail::vec_from_json(e, "init"));
    }
    for (const Vec& x0 : sc.initial_states)
        if (static_cast<int>(x0.size()) != sc.dynamics_dim)
            throw ParseError("initial state dimension mismatch");

    const auto& integ = require(j, "integration", "scenario");
    sc.dt = require(integ, "dt", "integration").get<double>();
    sc.horizon = require(integ, "horizon", "integration").get<double>();
    if (!(sc.dt > 0.0) || !(sc.horizon > 0.0))
        throw ParseError("dt and horizon must be positive");

    if (j.contains("output")) {
        const auto& out = j.at("output");
        sc.output_dir = out.value("dir", std::string("."));
        sc.emit_svg = out.value("svg", true);
    }
    return sc;
}

inline nlohmann::json scenario_to_json(const Scenario& sc) {
    nlohmann::json j;
    j["dynamics"] = {{"type", "single_integrator"}, {"n", sc.dynamics_dim}};
    j["spec"] = detail::spec_node_to_json(sc.spec_tree);
    j["composition"] = {{"kappa", sc.kappa}, {"buffer", detail::buffer_to_json(sc.buffer)}};
    if (sc.alpha.kind != AlphaFn::Kind::Linear)
        throw ParseError("custom alpha is not serializable");
    j["alpha"] = {{"type", "linear"}, {"slope", sc.alpha.slope}};
    if (sc.controller.kind == DesiredController::Kind::Proportional) {
        j["controller"] = {{"type", "proportional"},
                           {"gain", sc.controller.gain},
                           {"target", detail::vec_to_json(sc.controller.target)},
                           {"u_max", sc.controller.u_max}};
    } else if (sc.controller.kind == DesiredController::Kind::Constant) {
        j["controller"] = {{"type", "constant"},
                           {"value", detail::vec_to_json(sc.controller.constant_value)}};
    } else {
        throw ParseError("custom controllers are not serializable");
    }
    j["init"] = nlohmann::json::array();
    for (const Vec& x0 : sc.initial_states) j["init"].push_back(detail::vec_to_json(x0));
    j["integration"] = {{"dt", sc.dt}, {"horizon", sc.horizon}};
    j["output"] = {{"dir", sc.output_dir}, {"svg", sc.emit_svg}};
    return j;
}

inline Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scenario JSON parse error: ") + e.what());
    }
    return scenario_from_json(j);
}

inline std::string write_scenario(const Scenario& sc) {
    return scenario_to_json(sc).dump(2);
}

}  // namespace barrier_comp
