#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace barrier_comp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct LeafEval {
    double value = 0.0;
    Vec gradient;
};

struct NonFiniteValue : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- barrier primitives ------------------------------------------------

// h(x) = n^T (x - x0)
struct HalfSpace {
    Vec normal;
    Vec anchor;
};

enum class CircleSide { Inner, Outer };

// inner: h(x) = ||x - c|| - R (safe outside the circle)
// outer: h(x) = -(||x - c|| - R) (safe inside the circle)
struct Circle {
    Vec center;
    double radius = 1.0;
    CircleSide side = CircleSide::Outer;
};

// h(x) = c^T x + offset
struct Affine {
    Vec coefficients;
    double offset = 0.0;
};

// User-supplied differentiable barrier. Must provide an analytic gradient.
struct CustomBarrier {
    int dimension = 0;
    std::function<LeafEval(const Vec&)> eval;
};

using BarrierPrimitive = std::variant<HalfSpace, Circle, Affine, CustomBarrier>;

inline int primitive_dimension(const BarrierPrimitive& p) {
    return std::visit(
        [](const auto& v) -> int {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, HalfSpace>) return static_cast<int>(v.normal.size());
            else if constexpr (std::is_same_v<T, Circle>) return static_cast<int>(v.center.size());
            else if constexpr (std::is_same_v<T, Affine>) return static_cast<int>(v.coefficients.size());
            else return v.dimension;
        },
        p);
}

inline LeafEval primitive_eval(const BarrierPrimitive& p, const Vec& x) {
    return std::visit(
        [&x](const auto& v) -> LeafEval {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, HalfSpace>) {
                return {v.normal.dot(x - v.anchor), v.normal};
            } else if constexpr (std::is_same_v<T, Circle>) {
                const Vec d = x - v.center;
                const double r = d.norm();
                const double sign = (v.side == CircleSide::Inner) ? 1.0 : -1.0;
                Vec grad = Vec::Zero(x.size());
                if (r > 1e-300) grad = sign * d / r;
                return {sign * (r - v.radius), grad};
            } else if constexpr (std::is_same_v<T, Affine>) {
                return {v.coefficients.dot(x) + v.offset, v.coefficients};
            } else {
                return v.eval(x);
            }
        },
        p);
}

// --- class-K scaling ----------------------------------------------------

// Continuously differentiable extended class-K scaling gamma with gamma(0)=0.
struct ScalingFn {
    enum class Kind { Identity, Tanh, Custom };

    Kind kind = Kind::Identity;
    std::function<double(double)> fn;
    std::function<double(double)> dfn;

    static ScalingFn identity() { return {}; }
    static ScalingFn tanh_scale() { return {Kind::Tanh, nullptr, nullptr}; }
    static ScalingFn custom(std::function<double(double)> f, std::function<double(double)> df) {
        return {Kind::Custom, std::move(f), std::move(df)};
    }

    double value(double r) const {
        switch (kind) {
            case Kind::Identity: return r;
            case Kind::Tanh: return std::tanh(r);
            case Kind::Custom: return fn(r);
        }
        return r;
    }
    double slope(double r) const {
        switch (kind) {
            case Kind::Identity: return 1.0;
            case Kind::Tanh: {
                const double t = std::tanh(r);
                return 1.0 - t * t;
            }
            case Kind::Custom: return dfn(r);
        }
        return 1.0;
    }
};

// --- specification tree ---------------------------------------------------

// Leaf constraint: gamma(+-h_i(x)), negation applied before scaling.
struct LeafSpec {
    BarrierPrimitive primitive;
    ScalingFn scaling = ScalingFn::identity();
    bool negated = false;
};

inline LeafEval leaf_spec_eval(const LeafSpec& leaf, const Vec& x) {
    LeafEval e = primitive_eval(leaf.primitive, x);
    if (leaf.negated) {
        e.value = -e.value;
        e.gradient = -e.gradient;
    }
    const double s = leaf.scaling.slope(e.value);
    e.value = leaf.scaling.value(e.value);
    e.gradient *= s;
    return e;
}

struct SpecNode {
    enum class Kind { Leaf, Union, Intersection };

    Kind kind = Kind::Leaf;
    std::optional<LeafSpec> leaf;
    std::vector<SpecNode> children;

    static SpecNode make_leaf(BarrierPrimitive p, ScalingFn s = ScalingFn::identity(),
                              bool negated = false) {
        SpecNode n;
        n.kind = Kind::Leaf;
        n.leaf = LeafSpec{std::move(p), std::move(s), negated};
        return n;
    }
    static SpecNode union_of(std::vector<SpecNode> ch) {
        SpecNode n;
        n.kind = Kind::Union;
        n.children = std::move(ch);
        return n;
    }
    static SpecNode intersection_of(std::vector<SpecNode> ch) {
        SpecNode n;
        n.kind = Kind::Intersection;
        n.children = std::move(ch);
        return n;
    }
};

// --- validation -------------------------------------------------------

enum class SpecIssueCode { EmptyChildren, DimensionMismatch, ZeroNormal, NonpositiveRadius };

struct SpecIssue {
    SpecIssueCode code;
    std::string detail;
};

struct ValidationReport {
    bool ok = true;
    int dimension = 0;
    int leaf_count = 0;
    int depth = 0;
    std::vector<SpecIssue> issues;
};

struct SpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void validate_node(const SpecNode& node, int level, ValidationReport& rep) {
    if (node.kind == SpecNode::Kind::Leaf) {
        rep.leaf_count += 1;
        rep.depth = std::max(rep.depth, level);
        const BarrierPrimitive& p = node.leaf->primitive;
        const int dim = primitive_dimension(p);
        if (rep.dimension == 0) rep.dimension = dim;
        if (dim != rep.dimension) {
            rep.issues.push_back({SpecIssueCode::DimensionMismatch,
                                  "leaf dimension " + std::to_string(dim) + " vs " +
                                      std::to_string(rep.dimension)});
        }
        if (const auto* hs = std::get_if<HalfSpace>(&p)) {
            if (hs->normal.norm() <= 0.0)
                rep.issues.push_back({SpecIssueCode::ZeroNormal, "half-space with zero normal"});
            if (hs->normal.size() != hs->anchor.size())
                rep.issues.push_back({SpecIssueCode::DimensionMismatch,
                                      "half-space normal/anchor size mismatch"});
        }
        if (const auto* c = std::get_if<Circle>(&p)) {
            if (!(c->radius > 0.0))
                rep.issues.push_back({SpecIssueCode::NonpositiveRadius,
                                      "circle radius " + std::to_string(c->radius)});
        }
        return;
    }
    if (node.children.empty()) {
        rep.issues.push_back({SpecIssueCode::EmptyChildren,
                              node.kind == SpecNode::Kind::Union ? "empty union"
                                                                 : "empty intersection"});
        return;
    }
    for (const SpecNode& ch : node.children) validate_node(ch, level + 1, rep);
}

}  // namespace detail

inline ValidationReport validate(const SpecNode& tree) {
    ValidationReport rep;
    detail::validate_node(tree, 0, rep);
    rep.ok = rep.issues.empty();
    return rep;
}

// --- layered form ---------------------------------------------------------

enum class LevelKind { Union, Intersection };

struct Level {
    LevelKind kind;
    std::vector<std::vector<int>> groups;  // indices into the previous level's outputs
};

// Alternating-layer composition: N leaves at level 0, M levels above,
// terminal level produces a single value.
struct LayeredSpec {
    std::vector<LeafSpec> leaves;
    std::vector<Level> levels;
    int dimension = 0;

    int leaf_count() const { return static_cast<int>(leaves.size()); }
    int level_count() const { return static_cast<int>(levels.size()); }
};

namespace detail {

// Merge children that share their parent's kind so that kinds strictly
// alternate along every root-to-leaf path.
inline SpecNode flatten(const SpecNode& node) {
    if (node.kind == SpecNode::Kind::Leaf) return node;
    SpecNode out;
    out.kind = node.kind;
    for (const SpecNode& ch : node.children) {
        SpecNode f = flatten(ch);
        if (f.kind == node.kind) {
            for (SpecNode& g : f.children) out.children.push_back(std::move(g));
        } else {
            out.children.push_back(std::move(f));
        }
    }
    return out;
}

inline int internal_depth(const SpecNode& node) {
    if (node.kind == SpecNode::Kind::Leaf) return 0;
    int d = 0;
    for (const SpecNode& ch : node.children) d = std::max(d, internal_depth(ch));
    return d + 1;
}

struct LayerBuilder {
    LayeredSpec spec;

    int add_group(int level, std::vector<int> idxs) {
        auto& groups = spec.levels[static_cast<size_t>(level - 1)].groups;
        groups.push_back(std::move(idxs));
        return static_cast<int>(groups.size()) - 1;
    }

    // Emits `node` so its output index lives at `level`; leaves are lifted
    // through singleton pass-through groups, which are value-neutral under
    // both the max/sum and min/harmonic rules.
    int emit(const SpecNode& node, int level) {
        if (node.kind == SpecNode::Kind::Leaf) {
            spec.leaves.push_back(*node.leaf);
            int idx = static_cast<int>(spec.leaves.size()) - 1;
            for (int lv = 1; lv <= level; ++lv) idx = add_group(lv, {idx});
            return idx;
        }
        std::vector<int> group;
        group.reserve(node.children.size());
        for (const SpecNode& ch : node.children) group.push_back(emit(ch, level - 1));
        return add_group(level, std::move(group));
    }
};

}  // namespace detail

inline LayeredSpec layerize(const SpecNode& tree) {
    const ValidationReport rep = validate(tree);
    if (!rep.ok) throw SpecError("layerize: invalid specification tree: " + rep.issues[0].detail);

    SpecNode root = detail::flatten(tree);
    if (root.kind == SpecNode::Kind::Leaf) root = SpecNode::union_of({root});

    const int levels = detail::internal_depth(root);
    const LevelKind root_kind =
        root.kind == SpecNode::Kind::Union ? LevelKind::Union : LevelKind::Intersection;

    detail::LayerBuilder builder;
    builder.spec.dimension = rep.dimension;
    builder.spec.levels.resize(static_cast<size_t>(levels));
    for (int lv = 1; lv <= levels; ++lv) {
        const bool same_parity = ((levels - lv) % 2) == 0;
        LevelKind k = root_kind;
        if (!same_parity) k = (k == LevelKind::Union) ? LevelKind::Intersection : LevelKind::Union;
        builder.spec.levels[static_cast<size_t>(lv - 1)].kind = k;
    }
    builder.emit(root, levels);
    return builder.spec;
}

// Values and gradients of all N leaf constraints at x.
inline std::vector<LeafEval> leaf_eval(const LayeredSpec& spec, const Vec& x) {
    if (static_cast<int>(x.size()) != spec.dimension)
        throw SpecError("leaf_eval: state dimension " + std::to_string(x.size()) +
                        " does not match spec dimension " + std::to_string(spec.dimension));
    std::vector<LeafEval> out;
    out.reserve(spec.leaves.size());
    for (const LeafSpec& leaf : spec.leaves) {
        LeafEval e = leaf_spec_eval(leaf, x);
        if (!std::isfinite(e.value) || !e.gradient.allFinite())
            throw NonFiniteValue("leaf_eval: non-finite leaf value or gradient");
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace barrier_comp
