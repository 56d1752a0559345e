#pragma once

#include "barrier_comp/spec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace barrier_comp {

struct CompositionParams {
    double kappa = 1.0;  // smoothing parameter, > 0
    double buffer = 0.0; // root buffer b, may be negative

    CompositionParams() = default;
    CompositionParams(double k, double b) : kappa(k), buffer(b) {
        if (!(kappa > 0.0)) throw SpecError("CompositionParams: kappa must be positive");
        if (!std::isfinite(buffer)) throw SpecError("CompositionParams: buffer must be finite");
    }
};

inline double log_sum_exp(std::span<const double> v) {
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double a : v) s += std::exp(a - m);
    return m + std::log(s);
}

// (1/kappa) ln sum_i exp(kappa h_i), a smooth upper bound on max.
inline double smooth_max(std::span<const double> values, double kappa) {
    std::vector<double> scaled(values.size());
    for (size_t i = 0; i < values.size(); ++i) scaled[i] = kappa * values[i];
    return log_sum_exp(scaled) / kappa;
}

// -(1/kappa) ln sum_i exp(-kappa h_i), a smooth lower bound on min.
inline double smooth_min(std::span<const double> values, double kappa) {
    std::vector<double> scaled(values.size());
    for (size_t i = 0; i < values.size(); ++i) scaled[i] = -kappa * values[i];
    return -log_sum_exp(scaled) / kappa;
}

// Smoothed composition at a state: value, gradient, and the convex leaf
// weights lambda_i with grad h = sum_i lambda_i grad h_i.
struct BarrierEval {
    double value = 0.0;
    Vec gradient;
    std::vector<double> leaf_weights;
    // node_log_values[0] holds the leaf logs kappa*h_i; entry l holds the
    // per-node log H at level l.
    std::vector<std::vector<double>> node_log_values;
};

inline BarrierEval smooth_eval(const LayeredSpec& spec, const CompositionParams& params,
                               const Vec& x) {
    const std::vector<LeafEval> leaves = leaf_eval(spec, x);
    const double kappa = params.kappa;
    const size_t levels = spec.levels.size();

    BarrierEval out;
    out.node_log_values.resize(levels + 1);
    auto& logs = out.node_log_values;
    logs[0].resize(leaves.size());
    for (size_t i = 0; i < leaves.size(); ++i) logs[0][i] = kappa * leaves[i].value;

    // forward pass: union -> logsumexp, intersection -> negated logsumexp of
    // the negated child logs (the harmonic sum in log space)
    std::vector<double> scratch;
    for (size_t l = 0; l < levels; ++l) {
        const Level& level = spec.levels[l];
        logs[l + 1].resize(level.groups.size());
        for (size_t i = 0; i < level.groups.size(); ++i) {
            const auto& group = level.groups[i];
            scratch.resize(group.size());
            if (level.kind == LevelKind::Union) {
                for (size_t j = 0; j < group.size(); ++j)
                    scratch[j] = logs[l][static_cast<size_t>(group[j])];
                logs[l + 1][i] = log_sum_exp(scratch);
            } else {
                for (size_t j = 0; j < group.size(); ++j)
                    scratch[j] = -logs[l][static_cast<size_t>(group[j])];
                logs[l + 1][i] = -log_sum_exp(scratch);
            }
        }
    }
    out.value = logs[levels][0] / kappa - params.buffer / kappa;

    // downward sweep: push node weights to children; exponents are <= 0 in
    // both branches, so the factors live in (0, 1]
    std::vector<std::vector<double>> weights(levels + 1);
    for (size_t l = 0; l <= levels; ++l) weights[l].assign(logs[l].size(), 0.0);
    weights[levels][0] = 1.0;
    for (size_t l = levels; l >= 1; --l) {
        const Level& level = spec.levels[l - 1];
        for (size_t i = 0; i < level.groups.size(); ++i) {
            const double w = weights[l][i];
            if (w == 0.0) continue;
            for (int j : level.groups[i]) {
                const size_t cj = static_cast<size_t>(j);
                const double diff = (level.kind == LevelKind::Union)
                                        ? logs[l - 1][cj] - logs[l][i]
                                        : logs[l][i] - logs[l - 1][cj];
                weights[l - 1][cj] += w * std::exp(diff);
            }
        }
    }
    out.leaf_weights = std::move(weights[0]);

    out.gradient = Vec::Zero(spec.dimension);
    for (size_t i = 0; i < leaves.size(); ++i)
        out.gradient += out.leaf_weights[i] * leaves[i].gradient;
    return out;
}

// Approximation bounds of the smoothed composition against the exact
// max/min recursion: h_c + lower <= h <= h_c + upper.
struct ErrorBoundReport {
    double b_union = 0.0;        // sum of ln(fan-in) over union levels
    double b_intersection = 0.0; // sum of ln(fan-in) over intersection levels
    double lower = 0.0;          // -(b_intersection + b) / kappa
    double upper = 0.0;          // (b_union - b) / kappa
    std::vector<int> fan_ins;    // b_l = max_i |J_i^l| per level

    // buffer choices guaranteeing one-sided set inclusion
    double buffer_subset() const { return b_union; }        // C inside C_c
    double buffer_superset() const { return -b_intersection; } // C contains C_c
};

inline ErrorBoundReport error_bounds(const LayeredSpec& spec, const CompositionParams& params) {
    ErrorBoundReport rep;
    rep.fan_ins.reserve(spec.levels.size());
    for (const Level& level : spec.levels) {
        size_t fan = 1;
        for (const auto& g : level.groups) fan = std::max(fan, g.size());
        rep.fan_ins.push_back(static_cast<int>(fan));
        const double lnf = std::log(static_cast<double>(fan));
        if (level.kind == LevelKind::Union) rep.b_union += lnf;
        else rep.b_intersection += lnf;
    }
    rep.lower = -(rep.b_intersection + params.buffer) / params.kappa;
    rep.upper = (rep.b_union - params.buffer) / params.kappa;
    return rep;
}

}  // namespace barrier_comp
