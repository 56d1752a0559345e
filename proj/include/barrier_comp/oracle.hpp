#pragma once

#include "barrier_comp/compose.hpp"
#include "barrier_comp/parallel.hpp"
#include "barrier_comp/spec.hpp"

#include <cmath>
#include <vector>

namespace barrier_comp {

// Exact nonsmooth composition value h_c(x); ties broken by lowest leaf index.
struct OracleEval {
    double value = 0.0;
    int argmax_leaf = 0;          // leaf achieving the max/min chain
    std::vector<int> node_path;   // winning node index per level, bottom-up
};

inline OracleEval nonsmooth_eval(const LayeredSpec& spec, const Vec& x) {
    const std::vector<LeafEval> leaves = leaf_eval(spec, x);
    std::vector<double> values(leaves.size());
    std::vector<int> which(leaves.size());
    for (size_t i = 0; i < leaves.size(); ++i) {
        values[i] = leaves[i].value;
        which[i] = static_cast<int>(i);
    }

    OracleEval out;
    for (const Level& level : spec.levels) {
        std::vector<double> next_values(level.groups.size());
        std::vector<int> next_which(level.groups.size());
        for (size_t i = 0; i < level.groups.size(); ++i) {
            const auto& group = level.groups[i];
            size_t best = static_cast<size_t>(group[0]);
            for (size_t j = 1; j < group.size(); ++j) {
                const size_t cand = static_cast<size_t>(group[j]);
                const bool better = (level.kind == LevelKind::Union)
                                        ? values[cand] > values[best]
                                        : values[cand] < values[best];
                const bool tie = values[cand] == values[best] && which[cand] < which[best];
                if (better || tie) best = cand;
            }
            next_values[i] = values[best];
            next_which[i] = which[best];
        }
        values = std::move(next_values);
        which = std::move(next_which);
        out.node_path.push_back(which[0]);
    }
    out.value = values[0];
    out.argmax_leaf = which[0];
    return out;
}

// Side-by-side smooth/exact evaluation on an axis-aligned grid, with sign
// disagreement counts split by the inclusion direction each count certifies.
struct MembershipGrid {
    Vec lo;
    Vec hi;
    int resolution = 2;
    int dimension = 0;
    std::vector<double> h;    // smooth values, row-major over the multi-index
    std::vector<double> h_c;  // oracle values
    // h >= 0 but h_c < 0: a point of C outside C_c (b >= b_union forbids it)
    long count_smooth_in_exact_out = 0;
    // h_c >= 0 but h < 0: a point of C_c outside C (b <= -b_intersection forbids it)
    long count_exact_in_smooth_out = 0;
    long total_cells = 0;

    Vec point(size_t flat) const {
        Vec x(dimension);
        size_t rem = flat;
        for (int d = dimension - 1; d >= 0; --d) {
            const size_t idx = rem % static_cast<size_t>(resolution);
            rem /= static_cast<size_t>(resolution);
            x[d] = lo[d] + (hi[d] - lo[d]) * static_cast<double>(idx) /
                               static_cast<double>(resolution - 1);
        }
        return x;
    }
};

inline MembershipGrid membership_grid(const LayeredSpec& spec, const CompositionParams& params,
                                      const Vec& lo, const Vec& hi, int resolution) {
    if (resolution < 2) throw SpecError("membership_grid: resolution must be >= 2");
    if (lo.size() != hi.size() || static_cast<int>(lo.size()) != spec.dimension)
        throw SpecError("membership_grid: box dimension mismatch");

    MembershipGrid grid;
    grid.lo = lo;
    grid.hi = hi;
    grid.resolution = resolution;
    grid.dimension = spec.dimension;
    size_t cells = 1;
    for (int d = 0; d < spec.dimension; ++d) cells *= static_cast<size_t>(resolution);
    grid.total_cells = static_cast<long>(cells);
    grid.h.resize(cells);
    grid.h_c.resize(cells);

    parallel_for(cells, [&](size_t i) {
        const Vec x = grid.point(i);
        grid.h[i] = smooth_eval(spec, params, x).value;
        grid.h_c[i] = nonsmooth_eval(spec, x).value;
    });

    for (size_t i = 0; i < cells; ++i) {
        if (grid.h[i] >= 0.0 && grid.h_c[i] < 0.0) ++grid.count_smooth_in_exact_out;
        if (grid.h_c[i] >= 0.0 && grid.h[i] < 0.0) ++grid.count_exact_in_smooth_out;
    }
    return grid;
}

}  // namespace barrier_comp
