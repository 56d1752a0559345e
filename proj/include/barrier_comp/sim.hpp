#pragma once

#include "barrier_comp/compose.hpp"
#include "barrier_comp/filter.hpp"
#include "barrier_comp/oracle.hpp"
#include "barrier_comp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace barrier_comp {

struct NonFiniteState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> inputs;          // filtered inputs at step points
    std::vector<Vec> desired_inputs;
    std::vector<double> h_trace;
    std::vector<double> h_c_trace;
    std::vector<FilterResult::Case> filter_cases;
    std::vector<std::vector<double>> leaf_traces;  // per-step leaf values
    bool complete = true;  // false when the integration aborted on a non-finite state

    double min_h() const {
        return *std::min_element(h_trace.begin(), h_trace.end());
    }
};

namespace detail {

inline Vec closed_loop_rhs(const Scenario& sc, const CompositionParams& params, const Vec& x) {
    const BarrierEval eval = smooth_eval(sc.layered, params, x);
    const FilterResult fr = filter_explicit(sc.dynamics, eval, sc.alpha, sc.controller(x), x);
    return sc.dynamics.drift(x) + sc.dynamics.input_map(x) * fr.u_safe;
}

}  // namespace detail

// Classical RK4 on the closed loop; the safety filter is re-evaluated at
// every stage (continuous-feedback semantics rather than zero-order hold).
inline Trajectory simulate(const Scenario& sc, const Vec& x0) {
    const CompositionParams params = sc.composition_params();
    const long steps = std::lround(sc.horizon / sc.dt);
    const double dt = sc.dt;

    Trajectory traj;
    traj.times.reserve(static_cast<size_t>(steps) + 1);
    Vec x = x0;
    for (long k = 0; k <= steps; ++k) {
        if (!x.allFinite()) {
            traj.complete = false;
            break;
        }
        const BarrierEval eval = smooth_eval(sc.layered, params, x);
        const Vec u_des = sc.controller(x);
        const FilterResult fr = filter_explicit(sc.dynamics, eval, sc.alpha, u_des, x);
        const std::vector<LeafEval> leaves = leaf_eval(sc.layered, x);

        traj.times.push_back(static_cast<double>(k) * dt);
        traj.states.push_back(x);
        traj.inputs.push_back(fr.u_safe);
        traj.desired_inputs.push_back(u_des);
        traj.h_trace.push_back(eval.value);
        traj.h_c_trace.push_back(nonsmooth_eval(sc.layered, x).value);
        traj.filter_cases.push_back(fr.kase);
        std::vector<double> lv(leaves.size());
        for (size_t i = 0; i < leaves.size(); ++i) lv[i] = leaves[i].value;
        traj.leaf_traces.push_back(std::move(lv));
        if (k == steps) break;

        try {
            const Vec k1 = detail::closed_loop_rhs(sc, params, x);
            const Vec k2 = detail::closed_loop_rhs(sc, params, x + 0.5 * dt * k1);
            const Vec k3 = detail::closed_loop_rhs(sc, params, x + 0.5 * dt * k2);
            const Vec k4 = detail::closed_loop_rhs(sc, params, x + dt * k3);
            x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } catch (const NonFiniteValue&) {
            // a stage state escaped to infinity mid-step
            traj.complete = false;
            break;
        }
    }
    return traj;
}

inline Trajectory simulate(const Scenario& sc) {
    if (sc.initial_states.empty()) throw SpecError("simulate: scenario has no initial state");
    return simulate(sc, sc.initial_states[0]);
}

struct SweepEntry {
    double kappa = 0.0;
    Trajectory trajectory;
    double max_input_jump = 0.0;  // max_k ||u_{k+1} - u_k||, a discontinuity proxy
};

inline double max_input_jump(const Trajectory& traj) {
    double jump = 0.0;
    for (size_t k = 0; k + 1 < traj.inputs.size(); ++k)
        jump = std::max(jump, (traj.inputs[k + 1] - traj.inputs[k]).norm());
    return jump;
}

inline std::vector<SweepEntry> kappa_sweep(const Scenario& sc, const std::vector<double>& kappas) {
    std::vector<SweepEntry> out;
    out.reserve(kappas.size());
    for (double kappa : kappas) {
        Scenario variant = sc;
        variant.kappa = kappa;
        SweepEntry entry;
        entry.kappa = kappa;
        entry.trajectory = simulate(variant);
        entry.max_input_jump = max_input_jump(entry.trajectory);
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace barrier_comp
