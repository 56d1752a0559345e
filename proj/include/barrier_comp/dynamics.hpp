#pragma once

#include "barrier_comp/compose.hpp"
#include "barrier_comp/spec.hpp"

#include <functional>
#include <stdexcept>

namespace barrier_comp {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Control-affine system xdot = f(x) + g(x) u. Local Lipschitz continuity of
// f and g is a user obligation; it is not checked at runtime.
struct Dynamics {
    int state_dim = 0;
    int input_dim = 0;
    std::function<Vec(const Vec&)> drift;
    std::function<Mat(const Vec&)> input_map;

    static Dynamics single_integrator(int n) {
        Dynamics d;
        d.state_dim = n;
        d.input_dim = n;
        d.drift = [n](const Vec&) { return Vec::Zero(n); };
        d.input_map = [n](const Vec&) { return Mat::Identity(n, n); };
        return d;
    }
};

struct LieDerivatives {
    double lfh = 0.0;  // grad h . f(x)
    Vec lgh;           // grad h^T g(x), length m
};

inline LieDerivatives lie_derivatives(const Dynamics& dyn, const Vec& gradient, const Vec& x) {
    if (gradient.size() != dyn.state_dim || x.size() != dyn.state_dim)
        throw DimensionMismatch("lie_derivatives: gradient/state dimension mismatch");
    LieDerivatives lie;
    lie.lfh = gradient.dot(dyn.drift(x));
    lie.lgh = dyn.input_map(x).transpose() * gradient;
    return lie;
}

inline LieDerivatives lie_derivatives(const Dynamics& dyn, const BarrierEval& eval, const Vec& x) {
    return lie_derivatives(dyn, eval.gradient, x);
}

}  // namespace barrier_comp
