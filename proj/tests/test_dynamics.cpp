#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace barrier_comp;

TEST_CASE("single integrator Lie derivatives reduce to the gradient") {
    const Dynamics dyn = Dynamics::single_integrator(2);
    const auto spec = layerize(SpecNode::make_leaf(HalfSpace{Vec{{0.6, -0.8}}, Vec{{1, 1}}}));
    const Vec x{{0.5, -0.25}};
    const BarrierEval eval = smooth_eval(spec, CompositionParams(3.0, 0.0), x);
    const LieDerivatives lie = lie_derivatives(dyn, eval, x);
    CHECK(lie.lfh == 0.0);
    CHECK((lie.lgh - eval.gradient).norm() == 0.0);
    CHECK(lie.lgh[0] == doctest::Approx(0.6));
    CHECK(lie.lgh[1] == doctest::Approx(-0.8));
}

TEST_CASE("dimension mismatch is rejected") {
    const Dynamics dyn = Dynamics::single_integrator(2);
    CHECK_THROWS_AS(lie_derivatives(dyn, Vec{{1.0, 0.0, 0.0}}, Vec{{0.0, 0.0}}),
                    DimensionMismatch);
}

TEST_CASE("composed Lie derivatives equal the weighted sum of leaf Lie derivatives") {
    // drift and rotationed input map exercise both terms
    Dynamics dyn;
    dyn.state_dim = 2;
    dyn.input_dim = 2;
    dyn.drift = [](const Vec& x) { return Vec{{-0.3 * x[1], 0.2 * x[0]}}; };
    dyn.input_map = [](const Vec& x) {
        Mat g(2, 2);
        g << 1.0, 0.5 * x[1], 0.0, 1.0;
        return g;
    };

    std::mt19937_64 rng(37);
    bctest::TreeGenOptions opt;
    for (int trial = 0; trial < 50; ++trial) {
        const LayeredSpec spec = layerize(bctest::random_tree(rng, opt));
        const CompositionParams params(6.0, 0.1);
        const Vec x = bctest::random_state(rng, 2);
        const BarrierEval eval = smooth_eval(spec, params, x);
        const LieDerivatives direct = lie_derivatives(dyn, eval, x);

        const auto leaves = leaf_eval(spec, x);
        double lfh = 0.0;
        Vec lgh = Vec::Zero(2);
        for (size_t i = 0; i < leaves.size(); ++i) {
            const LieDerivatives leaf_lie = lie_derivatives(dyn, leaves[i].gradient, x);
            lfh += eval.leaf_weights[i] * leaf_lie.lfh;
            lgh += eval.leaf_weights[i] * leaf_lie.lgh;
        }
        CHECK(direct.lfh == doctest::Approx(lfh).epsilon(1e-12));
        CHECK((direct.lgh - lgh).norm() <= 1e-12 * std::max(1.0, lgh.norm()));
    }
}

TEST_CASE("hdot matches the finite difference of h along a trajectory") {
    // Richardson comparison: the dt and dt/2 secant slopes of h(x(t)) both
    // converge to lfh + lgh.u, with the dt/2 error four times smaller.
    const Dynamics dyn = Dynamics::single_integrator(2);
    const auto spec = layerize(SpecNode::union_of(
        {SpecNode::make_leaf(HalfSpace{Vec{{1, 0}}, Vec{{0, 0}}}),
         SpecNode::make_leaf(Circle{Vec{{1.0, 1.0}}, 0.8, CircleSide::Inner})}));
    const CompositionParams params(4.0, 0.0);
    const Vec u{{0.7, -0.4}};

    auto h_at = [&](const Vec& x) { return smooth_eval(spec, params, x).value; };
    const Vec x0{{-0.5, 0.3}};
    const BarrierEval eval = smooth_eval(spec, params, x0);
    const LieDerivatives lie = lie_derivatives(dyn, eval, x0);
    const double hdot = lie.lfh + lie.lgh.dot(u);

    const double dt = 1e-4;
    const double slope_full = (h_at(x0 + dt * u) - h_at(x0)) / dt;
    const double slope_half = (h_at(x0 + 0.5 * dt * u) - h_at(x0)) / (0.5 * dt);
    const double err_full = std::abs(slope_full - hdot);
    const double err_half = std::abs(slope_half - hdot);
    CHECK(err_full <= 1e-3);
    CHECK(err_half <= 0.6 * err_full + 1e-12);
}
