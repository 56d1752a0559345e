#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace barrier_comp;

namespace {

BarrierEval eval_at(const LayeredSpec& spec, const CompositionParams& p, const Vec& x) {
    return smooth_eval(spec, p, x);
}

}  // namespace

TEST_CASE("explicit filter case analysis") {
    const Dynamics dyn = Dynamics::single_integrator(2);
    const AlphaFn alpha = AlphaFn::linear(1.0);
    const auto spec = layerize(SpecNode::make_leaf(HalfSpace{Vec{{1, 0}}, Vec{{0, 0}}}));
    const CompositionParams params(1.0, 0.0);

    SUBCASE("active: hand-solved scalar QP") {
        const Vec x{{0.5, 0.0}};
        const FilterResult fr =
            filter_explicit(dyn, eval_at(spec, params, x), alpha, Vec{{-2.0, 0.0}}, x);
        CHECK(fr.kase == FilterResult::Case::Active);
        CHECK(fr.eta == doctest::Approx(1.5).epsilon(1e-14));
        CHECK(fr.u_safe[0] == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(fr.u_safe[1] == doctest::Approx(0.0));
        // constraint tight in the active case
        const double residual = fr.lie.lfh + fr.lie.lgh.dot(fr.u_safe) + alpha(fr.h_value);
        CHECK(std::abs(residual) <= 1e-10);
    }
    SUBCASE("inactive: desired input already safe") {
        const Vec x{{0.5, 0.0}};
        const Vec u_des{{1.0, 0.3}};
        const FilterResult fr = filter_explicit(dyn, eval_at(spec, params, x), alpha, u_des, x);
        CHECK(fr.kase == FilterResult::Case::Inactive);
        CHECK((fr.u_safe - u_des).norm() == 0.0);
    }
    SUBCASE("pass-through: vanishing lgh") {
        // symmetric union makes the smoothed gradient vanish on the axis
        const auto sym = layerize(SpecNode::union_of(
            {SpecNode::make_leaf(HalfSpace{Vec{{1, 0}}, Vec{{1, 0}}}),
             SpecNode::make_leaf(HalfSpace{Vec{{-1, 0}}, Vec{{-1, 0}}})}));
        const Vec x{{0.0, 0.7}};
        const Vec u_des{{0.4, 0.1}};
        const FilterResult fr = filter_explicit(dyn, eval_at(sym, params, x), alpha, u_des, x);
        CHECK(fr.kase == FilterResult::Case::PassThrough);
        CHECK((fr.u_safe - u_des).norm() == 0.0);
    }
}

TEST_CASE("explicit filter agrees with the active-set QP on single constraints") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const Dynamics dyn = Dynamics::single_integrator(2);
    const AlphaFn alpha = AlphaFn::linear(1.0);
    bctest::TreeGenOptions opt;
    opt.max_depth = 0;  // single leaf

    for (int trial = 0; trial < 500; ++trial) {
        const LayeredSpec spec = layerize(bctest::random_tree(rng, opt));
        const CompositionParams params(2.0, 0.0);
        const Vec x = bctest::random_state(rng, 2);
        const Vec u_des{{u(rng), u(rng)}};
        const BarrierEval eval = eval_at(spec, params, x);
        const FilterResult fr = filter_explicit(dyn, eval, alpha, u_des, x);
        const auto leaves = leaf_eval(spec, x);
        const QpResult qp =
            filter_qp_multi(dyn, leaves, {alpha}, u_des, x);
        REQUIRE(qp.status == QpStatus::Optimal);
        CHECK((qp.u - fr.u_safe).norm() <= 1e-8);
    }
}

TEST_CASE("multi-constraint QP basics") {
    const Dynamics dyn = Dynamics::single_integrator(2);
    const AlphaFn alpha = AlphaFn::linear(1.0);

    SUBCASE("opposing constraints at negative h are infeasible") {
        // x1 >= 0 AND -x1 >= 0 with both barriers at -1
        std::vector<LeafEval> leaves{{-1.0, Vec{{1.0, 0.0}}}, {-1.0, Vec{{-1.0, 0.0}}}};
        const QpResult qp =
            filter_qp_multi(dyn, leaves, {alpha, alpha}, Vec{{0.0, 0.0}}, Vec{{0.0, 0.0}});
        CHECK(qp.status == QpStatus::Infeasible);
    }
    SUBCASE("feasible desired input passes unchanged") {
        std::vector<LeafEval> leaves{{2.0, Vec{{1.0, 0.0}}}, {2.0, Vec{{0.0, 1.0}}}};
        const Vec u_des{{0.1, -0.1}};
        const QpResult qp =
            filter_qp_multi(dyn, leaves, {alpha, alpha}, u_des, Vec{{0.0, 0.0}});
        REQUIRE(qp.status == QpStatus::Optimal);
        CHECK((qp.u - u_des).norm() <= 1e-12);
    }
}

TEST_CASE("feasibility_check produces witnesses and Farkas certificates") {
    const AlphaFn alpha = AlphaFn::linear(1.0);

    SUBCASE("normals within a half-space are always feasible") {
        std::vector<LieDerivatives> lies{{0.0, Vec{{1.0, 0.2}}}, {0.0, Vec{{0.8, -0.1}}},
                                         {0.0, Vec{{0.5, 0.5}}}};
        const std::vector<double> h{-5.0, -5.0, -5.0};
        const auto rep = feasibility_check(lies, h, {alpha, alpha, alpha});
        REQUIRE(rep.feasible);
        for (const auto& lie : lies)
            CHECK(lie.lgh.dot(*rep.witness_u) >= -lie.lfh - alpha(-5.0) - 1e-9);
    }
    SUBCASE("opposing normals with positive offsets: hand-checked Farkas pair") {
        std::vector<LieDerivatives> lies{{0.0, Vec{{1.0, 0.0}}}, {0.0, Vec{{-1.0, 0.0}}}};
        const std::vector<double> h{-1.0, -1.0};  // b = (1, 1)
        const auto rep = feasibility_check(lies, h, {alpha, alpha});
        REQUIRE_FALSE(rep.feasible);
        const Vec lambda = *rep.violating_multipliers;
        CHECK(lambda.minCoeff() >= 0.0);
        CHECK(std::abs(lambda[0] * 1.0 + lambda[1] * (-1.0)) <= 1e-9);  // lambda^T A = 0
        CHECK(lambda[0] * 1.0 + lambda[1] * 1.0 > 0.0);                 // lambda^T b > 0
        CHECK(lambda[0] == doctest::Approx(lambda[1]).epsilon(1e-9));
    }
    SUBCASE("constructed feasible instances are recognized") {
        std::mt19937_64 rng(43);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            const int m = 2 + static_cast<int>(rng() % 3);
            const int n_con = 1 + static_cast<int>(rng() % 6);
            const Vec u_star = bctest::random_state(rng, m);
            Mat A(n_con, m);
            Vec b(n_con);
            for (int i = 0; i < n_con; ++i) {
                for (int j = 0; j < m; ++j) A(i, j) = u(rng);
                b[i] = A.row(i).dot(u_star) - std::abs(u(rng));
            }
            const auto lf = linear_feasibility(A, b);
            REQUIRE(lf.feasible);
            CHECK(((A * *lf.witness - b).array() >= -1e-9).all());
        }
    }
}

TEST_CASE("minimal intervention against random feasible samples") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2;
        const int n_con = 1 + static_cast<int>(rng() % 4);
        Mat A(n_con, m);
        Vec b(n_con);
        const Vec u_star = bctest::random_state(rng, m);
        for (int i = 0; i < n_con; ++i) {
            for (int j = 0; j < m; ++j) A(i, j) = u(rng);
            b[i] = A.row(i).dot(u_star) - std::abs(u(rng));
        }
        const Vec u_des{{u(rng), u(rng)}};
        const QpResult qp = solve_inequality_qp(A, b, u_des);
        REQUIRE(qp.status == QpStatus::Optimal);
        CHECK(((A * qp.u - b).array() >= -1e-9).all());
        for (int s = 0; s < 20; ++s) {
            const Vec cand = qp.u + 0.5 * bctest::random_state(rng, m);
            if (((A * cand - b).array() >= 0.0).all())
                CHECK((qp.u - u_des).norm() <= (cand - u_des).norm() + 1e-9);
        }
    }
}

TEST_CASE("feasibility_check and the QP agree on random instances") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int infeasible_seen = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int m = 1 + static_cast<int>(rng() % 3);
        const int n_con = 1 + static_cast<int>(rng() % 8);
        Mat A(n_con, m);
        Vec b(n_con);
        for (int i = 0; i < n_con; ++i) {
            for (int j = 0; j < m; ++j) A(i, j) = u(rng);
            b[i] = u(rng);
        }
        const Vec u_des = Vec::Zero(m);
        const QpResult qp = solve_inequality_qp(A, b, u_des);
        const auto lf = linear_feasibility(A, b);
        REQUIRE(qp.status != QpStatus::MaxIterations);
        CHECK(lf.feasible == (qp.status == QpStatus::Optimal));
        if (!lf.feasible) {
            ++infeasible_seen;
            const Vec lambda = *lf.multipliers;
            CHECK(lambda.minCoeff() >= 0.0);
            CHECK((A.transpose() * lambda).norm() <= 1e-9);
            CHECK(lambda.dot(b) > 0.0);
        }
    }
    CHECK(infeasible_seen > 10);  // the sampling actually exercises both branches
}

TEST_CASE("validity_scan flags drift pushing outward at smoothed saddles") {
    // symmetric union: gradient vanishes on x1 = 0 where h < 0
    const auto spec = layerize(SpecNode::union_of(
        {SpecNode::make_leaf(HalfSpace{Vec{{1, 0}}, Vec{{1, 0}}}),
         SpecNode::make_leaf(HalfSpace{Vec{{-1, 0}}, Vec{{-1, 0}}})}));
    const CompositionParams params(2.0, 0.0);
    const AlphaFn alpha = AlphaFn::linear(1.0);
    const auto samples = grid_samples(Vec{{-1, -1}}, Vec{{1, 1}}, 5);  // includes x1 = 0

    SUBCASE("saddle below the zero level is reported") {
        const auto violations =
            validity_scan(spec, params, Dynamics::single_integrator(2), alpha, samples);
        CHECK_FALSE(violations.empty());  // h < 0 at the saddle and lfh = 0
        for (const auto& v : violations) CHECK(v.x[0] == doctest::Approx(0.0));
    }
    SUBCASE("no violations when the set is attractive enough") {
        // shift the spec so h > 0 at the saddle: alpha(h) > 0 there
        const auto wide = layerize(SpecNode::union_of(
            {SpecNode::make_leaf(HalfSpace{Vec{{1, 0}}, Vec{{-0.1, 0}}}),
             SpecNode::make_leaf(HalfSpace{Vec{{-1, 0}}, Vec{{0.1, 0}}})}));
        const auto violations =
            validity_scan(wide, params, Dynamics::single_integrator(2), alpha, samples);
        CHECK(violations.empty());
    }
}
