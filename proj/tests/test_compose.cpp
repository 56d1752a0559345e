#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace barrier_comp;

namespace {

SpecNode halfspace_leaf(double nx, double ny, double ax, double ay) {
    return SpecNode::make_leaf(HalfSpace{Vec{{nx, ny}}, Vec{{ax, ay}}});
}

// two affine leaves with prescribed values at x = 0
SpecNode constant_pair(double v1, double v2, SpecNode::Kind kind) {
    auto l1 = SpecNode::make_leaf(Affine{Vec{{1.0, 0.0}}, v1});
    auto l2 = SpecNode::make_leaf(Affine{Vec{{0.0, 1.0}}, v2});
    return kind == SpecNode::Kind::Union ? SpecNode::union_of({l1, l2})
                                         : SpecNode::intersection_of({l1, l2});
}

}  // namespace

TEST_CASE("smooth_max and smooth_min closed-form examples") {
    const std::vector<double> zeros{0.0, 0.0};
    CHECK(smooth_max(zeros, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(smooth_min(zeros, 1.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-14));

    const std::vector<double> split{5.0, -5.0};
    const double sm = smooth_max(split, 1.0);
    CHECK(sm == doctest::Approx(5.0 + std::log1p(std::exp(-10.0))).epsilon(1e-14));
    CHECK(sm >= 5.0);
    CHECK(sm <= 5.0 + std::log(2.0));

    const std::vector<double> huge{1000.0, 1000.0};
    const double mn = smooth_min(huge, 1.0);
    CHECK(std::isfinite(mn));
    CHECK(mn == doctest::Approx(1000.0 - std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("smooth_eval closed-form examples at equal leaf values") {
    const Vec x0{{0.0, 0.0}};
    SUBCASE("two-leaf union at zero") {
        const auto spec = layerize(constant_pair(0.0, 0.0, SpecNode::Kind::Union));
        const BarrierEval e = smooth_eval(spec, CompositionParams(1.0, 0.0), x0);
        CHECK(e.value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
        CHECK(e.leaf_weights[0] == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(e.leaf_weights[1] == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("two-leaf intersection at zero") {
        const auto spec = layerize(constant_pair(0.0, 0.0, SpecNode::Kind::Intersection));
        const BarrierEval e = smooth_eval(spec, CompositionParams(1.0, 0.0), x0);
        CHECK(e.value == doctest::Approx(-std::log(2.0)).epsilon(1e-14));
    }
}

TEST_CASE("single leaf composition is the identity") {
    const auto spec = layerize(halfspace_leaf(1, 0, -0.5, 0));
    std::mt19937_64 rng(3);
    for (int s = 0; s < 20; ++s) {
        const Vec x = bctest::random_state(rng, 2);
        for (double kappa : {1.0, 10.0, 500.0}) {
            const BarrierEval e = smooth_eval(spec, CompositionParams(kappa, 0.0), x);
            CHECK(e.value == doctest::Approx(x[0] + 0.5).epsilon(1e-12));
            CHECK(e.leaf_weights[0] == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(e.gradient[0] == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("sandwich property against the nonsmooth oracle") {
    std::mt19937_64 rng(17);
    bctest::TreeGenOptions opt;
    for (int trial = 0; trial < 60; ++trial) {
        const SpecNode tree = bctest::random_tree(rng, opt);
        const LayeredSpec spec = layerize(tree);
        for (double kappa : {1.0, 10.0}) {
            std::uniform_real_distribution<double> ub(-1.0, 1.0);
            const CompositionParams params(kappa, ub(rng));
            const ErrorBoundReport bounds = error_bounds(spec, params);
            for (int s = 0; s < 10; ++s) {
                const Vec x = bctest::random_state(rng, 2);
                const double h = smooth_eval(spec, params, x).value;
                const double hc = nonsmooth_eval(spec, x).value;
                CHECK(h >= hc + bounds.lower - 1e-9);
                CHECK(h <= hc + bounds.upper + 1e-9);
            }
        }
    }
}

TEST_CASE("approximation error shrinks with kappa and obeys the 1/kappa bound") {
    std::mt19937_64 rng(19);
    bctest::TreeGenOptions opt;
    for (int trial = 0; trial < 30; ++trial) {
        const SpecNode tree = bctest::random_tree(rng, opt);
        const LayeredSpec spec = layerize(tree);
        const Vec x = bctest::random_state(rng, 2);
        const double hc = nonsmooth_eval(spec, x).value;
        double prev = std::numeric_limits<double>::infinity();
        for (double kappa : {1.0, 10.0, 100.0, 1000.0}) {
            const CompositionParams params(kappa, 0.0);
            const ErrorBoundReport bounds = error_bounds(spec, params);
            const double err = std::abs(smooth_eval(spec, params, x).value - hc);
            CHECK(err <= (bounds.b_union + bounds.b_intersection) / kappa + 1e-12);
            CHECK(err <= prev + 1e-12);
            prev = err;
        }
    }
}

TEST_CASE("composed gradient matches central finite differences") {
    std::mt19937_64 rng(23);
    bctest::TreeGenOptions opt;
    int checked = 0;
    while (checked < 100) {
        const LayeredSpec spec = layerize(bctest::random_tree(rng, opt));
        const CompositionParams params(5.0, 0.0);
        const Vec x = bctest::random_state(rng, 2);
        const BarrierEval e = smooth_eval(spec, params, x);
        const Vec fd = bctest::fd_gradient(
            [&](const Vec& p) { return smooth_eval(spec, params, p).value; }, x);
        if (fd.norm() < 1e-4) continue;  // finite differences degenerate near critical points
        CHECK((e.gradient - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
        ++checked;
    }
}

TEST_CASE("leaf weights are positive, sum to one, and follow the union formula") {
    std::mt19937_64 rng(29);
    bctest::TreeGenOptions opt;
    for (int trial = 0; trial < 50; ++trial) {
        const LayeredSpec spec = layerize(bctest::random_tree(rng, opt));
        const CompositionParams params(8.0, 0.3);
        const Vec x = bctest::random_state(rng, 2);
        const BarrierEval e = smooth_eval(spec, params, x);
        double sum = 0.0;
        for (double w : e.leaf_weights) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }

    // pure union level: lambda_i = exp(kappa (h_i - h_raw)), h_raw unbuffered
    const auto spec = layerize(SpecNode::union_of(
        {halfspace_leaf(1, 0, 0, 0), halfspace_leaf(0, 1, 0, 0), halfspace_leaf(-1, 0, 1, 0)}));
    const double kappa = 4.0;
    const CompositionParams params(kappa, std::log(2.0));
    const Vec x{{0.4, -0.7}};
    const BarrierEval e = smooth_eval(spec, params, x);
    const auto leaves = leaf_eval(spec, x);
    const double h_raw = e.value + params.buffer / kappa;
    for (size_t i = 0; i < leaves.size(); ++i)
        CHECK(e.leaf_weights[i] ==
              doctest::Approx(std::exp(kappa * (leaves[i].value - h_raw))).epsilon(1e-10));
}

TEST_CASE("error_bounds on representative layered layouts") {
    SUBCASE("three unions of four under an intersection") {
        std::vector<SpecNode> unions;
        for (int k = 0; k < 3; ++k)
            unions.push_back(SpecNode::union_of(
                {halfspace_leaf(1, 0, 0, 0), halfspace_leaf(0, 1, 0, 0),
                 halfspace_leaf(-1, 0, 0, 0), halfspace_leaf(0, -1, 0, 0)}));
        const LayeredSpec spec = layerize(SpecNode::intersection_of(std::move(unions)));
        const ErrorBoundReport rep = error_bounds(spec, CompositionParams(10.0, 0.0));
        CHECK(rep.fan_ins == std::vector<int>{4, 3});
        CHECK(rep.b_union == doctest::Approx(std::log(4.0)).epsilon(1e-14));
        CHECK(rep.b_intersection == doctest::Approx(std::log(3.0)).epsilon(1e-14));
        CHECK(rep.buffer_subset() == doctest::Approx(std::log(4.0)));
        CHECK(rep.buffer_superset() == doctest::Approx(-std::log(3.0)));
    }
    SUBCASE("single-level union of N") {
        std::vector<SpecNode> leaves;
        for (int k = 0; k < 5; ++k) leaves.push_back(halfspace_leaf(1, 0, 0.1 * k, 0));
        const double kappa = 7.0;
        const auto rep = error_bounds(layerize(SpecNode::union_of(std::move(leaves))),
                                      CompositionParams(kappa, 0.0));
        CHECK(rep.lower == doctest::Approx(0.0));
        CHECK(rep.upper == doctest::Approx(std::log(5.0) / kappa).epsilon(1e-14));
    }
    SUBCASE("single-level intersection of N") {
        std::vector<SpecNode> leaves;
        for (int k = 0; k < 5; ++k) leaves.push_back(halfspace_leaf(1, 0, 0.1 * k, 0));
        const double kappa = 7.0;
        const auto rep = error_bounds(layerize(SpecNode::intersection_of(std::move(leaves))),
                                      CompositionParams(kappa, 0.0));
        CHECK(rep.lower == doctest::Approx(-std::log(5.0) / kappa).epsilon(1e-14));
        CHECK(rep.upper == doctest::Approx(0.0));
    }
}

TEST_CASE("log-space recursion survives large kappa and large leaf values") {
    const auto spec = layerize(constant_pair(900.0, 1100.0, SpecNode::Kind::Intersection));
    const CompositionParams params(1000.0, 0.0);
    const BarrierEval e = smooth_eval(spec, params, Vec{{0.0, 0.0}});
    CHECK(std::isfinite(e.value));
    CHECK(e.gradient.allFinite());
    CHECK(e.value == doctest::Approx(900.0).epsilon(1e-12));
}
