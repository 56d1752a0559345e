#pragma once

#include "barrier_comp/compose.hpp"
#include "barrier_comp/dynamics.hpp"
#include "barrier_comp/lp.hpp"
#include "barrier_comp/qp.hpp"
#include "barrier_comp/spec.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace barrier_comp {

// Extended class-K decay margin alpha, alpha(0) = 0 and strictly increasing.
// Custom handles must satisfy this themselves; only Linear is checkable.
struct AlphaFn {
    enum class Kind { Linear, Custom };

    Kind kind = Kind::Linear;
    double slope = 1.0;
    std::function<double(double)> custom;

    static AlphaFn linear(double c) {
        if (!(c > 0.0)) throw SpecError("AlphaFn::linear: slope must be positive");
        return {Kind::Linear, c, nullptr};
    }
    static AlphaFn custom_k_infty(std::function<double(double)> f) {
        return {Kind::Custom, 0.0, std::move(f)};
    }

    double operator()(double h) const {
        return kind == Kind::Linear ? slope * h : custom(h);
    }
};

// Threshold below which L_g h counts as zero in the explicit solution.
inline constexpr double kLghZeroThreshold = 1e-10;

struct FilterResult {
    enum class Case { PassThrough, Inactive, Active };

    Vec u_safe;
    double eta = 0.0;
    Case kase = Case::Inactive;
    LieDerivatives lie;
    double h_value = 0.0;
};

// Closed-form solution of the single-constraint safety QP:
// u = u_des + max{0, eta} lgh^T / ||lgh||^2 when lgh != 0.
inline FilterResult filter_explicit(const Dynamics& dyn, const BarrierEval& eval,
                                    const AlphaFn& alpha, const Vec& u_des, const Vec& x,
                                    double eps_g = kLghZeroThreshold) {
    FilterResult res;
    res.h_value = eval.value;
    res.lie = lie_derivatives(dyn, eval, x);
    res.eta = -res.lie.lfh - res.lie.lgh.dot(u_des) - alpha(eval.value);

    const double lgh_norm2 = res.lie.lgh.squaredNorm();
    if (std::sqrt(lgh_norm2) <= eps_g) {
        res.kase = FilterResult::Case::PassThrough;
        res.u_safe = u_des;
    } else if (res.eta <= 0.0) {
        res.kase = FilterResult::Case::Inactive;
        res.u_safe = u_des;
    } else {
        res.kase = FilterResult::Case::Active;
        res.u_safe = u_des + (res.eta / lgh_norm2) * res.lie.lgh;
    }
    return res;
}

namespace detail {

inline void constraint_rows(const Dynamics& dyn, const std::vector<LeafEval>& leaf_evals,
                            const std::vector<AlphaFn>& alphas, const Vec& x, Mat& A, Vec& b) {
    const int n_con = static_cast<int>(leaf_evals.size());
    if (alphas.size() != leaf_evals.size())
        throw DimensionMismatch("constraint_rows: one alpha per constraint required");
    A.resize(n_con, dyn.input_dim);
    b.resize(n_con);
    for (int i = 0; i < n_con; ++i) {
        const LieDerivatives lie = lie_derivatives(dyn, leaf_evals[static_cast<size_t>(i)].gradient, x);
        A.row(i) = lie.lgh.transpose();
        b[i] = -lie.lfh - alphas[static_cast<size_t>(i)](leaf_evals[static_cast<size_t>(i)].value);
    }
}

}  // namespace detail

// Baseline multi-constraint filter: min ||u - u_des||^2 subject to one CBF
// inequality per leaf constraint.
inline QpResult filter_qp_multi(const Dynamics& dyn, const std::vector<LeafEval>& leaf_evals,
                                const std::vector<AlphaFn>& alphas, const Vec& u_des,
                                const Vec& x) {
    Mat A;
    Vec b;
    detail::constraint_rows(dyn, leaf_evals, alphas, x, A, b);
    return solve_inequality_qp(A, b, u_des);
}

struct FeasibilityReport {
    bool feasible = false;
    std::optional<Vec> witness_u;
    std::optional<Vec> violating_multipliers;  // Farkas certificate when infeasible
};

// Decides existence of an input satisfying every per-constraint CBF
// inequality. Infeasibility comes with multipliers lambda >= 0 such that
// sum lambda_i L_g h_i = 0 and sum lambda_i (L_f h_i + alpha_i(h_i)) < 0.
inline FeasibilityReport feasibility_check(const std::vector<LieDerivatives>& leaf_lies,
                                           const std::vector<double>& leaf_h,
                                           const std::vector<AlphaFn>& alphas) {
    if (leaf_lies.size() != leaf_h.size() || leaf_lies.size() != alphas.size())
        throw DimensionMismatch("feasibility_check: inconsistent list lengths");
    const int n_con = static_cast<int>(leaf_lies.size());
    const int m = n_con > 0 ? static_cast<int>(leaf_lies[0].lgh.size()) : 0;
    Mat A(n_con, m);
    Vec b(n_con);
    for (int i = 0; i < n_con; ++i) {
        const auto& lie = leaf_lies[static_cast<size_t>(i)];
        A.row(i) = lie.lgh.transpose();
        b[i] = -lie.lfh - alphas[static_cast<size_t>(i)](leaf_h[static_cast<size_t>(i)]);
    }
    const LinearFeasibility lf = linear_feasibility(A, b);
    FeasibilityReport rep;
    rep.feasible = lf.feasible;
    rep.witness_u = lf.witness;
    rep.violating_multipliers = lf.multipliers;
    return rep;
}

// --- empirical CBF-validity scan -------------------------------------------

struct ValidityViolation {
    Vec x;
    double h = 0.0;
    double lfh = 0.0;
    double lgh_norm = 0.0;
    double residual = 0.0;  // lfh + alpha(h), negative at a violation
};

inline std::vector<Vec> grid_samples(const Vec& lo, const Vec& hi, int per_axis) {
    if (per_axis < 2) throw SpecError("grid_samples: need at least 2 points per axis");
    const int dim = static_cast<int>(lo.size());
    size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= static_cast<size_t>(per_axis);
    std::vector<Vec> out;
    out.reserve(total);
    for (size_t flat = 0; flat < total; ++flat) {
        Vec x(dim);
        size_t rem = flat;
        for (int d = dim - 1; d >= 0; --d) {
            const size_t idx = rem % static_cast<size_t>(per_axis);
            rem /= static_cast<size_t>(per_axis);
            x[d] = lo[d] + (hi[d] - lo[d]) * static_cast<double>(idx) /
                               static_cast<double>(per_axis - 1);
        }
        out.push_back(std::move(x));
    }
    return out;
}

inline std::vector<Vec> random_samples(const Vec& lo, const Vec& hi, int count, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        Vec x(lo.size());
        for (int d = 0; d < lo.size(); ++d) x[d] = lo[d] + (hi[d] - lo[d]) * unit(rng);
        out.push_back(std::move(x));
    }
    return out;
}

// Samples the CBF condition L_g h = 0 => L_f h + alpha(h) >= 0. A clean scan
// is evidence, not a proof; density is the caller's choice.
inline std::vector<ValidityViolation> validity_scan(const LayeredSpec& spec,
                                                    const CompositionParams& params,
                                                    const Dynamics& dyn, const AlphaFn& alpha,
                                                    const std::vector<Vec>& samples,
                                                    double eps_g = 1e-6, double eps_v = 1e-9) {
    std::vector<ValidityViolation> violations;
    for (const Vec& x : samples) {
        const BarrierEval eval = smooth_eval(spec, params, x);
        const LieDerivatives lie = lie_derivatives(dyn, eval, x);
        if (lie.lgh.norm() > eps_g) continue;
        const double residual = lie.lfh + alpha(eval.value);
        if (residual < -eps_v)
            violations.push_back({x, eval.value, lie.lfh, lie.lgh.norm(), residual});
    }
    return violations;
}

}  // namespace barrier_comp
