#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace barrier_comp {

// Feasibility of the linear system A u >= b with free u. When infeasible,
// `multipliers` is a Farkas certificate: lambda >= 0, lambda^T A = 0,
// lambda^T b > 0.
struct LinearFeasibility {
    bool feasible = false;
    std::optional<Eigen::VectorXd> witness;
    std::optional<Eigen::VectorXd> multipliers;
};

// Phase-1 simplex on A u >= b. Variables: u split into positive parts,
// one slack per row, one artificial per row; Bland's rule throughout.
inline LinearFeasibility linear_feasibility(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const int rows = static_cast<int>(A.rows());
    const int m = static_cast<int>(A.cols());
    if (b.size() != rows) throw std::invalid_argument("linear_feasibility: size mismatch");

    LinearFeasibility result;
    if (rows == 0) {
        result.feasible = true;
        result.witness = Eigen::VectorXd::Zero(m);
        return result;
    }

    // row signs chosen so the right-hand side is nonnegative
    Eigen::VectorXd sign(rows);
    for (int i = 0; i < rows; ++i) sign[i] = b[i] >= 0.0 ? 1.0 : -1.0;
    const Eigen::VectorXd rhs = sign.cwiseProduct(b);

    const int ncols = 2 * m + rows;  // real columns; artificials live past these
    Eigen::MatrixXd cols(rows, ncols);
    cols.block(0, 0, rows, m) = sign.asDiagonal() * A;
    cols.block(0, m, rows, m) = -cols.block(0, 0, rows, m);
    const Eigen::VectorXd neg_sign = -sign;
    cols.block(0, 2 * m, rows, rows) = neg_sign.asDiagonal();

    std::vector<int> basis(static_cast<size_t>(rows));
    for (int i = 0; i < rows; ++i) basis[static_cast<size_t>(i)] = ncols + i;  // artificials

    const double scale = std::max(1.0, rhs.maxCoeff());
    const double tol = 1e-11 * scale;

    auto column = [&](int j) -> Eigen::VectorXd {
        if (j >= ncols) return Eigen::VectorXd::Unit(rows, j - ncols);
        return cols.col(j);
    };
    auto cost = [&](int j) { return j >= ncols ? 1.0 : 0.0; };

    Eigen::MatrixXd B(rows, rows);
    Eigen::VectorXd xb(rows), y(rows), cb(rows);
    const int max_iters = 200 * (rows + ncols);
    for (int iter = 0; iter < max_iters; ++iter) {
        for (int i = 0; i < rows; ++i) {
            B.col(i) = column(basis[static_cast<size_t>(i)]);
            cb[i] = cost(basis[static_cast<size_t>(i)]);
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        xb = lu.solve(rhs);
        y = lu.transpose().solve(cb);

        // entering column, smallest index with negative reduced cost
        int entering = -1;
        for (int j = 0; j < ncols; ++j) {
            bool in_basis = false;
            for (int i = 0; i < rows; ++i)
                if (basis[static_cast<size_t>(i)] == j) { in_basis = true; break; }
            if (in_basis) continue;
            if (-y.dot(cols.col(j)) < -tol) { entering = j; break; }
        }

        if (entering < 0) {
            const double objective = cb.dot(xb);
            if (objective <= 1e-9 * scale) {
                Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
                for (int i = 0; i < rows; ++i) {
                    const int j = basis[static_cast<size_t>(i)];
                    if (j < m) u[j] += xb[i];
                    else if (j < 2 * m) u[j - m] -= xb[i];
                }
                result.feasible = true;
                result.witness = u;
            } else {
                // dual values certify infeasibility after undoing the row flips
                Eigen::VectorXd lambda = sign.cwiseProduct(y);
                for (int i = 0; i < rows; ++i) lambda[i] = std::max(lambda[i], 0.0);
                const double peak = lambda.maxCoeff();
                if (peak > 0.0) lambda /= peak;
                result.feasible = false;
                result.multipliers = lambda;
            }
            return result;
        }

        const Eigen::VectorXd w = lu.solve(column(entering));
        int leaving = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < rows; ++i) {
            if (w[i] <= tol) continue;
            const double ratio = std::max(xb[i], 0.0) / w[i];
            if (leaving < 0 || ratio < best_ratio - tol ||
                (ratio < best_ratio + tol &&
                 basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leaving)])) {
                leaving = i;
                best_ratio = ratio;
            }
        }
        if (leaving < 0)
            throw std::runtime_error("linear_feasibility: unbounded phase-1 (numerical failure)");
        basis[static_cast<size_t>(leaving)] = entering;
    }
    throw std::runtime_error("linear_feasibility: iteration limit reached");
}

}  // namespace barrier_comp
