#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace barrier_comp {

enum class QpStatus { Optimal, Infeasible, MaxIterations };

struct QpResult {
    QpStatus status = QpStatus::MaxIterations;
    Eigen::VectorXd u;            // optimal point when status == Optimal
    Eigen::VectorXd multipliers;  // per-constraint KKT multipliers (Optimal)
                                  // or a Farkas certificate (Infeasible)
};

// min 0.5 ||u - u_des||^2  s.t.  A u >= b, solved by a dual active-set
// method (Goldfarb-Idnani with identity Hessian). Starts at the
// unconstrained optimum and needs no feasible initial point; primal
// infeasibility surfaces as an unbounded dual step and yields a
// certificate lambda >= 0 with lambda^T A = 0, lambda^T b > 0.
inline QpResult solve_inequality_qp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                    const Eigen::VectorXd& u_des) {
    const int n_con = static_cast<int>(A.rows());
    const int m = static_cast<int>(A.cols());
    if (b.size() != n_con || u_des.size() != m)
        throw std::invalid_argument("solve_inequality_qp: size mismatch");

    QpResult result;
    result.u = u_des;
    result.multipliers = Eigen::VectorXd::Zero(n_con);
    if (n_con == 0) {
        result.status = QpStatus::Optimal;
        return result;
    }

    const double scale = std::max({1.0, b.cwiseAbs().maxCoeff(), A.cwiseAbs().maxCoeff()});
    const double tol = 1e-11 * scale;

    Eigen::VectorXd u = u_des;
    std::vector<int> active;
    std::vector<double> lambda;

    const int max_iters = 100 * (n_con + m + 1);
    for (int iter = 0; iter < max_iters; ++iter) {
        // most violated constraint
        int p = -1;
        double worst = -tol;
        for (int i = 0; i < n_con; ++i) {
            bool is_active = false;
            for (int j : active)
                if (j == i) { is_active = true; break; }
            if (is_active) continue;
            const double s = A.row(i).dot(u) - b[i];
            if (s < worst) {
                worst = s;
                p = i;
            }
        }
        if (p < 0) {
            result.status = QpStatus::Optimal;
            result.u = u;
            for (size_t k = 0; k < active.size(); ++k)
                result.multipliers[active[static_cast<size_t>(k)]] = lambda[k];
            return result;
        }

        const Eigen::VectorXd np = A.row(p).transpose();
        double lambda_p = 0.0;

        for (int inner = 0; inner < n_con + m + 1; ++inner) {
            Eigen::VectorXd r;
            Eigen::VectorXd z = np;
            if (!active.empty()) {
                Eigen::MatrixXd N(m, static_cast<int>(active.size()));
                for (size_t k = 0; k < active.size(); ++k)
                    N.col(static_cast<int>(k)) = A.row(active[k]).transpose();
                r = N.completeOrthogonalDecomposition().solve(np);
                z = np - N * r;
            }
            const double znorm2 = z.squaredNorm();
            const double s_p = A.row(p).dot(u) - b[p];

            // dual blocking step
            double t1 = std::numeric_limits<double>::infinity();
            int blocking = -1;
            for (size_t k = 0; k < active.size(); ++k) {
                if (r[static_cast<int>(k)] > tol) {
                    const double t = lambda[k] / r[static_cast<int>(k)];
                    if (t < t1) {
                        t1 = t;
                        blocking = static_cast<int>(k);
                    }
                }
            }

            if (znorm2 <= tol * tol) {
                if (blocking < 0) {
                    // n_p = N r with r <= 0: the violated row is a nonnegative
                    // combination witnessing an empty feasible set
                    Eigen::VectorXd cert = Eigen::VectorXd::Zero(n_con);
                    cert[p] = 1.0;
                    for (size_t k = 0; k < active.size(); ++k)
                        cert[active[k]] = -r[static_cast<int>(k)];
                    result.status = QpStatus::Infeasible;
                    result.multipliers = cert;
                    return result;
                }
                // dual-only step
                for (size_t k = 0; k < active.size(); ++k) lambda[k] -= t1 * r[static_cast<int>(k)];
                lambda_p += t1;
                active.erase(active.begin() + blocking);
                lambda.erase(lambda.begin() + blocking);
                continue;
            }

            const double t2 = -s_p / znorm2;  // z^T n_p = ||z||^2
            const double t = std::min(t1, t2);
            u += t * z;
            for (size_t k = 0; k < active.size(); ++k) lambda[k] -= t * r[static_cast<int>(k)];
            lambda_p += t;

            if (t2 <= t1) {
                active.push_back(p);
                lambda.push_back(lambda_p);
                break;
            }
            active.erase(active.begin() + blocking);
            lambda.erase(lambda.begin() + blocking);
        }
    }
    result.status = QpStatus::MaxIterations;
    return result;
}

}  // namespace barrier_comp
