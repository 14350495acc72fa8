#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ballcover/errors.hpp"
#include "ballcover/geometry.hpp"
#include "ballcover/lp.hpp"
#include "ballcover/polyhedron.hpp"

namespace ballcover {

// minimize 1/2 x'Qx + g'x + constant over the rows of `constraints`.
struct ConvexQp {
    Matrix quadratic;
    Vector linear;
    double constant = 0.0;
    HPolyhedron constraints;

    double objective(const Vector& x) const {
        return 0.5 * x.dot(quadratic * x) + linear.dot(x) + constant;
    }
};

struct QpOptions {
    std::optional<Vector> start;     // feasible starting point; Chebyshev center otherwise
    std::optional<double> threshold; // stop once an iterate has objective below it
};

enum class QpStatus { Optimal, Infeasible, FeasibleBelowThreshold };

struct QpOutcome {
    QpStatus status = QpStatus::Infeasible;
    Vector argument;
    double value = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::size_t> active_set;
    Vector multipliers; // one per constraint row, zero off the active set
    double kkt_residual = std::numeric_limits<double>::quiet_NaN();
};

// Worst violation among stationarity, dual feasibility, complementary
// slackness and primal feasibility. Independent of the solver internals.
inline double kkt_residual(const ConvexQp& qp, const Vector& x, const Vector& mu) {
    const auto& rows = qp.constraints.rows;
    Vector stationarity = qp.quadratic * x + qp.linear;
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double m = mu[static_cast<Eigen::Index>(i)];
        stationarity += m * rows[i].normal;
        const double slack = rows[i].eval(x);
        worst = std::max(worst, -m);
        worst = std::max(worst, std::abs(m * slack));
        worst = std::max(worst, slack);
    }
    return std::max(worst, stationarity.lpNorm<Eigen::Infinity>());
}

namespace detail {

struct EqpStep {
    Vector step;
    Vector multipliers; // for the working rows, meaningful when step is zero
    bool zero_curvature = false;
};

class EqpSolver {
public:
    explicit EqpSolver(const Matrix& Q) : Q_(Q) {
        const double c = Q_(0, 0);
        scalar_ = c > 0.0 && (Q_ - c * Matrix::Identity(Q_.rows(), Q_.cols())).cwiseAbs().maxCoeff() == 0.0;
        llt_.compute(Q_);
        positive_definite_ = llt_.info() == Eigen::Success;
        if (positive_definite_) {
            const Vector diag = Matrix(llt_.matrixL()).diagonal();
            positive_definite_ = diag.minCoeff() > 1e-8 * std::max(1.0, diag.maxCoeff());
        }
    }

    // minimize 1/2 p'Qp + grad'p  subject to  W p = 0.
    EqpStep solve(const Vector& grad, const Matrix& W) const {
        return positive_definite_ ? null_space(grad, W) : full_kkt(grad, W);
    }

private:
    // Null-space method: the step lies in the orthogonal complement of the
    // working rows by construction, so an ill-conditioned working set does
    // not leave a spurious residual step behind.
    EqpStep null_space(const Vector& grad, const Matrix& W) const {
        EqpStep out;
        const Eigen::Index n = Q_.rows();
        const Eigen::Index k = W.rows();
        if (k == 0) {
            out.step = -llt_.solve(grad);
            out.multipliers = Vector(0);
            return out;
        }
        const Eigen::HouseholderQR<Matrix> qr(W.transpose());
        out.step = Vector::Zero(n);
        if (scalar_ && n > k) {
            // Q = cI: project the gradient, no full basis needed.
            const Matrix Y = qr.householderQ() * Matrix::Identity(n, k);
            out.step = -(grad - Y * (Y.transpose() * grad)) / Q_(0, 0);
        } else if (n > k) {
            const Matrix Z = (qr.householderQ() * Matrix::Identity(n, n)).rightCols(n - k);
            const Matrix H = Z.transpose() * Q_ * Z;
            out.step = Z * H.llt().solve(-(Z.transpose() * grad));
        }
        out.multipliers = W.transpose().colPivHouseholderQr().solve(-(grad + Q_ * out.step));
        return out;
    }

    EqpStep full_kkt(const Vector& grad, const Matrix& W) const {
        const Eigen::Index n = Q_.rows();
        const Eigen::Index w = W.rows();
        Matrix K = Matrix::Zero(n + w, n + w);
        K.topLeftCorner(n, n) = Q_;
        K.topRightCorner(n, w) = W.transpose();
        K.bottomLeftCorner(w, n) = W;
        Vector rhs = Vector::Zero(n + w);
        rhs.head(n) = -grad;

        Eigen::FullPivLU<Matrix> lu(K);
        lu.setThreshold(1e-11);
        EqpStep out;
        if (lu.isInvertible()) {
            const Vector sol = lu.solve(rhs);
            out.step = sol.head(n);
            out.multipliers = sol.tail(w);
            return out;
        }
        // Singular KKT: a zero-curvature direction along which the objective
        // is linear. Follow it downhill if the gradient sees it.
        const Matrix ker = lu.kernel();
        for (Eigen::Index c = 0; c < ker.cols(); ++c) {
            Vector d = ker.col(c).head(n);
            const double dn = d.norm();
            if (dn < 1e-12) continue;
            d /= dn;
            const double slope = grad.dot(d);
            if (std::abs(slope) > 1e-10 * std::max(1.0, grad.norm())) {
                out.step = slope > 0.0 ? Vector(-d) : d;
                out.multipliers = Vector::Zero(w);
                out.zero_curvature = true;
                return out;
            }
        }
        const Vector sol = K.completeOrthogonalDecomposition().solve(rhs);
        out.step = sol.head(n);
        out.multipliers = sol.tail(w);
        return out;
    }

    Matrix Q_;
    Eigen::LLT<Matrix> llt_;
    bool positive_definite_ = false;
    bool scalar_ = false;
};

} // namespace detail

// Primal active-set method. Rows enter when they block a step and leave by
// most negative multiplier.
inline QpOutcome solve_qp(const ConvexQp& qp, const QpOptions& options = {}, const Tolerances& tol = {}) {
    const Eigen::Index n = qp.quadratic.rows();
    if (qp.quadratic.cols() != n || qp.linear.size() != n || qp.constraints.dim != n)
        throw ArityMismatch("solve_qp: inconsistent problem dimensions");
    const auto& rows = qp.constraints.rows;
    const auto m = rows.size();

    ConvexQp sym = qp;
    sym.quadratic = 0.5 * (qp.quadratic + qp.quadratic.transpose());

    QpOutcome out;
    Vector x;
    if (options.start) {
        x = *options.start;
        if (x.size() != n) throw ArityMismatch("solve_qp: start point has wrong length");
        if (!qp.constraints.contains(x, tol.lp)) throw InvalidInput("solve_qp: start point is infeasible");
    } else {
        const ChebyshevBall cb = chebyshev_center(qp.constraints, tol);
        if (cb.empty) return out;
        x = cb.center;
    }

    const detail::EqpSolver eqp(sym.quadratic);
    std::vector<std::size_t> working;
    auto working_matrix = [&] {
        Matrix W(static_cast<Eigen::Index>(working.size()), n);
        for (std::size_t k = 0; k < working.size(); ++k)
            W.row(static_cast<Eigen::Index>(k)) = rows[working[k]].normal.transpose();
        return W;
    };

    // Initial working set: active rows, kept linearly independent.
    {
        std::vector<Vector> basis;
        for (std::size_t i = 0; i < m; ++i) {
            if (std::abs(rows[i].eval(x)) > tol.active) continue;
            Vector r = rows[i].normal;
            for (const auto& q : basis) r -= q.dot(r) * q;
            if (r.norm() > 1e-8) {
                basis.push_back(r.normalized());
                working.push_back(i);
            }
        }
    }

    const std::size_t max_iter = std::max<std::size_t>(50, 50 * m);
    Vector mu_w;
    bool converged = false;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        if (options.threshold && sym.objective(x) < *options.threshold) {
            out.status = QpStatus::FeasibleBelowThreshold;
            out.argument = x;
            out.value = sym.objective(x);
            out.active_set = working;
            return out;
        }
        const Vector grad = sym.quadratic * x + sym.linear;
        const Matrix W = working_matrix();
        const detail::EqpStep st = eqp.solve(grad, W);

        if (!st.zero_curvature && st.step.norm() <= 1e-12 * (1.0 + x.norm())) {
            mu_w = st.multipliers;
            if (working.empty()) {
                converged = true;
                break;
            }
            Eigen::Index worst = 0;
            const double most_negative = mu_w.minCoeff(&worst);
            if (most_negative >= -1e-10 * (1.0 + grad.norm())) {
                converged = true;
                break;
            }
            working.erase(working.begin() + worst);
            continue;
        }

        double alpha = st.zero_curvature ? std::numeric_limits<double>::infinity() : 1.0;
        std::optional<std::size_t> blocking;
        for (std::size_t i = 0; i < m; ++i) {
            if (std::find(working.begin(), working.end(), i) != working.end()) continue;
            const double rate = rows[i].normal.dot(st.step);
            if (rate <= 1e-14 * st.step.norm()) continue;
            const double a = std::max(0.0, -rows[i].eval(x)) / rate;
            if (a < alpha) {
                alpha = a;
                blocking = i;
            }
        }
        if (!std::isfinite(alpha)) throw Error("solve_qp: objective unbounded below");
        x += alpha * st.step;
        if (blocking) working.push_back(*blocking);
    }
    if (!converged) throw MaxIterations("solve_qp: iteration cap reached (degenerate working set?)");

    // Multipliers re-derived from stationarity on the final working set.
    Vector mu = Vector::Zero(static_cast<Eigen::Index>(m));
    if (!working.empty()) {
        const Matrix W = working_matrix();
        const Vector grad = sym.quadratic * x + sym.linear;
        const Vector refined = W.transpose().colPivHouseholderQr().solve(-grad);
        for (std::size_t k = 0; k < working.size(); ++k)
            mu[static_cast<Eigen::Index>(working[k])] = refined[static_cast<Eigen::Index>(k)];
    }
    out.status = QpStatus::Optimal;
    out.argument = x;
    out.value = sym.objective(x);
    out.active_set = working;
    out.multipliers = mu;
    out.kkt_residual = kkt_residual(sym, x, mu);
    return out;
}

// Objective ||x - c||^2 - R^2 over the polyhedron.
inline ConvexQp sphere_power_qp(const Ball& ball, HPolyhedron constraints) {
    ConvexQp qp;
    const Eigen::Index n = ball.dim();
    qp.quadratic = 2.0 * Matrix::Identity(n, n);
    qp.linear = -2.0 * ball.center;
    qp.constant = ball.center.squaredNorm() - ball.radius * ball.radius;
    qp.constraints = std::move(constraints);
    return qp;
}

enum class IntersectionStatus { Interior, Empty, Degenerate };

struct IntersectionPoint {
    IntersectionStatus status = IntersectionStatus::Empty;
    Vector point;
    double margin = 0.0; // min_i (R_i^2 - ||x - c_i||^2)
    double value = 0.0;  // max_i (||x - c_i||^2 - R_i^2) at the optimum
};

// Point of the intersection of open balls with the largest power clearance,
// via the epigraph QP  min ||x||^2 + s  s.t.  s >= -2 c_i.x + |c_i|^2 - R_i^2.
inline IntersectionPoint interior_point_of_intersection(const std::vector<Ball>& lambda,
                                                        const Tolerances& tol = {}) {
    if (lambda.empty()) throw InvalidInput("interior_point_of_intersection: no balls");
    const Eigen::Index n = lambda.front().dim();
    ConvexQp qp;
    qp.quadratic = Matrix::Zero(n + 1, n + 1);
    qp.quadratic.topLeftCorner(n, n) = 2.0 * Matrix::Identity(n, n);
    qp.linear = Vector::Zero(n + 1);
    qp.linear[n] = 1.0;
    qp.constraints.dim = n + 1;
    double start_s = -std::numeric_limits<double>::infinity();
    double scale = 1.0;
    for (const auto& b : lambda) {
        Vector a(n + 1);
        a.head(n) = -2.0 * b.center;
        a[n] = -1.0;
        const double rhs = b.radius * b.radius - b.center.squaredNorm();
        qp.constraints.rows.push_back(HalfSpace::normalized(a, rhs));
        start_s = std::max(start_s, -rhs);
        scale = std::max(scale, 1.0 + b.radius * b.radius);
    }
    Vector start = Vector::Zero(n + 1);
    start[n] = start_s;
    QpOptions opts;
    opts.start = start;
    const QpOutcome res = solve_qp(qp, opts, tol);

    IntersectionPoint out;
    out.point = res.argument.head(n);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& b : lambda) worst = std::max(worst, power(b, out.point));
    out.value = worst;
    out.margin = -worst;
    const double tau = tol.tau(scale);
    if (worst < -tau) out.status = IntersectionStatus::Interior;
    else if (worst > tau) out.status = IntersectionStatus::Empty;
    else out.status = IntersectionStatus::Degenerate;
    return out;
}

} // namespace ballcover
