#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ballcover/errors.hpp"
#include "ballcover/geometry.hpp"

namespace ballcover {

// maximize objective . y  subject to  A y <= b,  lower <= y <= upper.
// Variables are free unless bounds are given; infinite bounds are ignored.
struct LinearProgram {
    Vector objective;
    Matrix A;
    Vector b;
    std::optional<Vector> lower;
    std::optional<Vector> upper;
};

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    std::optional<Vector> argument; // optimum, or the feasible base point of a ray
    std::optional<double> value;
    std::optional<Vector> ray;      // set when Unbounded: A ray <= 0, objective . ray > 0
};

namespace detail {

// Dense tableau over nonnegative columns; the last column holds the right-hand side.
class SimplexTableau {
public:
    SimplexTableau(Matrix t, std::vector<Eigen::Index> basis)
        : t_(std::move(t)), basis_(std::move(basis)) {}

    enum class Result { Optimal, Unbounded };

    // Maximizes cost . x with Bland's rule. Columns flagged in `forbidden`
    // never enter the basis.
    Result maximize(const Vector& cost, const std::vector<bool>& forbidden, Eigen::Index& ray_col) {
        const Eigen::Index m = t_.rows();
        const Eigen::Index ncol = t_.cols() - 1;
        const int max_pivots = 50000;
        for (int iter = 0; iter < max_pivots; ++iter) {
            Eigen::Index entering = -1;
            for (Eigen::Index j = 0; j < ncol; ++j) {
                if (forbidden[static_cast<std::size_t>(j)] || is_basic(j)) continue;
                double reduced = cost[j];
                for (Eigen::Index i = 0; i < m; ++i) reduced -= cost[basis_[i]] * t_(i, j);
                if (reduced > kEps) {
                    entering = j;
                    break;
                }
            }
            if (entering < 0) return Result::Optimal;

            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m; ++i) {
                const double coef = t_(i, entering);
                if (coef > kEps) best = std::min(best, t_(i, ncol) / coef);
            }
            // Ties go to the smallest basic index.
            Eigen::Index leaving = -1;
            for (Eigen::Index i = 0; i < m && std::isfinite(best); ++i) {
                const double coef = t_(i, entering);
                if (coef <= kEps) continue;
                if (t_(i, ncol) / coef <= best + kEps * (1.0 + std::abs(best)) &&
                    (leaving < 0 || basis_[i] < basis_[leaving]))
                    leaving = i;
            }
            if (leaving < 0) {
                ray_col = entering;
                return Result::Unbounded;
            }
            pivot(leaving, entering);
        }
        throw MaxIterations("simplex: pivot limit reached");
    }

    void pivot(Eigen::Index row, Eigen::Index col) {
        t_.row(row) /= t_(row, col);
        for (Eigen::Index i = 0; i < t_.rows(); ++i) {
            if (i == row) continue;
            const double f = t_(i, col);
            if (f != 0.0) t_.row(i) -= f * t_.row(row);
        }
        basis_[row] = col;
    }

    bool is_basic(Eigen::Index j) const {
        return std::find(basis_.begin(), basis_.end(), j) != basis_.end();
    }

    Vector solution() const {
        Vector x = Vector::Zero(t_.cols() - 1);
        for (Eigen::Index i = 0; i < t_.rows(); ++i) x[basis_[i]] = t_(i, t_.cols() - 1);
        return x;
    }

    Vector ray(Eigen::Index col) const {
        Vector d = Vector::Zero(t_.cols() - 1);
        d[col] = 1.0;
        for (Eigen::Index i = 0; i < t_.rows(); ++i) d[basis_[i]] = -t_(i, col);
        return d;
    }

    const Matrix& table() const { return t_; }
    const std::vector<Eigen::Index>& basis() const { return basis_; }

    static constexpr double kEps = 1e-11;

private:
    Matrix t_;
    std::vector<Eigen::Index> basis_;
};

} // namespace detail

inline LpOutcome solve_lp(const LinearProgram& lp) {
    const Eigen::Index n = lp.objective.size();
    if (lp.A.rows() > 0 && lp.A.cols() != n) throw ArityMismatch("solve_lp: constraint arity differs from objective");
    if (lp.A.rows() != lp.b.size()) throw ArityMismatch("solve_lp: row count differs from right-hand side");
    if ((lp.lower && lp.lower->size() != n) || (lp.upper && lp.upper->size() != n))
        throw ArityMismatch("solve_lp: bound vector has wrong length");

    // Gather rows, turning finite bounds into rows.
    std::vector<Vector> rows;
    std::vector<double> rhs;
    for (Eigen::Index i = 0; i < lp.A.rows(); ++i) {
        rows.emplace_back(lp.A.row(i).transpose());
        rhs.push_back(lp.b[i]);
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        if (lp.lower && std::isfinite((*lp.lower)[k])) {
            Vector r = Vector::Zero(n);
            r[k] = -1.0;
            rows.push_back(r);
            rhs.push_back(-(*lp.lower)[k]);
        }
        if (lp.upper && std::isfinite((*lp.upper)[k])) {
            Vector r = Vector::Zero(n);
            r[k] = 1.0;
            rows.push_back(r);
            rhs.push_back((*lp.upper)[k]);
        }
    }
    const auto m = static_cast<Eigen::Index>(rows.size());

    LpOutcome out;
    if (m == 0) {
        if (lp.objective.lpNorm<Eigen::Infinity>() == 0.0) {
            out.status = LpStatus::Optimal;
            out.argument = Vector::Zero(n);
            out.value = 0.0;
        } else {
            out.status = LpStatus::Unbounded;
            out.argument = Vector::Zero(n);
            out.ray = lp.objective.normalized();
        }
        return out;
    }

    // Row equilibration keeps pivot thresholds meaningful.
    std::vector<double> scale(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        const double s = std::max(rows[i].lpNorm<Eigen::Infinity>(), 1e-300);
        scale[static_cast<std::size_t>(i)] = s;
        rows[i] /= s;
        rhs[static_cast<std::size_t>(i)] /= s;
    }

    // Columns: u (n) | w (n) | slack (m) | artificial (one per negative rhs).
    std::vector<Eigen::Index> negative;
    for (Eigen::Index i = 0; i < m; ++i)
        if (rhs[static_cast<std::size_t>(i)] < 0.0) negative.push_back(i);
    const auto nart = static_cast<Eigen::Index>(negative.size());
    const Eigen::Index ncol = 2 * n + m + nart;

    Matrix t = Matrix::Zero(m, ncol + 1);
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    Eigen::Index art = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sign = rhs[static_cast<std::size_t>(i)] < 0.0 ? -1.0 : 1.0;
        t.block(i, 0, 1, n) = sign * rows[i].transpose();
        t.block(i, n, 1, n) = -sign * rows[i].transpose();
        t(i, 2 * n + i) = sign;
        t(i, ncol) = sign * rhs[static_cast<std::size_t>(i)];
        if (sign < 0.0) {
            t(i, 2 * n + m + art) = 1.0;
            basis[static_cast<std::size_t>(i)] = 2 * n + m + art;
            ++art;
        } else {
            basis[static_cast<std::size_t>(i)] = 2 * n + i;
        }
    }

    detail::SimplexTableau tab(std::move(t), std::move(basis));
    std::vector<bool> forbidden(static_cast<std::size_t>(ncol), false);
    Eigen::Index ray_col = -1;

    if (nart > 0) {
        Vector cost = Vector::Zero(ncol);
        cost.tail(nart).setConstant(-1.0);
        tab.maximize(cost, forbidden, ray_col);
        const Vector x = tab.solution();
        if (x.tail(nart).sum() > 1e-9) {
            out.status = LpStatus::Infeasible;
            return out;
        }
        // Pivot zero-valued artificials out where possible; the rest sit on
        // redundant rows and stay at zero.
        for (Eigen::Index i = 0; i < m; ++i) {
            if (tab.basis()[static_cast<std::size_t>(i)] < 2 * n + m) continue;
            for (Eigen::Index j = 0; j < 2 * n + m; ++j) {
                if (!tab.is_basic(j) && std::abs(tab.table()(i, j)) > 1e-9) {
                    tab.pivot(i, j);
                    break;
                }
            }
        }
        for (Eigen::Index j = 2 * n + m; j < ncol; ++j) forbidden[static_cast<std::size_t>(j)] = true;
    }

    Vector cost = Vector::Zero(ncol);
    cost.head(n) = lp.objective;
    cost.segment(n, n) = -lp.objective;
    const auto result = tab.maximize(cost, forbidden, ray_col);

    const Vector x = tab.solution();
    const Vector y = x.head(n) - x.segment(n, n);
    out.argument = y;
    if (result == detail::SimplexTableau::Result::Unbounded) {
        const Vector d = tab.ray(ray_col);
        Vector dy = d.head(n) - d.segment(n, n);
        const double norm = dy.norm();
        if (norm > 0.0) dy /= norm;
        out.status = LpStatus::Unbounded;
        out.ray = dy;
        return out;
    }
    out.status = LpStatus::Optimal;
    out.value = lp.objective.dot(y);
    return out;
}

// Largest slack violation of a point against A y <= b, each row measured
// relative to max(1, ||a_i||).
inline double max_violation(const Matrix& A, const Vector& b, const Vector& y) {
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const double s = std::max(1.0, A.row(i).norm());
        worst = std::max(worst, (A.row(i).dot(y) - b[i]) / s);
    }
    return worst;
}

// Inscribed ball of {x : a_i . x <= b_i} (rows with unit normals).
struct ChebyshevBall {
    bool empty = false;
    Vector center;
    double radius = 0.0;    // +inf when the LP is unbounded in r
    double clearance = 0.0; // finite inscribed radius actually realized at `center`
    double threshold = 0.0; // radius at or below which the set counts as flat

    bool full_dimensional() const { return !empty && radius > threshold; }
};

inline ChebyshevBall chebyshev_center(const std::vector<HalfSpace>& rows, Eigen::Index dim,
                                      const Tolerances& tol = {}) {
    ChebyshevBall out;
    double offsets = 0.0;
    for (const auto& h : rows) offsets = std::max(offsets, std::abs(h.offset));
    out.threshold = tol.cheb_rel * (1.0 + offsets);

    if (rows.empty()) {
        out.center = Vector::Zero(dim);
        out.radius = std::numeric_limits<double>::infinity();
        out.clearance = std::numeric_limits<double>::infinity();
        return out;
    }

    LinearProgram lp;
    const auto m = static_cast<Eigen::Index>(rows.size());
    lp.objective = Vector::Zero(dim + 1);
    lp.objective[dim] = 1.0;
    lp.A = Matrix(m, dim + 1);
    lp.b = Vector(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        lp.A.block(i, 0, 1, dim) = rows[static_cast<std::size_t>(i)].normal.transpose();
        lp.A(i, dim) = rows[static_cast<std::size_t>(i)].normal.norm();
        lp.b[i] = rows[static_cast<std::size_t>(i)].offset;
    }
    lp.lower = Vector::Constant(dim + 1, -std::numeric_limits<double>::infinity());
    (*lp.lower)[dim] = 0.0;

    const LpOutcome res = solve_lp(lp);
    if (res.status == LpStatus::Infeasible) {
        out.empty = true;
        out.center = Vector::Zero(dim);
        return out;
    }
    const Vector& y = *res.argument;
    if (res.status == LpStatus::Optimal) {
        out.center = y.head(dim);
        out.radius = std::max(0.0, y[dim]);
        out.clearance = out.radius;
        return out;
    }
    // Unbounded in r: walk along the ray to a point with a comfortable margin.
    const Vector& d = *res.ray;
    const double target = std::max(1.0, 1.0 + offsets);
    double t = 0.0;
    if (d[dim] > 0.0) t = std::max(0.0, (target - y[dim]) / d[dim]);
    out.center = y.head(dim) + t * d.head(dim);
    out.radius = std::numeric_limits<double>::infinity();
    double slack = std::numeric_limits<double>::infinity();
    for (const auto& h : rows) slack = std::min(slack, -h.eval(out.center));
    out.clearance = std::max(0.0, slack);
    return out;
}

// Direction d with (c - c_i) . d >= 1 for every lambda ball and
// (c - c_j) . d <= -1 for every v ball, if one exists.
inline std::optional<Vector> separating_direction(const Ball& ref, const std::vector<Ball>& lambda,
                                                  const std::vector<Ball>& vballs) {
    const Eigen::Index n = ref.dim();
    const auto m = static_cast<Eigen::Index>(lambda.size() + vballs.size());
    if (m == 0) {
        Vector d = Vector::Zero(n);
        d[0] = 1.0;
        return d;
    }
    LinearProgram lp;
    lp.objective = Vector::Zero(n);
    lp.A = Matrix(m, n);
    lp.b = Vector::Constant(m, -1.0);
    Eigen::Index r = 0;
    for (const auto& b : lambda) lp.A.row(r++) = -(ref.center - b.center).transpose();
    for (const auto& b : vballs) lp.A.row(r++) = (ref.center - b.center).transpose();
    const LpOutcome res = solve_lp(lp);
    if (res.status == LpStatus::Infeasible) return std::nullopt;
    return *res.argument;
}

} // namespace ballcover
