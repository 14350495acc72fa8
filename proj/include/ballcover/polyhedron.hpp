#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "ballcover/errors.hpp"
#include "ballcover/geometry.hpp"
#include "ballcover/lp.hpp"

namespace ballcover {

enum class RowFamily { Lambda, V };

struct RowSource {
    RowFamily family = RowFamily::Lambda;
    std::size_t index = 0; // position in the family list of the owning system
};

// Conjunction of half-spaces. When built around a reference sphere, each row
// remembers the ball it was derived from; rows from the intersection family
// form the "plus" part and rows from the union family the "minus" part.
struct HPolyhedron {
    Eigen::Index dim = 0;
    std::vector<HalfSpace> rows;
    std::vector<RowSource> provenance;
    std::vector<Ball> sources;
    std::optional<Ball> reference;

    std::size_t size() const { return rows.size(); }

    double max_violation(const Vector& x) const {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& h : rows) worst = std::max(worst, h.eval(x));
        return worst;
    }

    bool contains(const Vector& x, double slack) const {
        return rows.empty() || max_violation(x) <= slack;
    }

    HPolyhedron restricted_to(RowFamily family) const {
        HPolyhedron out;
        out.dim = dim;
        out.reference = reference;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (provenance.empty() || provenance[k].family != family) continue;
            out.rows.push_back(rows[k]);
            out.provenance.push_back(provenance[k]);
            if (!sources.empty()) out.sources.push_back(sources[k]);
        }
        return out;
    }

    HPolyhedron plus() const { return restricted_to(RowFamily::Lambda); }
    HPolyhedron minus() const { return restricted_to(RowFamily::V); }

    static HPolyhedron from_rows(Eigen::Index dim, std::vector<HalfSpace> rows) {
        HPolyhedron p;
        p.dim = dim;
        p.rows = std::move(rows);
        return p;
    }
};

inline ChebyshevBall chebyshev_center(const HPolyhedron& poly, const Tolerances& tol = {}) {
    return chebyshev_center(poly.rows, poly.dim, tol);
}

// Voronoi-like polyhedron around `ref`: one row for every sphere crossing the
// reference sphere. Intersection-family rows keep the side containing
// B_i \ ref, union-family rows keep the side containing ref \ B_k. Balls
// that contain, are contained in, or miss the reference contribute nothing.
// `skip_v` excludes the reference itself when it is drawn from `vballs`.
inline HPolyhedron assemble_polyhedron(const Ball& ref, const std::vector<Ball>& lambda,
                                       const std::vector<Ball>& vballs,
                                       std::optional<std::size_t> skip_v,
                                       const std::vector<bool>* active_v,
                                       const Tolerances& tol) {
    HPolyhedron poly;
    poly.dim = ref.dim();
    poly.reference = ref;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        const PairRelation rel = classify_pair(ref, lambda[i], tol);
        if (rel == PairRelation::Tangent)
            throw DegenerateInput("reference sphere is tangent to lambda[" + std::to_string(i) + "]",
                                  DegenerateInput::Family::LambdaV, i, 0);
        if (rel != PairRelation::CrossingSpheres) continue;
        poly.rows.push_back(hyperplane(ref, lambda[i], Orientation::KeepOtherSide, tol));
        poly.provenance.push_back({RowFamily::Lambda, i});
        poly.sources.push_back(lambda[i]);
    }
    for (std::size_t k = 0; k < vballs.size(); ++k) {
        if (skip_v && *skip_v == k) continue;
        if (active_v && !(*active_v)[k]) continue;
        const PairRelation rel = classify_pair(ref, vballs[k], tol);
        if (rel == PairRelation::Tangent)
            throw DegenerateInput("reference sphere is tangent to v[" + std::to_string(k) + "]",
                                  DegenerateInput::Family::VV, k, 0);
        if (rel != PairRelation::CrossingSpheres) continue;
        poly.rows.push_back(hyperplane(ref, vballs[k], Orientation::KeepRefSide, tol));
        poly.provenance.push_back({RowFamily::V, k});
        poly.sources.push_back(vballs[k]);
    }
    return poly;
}

inline HPolyhedron build_polyhedron(const BallSystem& system, std::size_t ref_index,
                                    const Tolerances& tol = {},
                                    const std::vector<bool>* active_v = nullptr) {
    if (ref_index >= system.q()) throw InvalidInput("build_polyhedron: reference index out of range");
    return assemble_polyhedron(system.v[ref_index], system.lambda, system.v, ref_index, active_v, tol);
}

struct VRepresentation {
    std::vector<Vector> vertices;
    std::vector<Vector> rays; // unit length
    bool pointed = true;      // false when a lineality space was found
};

namespace detail {

class RowSet {
public:
    explicit RowSet(std::size_t n = 0) : words_((n + 63) / 64, 0) {}

    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }

    RowSet operator&(const RowSet& o) const {
        RowSet r = *this;
        for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
        return r;
    }

    bool subset_of(const RowSet& o) const {
        for (std::size_t k = 0; k < words_.size(); ++k)
            if ((words_[k] & ~o.words_[k]) != 0) return false;
        return true;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }

private:
    std::vector<std::uint64_t> words_;
};

struct DdRay {
    Vector y;
    RowSet zeros;
};

// Order of insertion: increasing angle between each normal and the mean normal.
inline std::vector<std::size_t> insertion_order(const std::vector<HalfSpace>& rows) {
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (rows.empty()) return order;
    Vector mean = Vector::Zero(rows.front().normal.size());
    for (const auto& h : rows) mean += h.normal;
    const double norm = mean.norm();
    if (norm < 1e-12) return order;
    mean /= norm;
    std::vector<double> angle(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k)
        angle[k] = std::acos(std::clamp(rows[k].normal.dot(mean) / rows[k].normal.norm(), -1.0, 1.0));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });
    return order;
}

inline void push_unique(std::vector<Vector>& out, const Vector& v, double tol) {
    for (const auto& w : out)
        if ((w - v).norm() <= tol * (1.0 + v.norm())) return;
    out.push_back(v);
}

} // namespace detail

// Vertices and extreme rays of a nonempty polyhedron by the double
// description method on the homogenized cone {(x, t) : a.x - b t <= 0, t >= 0}.
inline VRepresentation enumerate(const HPolyhedron& poly, const Tolerances& tol = {}) {
    const Eigen::Index n = poly.dim;
    const Eigen::Index D = n + 1;
    const auto m = static_cast<Eigen::Index>(poly.rows.size()) + 1;

    // Homogenized rows: t >= 0 first, then the polyhedron rows in insertion order.
    Matrix M(m, D);
    M.row(0).setZero();
    M(0, n) = -1.0;
    const auto order = detail::insertion_order(poly.rows);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& h = poly.rows[order[k]];
        const auto r = static_cast<Eigen::Index>(k) + 1;
        M.block(r, 0, 1, n) = h.normal.transpose();
        M(r, n) = -h.offset;
        M.row(r) /= M.row(r).norm();
    }

    // Initial simplicial cone from rows picked by largest residual against
    // the span of those already chosen (pivoted Gram-Schmidt).
    std::vector<Eigen::Index> basis_rows;
    {
        Matrix residual = M;
        std::vector<bool> used(static_cast<std::size_t>(m), false);
        while (static_cast<Eigen::Index>(basis_rows.size()) < D) {
            Eigen::Index best = -1;
            double best_norm = 1e3 * tol.pivot;
            for (Eigen::Index i = 0; i < m; ++i) {
                if (used[static_cast<std::size_t>(i)]) continue;
                const double r = residual.row(i).norm();
                if (r > best_norm) {
                    best_norm = r;
                    best = i;
                }
            }
            if (best < 0) break;
            used[static_cast<std::size_t>(best)] = true;
            basis_rows.push_back(best);
            const Vector q = residual.row(best).transpose() / best_norm;
            residual -= (residual * q) * q.transpose();
        }
    }
    const auto rank = static_cast<Eigen::Index>(basis_rows.size());

    Matrix M0(rank, D);
    for (Eigen::Index k = 0; k < rank; ++k) M0.row(k) = M.row(basis_rows[static_cast<std::size_t>(k)]);
    const Eigen::JacobiSVD<Matrix> svd(M0);
    if (rank == 0 || svd.singularValues()(rank - 1) < 1e3 * tol.pivot)
        throw NumericallyDegenerate("double description: ill-conditioned initial basis");
    const Matrix gram = M0 * M0.transpose();
    const Eigen::FullPivLU<Matrix> gram_lu(gram);
    const Matrix init = -M0.transpose() * gram_lu.inverse(); // columns y_k with M0 y_k = -e_k

    std::vector<bool> processed(static_cast<std::size_t>(m), false);
    for (auto i : basis_rows) processed[static_cast<std::size_t>(i)] = true;

    std::vector<detail::DdRay> rays;
    for (Eigen::Index k = 0; k < rank; ++k) {
        Vector y = init.col(k).normalized();
        detail::RowSet z(static_cast<std::size_t>(m));
        for (Eigen::Index l = 0; l < rank; ++l)
            if (l != k) z.set(static_cast<std::size_t>(basis_rows[static_cast<std::size_t>(l)]));
        rays.push_back({std::move(y), std::move(z)});
    }

    for (Eigen::Index i = 0; i < m; ++i) {
        if (processed[static_cast<std::size_t>(i)]) continue;
        const Vector g = M.row(i).transpose();
        std::vector<std::size_t> pos, neg, zer;
        std::vector<double> val(rays.size());
        for (std::size_t k = 0; k < rays.size(); ++k) {
            val[k] = g.dot(rays[k].y);
            if (val[k] > 1e-9) pos.push_back(k);
            else if (val[k] < -1e-9) neg.push_back(k);
            else zer.push_back(k);
        }
        processed[static_cast<std::size_t>(i)] = true;
        if (pos.empty()) {
            for (auto k : zer) rays[k].zeros.set(static_cast<std::size_t>(i));
            continue;
        }

        std::vector<detail::DdRay> next;
        for (auto k : neg) next.push_back(rays[k]);
        for (auto k : zer) {
            next.push_back(rays[k]);
            next.back().zeros.set(static_cast<std::size_t>(i));
        }
        for (auto a : pos) {
            for (auto b : neg) {
                const detail::RowSet common = rays[a].zeros & rays[b].zeros;
                if (rank >= 2 && common.count() + 2 < static_cast<std::size_t>(rank)) continue;
                bool adjacent = true;
                for (std::size_t w = 0; w < rays.size() && adjacent; ++w) {
                    if (w == a || w == b) continue;
                    if (common.subset_of(rays[w].zeros)) adjacent = false;
                }
                if (!adjacent) continue;
                Vector y = val[a] * rays[b].y - val[b] * rays[a].y;
                const double norm = y.norm();
                if (norm < tol.pivot * (val[a] - val[b]))
                    throw NumericallyDegenerate("double description: vanishing combined ray");
                y /= norm;
                detail::RowSet z = common;
                z.set(static_cast<std::size_t>(i));
                next.push_back({std::move(y), std::move(z)});
            }
        }
        rays = std::move(next);
    }

    VRepresentation out;
    out.pointed = rank == D;
    // Generators with t > 0 exist iff the polyhedron is nonempty; otherwise
    // the t = 0 directions recede from nothing.
    const bool nonempty =
        std::any_of(rays.begin(), rays.end(), [&](const detail::DdRay& r) { return r.y[n] > 1e-9; });
    if (!nonempty) return out;
    for (const auto& r : rays) {
        const double t = r.y[n];
        if (t > 1e-9) {
            if (out.pointed) detail::push_unique(out.vertices, Vector(r.y.head(n) / t), tol.active);
        } else {
            const Vector dir = r.y.head(n);
            if (dir.norm() > 1e-12) detail::push_unique(out.rays, dir.normalized(), tol.active);
        }
    }
    if (!out.pointed) {
        Eigen::FullPivLU<Matrix> lu(M);
        lu.setThreshold(1e-10);
        const Matrix kernel = lu.kernel();
        for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
            const Vector dir = kernel.col(c).head(n);
            if (dir.norm() < 1e-12) continue;
            detail::push_unique(out.rays, dir.normalized(), tol.active);
            detail::push_unique(out.rays, Vector(-dir.normalized()), tol.active);
        }
    }
    return out;
}

enum class UnboundedReason { None, RadiusCondition, FewRows, Separable, DoubleDescription };

inline const char* to_string(UnboundedReason r) {
    switch (r) {
    case UnboundedReason::None: return "bounded";
    case UnboundedReason::RadiusCondition: return "radius-condition";
    case UnboundedReason::FewRows: return "few-rows";
    case UnboundedReason::Separable: return "separable";
    case UnboundedReason::DoubleDescription: return "double-description";
    }
    return "?";
}

struct UnboundedEvidence {
    bool unbounded = false;
    UnboundedReason reason = UnboundedReason::None;
    std::optional<Vector> ray;
    std::optional<VRepresentation> vrep; // filled when enumeration ran
};

inline bool is_recession_ray(const HPolyhedron& poly, const Vector& r, double slack) {
    for (const auto& h : poly.rows)
        if (h.normal.dot(r) > slack) return false;
    return true;
}

// Every row's source ball satisfies R_i^2 < R^2 + |c - c_i|^2 (intersection
// family) or R_k^2 > R^2 + |c - c_k|^2 (union family); the reference center
// then violates every row and any feasible point escapes away from it.
inline std::optional<Vector> radius_shortcut(const HPolyhedron& poly, const Vector& feasible) {
    if (!poly.reference || poly.rows.empty() || poly.sources.size() != poly.rows.size()) return std::nullopt;
    const Ball& ref = *poly.reference;
    for (std::size_t k = 0; k < poly.rows.size(); ++k) {
        const Ball& s = poly.sources[k];
        const double lift = ref.radius * ref.radius + (ref.center - s.center).squaredNorm();
        const double r2 = s.radius * s.radius;
        const bool ok = poly.provenance[k].family == RowFamily::Lambda ? r2 < lift : r2 > lift;
        if (!ok) return std::nullopt;
    }
    const Vector dir = feasible - ref.center;
    if (dir.norm() == 0.0) return std::nullopt;
    return Vector(dir.normalized());
}

// At most `dim` rows: a kernel direction, or A r = -1 when A is square and regular.
inline std::optional<Vector> few_rows_shortcut(const HPolyhedron& poly) {
    const auto m = static_cast<Eigen::Index>(poly.rows.size());
    const Eigen::Index n = poly.dim;
    if (m > n) return std::nullopt;
    if (m == 0) {
        Vector r = Vector::Zero(n);
        r[0] = 1.0;
        return r;
    }
    Matrix A(m, n);
    for (Eigen::Index i = 0; i < m; ++i) A.row(i) = poly.rows[static_cast<std::size_t>(i)].normal.transpose();
    Eigen::FullPivLU<Matrix> lu(A);
    lu.setThreshold(1e-10);
    if (lu.rank() < n) {
        const Matrix ker = lu.kernel();
        return Vector(ker.col(0).normalized());
    }
    const Vector r = lu.solve(Vector::Constant(m, -1.0));
    return Vector(r.normalized());
}

// Strict recession direction from the linear separability of the centers.
inline std::optional<Vector> separability_shortcut(const HPolyhedron& poly) {
    if (!poly.reference || poly.sources.size() != poly.rows.size()) return std::nullopt;
    std::vector<Ball> lam, vb;
    for (std::size_t k = 0; k < poly.rows.size(); ++k)
        (poly.provenance[k].family == RowFamily::Lambda ? lam : vb).push_back(poly.sources[k]);
    const auto d = separating_direction(*poly.reference, lam, vb);
    if (!d || d->norm() == 0.0) return std::nullopt;
    return Vector(-d->normalized());
}

// Cheap sufficient conditions first, enumeration last.
inline UnboundedEvidence is_unbounded(const HPolyhedron& poly, const Vector& feasible,
                                      const Tolerances& tol = {}, bool use_shortcuts = true) {
    UnboundedEvidence ev;
    auto accept = [&](std::optional<Vector> r, UnboundedReason why) {
        if (!r || !is_recession_ray(poly, *r, tol.active)) return false;
        ev.unbounded = true;
        ev.reason = why;
        ev.ray = std::move(r);
        return true;
    };
    if (use_shortcuts) {
        if (accept(radius_shortcut(poly, feasible), UnboundedReason::RadiusCondition)) return ev;
        if (accept(few_rows_shortcut(poly), UnboundedReason::FewRows)) return ev;
        if (accept(separability_shortcut(poly), UnboundedReason::Separable)) return ev;
    }
    ev.vrep = enumerate(poly, tol);
    if (!ev.vrep->rays.empty()) {
        ev.unbounded = true;
        ev.reason = UnboundedReason::DoubleDescription;
        ev.ray = ev.vrep->rays.front();
    }
    return ev;
}

} // namespace ballcover
