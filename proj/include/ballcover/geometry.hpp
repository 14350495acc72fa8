#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ballcover/errors.hpp"
#include "ballcover/tolerance.hpp"

namespace ballcover {

// A Euclidean ball. Whether it is open (intersection side) or closed (union
// side) is decided by the list that holds it, not by the ball itself.
struct Ball {
    Vector center;
    double radius = 0.0;

    Eigen::Index dim() const { return center.size(); }
};

inline Ball make_ball(std::initializer_list<double> center, double radius) {
    Ball b;
    b.center = Vector(static_cast<Eigen::Index>(center.size()));
    Eigen::Index k = 0;
    for (double v : center) b.center[k++] = v;
    b.radius = radius;
    return b;
}

// ||x - c||^2 - R^2: negative inside, zero on the sphere, positive outside.
inline double power(const Ball& b, const Vector& x) {
    return (x - b.center).squaredNorm() - b.radius * b.radius;
}

// Membership margin attached to one ball.
inline double membership_tau(const Ball& b, const Tolerances& tol) {
    return tol.tau(1.0 + b.radius * b.radius);
}

inline bool strictly_inside(const Ball& b, const Vector& x, const Tolerances& tol) {
    return power(b, x) < -membership_tau(b, tol);
}

inline bool strictly_outside(const Ball& b, const Vector& x, const Tolerances& tol) {
    return power(b, x) > membership_tau(b, tol);
}

// Validated pair (Lambda, V). Lambda balls are open and intersected, V balls
// are closed and united. Index maps point back into the caller's original
// lists so that reports can name the input balls.
struct BallSystem {
    Eigen::Index dim = 0;
    std::vector<Ball> lambda;
    std::vector<Ball> v;
    std::vector<std::size_t> lambda_index;
    std::vector<std::size_t> v_index;

    std::size_t p() const { return lambda.size(); }
    std::size_t q() const { return v.size(); }

    // Checks dimensions, radii and pairwise distinct centers. Does not apply
    // any of the preprocessing reductions.
    static BallSystem make(std::vector<Ball> lambda, std::vector<Ball> v);
};

namespace detail {

inline std::string describe(const char* family, std::size_t i) {
    std::ostringstream os;
    os << family << '[' << i << ']';
    return os.str();
}

inline void validate_ball(const Ball& b, Eigen::Index dim, const std::string& name) {
    if (b.dim() != dim) {
        std::ostringstream os;
        os << name << ": dimension " << b.dim() << " does not match " << dim;
        throw InvalidInput(os.str());
    }
    if (!std::isfinite(b.radius) || b.radius <= 0.0) {
        std::ostringstream os;
        os << name << ".radius must be positive and finite (got " << b.radius << ")";
        throw InvalidInput(os.str());
    }
    if (!b.center.allFinite()) throw InvalidInput(name + ".center has non-finite coordinates");
}

} // namespace detail

inline BallSystem BallSystem::make(std::vector<Ball> lambda, std::vector<Ball> v) {
    if (lambda.empty()) throw InvalidInput("lambda must contain at least one ball");
    BallSystem s;
    s.dim = lambda.front().dim();
    if (s.dim < 2) throw InvalidInput("ambient dimension must be at least 2");
    for (std::size_t i = 0; i < lambda.size(); ++i)
        detail::validate_ball(lambda[i], s.dim, detail::describe("lambda", i));
    for (std::size_t j = 0; j < v.size(); ++j)
        detail::validate_ball(v[j], s.dim, detail::describe("v", j));

    std::vector<const Ball*> all;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        all.push_back(&lambda[i]);
        names.push_back(detail::describe("lambda", i));
    }
    for (std::size_t j = 0; j < v.size(); ++j) {
        all.push_back(&v[j]);
        names.push_back(detail::describe("v", j));
    }
    for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = a + 1; b < all.size(); ++b)
            if (all[a]->center == all[b]->center)
                throw InvalidInput("coincident centers: " + names[a] + " and " + names[b]);

    s.lambda = std::move(lambda);
    s.v = std::move(v);
    for (std::size_t i = 0; i < s.lambda.size(); ++i) s.lambda_index.push_back(i);
    for (std::size_t j = 0; j < s.v.size(); ++j) s.v_index.push_back(j);
    return s;
}

// Every point of I \ U strictly, with the membership margin of each ball.
inline bool verify_witness(const BallSystem& s, const Vector& x, const Tolerances& tol) {
    if (x.size() != s.dim || !x.allFinite()) return false;
    for (const auto& b : s.lambda)
        if (!strictly_inside(b, x, tol)) return false;
    for (const auto& b : s.v)
        if (!strictly_outside(b, x, tol)) return false;
    return true;
}

// Exact float comparison, no margin.
inline bool in_difference_exact(const BallSystem& s, const Vector& x) {
    for (const auto& b : s.lambda)
        if (!(power(b, x) < 0.0)) return false;
    for (const auto& b : s.v)
        if (!(power(b, x) > 0.0)) return false;
    return true;
}

enum class PairRelation { CrossingSpheres, FirstInsideSecond, SecondInsideFirst, Disjoint, Tangent };

inline const char* to_string(PairRelation r) {
    switch (r) {
    case PairRelation::CrossingSpheres: return "CrossingSpheres";
    case PairRelation::FirstInsideSecond: return "FirstInsideSecond";
    case PairRelation::SecondInsideFirst: return "SecondInsideFirst";
    case PairRelation::Disjoint: return "Disjoint";
    case PairRelation::Tangent: return "Tangent";
    }
    return "?";
}

inline double pair_tolerance(const Ball& a, const Ball& b, const Tolerances& tol) {
    return tol.tau(a.radius + b.radius);
}

// Position of two spheres relative to each other. `tol` is an absolute
// distance band: anything within it of tangency or containment is Tangent.
inline PairRelation classify_pair(const Ball& a, const Ball& b, double tol) {
    if (a.dim() != b.dim()) throw InvalidInput("classify_pair: dimension mismatch");
    const double d = (a.center - b.center).norm();
    if (d == 0.0) throw InvalidInput("classify_pair: coincident centers");
    const double ra = a.radius;
    const double rb = b.radius;
    if (d > ra + rb + tol) return PairRelation::Disjoint;
    if (d + ra <= rb - tol) return PairRelation::FirstInsideSecond;
    if (d + rb <= ra - tol) return PairRelation::SecondInsideFirst;
    if (std::abs(ra - rb) + tol < d && d < ra + rb - tol) return PairRelation::CrossingSpheres;
    return PairRelation::Tangent;
}

inline PairRelation classify_pair(const Ball& a, const Ball& b, const Tolerances& tol) {
    return classify_pair(a, b, pair_tolerance(a, b, tol));
}

// Closed half-space {x : normal . x <= offset} with a unit normal.
struct HalfSpace {
    Vector normal;
    double offset = 0.0;

    double eval(const Vector& x) const { return normal.dot(x) - offset; }

    static HalfSpace normalized(Vector a, double b) {
        const double norm = a.norm();
        if (!(norm > 1e-12)) throw InvalidInput("half-space normal is (numerically) zero");
        return HalfSpace{a / norm, b / norm};
    }
};

enum class Orientation {
    KeepOtherSide, // {h <= 0}: contains other \ ref
    KeepRefSide    // {-h <= 0}: contains ref \ other
};

// Half-space bounded by the radical hyperplane of two crossing spheres.
// With f_b(x) = ||x - c_b||^2 - R_b^2 the hyperplane is h = f_other - f_ref = 0,
// i.e. 2 (c_ref - c_other) . x <= |c_ref|^2 - |c_other|^2 - R_ref^2 + R_other^2.
inline HalfSpace hyperplane(const Ball& ref, const Ball& other, Orientation orientation,
                            const Tolerances& tol = {}) {
    if (classify_pair(ref, other, tol) != PairRelation::CrossingSpheres)
        throw NonCrossingSpheres("hyperplane: spheres do not cross");
    const Vector diff = ref.center - other.center;
    const Vector sum = ref.center + other.center;
    Vector a = 2.0 * diff;
    double b = diff.dot(sum) - ref.radius * ref.radius + other.radius * other.radius;
    if (orientation == Orientation::KeepRefSide) {
        a = -a;
        b = -b;
    }
    return HalfSpace::normalized(std::move(a), b);
}

} // namespace ballcover
