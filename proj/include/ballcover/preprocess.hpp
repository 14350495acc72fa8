#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ballcover/errors.hpp"
#include "ballcover/geometry.hpp"
#include "ballcover/qp.hpp"

namespace ballcover {

// Outcome decided before any polyhedron is built.
struct TrivialVerdict {
    bool covered = true;
    std::string reason;
    std::optional<Vector> witness; // set when covered == false
};

using PreprocessResult = std::variant<BallSystem, TrivialVerdict>;

// Enforces the pairwise nondegeneracy conditions by repair or early decision:
//   disjoint intersection balls        -> covered (empty intersection)
//   nested intersection balls          -> drop the larger one
//   intersection ball inside union ball -> covered
//   union ball missing an intersection ball -> drop it
//   nested union balls                 -> drop the smaller one
// and, when no union ball survives, answers with an interior point.
inline PreprocessResult preprocess(std::vector<Ball> lambda, std::vector<Ball> v, const Tolerances& tol = {}) {
    const BallSystem input = BallSystem::make(std::move(lambda), std::move(v));
    const std::size_t p = input.p();
    const std::size_t q = input.q();
    using Family = DegenerateInput::Family;

    auto tangent = [](const char* what, Family f, std::size_t a, std::size_t b) {
        return DegenerateInput(std::string(what) + " pair (" + std::to_string(a) + ", " + std::to_string(b) +
                                   ") is tangent within tolerance",
                               f, a, b);
    };

    // Decisive relations first: they settle the answer regardless of any
    // tangency elsewhere.
    std::vector<std::vector<PairRelation>> ll(p, std::vector<PairRelation>(p, PairRelation::CrossingSpheres));
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a + 1; b < p; ++b) {
            ll[a][b] = classify_pair(input.lambda[a], input.lambda[b], tol);
            if (ll[a][b] == PairRelation::Disjoint)
                return TrivialVerdict{true, "I empty: lambda[" + std::to_string(a) + "] and lambda[" +
                                                std::to_string(b) + "] are disjoint",
                                      std::nullopt};
        }
    std::vector<std::vector<PairRelation>> lv(p, std::vector<PairRelation>(q, PairRelation::CrossingSpheres));
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t c = 0; c < q; ++c) {
            lv[a][c] = classify_pair(input.lambda[a], input.v[c], tol);
            if (lv[a][c] == PairRelation::FirstInsideSecond)
                return TrivialVerdict{true, "lambda[" + std::to_string(a) + "] lies inside v[" +
                                                std::to_string(c) + "]",
                                      std::nullopt};
        }

    std::vector<bool> keep_l(p, true);
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a + 1; b < p; ++b) {
            if (ll[a][b] == PairRelation::FirstInsideSecond) keep_l[b] = false;
            else if (ll[a][b] == PairRelation::SecondInsideFirst) keep_l[a] = false;
        }
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a + 1; b < p; ++b)
            if (keep_l[a] && keep_l[b] && ll[a][b] == PairRelation::Tangent)
                throw tangent("lambda/lambda", Family::LambdaLambda, a, b);

    std::vector<bool> keep_v(q, true);
    for (std::size_t a = 0; a < p; ++a) {
        if (!keep_l[a]) continue;
        for (std::size_t c = 0; c < q; ++c)
            if (lv[a][c] == PairRelation::Disjoint) keep_v[c] = false;
    }
    for (std::size_t a = 0; a < p; ++a) {
        if (!keep_l[a]) continue;
        for (std::size_t c = 0; c < q; ++c)
            if (keep_v[c] && lv[a][c] == PairRelation::Tangent) throw tangent("lambda/v", Family::LambdaV, a, c);
    }

    std::vector<std::vector<PairRelation>> vv(q, std::vector<PairRelation>(q, PairRelation::CrossingSpheres));
    for (std::size_t c = 0; c < q; ++c)
        for (std::size_t d = c + 1; d < q; ++d) {
            if (!keep_v[c] || !keep_v[d]) continue;
            vv[c][d] = classify_pair(input.v[c], input.v[d], tol);
        }
    std::vector<bool> inner(q, false);
    for (std::size_t c = 0; c < q; ++c)
        for (std::size_t d = c + 1; d < q; ++d) {
            if (!keep_v[c] || !keep_v[d]) continue;
            if (vv[c][d] == PairRelation::FirstInsideSecond) inner[c] = true;
            else if (vv[c][d] == PairRelation::SecondInsideFirst) inner[d] = true;
        }
    for (std::size_t c = 0; c < q; ++c)
        if (inner[c]) keep_v[c] = false;
    for (std::size_t c = 0; c < q; ++c)
        for (std::size_t d = c + 1; d < q; ++d)
            if (keep_v[c] && keep_v[d] && vv[c][d] == PairRelation::Tangent)
                throw tangent("v/v", Family::VV, c, d);

    BallSystem out;
    out.dim = input.dim;
    for (std::size_t a = 0; a < p; ++a)
        if (keep_l[a]) {
            out.lambda.push_back(input.lambda[a]);
            out.lambda_index.push_back(a);
        }
    for (std::size_t c = 0; c < q; ++c)
        if (keep_v[c]) {
            out.v.push_back(input.v[c]);
            out.v_index.push_back(c);
        }

    if (out.v.empty()) {
        const IntersectionPoint ip = interior_point_of_intersection(out.lambda, tol);
        switch (ip.status) {
        case IntersectionStatus::Empty:
            return TrivialVerdict{true, "I empty: no common interior point", std::nullopt};
        case IntersectionStatus::Degenerate:
            throw DegenerateInput("intersection has a numerically empty interior");
        case IntersectionStatus::Interior:
            return TrivialVerdict{false, "no union ball meets the intersection", ip.point};
        }
    }
    return out;
}

} // namespace ballcover
