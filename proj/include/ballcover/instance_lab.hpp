#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "ballcover/errors.hpp"
#include "ballcover/geometry.hpp"
#include "ballcover/preprocess.hpp"
#include "ballcover/qp.hpp"

namespace ballcover {

struct GenConfig {
    Eigen::Index dim = 2;
    std::size_t p = 3;
    std::size_t q = 3;
    double sigma = 10.0;
    double epsilon = 5.0;
    std::uint64_t seed = 0;
    std::size_t max_retries = 1000;
};

struct OracleVerdict {
    std::optional<Vector> found_witness;
    std::size_t samples_used = 0;
    bool conclusive = false;
};

namespace detail {

inline Ball draw_ball(std::mt19937_64& rng, std::normal_distribution<double>& normal, Eigen::Index dim, double pad) {
    Ball b;
    b.center.resize(dim);
    for (Eigen::Index k = 0; k < dim; ++k) b.center[k] = normal(rng);
    b.radius = b.center.norm() + pad;
    return b;
}

// Balls whose every pair relation already satisfies the nondegeneracy
// conditions, so that preprocessing would change nothing.
inline bool accepted_as_is(const std::vector<Ball>& lambda, const std::vector<Ball>& v, const Tolerances& tol) {
    try {
        const PreprocessResult pre = preprocess(lambda, v, tol);
        const auto* sys = std::get_if<BallSystem>(&pre);
        return sys && sys->p() == lambda.size() && sys->q() == v.size();
    } catch (const Error&) {
        return false;
    }
}

} // namespace detail

// Centers ~ N(0, sigma^2 I); radii |c| + epsilon for intersection balls and
// |c| + 2 epsilon for union balls. Whole draws are repeated until nothing
// would be reduced or decided trivially.
inline BallSystem generate(const GenConfig& cfg, const Tolerances& tol = {}) {
    if (cfg.dim < 2) throw InvalidInput("generate: dim must be at least 2");
    if (cfg.p < 1 || cfg.q < 1) throw InvalidInput("generate: p and q must be positive");
    if (!(cfg.sigma > 0.0) || !(cfg.epsilon > 0.0)) throw InvalidInput("generate: sigma and epsilon must be positive");
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, cfg.sigma);
    for (std::size_t attempt = 0; attempt < cfg.max_retries; ++attempt) {
        std::vector<Ball> lambda, v;
        for (std::size_t i = 0; i < cfg.p; ++i) lambda.push_back(detail::draw_ball(rng, normal, cfg.dim, cfg.epsilon));
        for (std::size_t j = 0; j < cfg.q; ++j) v.push_back(detail::draw_ball(rng, normal, cfg.dim, 2.0 * cfg.epsilon));
        if (detail::accepted_as_is(lambda, v, tol)) return BallSystem::make(std::move(lambda), std::move(v));
    }
    throw RetriesExhausted("generate: no admissible system after " + std::to_string(cfg.max_retries) + " draws");
}

namespace detail {

// Open chord of a ball along the first axis through `point` (other
// coordinates fixed). Empty when the line misses the ball.
inline std::optional<std::pair<double, double>> chord(const Ball& b, const Vector& point) {
    double rest = 0.0;
    for (Eigen::Index k = 1; k < point.size(); ++k) rest += (point[k] - b.center[k]) * (point[k] - b.center[k]);
    const double h2 = b.radius * b.radius - rest;
    if (!(h2 > 0.0)) return std::nullopt;
    const double h = std::sqrt(h2);
    return std::make_pair(b.center[0] - h, b.center[0] + h);
}

} // namespace detail

// Scans the grid over the bounding box of the smallest intersection ball,
// line by line along the first axis. Chord intervals locate candidate gaps;
// each candidate is accepted only after a direct membership check.
inline OracleVerdict grid_oracle(const BallSystem& system, double step, const Tolerances& tol = {}) {
    const Eigen::Index n = system.dim;
    if (n > 3) throw InvalidInput("grid_oracle: dimension above 3");
    if (!(step > 0.0)) throw InvalidInput("grid_oracle: step must be positive");
    if (system.lambda.empty()) throw InvalidInput("grid_oracle: no intersection balls");
    const Ball& small = *std::min_element(system.lambda.begin(), system.lambda.end(),
                                          [](const Ball& a, const Ball& b) { return a.radius < b.radius; });
    const double per_axis = std::floor(2.0 * small.radius / step) + 1.0;
    if (std::pow(per_axis, static_cast<double>(n)) < 1000.0)
        throw StepTooCoarse("grid_oracle: fewer than 1000 grid points in the box");
    const auto m = static_cast<long long>(per_axis);
    const Vector base = small.center.array() - small.radius;

    OracleVerdict out;
    const long long lines = n == 2 ? m : m * m;
    Vector x(n);
    for (long long line = 0; line < lines; ++line) {
        x[1] = base[1] + static_cast<double>(line % m) * step;
        if (n == 3) x[2] = base[2] + static_cast<double>(line / m) * step;

        double lo = base[0] - step;
        double hi = base[0] + static_cast<double>(m) * step;
        bool empty = false;
        for (const auto& b : system.lambda) {
            const auto c = detail::chord(b, x);
            if (!c) {
                empty = true;
                break;
            }
            lo = std::max(lo, c->first);
            hi = std::min(hi, c->second);
        }
        if (empty || !(lo < hi)) continue;

        std::vector<std::pair<double, double>> blocked;
        for (const auto& b : system.v)
            if (const auto c = detail::chord(b, x)) blocked.push_back(*c);
        std::sort(blocked.begin(), blocked.end());

        // Free gaps of (lo, hi) minus the union chords.
        std::vector<std::pair<double, double>> gaps;
        double cursor = lo;
        for (const auto& [a, b] : blocked) {
            if (a > cursor) gaps.emplace_back(cursor, std::min(a, hi));
            cursor = std::max(cursor, b);
            if (cursor >= hi) break;
        }
        if (cursor < hi) gaps.emplace_back(cursor, hi);

        for (const auto& [a, b] : gaps) {
            if (!(a < b)) continue;
            const long long k0 = std::max(0LL, static_cast<long long>(std::floor((a - base[0]) / step)));
            const long long k1 = std::min(m - 1, static_cast<long long>(std::ceil((b - base[0]) / step)));
            for (long long k = k0; k <= k1; ++k) {
                x[0] = base[0] + static_cast<double>(k) * step;
                if (in_difference_exact(system, x) && verify_witness(system, x, tol)) {
                    out.found_witness = x;
                    out.samples_used = static_cast<std::size_t>(line * m + k + 1);
                    out.conclusive = true;
                    return out;
                }
            }
        }
    }
    out.samples_used = static_cast<std::size_t>(lines * m);
    return out;
}

// Hit-and-run walk in I from an interior point; each sample is tested
// against U.
inline OracleVerdict hit_and_run_oracle(const BallSystem& system, std::size_t samples, std::uint64_t seed,
                                        const Tolerances& tol = {}) {
    OracleVerdict out;
    if (samples == 0) return out;
    const IntersectionPoint ip = interior_point_of_intersection(system.lambda, tol);
    if (ip.status != IntersectionStatus::Interior)
        throw InvalidInput("hit_and_run_oracle: intersection has no interior point");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Vector x = ip.point;
    Vector u(system.dim);
    for (std::size_t s = 0; s < samples; ++s) {
        for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = normal(rng);
        u.normalize();
        double tmin = -std::numeric_limits<double>::infinity();
        double tmax = std::numeric_limits<double>::infinity();
        for (const auto& b : system.lambda) {
            const double half = u.dot(x - b.center);
            const double disc = half * half - power(b, x);
            if (!(disc > 0.0)) {
                tmin = tmax = 0.0;
                break;
            }
            const double r = std::sqrt(disc);
            tmin = std::max(tmin, -half - r);
            tmax = std::min(tmax, -half + r);
        }
        const Vector cand = x + (tmin + (tmax - tmin) * unit(rng)) * u;
        out.samples_used = s + 1;
        bool inside = true;
        for (const auto& b : system.lambda)
            if (!(power(b, cand) < 0.0)) inside = false;
        if (!inside) continue;
        x = cand;
        if (verify_witness(system, x, tol)) {
            out.found_witness = x;
            out.conclusive = true;
            return out;
        }
    }
    return out;
}

} // namespace ballcover
