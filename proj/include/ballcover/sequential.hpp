#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ballcover/decision.hpp"
#include "ballcover/errors.hpp"
#include "ballcover/geometry.hpp"
#include "ballcover/polyhedron.hpp"

namespace ballcover {

// Running (Lambda, V) with what is known about I \ U. Exactly one of
// `covered` or `witness` is set when the status is known; neither means the
// last update could not be settled incrementally.
struct SequentialState {
    BallSystem system;
    std::optional<Vector> witness;
    bool covered = false;
    bool connected_ok = false;

    bool known() const { return covered || witness.has_value(); }

    static SequentialState from_system(BallSystem system, const DecisionConfig& cfg = {});
    static SequentialState from_report(BallSystem system, const DecisionReport& report);
};

enum class SequentialVerdict { StillUncovered, NowCovered, BallRedundant, Unknown };

inline const char* to_string(SequentialVerdict v) {
    switch (v) {
    case SequentialVerdict::StillUncovered: return "StillUncovered";
    case SequentialVerdict::NowCovered: return "NowCovered";
    case SequentialVerdict::BallRedundant: return "BallRedundant";
    case SequentialVerdict::Unknown: return "Unknown";
    }
    return "?";
}

inline SequentialState SequentialState::from_report(BallSystem system, const DecisionReport& report) {
    SequentialState st;
    st.system = std::move(system);
    st.covered = report.covered;
    if (!report.covered && report.witness_verified) st.witness = report.witness;
    return st;
}

inline SequentialState SequentialState::from_system(BallSystem system, const DecisionConfig& cfg) {
    if (system.v.empty()) {
        SequentialState st;
        st.system = std::move(system);
        const IntersectionPoint ip = interior_point_of_intersection(st.system.lambda, cfg.tol);
        if (ip.status == IntersectionStatus::Empty) st.covered = true;
        else if (ip.status == IntersectionStatus::Interior && verify_witness(st.system, ip.point, cfg.tol))
            st.witness = ip.point;
        return st;
    }
    const DecisionReport report = decide_instance(system.lambda, system.v, cfg);
    return from_report(std::move(system), report);
}

// Radius inequalities with the new ball as reference, over every ball of the
// state: R_i^2 < R^2 + |c - c_i|^2 for intersection balls and
// R_k^2 > R^2 + |c - c_k|^2 for union balls.
inline bool verify_connectedness_conditions(const SequentialState& state, const Ball& ball) {
    const double r2 = ball.radius * ball.radius;
    for (const auto& b : state.system.lambda)
        if (!(b.radius * b.radius < r2 + (ball.center - b.center).squaredNorm())) return false;
    for (const auto& b : state.system.v)
        if (!(b.radius * b.radius > r2 + (ball.center - b.center).squaredNorm())) return false;
    return true;
}

struct SequentialStep {
    SequentialState state;
    SequentialVerdict verdict = SequentialVerdict::Unknown;
    std::optional<SubproblemCertificate> certificate;
};

namespace detail {

inline SequentialStep settle(SequentialState st, SequentialVerdict verdict,
                             std::optional<SubproblemCertificate> cert = std::nullopt) {
    if (verdict == SequentialVerdict::NowCovered) {
        st.covered = true;
        st.witness.reset();
    } else if (verdict == SequentialVerdict::Unknown) {
        st.covered = false;
        st.witness.reset();
    }
    return SequentialStep{std::move(st), verdict, std::move(cert)};
}

} // namespace detail

// Adds an intersection ball and decides whether the shrunken intersection is
// still uncovered, using a polyhedron centered on the new ball.
inline SequentialStep add_ball(const SequentialState& state, const Ball& ball, const DecisionConfig& cfg = {}) {
    if (ball.dim() != state.system.dim) throw ArityMismatch("add_ball: dimension mismatch");
    if (!(ball.radius > 0.0) || !ball.center.allFinite()) throw InvalidInput("add_ball: invalid ball");

    SequentialState next = state;
    next.connected_ok = verify_connectedness_conditions(state, ball);

    // Pairwise relations first; they may settle the step outright.
    std::vector<Ball> lambda;
    for (std::size_t i = 0; i < state.system.lambda.size(); ++i) {
        const Ball& b = state.system.lambda[i];
        switch (classify_pair(b, ball, cfg.tol)) {
        case PairRelation::Tangent:
            throw DegenerateInput("new ball is tangent to lambda[" + std::to_string(i) + "]",
                                  DegenerateInput::Family::LambdaLambda, i, state.system.lambda.size());
        case PairRelation::Disjoint:
            next.system.lambda.push_back(ball);
            return detail::settle(std::move(next), SequentialVerdict::NowCovered);
        case PairRelation::FirstInsideSecond:
            return detail::settle(state, SequentialVerdict::BallRedundant);
        case PairRelation::SecondInsideFirst:
            break; // the old ball no longer constrains anything
        case PairRelation::CrossingSpheres:
            lambda.push_back(b);
        }
    }
    std::vector<Ball> vballs;
    for (std::size_t k = 0; k < state.system.v.size(); ++k) {
        const Ball& b = state.system.v[k];
        switch (classify_pair(ball, b, cfg.tol)) {
        case PairRelation::Tangent:
            throw DegenerateInput("new ball is tangent to v[" + std::to_string(k) + "]",
                                  DegenerateInput::Family::LambdaV, state.system.lambda.size(), k);
        case PairRelation::FirstInsideSecond:
            next.system.lambda.push_back(ball);
            return detail::settle(std::move(next), SequentialVerdict::NowCovered);
        case PairRelation::Disjoint:
            break;
        default:
            vballs.push_back(b);
        }
    }

    next.system.lambda = lambda;
    next.system.lambda.push_back(ball);
    next.system.v = vballs;
    next.system.lambda_index.clear();
    next.system.v_index.clear();
    for (std::size_t i = 0; i < next.system.lambda.size(); ++i) next.system.lambda_index.push_back(i);
    for (std::size_t k = 0; k < next.system.v.size(); ++k) next.system.v_index.push_back(k);

    if (state.covered) return detail::settle(std::move(next), SequentialVerdict::NowCovered);

    if (next.witness && verify_witness(next.system, *next.witness, cfg.tol))
        return detail::settle(std::move(next), SequentialVerdict::StillUncovered);

    const HPolyhedron poly = assemble_polyhedron(ball, lambda, vballs, std::nullopt, nullptr, cfg.tol);
    std::map<std::string, double> timings;
    SubproblemCertificate cert;
    try {
        cert = analyze_subproblem(ball, poly, next.system.lambda.size() - 1, cfg, timings);
    } catch (const DegenerateDecision&) {
        return detail::settle(std::move(next), SequentialVerdict::Unknown);
    } catch (const DegenerateInput&) {
        return detail::settle(std::move(next), SequentialVerdict::Unknown);
    }

    switch (cert.kind) {
    case CertificateCase::InfeasiblePlus:
        return detail::settle(state, SequentialVerdict::BallRedundant, cert);
    case CertificateCase::InfeasibleMinus:
        return detail::settle(std::move(next), SequentialVerdict::NowCovered, cert);
    case CertificateCase::VolumeZero:
        return detail::settle(std::move(next), SequentialVerdict::Unknown, cert);
    case CertificateCase::CaseA:
        try {
            const BallSystem& sys = next.system;
            next.witness = witness_near_sphere(
                ball, cert, StepSide::Inward, [&](const Vector& x) { return verify_witness(sys, x, cfg.tol); },
                cfg.tol);
            return detail::settle(std::move(next), SequentialVerdict::StillUncovered, cert);
        } catch (const WitnessExtractionFailed&) {
            return detail::settle(std::move(next), SequentialVerdict::Unknown, cert);
        }
    case CertificateCase::CaseB_MinOutside:
    case CertificateCase::CaseB_MaxInside:
        break;
    }

    // The new sphere misses I \ U. A stored witness inside the new ball was
    // accepted above; one outside proves coverage only if I \ U is connected.
    if (state.witness && next.connected_ok) return detail::settle(std::move(next), SequentialVerdict::NowCovered, cert);
    return detail::settle(std::move(next), SequentialVerdict::Unknown, cert);
}

// Incremental step with a batch decision whenever the step stays open.
inline SequentialStep add_ball_or_decide(const SequentialState& state, const Ball& ball,
                                         const DecisionConfig& cfg = {}) {
    SequentialStep step = add_ball(state, ball, cfg);
    if (step.verdict != SequentialVerdict::Unknown) return step;
    const bool connected = step.state.connected_ok;
    step.state = SequentialState::from_system(step.state.system, cfg);
    step.state.connected_ok = connected;
    return step;
}

} // namespace ballcover
