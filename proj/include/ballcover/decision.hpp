#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ballcover/errors.hpp"
#include "ballcover/geometry.hpp"
#include "ballcover/lp.hpp"
#include "ballcover/polyhedron.hpp"
#include "ballcover/preprocess.hpp"
#include "ballcover/qp.hpp"

namespace ballcover {

enum class CertificateCase {
    CaseA,            // points of the polyhedron strictly inside and strictly outside the sphere
    CaseB_MinOutside, // no feasible point strictly inside
    CaseB_MaxInside,  // no feasible point strictly outside
    InfeasiblePlus,   // intersection-family rows alone are flat: I lies in the reference ball
    InfeasibleMinus,  // union-family rows alone are flat: the reference ball is redundant
    VolumeZero        // the polyhedron is flat or empty
};

inline const char* to_string(CertificateCase c) {
    switch (c) {
    case CertificateCase::CaseA: return "CaseA";
    case CertificateCase::CaseB_MinOutside: return "CaseB_MinOutside";
    case CertificateCase::CaseB_MaxInside: return "CaseB_MaxInside";
    case CertificateCase::InfeasiblePlus: return "InfeasiblePlus";
    case CertificateCase::InfeasibleMinus: return "InfeasibleMinus";
    case CertificateCase::VolumeZero: return "VolumeZero";
    }
    return "?";
}

struct SubproblemCertificate {
    std::size_t ref_index = 0;   // into the decided system's v list
    std::size_t input_index = 0; // into the caller's original v list
    CertificateCase kind = CertificateCase::VolumeZero;
    std::optional<Vector> x_minus;
    std::optional<Vector> x_plus;
    std::optional<Vector> ray;    // x_plus "at infinity"
    std::optional<Vector> anchor; // interior point of the polyhedron
    double min_value = std::numeric_limits<double>::quiet_NaN();
    double max_value = std::numeric_limits<double>::quiet_NaN();
    UnboundedReason unbounded_by = UnboundedReason::None;
    std::size_t rows = 0;
};

struct DecisionConfig {
    Tolerances tol;
    bool shortcuts = true;             // unboundedness shortcuts before enumeration
    bool stop_at_first_case_a = true;
    bool qp_early_exit = false;        // stop the min QP once an iterate is strictly inside
    bool concave_path = true;          // use the single-ball specialization when q == 1
};

struct DecisionReport {
    bool covered = true;
    std::optional<Vector> witness;
    bool witness_verified = false;
    std::optional<std::string> trivial_reason;
    std::vector<SubproblemCertificate> certificates;
    bool i_empty = false;
    std::map<std::string, double> timings_ms;
};

namespace detail {

class PhaseTimer {
public:
    PhaseTimer(std::map<std::string, double>& sink, std::string phase)
        : sink_(sink), phase_(std::move(phase)), start_(std::chrono::steady_clock::now()) {}
    PhaseTimer(const PhaseTimer&) = delete;
    PhaseTimer& operator=(const PhaseTimer&) = delete;
    ~PhaseTimer() {
        const auto d = std::chrono::steady_clock::now() - start_;
        sink_[phase_] += std::chrono::duration<double, std::milli>(d).count();
    }

private:
    std::map<std::string, double>& sink_;
    std::string phase_;
    std::chrono::steady_clock::time_point start_;
};

inline double decision_tau(const Ball& ref, const Tolerances& tol) { return tol.tau(1.0 + ref.radius * ref.radius); }

} // namespace detail

// Min/max analysis of ||x - c||^2 - R^2 over a polyhedron built around `ref`.
// Fills x_minus / x_plus / ray and classifies the subproblem.
inline SubproblemCertificate analyze_subproblem(const Ball& ref, const HPolyhedron& poly, std::size_t ref_index,
                                                const DecisionConfig& cfg,
                                                std::map<std::string, double>& timings) {
    SubproblemCertificate cert;
    cert.ref_index = ref_index;
    cert.rows = poly.size();
    const double tau = detail::decision_tau(ref, cfg.tol);

    ChebyshevBall cheb;
    {
        detail::PhaseTimer t(timings, "chebyshev");
        cheb = chebyshev_center(poly, cfg.tol);
        if (!cheb.full_dimensional()) {
            if (!chebyshev_center(poly.plus(), cfg.tol).full_dimensional())
                cert.kind = CertificateCase::InfeasiblePlus;
            else if (!chebyshev_center(poly.minus(), cfg.tol).full_dimensional())
                cert.kind = CertificateCase::InfeasibleMinus;
            else
                cert.kind = CertificateCase::VolumeZero;
            return cert;
        }
    }
    cert.anchor = cheb.center;

    {
        detail::PhaseTimer t(timings, "qp_min");
        QpOptions opts;
        opts.start = cheb.center;
        if (cfg.qp_early_exit) opts.threshold = -tau;
        const QpOutcome res = solve_qp(sphere_power_qp(ref, poly), opts, cfg.tol);
        cert.min_value = res.value;
        cert.x_minus = res.argument;
        if (res.status == QpStatus::Optimal) {
            if (std::abs(res.value) <= tau)
                throw DegenerateDecision("minimum distance to the reference sphere is within tolerance",
                                         ref_index, res.value);
            if (res.value > tau) {
                cert.kind = CertificateCase::CaseB_MinOutside;
                return cert;
            }
        }
    }

    detail::PhaseTimer t(timings, "maximum");
    UnboundedEvidence ev;
    try {
        ev = is_unbounded(poly, cheb.center, cfg.tol, cfg.shortcuts);
    } catch (const NumericallyDegenerate& e) {
        throw DegenerateInput(std::string("vertex enumeration failed: ") + e.what());
    }
    if (ev.unbounded) {
        cert.kind = CertificateCase::CaseA;
        cert.ray = ev.ray;
        cert.unbounded_by = ev.reason;
        cert.max_value = std::numeric_limits<double>::infinity();
        return cert;
    }
    const auto& vertices = ev.vrep->vertices;
    if (vertices.empty()) throw DegenerateInput("bounded polyhedron without vertices");
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        const double val = power(ref, vertices[k]);
        if (val > best) {
            best = val;
            arg = k;
        }
    }
    cert.max_value = best;
    if (std::abs(best) <= tau)
        throw DegenerateDecision("maximum distance to the reference sphere is within tolerance", ref_index, best);
    if (best < -tau) {
        cert.kind = CertificateCase::CaseB_MaxInside;
        return cert;
    }
    cert.kind = CertificateCase::CaseA;
    cert.x_plus = vertices[arg];
    return cert;
}

enum class StepSide { Outward, Inward };

// Crosses the reference sphere on a segment between strictly interior points
// of the polyhedron, then steps off the sphere by a halving amount until
// `accept` holds.
inline Vector witness_near_sphere(const Ball& ref, const SubproblemCertificate& cert, StepSide side,
                                  const std::function<bool(const Vector&)>& accept, const Tolerances& tol) {
    if (cert.kind != CertificateCase::CaseA || !cert.x_minus || !cert.anchor || (!cert.x_plus && !cert.ray))
        throw WitnessExtractionFailed("certificate does not carry a case-A pair");
    const double tau = membership_tau(ref, tol);
    const Vector& anchor = *cert.anchor;

    // Pull a boundary point towards the anchor while it stays on its side.
    auto pull = [&](const Vector& x, bool want_inside) {
        for (double theta = 0.5; theta > 1e-12; theta *= 0.5) {
            const Vector cand = x + theta * (anchor - x);
            const double pw = power(ref, cand);
            if (want_inside ? pw < -tau : pw > tau) return cand;
        }
        return x;
    };

    const Vector x_in = pull(*cert.x_minus, true);
    const double f_in = power(ref, x_in);
    if (!(f_in < 0.0)) throw WitnessExtractionFailed("inner point is not inside the reference ball");

    Vector u;
    if (cert.ray) {
        u = cert.ray->normalized();
    } else {
        const Vector x_out = pull(*cert.x_plus, false);
        u = x_out - x_in;
        if (u.norm() == 0.0) throw WitnessExtractionFailed("degenerate segment");
        u.normalize();
    }
    const double b = u.dot(x_in - ref.center);
    const double t0 = -b + std::sqrt(b * b - f_in);
    const Vector x0 = x_in + t0 * u;
    const double sign = side == StepSide::Outward ? 1.0 : -1.0;

    double delta = ref.radius * 1e-3;
    for (int k = 0; k <= 60; ++k, delta *= 0.5) {
        const Vector cand = x0 + sign * delta * u;
        if (accept(cand)) return cand;
    }
    throw WitnessExtractionFailed("no strict witness found near the sphere crossing");
}

inline Vector extract_witness(const SubproblemCertificate& cert, const BallSystem& system, const Tolerances& tol = {}) {
    if (cert.ref_index >= system.q()) throw InvalidInput("extract_witness: reference index out of range");
    return witness_near_sphere(
        system.v[cert.ref_index], cert, StepSide::Outward,
        [&](const Vector& x) { return verify_witness(system, x, tol); }, tol);
}

namespace detail {

inline void attach_witness(DecisionReport& report, const SubproblemCertificate& cert, const BallSystem& system,
                           const Tolerances& tol) {
    report.covered = false;
    try {
        report.witness = extract_witness(cert, system, tol);
        report.witness_verified = true;
    } catch (const WitnessExtractionFailed&) {
        report.witness.reset();
        report.witness_verified = false;
    }
}

// All spheres miss I, so I lies entirely inside or entirely outside U.
inline void membership_test(DecisionReport& report, const BallSystem& system, const Tolerances& tol) {
    PhaseTimer t(report.timings_ms, "interior_point");
    const IntersectionPoint ip = interior_point_of_intersection(system.lambda, tol);
    if (ip.status == IntersectionStatus::Empty) {
        report.covered = true;
        report.i_empty = true;
        return;
    }
    if (ip.status == IntersectionStatus::Degenerate)
        throw DegenerateDecision("intersection interior is numerically empty", system.q(), ip.margin);

    bool inside_any = false;
    bool outside_all = true;
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& b : system.v) {
        const double pw = power(b, ip.point);
        const double tau = membership_tau(b, tol);
        if (pw < -tau) inside_any = true;
        if (!(pw > tau)) outside_all = false;
        closest = std::min(closest, std::abs(pw));
    }
    if (inside_any) {
        report.covered = true;
    } else if (outside_all) {
        report.covered = false;
        report.witness = ip.point;
        report.witness_verified = verify_witness(system, ip.point, tol);
    } else {
        throw DegenerateDecision("interior point lies on the union boundary within tolerance", system.q(), closest);
    }
}

inline void finish(DecisionReport& report, std::chrono::steady_clock::time_point start) {
    report.timings_ms["total"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

} // namespace detail

// Single union ball: the polyhedron has only intersection-family rows, and a
// maximum inside the ball settles coverage without the final membership test.
inline DecisionReport decide_concave(const BallSystem& system, const DecisionConfig& cfg = {}) {
    if (system.q() != 1) throw InvalidInput("decide_concave: requires exactly one union ball");
    const auto start = std::chrono::steady_clock::now();
    DecisionReport report;
    HPolyhedron poly;
    {
        detail::PhaseTimer t(report.timings_ms, "polyhedron");
        poly = build_polyhedron(system, 0, cfg.tol);
    }
    SubproblemCertificate cert = analyze_subproblem(system.v[0], poly, 0, cfg, report.timings_ms);
    cert.input_index = system.v_index.empty() ? 0 : system.v_index[0];
    report.certificates.push_back(cert);
    switch (cert.kind) {
    case CertificateCase::InfeasiblePlus:
    case CertificateCase::InfeasibleMinus:
    case CertificateCase::VolumeZero:
    case CertificateCase::CaseB_MaxInside:
        report.covered = true;
        break;
    case CertificateCase::CaseA: {
        detail::PhaseTimer t(report.timings_ms, "witness");
        detail::attach_witness(report, cert, system, cfg.tol);
        break;
    }
    case CertificateCase::CaseB_MinOutside:
        detail::membership_test(report, system, cfg.tol);
        break;
    }
    detail::finish(report, start);
    return report;
}

inline DecisionReport decide(const BallSystem& system, const DecisionConfig& cfg = {}) {
    if (system.q() == 1 && cfg.concave_path) return decide_concave(system, cfg);
    const auto start = std::chrono::steady_clock::now();
    DecisionReport report;
    std::vector<bool> active(system.q(), true);
    std::optional<std::size_t> first_case_a;

    for (std::size_t j = 0; j < system.q(); ++j) {
        HPolyhedron poly;
        {
            detail::PhaseTimer t(report.timings_ms, "polyhedron");
            poly = build_polyhedron(system, j, cfg.tol, &active);
        }
        SubproblemCertificate cert = analyze_subproblem(system.v[j], poly, j, cfg, report.timings_ms);
        cert.input_index = j < system.v_index.size() ? system.v_index[j] : j;
        report.certificates.push_back(cert);

        if (cert.kind == CertificateCase::InfeasiblePlus) {
            report.covered = true;
            detail::finish(report, start);
            return report;
        }
        if (cert.kind == CertificateCase::InfeasibleMinus) {
            active[j] = false;
            continue;
        }
        if (cert.kind == CertificateCase::CaseA) {
            if (!first_case_a) first_case_a = report.certificates.size() - 1;
            if (cfg.stop_at_first_case_a) break;
        }
    }

    if (first_case_a) {
        detail::PhaseTimer t(report.timings_ms, "witness");
        detail::attach_witness(report, report.certificates[*first_case_a], system, cfg.tol);
    } else {
        detail::membership_test(report, system, cfg.tol);
    }
    detail::finish(report, start);
    return report;
}

// Preprocessing followed by the decision; trivial outcomes short-circuit.
inline DecisionReport decide_instance(std::vector<Ball> lambda, std::vector<Ball> v, const DecisionConfig& cfg = {}) {
    const auto start = std::chrono::steady_clock::now();
    PreprocessResult pre;
    std::map<std::string, double> pre_time;
    {
        detail::PhaseTimer t(pre_time, "preprocess");
        pre = preprocess(std::move(lambda), std::move(v), cfg.tol);
    }
    DecisionReport report;
    if (const auto* tv = std::get_if<TrivialVerdict>(&pre)) {
        report.covered = tv->covered;
        report.trivial_reason = tv->reason;
        report.i_empty = tv->covered && tv->reason.rfind("I empty", 0) == 0;
        if (tv->witness) {
            report.witness = tv->witness;
            report.witness_verified = true;
        }
    } else {
        report = decide(std::get<BallSystem>(pre), cfg);
    }
    report.timings_ms["preprocess"] = pre_time["preprocess"];
    detail::finish(report, start);
    return report;
}

} // namespace ballcover
