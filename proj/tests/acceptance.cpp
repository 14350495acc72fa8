// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ballcover/ballcover.hpp"
#include "oracles.hpp"

using namespace ballcover;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double grid_step_for(const BallSystem& s, double fine) {
    // Keep at most ~400 points per axis in three dimensions.
    if (s.dim == 2) return fine;
    double r = s.lambda.front().radius;
    for (const auto& b : s.lambda) r = std::min(r, b.radius);
    return std::max(fine, 2.0 * r / 400.0);
}

// Generated instance with a random shape drawn from `rng`.
BallSystem fuzz_instance(std::mt19937_64& rng, std::uint64_t seed) {
    GenConfig g;
    g.dim = 2 + static_cast<Eigen::Index>(rng() % 2);
    g.p = 1 + rng() % 4;
    g.q = 1 + rng() % 4;
    g.seed = seed;
    return generate(g);
}

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream d;
    bool pass = true;
    std::uint64_t seed = 1000;
    for (std::size_t q = 1; q <= 3; ++q) {
        int found = 0, correct = 0, screened = 0;
        while (found < 100) {
            GenConfig g;
            g.dim = 2;
            g.p = 3;
            g.q = q;
            g.seed = seed++;
            const BallSystem s = generate(g);
            ++screened;
            if (!grid_oracle(s, 0.005).found_witness) continue;
            ++found;
            try {
                const DecisionReport r = decide(s);
                if (!r.covered && r.witness_verified && r.witness && verify_witness(s, *r.witness, Tolerances{}))
                    ++correct;
            } catch (const Error&) {
            }
        }
        d << "q=" << q << ": " << correct << "/100 (screened " << screened << "); ";
        if (correct != 100) pass = false;
    }
    d << "time " << seconds_since(t0) << " s";
    return {pass, d.str()};
}

Outcome criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream d;
    bool pass = true;
    int false_witnesses = 0;
    std::uint64_t seed = 2000;
    for (std::size_t q = 1; q <= 3; ++q) {
        int enclosed_ok = 0;
        for (int k = 0; k < 100; ++k) {
            GenConfig g;
            g.dim = 2;
            g.p = 3;
            g.q = q;
            g.seed = seed++;
            const BallSystem s = generate(g);
            double reach = 0.0;
            for (const auto& b : s.lambda) reach = std::max(reach, b.center.norm() + b.radius);
            std::vector<Ball> v = s.v;
            Ball big;
            big.center = Vector::Zero(2);
            big.radius = reach + 1.0;
            v.push_back(big);
            try {
                const DecisionReport r = decide_instance(s.lambda, v);
                if (r.covered) ++enclosed_ok;
                else if (r.witness) ++false_witnesses;
            } catch (const Error&) {
            }
        }
        // Nontrivial covered instances: neither oracle finds a witness.
        int screened_covered = 0, decided_covered = 0, screening_misses = 0, tries = 0;
        while (screened_covered < 100 && tries < 200000) {
            ++tries;
            GenConfig g;
            g.dim = 2;
            g.p = 3;
            g.q = q;
            g.seed = seed++;
            const BallSystem s = generate(g);
            if (grid_oracle(s, 0.005).found_witness) continue;
            if (hit_and_run_oracle(s, 20000, g.seed).found_witness) continue;
            DecisionReport r;
            try {
                r = decide(s);
            } catch (const Error&) {
                ++screened_covered;
                continue;
            }
            if (!r.covered && r.witness && in_difference_exact(s, *r.witness) &&
                verify_witness(s, *r.witness, Tolerances{})) {
                // A verified point of I \ U: the screening missed a thin region.
                ++screening_misses;
                continue;
            }
            ++screened_covered;
            if (r.covered) ++decided_covered;
            else if (r.witness) ++false_witnesses;
        }
        d << "q=" << q << ": enclosing " << enclosed_ok << "/100, screened " << decided_covered << "/"
          << screened_covered << " (oracle misses " << screening_misses << "); ";
        if (enclosed_ok != 100 || screened_covered != 100 || decided_covered != 100) pass = false;
    }
    d << "false witnesses " << false_witnesses << ", time " << seconds_since(t0) << " s";
    if (false_witnesses) pass = false;
    return {pass, d.str()};
}

struct FuzzStats {
    int instances = 0, violations = 0, weak_witnesses = 0, degenerate = 0, not_covered = 0, oracle_hits = 0;
};

Outcome criterion3(std::vector<BallSystem>& corpus) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(3);
    FuzzStats st;
    for (std::uint64_t seed = 3000; st.instances < 600; ++seed) {
        const BallSystem s = fuzz_instance(rng, seed);
        corpus.push_back(s);
        ++st.instances;
        const OracleVerdict grid = grid_oracle(s, grid_step_for(s, 0.02));
        const OracleVerdict walk = grid.found_witness ? OracleVerdict{} : hit_and_run_oracle(s, 20000, seed);
        const bool oracle_witness = grid.found_witness.has_value() || walk.found_witness.has_value();
        if (oracle_witness) ++st.oracle_hits;
        DecisionReport r;
        try {
            r = decide(s);
        } catch (const DegenerateDecision&) {
            ++st.degenerate;
            continue;
        } catch (const DegenerateInput&) {
            ++st.degenerate;
            continue;
        }
        if (oracle_witness && r.covered) ++st.violations;
        if (!r.covered) {
            ++st.not_covered;
            if (!r.witness || !verify_witness(s, *r.witness, Tolerances{})) ++st.weak_witnesses;
        }
    }
    std::ostringstream d;
    d << st.instances << " instances, oracle witnesses " << st.oracle_hits << ", not covered " << st.not_covered
      << ", violations " << st.violations << ", witnesses failing strict membership " << st.weak_witnesses
      << ", degenerate " << st.degenerate << ", time " << seconds_since(t0) << " s";
    const bool pass = st.violations == 0 && st.weak_witnesses == 0 && seconds_since(t0) <= 300.0;
    return {pass, d.str()};
}

Outcome criterion4() {
    std::mt19937_64 rng(4);
    int mismatched = 0, bad_rays = 0, total = 0, with_rays = 0, degenerate = 0;
    for (int k = 0; k < 200; ++k) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 3);
        const int m = static_cast<int>(n) + 1 + static_cast<int>(rng() % static_cast<unsigned long>(8 - n));
        std::vector<HalfSpace> rows;
        for (int i = 0; i < m; ++i) rows.push_back(oracle::random_row(rng, n, -0.5, 2.0));
        const HPolyhedron poly = HPolyhedron::from_rows(n, rows);
        ++total;
        VRepresentation v;
        try {
            v = enumerate(poly);
        } catch (const NumericallyDegenerate&) {
            ++degenerate;
            continue;
        }
        if (!oracle::same_point_sets(v.vertices, oracle::brute_vertices(poly), 1e-7)) ++mismatched;
        if (!v.rays.empty()) ++with_rays;
        Vector base;
        if (!v.vertices.empty()) base = v.vertices.front();
        else base = chebyshev_center(poly).center;
        for (const auto& r : v.rays)
            if (poly.max_violation(base + 1e3 * r) > 1e-7) ++bad_rays;
    }
    std::ostringstream d;
    d << total << " polyhedra (" << with_rays << " unbounded), vertex mismatches " << mismatched
      << ", infeasible rays " << bad_rays << ", degenerate " << degenerate;
    return {mismatched == 0 && bad_rays == 0 && degenerate == 0, d.str()};
}

Outcome criterion5() {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    int mismatched = 0, kkt_bad = 0, optimal = 0, infeasible_agree = 0, status_bad = 0;
    double worst_kkt = 0.0;
    for (int k = 0; k < 200; ++k) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 4);
        const int m = 1 + static_cast<int>(rng() % 10);
        ConvexQp qp;
        Matrix L(n, n);
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b) L(a, b) = g(rng);
        qp.quadratic = k % 2 ? Matrix(2.0 * Matrix::Identity(n, n)) : Matrix(L * L.transpose() + 0.5 * Matrix::Identity(n, n));
        qp.linear = Vector(n);
        for (Eigen::Index a = 0; a < n; ++a) qp.linear[a] = 3.0 * g(rng);
        std::vector<HalfSpace> rows;
        for (int i = 0; i < m; ++i) rows.push_back(oracle::random_row(rng, n, -0.5, 1.5));
        qp.constraints = HPolyhedron::from_rows(n, rows);
        const oracle::BruteQp ref = oracle::brute_qp(qp);
        const QpOutcome r = solve_qp(qp);
        if (!ref.feasible) {
            if (r.status == QpStatus::Infeasible) ++infeasible_agree;
            else ++status_bad;
            continue;
        }
        if (r.status != QpStatus::Optimal) {
            ++status_bad;
            continue;
        }
        ++optimal;
        if ((r.argument - ref.x).lpNorm<Eigen::Infinity>() > 1e-7) ++mismatched;
        const double kkt = kkt_residual(qp, r.argument, r.multipliers);
        worst_kkt = std::max(worst_kkt, kkt);
        if (kkt > 1e-8) ++kkt_bad;
    }
    std::ostringstream d;
    d << "200 QPs: optimal " << optimal << ", infeasible (agreeing) " << infeasible_agree << ", status mismatches "
      << status_bad << ", argmin mismatches " << mismatched << ", KKT > 1e-8: " << kkt_bad << " (worst " << worst_kkt
      << ")";
    return {mismatched == 0 && kkt_bad == 0 && status_bad == 0, d.str()};
}

Outcome criterion6(const std::vector<BallSystem>& corpus) {
    int fired[3] = {0, 0, 0}, contradictions = 0, polyhedra = 0, degenerate = 0;
    for (const auto& s : corpus) {
        for (std::size_t j = 0; j < s.q(); ++j) {
            HPolyhedron poly;
            try {
                poly = build_polyhedron(s, j);
            } catch (const Error&) {
                ++degenerate;
                continue;
            }
            const ChebyshevBall cheb = chebyshev_center(poly);
            if (!cheb.full_dimensional()) continue;
            ++polyhedra;
            const std::optional<Vector> rays[3] = {radius_shortcut(poly, cheb.center), few_rows_shortcut(poly),
                                                   separability_shortcut(poly)};
            bool any = false;
            for (int k = 0; k < 3; ++k)
                if (rays[k]) {
                    ++fired[k];
                    any = true;
                }
            if (!any) continue;
            VRepresentation v;
            try {
                v = enumerate(poly);
            } catch (const NumericallyDegenerate&) {
                ++degenerate;
                continue;
            }
            for (int k = 0; k < 3; ++k)
                if (rays[k] && (v.rays.empty() || !is_recession_ray(poly, *rays[k], 1e-7))) ++contradictions;
        }
    }
    std::ostringstream d;
    d << polyhedra << " nonempty polyhedra; fired: radius " << fired[0] << ", few rows " << fired[1]
      << ", separability " << fired[2] << "; contradictions " << contradictions << ", degenerate " << degenerate;
    return {contradictions == 0 && degenerate == 0, d.str()};
}

Outcome criterion7() {
    std::mt19937_64 rng(7);
    long checked = 0, skipped = 0, lemma_fail = 0, corollary_fail = 0;
    int instances = 0;
    for (std::uint64_t seed = 7000; instances < 50; ++seed) {
        const BallSystem s = fuzz_instance(rng, seed);
        ++instances;
        for (std::size_t j = 0; j < s.q(); ++j) {
            const Ball& ref = s.v[j];
            const HPolyhedron poly = build_polyhedron(s, j);
            const double band = 1e-9 * (1.0 + ref.radius * ref.radius);
            for (int k = 0; k < 1000; ++k) {
                const Vector x = oracle::on_sphere(rng, ref);
                bool in_band = false;
                for (const auto& b : s.lambda) in_band |= std::abs(power(b, x)) <= band;
                for (const auto& b : s.v) in_band |= &b != &ref && std::abs(power(b, x)) <= band;
                for (const auto& h : poly.rows) in_band |= std::abs(h.eval(x)) <= band;
                if (in_band) {
                    ++skipped;
                    continue;
                }
                ++checked;
                // Row by row: on the sphere, the row holds iff the source ball says so.
                for (std::size_t r = 0; r < poly.size(); ++r) {
                    const Ball& src = poly.sources[r];
                    const bool row_holds = poly.rows[r].eval(x) < 0.0;
                    const bool ball_says = poly.provenance[r].family == RowFamily::Lambda ? power(src, x) < 0.0
                                                                                          : power(src, x) > 0.0;
                    if (row_holds != ball_says) ++lemma_fail;
                }
                const bool in_p = poly.rows.empty() || poly.max_violation(x) < 0.0;
                if (in_p != oracle::in_difference_except(s, x, j)) ++corollary_fail;
            }
        }
    }
    std::ostringstream d;
    d << instances << " instances, " << checked << " sphere samples checked (" << skipped
      << " in the tolerance band), lemma failures " << lemma_fail << ", corollary failures " << corollary_fail;
    return {lemma_fail == 0 && corollary_fail == 0 && checked > 0, d.str()};
}

Outcome criterion8() {
    std::mt19937_64 rng(8);
    int sequences = 0, verdicts = 0, unknown = 0, disagreements = 0, degenerate = 0, redundant = 0;
    for (std::uint64_t seed = 8000; sequences < 100; ++seed) {
        GenConfig g;
        g.dim = 2 + static_cast<Eigen::Index>(rng() % 2);
        g.p = 2 + rng() % 4;
        g.q = 1 + rng() % 3;
        g.seed = seed;
        BallSystem s = generate(g);
        // Every third sequence ends with a ball enclosing the first one, so
        // the redundant branch is exercised too.
        if (sequences % 3 == 0) {
            Ball outer = s.lambda[0];
            outer.center[0] += 0.5;
            outer.radius += 1.0;
            s.lambda.push_back(outer);
        }
        ++sequences;
        try {
            SequentialState st = SequentialState::from_system(BallSystem::make({s.lambda[0]}, s.v));
            std::vector<Ball> added{s.lambda[0]};
            for (std::size_t i = 1; i < s.p(); ++i) {
                const SequentialStep step = add_ball(st, s.lambda[i]);
                std::vector<Ball> with = added;
                with.push_back(s.lambda[i]);
                const bool batch = decide_instance(with, s.v).covered;
                switch (step.verdict) {
                case SequentialVerdict::StillUncovered:
                    ++verdicts;
                    if (batch) ++disagreements;
                    break;
                case SequentialVerdict::NowCovered:
                    ++verdicts;
                    if (!batch) ++disagreements;
                    break;
                case SequentialVerdict::BallRedundant:
                    ++verdicts;
                    ++redundant;
                    if (batch != decide_instance(added, s.v).covered) ++disagreements;
                    break;
                case SequentialVerdict::Unknown:
                    ++unknown;
                    break;
                }
                if (step.verdict != SequentialVerdict::BallRedundant) added = with;
                st = step.verdict == SequentialVerdict::Unknown ? SequentialState::from_system(step.state.system)
                                                                 : step.state;
            }
        } catch (const DegenerateInput&) {
            ++degenerate;
        } catch (const DegenerateDecision&) {
            ++degenerate;
        }
    }
    std::ostringstream d;
    d << sequences << " sequences, " << verdicts << " sequential verdicts (" << redundant << " redundant), "
      << unknown << " unknown, disagreements " << disagreements << ", degenerate " << degenerate;
    return {disagreements == 0 && verdicts > 0, d.str()};
}

Outcome criterion9() {
    const auto t0 = std::chrono::steady_clock::now();
    BenchConfig cfg;
    cfg.dims = {10, 20, 50, 100, 200, 400};
    cfg.reps = 10;
    cfg.seed = 9000;
    std::vector<BenchRow> rows;
    try {
        rows = run_bench(cfg);
    } catch (const Error& e) {
        return {false, std::string("bench failed: ") + e.what()};
    }
    const PowerFit f = fit_power_law(rows);
    std::ostringstream d;
    d << "b = " << f.b << ", R^2 = " << f.r2 << "; means(ms):";
    for (const auto& r : rows) d << " n=" << r.n << ":" << r.mean_ms;
    d << "; time " << seconds_since(t0) << " s";
    return {f.b >= 1.0 && f.b <= 2.8 && f.r2 >= 0.85, d.str()};
}

Outcome criterion10() {
    int mismatches = 0;
    for (std::uint64_t seed = 10000; seed < 10020; ++seed) {
        GenConfig g;
        g.dim = 2 + static_cast<Eigen::Index>(seed % 3);
        g.p = 3;
        g.q = 3;
        g.seed = seed;
        const std::string a = serialize_instance(generate(g));
        const std::string b = serialize_instance(generate(g));
        if (a != b) ++mismatches;
        const BallSystem s = parse_instance(a);
        const DecisionReport r1 = decide(s), r2 = decide(s);
        if (r1.covered != r2.covered || r1.witness.has_value() != r2.witness.has_value()) ++mismatches;
        else if (r1.witness && *r1.witness != *r2.witness) ++mismatches;
    }
    return {mismatches == 0, "20 seeds, mismatches " + std::to_string(mismatches)};
}

} // namespace

int main() {
    std::vector<BallSystem> corpus;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 exactness vs oracle", criterion1},
        {"2 covered-side soundness", criterion2},
        {"3 oracle differential fuzzing", [&] { return criterion3(corpus); }},
        {"4 vertex enumeration vs brute force", criterion4},
        {"5 QP vs active-set brute force", criterion5},
        {"6 shortcut soundness", [&] { return criterion6(corpus); }},
        {"7 lemma and corollary sampling", criterion7},
        {"8 sequential vs batch", criterion8},
        {"9 scaling trend", criterion9},
        {"10 determinism", criterion10},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << std::endl;
    }
    std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : "acceptance: all criteria passed")
              << std::endl;
    return failed ? 1 : 0;
}
