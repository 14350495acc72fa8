#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ballcover/bench.hpp"
#include "ballcover/decision.hpp"
#include "ballcover/errors.hpp"
#include "ballcover/instance_lab.hpp"
#include "ballcover/io.hpp"
#include "ballcover/sequential.hpp"

namespace ballcover {

namespace detail {

inline std::string vector_text(const Vector& x) {
    std::string s = "[";
    for (Eigen::Index k = 0; k < x.size(); ++k) s += (k ? ", " : "") + format_real(x[k]);
    return s + "]";
}

// Relative tolerance: flag, then BALLCOVER_TOL, then the built-in default.
inline Tolerances resolve_tolerance(const std::optional<double>& flag) {
    Tolerances tol;
    if (flag) {
        tol.rel = *flag;
    } else if (const char* env = std::getenv("BALLCOVER_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0') throw InvalidInput(std::string("BALLCOVER_TOL: not a number: ") + env);
        tol.rel = v;
    }
    if (!(tol.rel > 0.0)) throw InvalidInput("tolerance must be positive");
    return tol;
}

struct SequentialRun {
    bool covered = false;
    std::optional<Vector> witness;
    std::vector<SequentialVerdict> verdicts;
};

// Feeds the intersection balls one at a time, starting from the first.
inline SequentialRun run_sequential(const BallSystem& sys, const DecisionConfig& cfg) {
    SequentialRun run;
    SequentialState state = SequentialState::from_system(BallSystem::make({sys.lambda.front()}, sys.v), cfg);
    for (std::size_t i = 1; i < sys.lambda.size(); ++i) {
        SequentialStep step = add_ball_or_decide(state, sys.lambda[i], cfg);
        run.verdicts.push_back(step.verdict);
        state = std::move(step.state);
    }
    if (!state.known()) throw DegenerateDecision("sequential replay ended without a verdict", 0, 0.0);
    run.covered = state.covered;
    run.witness = state.witness;
    return run;
}

} // namespace detail

// Entry point of the ballcover tool. Verdicts are data: both exit 0; errors
// and degenerate inputs exit 2.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decides whether an intersection of open balls is covered by a union of closed balls"};
    app.require_subcommand(1);

    std::optional<double> tol_flag;

    auto* dec = app.add_subcommand("decide", "decide coverage for an instance file");
    std::string dec_path;
    bool no_shortcuts = false, sequential = false, as_json = false;
    dec->add_option("instance", dec_path, "instance file")->required();
    dec->add_option("--tol", tol_flag, "relative tolerance");
    dec->add_flag("--no-shortcuts", no_shortcuts, "always run vertex enumeration");
    dec->add_flag("--sequential", sequential, "add intersection balls one at a time");
    dec->add_flag("--json", as_json, "print the report as JSON");

    auto* gen = app.add_subcommand("gen", "generate a random instance");
    GenConfig g;
    std::string gen_out;
    gen->add_option("--n", g.dim, "dimension")->required();
    gen->add_option("--p", g.p, "intersection balls")->required();
    gen->add_option("--q", g.q, "union balls")->required();
    gen->add_option("--sigma", g.sigma, "center standard deviation")->capture_default_str();
    gen->add_option("--epsilon", g.epsilon, "radius padding")->capture_default_str();
    gen->add_option("--seed", g.seed, "random seed")->capture_default_str();
    gen->add_option("--max-retries", g.max_retries, "draws before giving up")->capture_default_str();
    gen->add_option("--out", gen_out, "output file (default: stdout)");
    gen->add_option("--tol", tol_flag, "relative tolerance");

    auto* orc = app.add_subcommand("oracle", "search an instance for a witness by sampling");
    std::string orc_path;
    std::optional<double> step;
    std::optional<std::size_t> samples;
    std::uint64_t orc_seed = 0;
    orc->add_option("instance", orc_path, "instance file")->required();
    orc->add_option("--step", step, "grid step (dimensions 2 and 3)");
    orc->add_option("--samples", samples, "hit-and-run samples");
    orc->add_option("--seed", orc_seed, "random seed")->capture_default_str();
    orc->add_option("--tol", tol_flag, "relative tolerance");

    auto* ben = app.add_subcommand("bench", "time the decision over dimensions");
    BenchConfig bc;
    std::string csv_path;
    ben->add_option("--dims", bc.dims, "dimensions")->delimiter(',');
    ben->add_option("--reps", bc.reps, "instances per dimension")->capture_default_str();
    ben->add_option("--seed", bc.seed, "first seed")->capture_default_str();
    ben->add_option("--csv", csv_path, "write the table to this file");

    auto* fit = app.add_subcommand("fit", "fit t = a n^b to a bench table");
    std::string fit_path;
    fit->add_option("csv", fit_path, "bench CSV file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*dec) {
            DecisionConfig cfg;
            cfg.tol = detail::resolve_tolerance(tol_flag);
            cfg.shortcuts = !no_shortcuts;
            const BallSystem sys = read_instance_file(dec_path);

            nlohmann::ordered_json j;
            if (sequential) {
                const detail::SequentialRun run = detail::run_sequential(sys, cfg);
                j["covered"] = run.covered;
                j["witness"] = run.witness ? detail::vector_json(*run.witness) : nlohmann::ordered_json(nullptr);
                auto steps = nlohmann::ordered_json::array();
                for (const auto v : run.verdicts) steps.push_back(to_string(v));
                j["steps"] = std::move(steps);
            } else {
                j = report_json(decide_instance(sys.lambda, sys.v, cfg));
            }
            nlohmann::ordered_json echo;
            echo["instance"] = dec_path;
            echo["tol"] = cfg.tol.rel;
            echo["shortcuts"] = cfg.shortcuts;
            echo["sequential"] = sequential;
            j["config"] = std::move(echo);

            if (as_json) {
                out << j.dump(2) << "\n";
            } else {
                out << "covered: " << (j["covered"].get<bool>() ? "true" : "false") << "\n";
                if (!j["witness"].is_null()) {
                    Vector w(sys.dim);
                    for (Eigen::Index k = 0; k < sys.dim; ++k) w[k] = j["witness"][static_cast<std::size_t>(k)];
                    out << "witness: " << detail::vector_text(w) << "\n";
                }
                if (j.contains("trivial_reason") && !j["trivial_reason"].is_null())
                    out << "reason: " << j["trivial_reason"].get<std::string>() << "\n";
                if (j.contains("certificates"))
                    for (const auto& c : j["certificates"])
                        out << "v[" << c["ref_index"].get<std::size_t>() << "]: " << c["case"].get<std::string>()
                            << "\n";
                if (j.contains("steps"))
                    for (std::size_t k = 0; k < j["steps"].size(); ++k)
                        out << "lambda[" << k + 1 << "]: " << j["steps"][k].get<std::string>() << "\n";
            }
            return 0;
        }
        if (*gen) {
            const BallSystem sys = generate(g, detail::resolve_tolerance(tol_flag));
            if (gen_out.empty()) out << serialize_instance(sys);
            else write_instance_file(gen_out, sys);
            return 0;
        }
        if (*orc) {
            const Tolerances tol = detail::resolve_tolerance(tol_flag);
            const BallSystem sys = read_instance_file(orc_path);
            OracleVerdict v;
            std::string method;
            if (step) {
                method = "grid";
                v = grid_oracle(sys, *step, tol);
            } else {
                method = "hit_and_run";
                v = hit_and_run_oracle(sys, samples.value_or(100000), orc_seed, tol);
            }
            nlohmann::ordered_json j;
            j["method"] = method;
            j["conclusive"] = v.conclusive;
            j["witness"] = v.found_witness ? detail::vector_json(*v.found_witness) : nlohmann::ordered_json(nullptr);
            j["samples_used"] = v.samples_used;
            out << j.dump(2) << "\n";
            return 0;
        }
        if (*ben) {
            const std::vector<BenchRow> rows = run_bench(bc);
            const std::string csv = bench_csv(rows);
            if (csv_path.empty()) {
                out << csv;
            } else {
                std::ofstream f(csv_path);
                if (!f) throw Error(csv_path + ": cannot open for writing");
                f << csv;
            }
            if (rows.size() >= 2) {
                const PowerFit pf = fit_power_law(rows);
                err << "fit: a=" << pf.a << " b=" << pf.b << " r2=" << pf.r2 << "\n";
            }
            return 0;
        }
        if (*fit) {
            std::ifstream f(fit_path);
            if (!f) throw ParseError(fit_path + ": cannot open");
            std::string line;
            std::getline(f, line);
            if (line.rfind("n,mean_ms", 0) != 0) throw ParseError(fit_path + ": line 1: expected header n,mean_ms,sd_ms");
            std::vector<double> ns, ts;
            for (int lineno = 2; std::getline(f, line); ++lineno) {
                if (line.empty()) continue;
                std::istringstream ls(line);
                std::string a, b;
                if (!std::getline(ls, a, ',') || !std::getline(ls, b, ','))
                    throw ParseError(fit_path + ": line " + std::to_string(lineno) + ": expected n,mean_ms,sd_ms");
                try {
                    ns.push_back(std::stod(a));
                    ts.push_back(std::stod(b));
                } catch (const std::exception&) {
                    throw ParseError(fit_path + ": line " + std::to_string(lineno) + ": not a number");
                }
            }
            const PowerFit pf = fit_power_law(ns, ts);
            out << "a=" << pf.a << " b=" << pf.b << " r2=" << pf.r2 << "\n";
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace ballcover
