#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "ballcover/decision.hpp"
#include "ballcover/errors.hpp"
#include "ballcover/instance_lab.hpp"

namespace ballcover {

struct BenchConfig {
    std::vector<Eigen::Index> dims{10, 20, 50, 100, 200, 400};
    std::size_t reps = 10;
    std::size_t p = 3;
    std::size_t q = 3;
    std::uint64_t seed = 0;
    std::size_t max_draws_per_rep = 200; // instances tried per kept (not covered) sample
    DecisionConfig decision;
};

struct BenchRow {
    Eigen::Index n = 0;
    double mean_ms = 0.0;
    double sd_ms = 0.0;
    std::size_t samples = 0;
};

struct PowerFit {
    double a = 0.0;
    double b = 0.0;
    double r2 = 0.0;
};

// Least squares on log t = log a + b log n.
inline PowerFit fit_power_law(const std::vector<double>& n, const std::vector<double>& t) {
    if (n.size() != t.size() || n.size() < 2) throw InvalidInput("fit_power_law: need at least two points");
    const double k = static_cast<double>(n.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(n[i] > 0.0) || !(t[i] > 0.0)) throw InvalidInput("fit_power_law: values must be positive");
        const double x = std::log(n[i]), y = std::log(t[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = k * sxx - sx * sx;
    if (den == 0.0) throw InvalidInput("fit_power_law: all sizes are equal");
    PowerFit f;
    f.b = (k * sxy - sx * sy) / den;
    const double loga = (sy - f.b * sx) / k;
    f.a = std::exp(loga);
    const double mean = sy / k;
    double ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double y = std::log(t[i]);
        const double e = y - (loga + f.b * std::log(n[i]));
        ss_res += e * e;
        ss_tot += (y - mean) * (y - mean);
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

inline PowerFit fit_power_law(const std::vector<BenchRow>& rows) {
    std::vector<double> n, t;
    for (const auto& r : rows) {
        n.push_back(static_cast<double>(r.n));
        t.push_back(r.mean_ms);
    }
    return fit_power_law(n, t);
}

// Times the decision on generated instances that turn out not covered.
inline std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    std::vector<BenchRow> rows;
    std::uint64_t seed = cfg.seed;
    for (const Eigen::Index n : cfg.dims) {
        std::vector<double> times;
        std::size_t draws = 0;
        while (times.size() < cfg.reps) {
            if (draws++ >= cfg.max_draws_per_rep * std::max<std::size_t>(cfg.reps, 1))
                throw RetriesExhausted("bench: too few not-covered instances at n = " + std::to_string(n));
            GenConfig g;
            g.dim = n;
            g.p = cfg.p;
            g.q = cfg.q;
            g.seed = seed++;
            const BallSystem sys = generate(g, cfg.decision.tol);
            const auto start = std::chrono::steady_clock::now();
            DecisionReport rep;
            try {
                rep = decide(sys, cfg.decision);
            } catch (const Error&) {
                continue;
            }
            const double ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            if (!rep.covered) times.push_back(ms);
        }
        BenchRow row;
        row.n = n;
        row.samples = times.size();
        for (double t : times) row.mean_ms += t;
        row.mean_ms /= static_cast<double>(std::max<std::size_t>(times.size(), 1));
        if (times.size() > 1) {
            double ss = 0;
            for (double t : times) ss += (t - row.mean_ms) * (t - row.mean_ms);
            row.sd_ms = std::sqrt(ss / static_cast<double>(times.size() - 1));
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "n,mean_ms,sd_ms\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6g,%.6g", r.mean_ms, r.sd_ms);
        os << r.n << "," << buf << "\n";
    }
    return os.str();
}

} // namespace ballcover
