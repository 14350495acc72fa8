#pragma once

#include <Eigen/Dense>

namespace ballcover {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Numerical margins shared by every stage of the decision procedure.
// Strict comparisons are never made at zero: a value v is "negative" only
// when v < -tau(scale), and the band [-tau, tau] is reported as degenerate.
struct Tolerances {
    double rel = 1e-9;      // relative margin for strict geometric comparisons
    double lp = 1e-8;       // LP feasibility
    double active = 1e-7;   // active-row detection, vertex deduplication
    double pivot = 1e-10;   // smallest acceptable pivot in double description
    double kkt = 1e-8;      // KKT residual certificate
    double cheb_rel = 1e-9; // Chebyshev radius below which a polyhedron is flat

    double tau(double scale) const { return rel * scale; }
};

} // namespace ballcover
