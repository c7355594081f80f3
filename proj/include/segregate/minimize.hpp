#pragma once

#include "segregate/energy.hpp"
#include "segregate/kernels.hpp"
#include "segregate/wells.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace seg::minimize {

struct MinimizeOptions {
    double step0 = 1.0;
    double backtrack = 0.5;
    double grad_tol = 1e-7;
    int max_iters = 50000;
    double delta_box = 1e-6;
    std::uint64_t seed = 0; // multi-start perturbations only
};

struct JumpCensus {
    int count = 0;
    std::vector<double> locations;
    std::vector<double> widths;
};

struct MinimizerResult {
    energy::Field field;
    double energy = 0.0;
    int iterations = 0;
    bool converged = false;
    JumpCensus census;
    std::vector<double> energy_log; // accepted-iterate energies, monotone
    std::vector<double> mass_log;   // h sum u at every accepted iterate
};

// Projected-gradient local minimization of the discrete I under the exact
// mass constraint h sum u = m and the box |u| <= 1 - delta_box. Armijo
// backtracking guarantees monotone energies.
MinimizerResult local_minimize(const energy::Field& init, const kernels::KernelMatrix& J,
                               double kT, double m, const MinimizeOptions& opts);

// Zero crossings with |u| exceeding `level` on both sides; width is h times
// the number of band cells (at least one cell). Exact zeros attach to the
// left cell.
JumpCensus detect_jumps(const energy::Field& u, double level = 0.5);

// Sharp-interface criterion at grid point i0:
//   C = J(x0,x0)/4 + (int int J)/2 - j(x0) - int g'(u(x)) dx.
double criterion_C(const kernels::KernelMatrix& J, double kT, const energy::Field& u,
                   int i0);

// Fraction of cells, outside +-window_cells of each detected interface, whose
// value lies strictly inside the flat interval. nullopt when the envelope has
// no flat interval.
std::optional<double> gap_avoidance_check(const energy::Field& u,
                                          const wells::EnvelopeTable& t,
                                          const JumpCensus& census, int window_cells = 5);

struct JumpOptimum {
    energy::BVConfig config;
    double energy = 0.0; // I0 at the optimum
    int iterations = 0;
};

// Minimizes I0 over ordered jump vectors at fixed count k under the mass
// constraint. Green long kernels use exact piecewise energies with an
// analytic Newton polish; generic kernels fall back to a numeric-gradient
// projected descent on the quadrature route.
JumpOptimum optimize_jump_positions(int k, double c0, const kernels::KernelMatrix& Jl,
                                    double m, int start_sign = -1);

// Piecewise-linear ramp mollification of a BV configuration: ramps of total
// width 2*eps around each jump, amplitude `amplitude`, sampled at midpoints.
energy::Field mollify_ramp(const energy::BVConfig& c, int n, double eps, double amplitude);

struct ContinuationSetup {
    kernels::ShortRangeKernel short_kernel;
    const kernels::KernelMatrix* long_kernel = nullptr; // nullptr: short only
    int n = 2048;
    double kT = 0.25;
    double m = 0.0;
    double c0_quarter = 0.0; // interface costs under both conventions
    double c0_unit = 0.0;
};

struct ContinuationResult {
    MinimizerResult min;
    double eps = 0.0;
    double l2_distance = 0.0;   // to the sharp +-1 configuration
    double scaled_excess = 0.0; // eps^-1 (I_eps(u_eps) - well floor)
    double i0_quarter = 0.0;
    double i0_unit = 0.0;
    double gap_quarter = 0.0;
    double gap_unit = 0.0;
    bool failed = false;
    std::string reason;
};

// Mollifies c, relaxes it under the full J_eps functional and reports the
// distance and Gamma-limit energy gaps under both prefactor conventions.
// Divergence is reported through `failed`, never thrown.
ContinuationResult continuation(const energy::BVConfig& c, double eps,
                                const ContinuationSetup& setup,
                                const MinimizeOptions& opts);

struct ExponentFit {
    double mu = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double kTc = 0.0;
    std::vector<double> kT;
    std::vector<double> sigma;
    bool flagged = false; // r2 below the 0.99 quality gate
};

// sigma(kT) = c0(kT) via compute_c0 on the template problem; least squares of
// log sigma against log(kTc - kT).
ExponentFit exponent_fit(const energy::ProfileProblem& tmpl, std::span<const double> kTs);

} // namespace seg::minimize
