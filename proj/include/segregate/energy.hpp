#pragma once

#include "segregate/errors.hpp"
#include "segregate/kernels.hpp"
#include "segregate/wells.hpp"

#include <span>
#include <vector>

namespace seg::energy {

// Grid function on [0,1] sampled at midpoints x_i = (i + 1/2)/n.
struct Field {
    int n = 0;
    std::vector<double> values;

    Field() = default;
    Field(int n_, double fill = 0.0) : n(n_), values(static_cast<size_t>(n_), fill) {}
    double h() const { return 1.0 / n; }
    double x(int i) const { return (i + 0.5) / n; }
    double mass() const;
};

// Piecewise-constant +-1 configuration on (0,1): value start_sign on
// (0, jumps[0]), alternating across each jump.
struct BVConfig {
    std::vector<double> jumps; // strictly increasing, inside (0,1)
    int start_sign = -1;
};

int jump_count(const BVConfig& c);
double bv_mass(const BVConfig& c);
double bv_value(const BVConfig& c, double x);
void validate_bv(const BVConfig& c);
// Cell averages of the +-1 profile on the n-cell midpoint grid; exact for
// cells containing a jump (fractional coverage), hence smooth in positions.
std::vector<double> bv_cell_averages(const BVConfig& c, int n);

// Discrete I(u) = 1/4 h^2 sum_ij J_ij (u_i - u_j)^2 + h sum_i W(u_i) with the
// per-position well mass j(x_i) = row_mass[i]. Compensated summation.
double energy_I(const Field& u, const kernels::KernelMatrix& J, double kT);
// Algebraically identical split: -1/2 h^2 sum_ij J_ij u_i u_j + h sum_i G(u_i).
double energy_I_split(const Field& u, const kernels::KernelMatrix& J, double kT);
// Convexified energy: -1/2 <Ju,u> + integral G*(u).
double energy_I_star(const Field& u, const kernels::KernelMatrix& J,
                     const wells::EnvelopeTable& t);

// Pointwise well-floor reference integral \int min_s W(s; j(x), kT) dx and
// the excess energy above it (the quantity whose eps^-1 scaling has a limit).
double well_floor_integral(const kernels::KernelMatrix& J, double kT);
double energy_excess(const Field& u, const kernels::KernelMatrix& J, double kT);

// Sharp-interface energy I0(u) = c0 k - 1/4 int int J^l (u(x)-u(y))^2.
// Generic quadrature route (any long kernel matrix):
double energy_I0(const BVConfig& c, double c0, const kernels::KernelMatrix& Jl);
// Exact Green route: c0 k + 1/2 int v'^2 with -v'' = u - m, Neumann, zero mean.
double energy_I0_green(const BVConfig& c, double c0);
double green_longrange_term(const BVConfig& c); // 1/2 int v'^2, exact piecewise

// Single transition profile problem on [-L, L]: minimize
//   prefactor * int int J^s(x-y) (u(x)-u(y))^2 + int [W(u) - min W]
// over profiles pinned to the pure phases +-u*(j,kT) at the ends. The pinning
// is realized by pure-phase exterior data for integrable kernels; the
// constant family runs free on the bounded interval.
struct ProfileProblem {
    double L = 1.0;
    int n = 2048;
    kernels::ShortRangeKernel kernel;
    double j = 0.0;         // well mass entering W, chosen by the caller
    double kT = 0.25;
    double prefactor = 0.25; // convention switch: 1/4 or 1
    double delta_box = 1e-6;
    double grad_tol = 1e-9;
    int max_iters = 200000;
};

struct C0Result {
    double value = 0.0;
    std::vector<double> x;
    std::vector<double> profile;
    double u_well = 0.0;
    double tail_gap = 0.0; // max deviation from the pure phases at the ends
    int iterations = 0;
    bool converged = false;
};

C0Result compute_c0(const ProfileProblem& pp);

// Recovery sequence for the Gamma limit: the optimal profile rescaled to
// width eps and stitched across the jumps of c; pure phases elsewhere.
Field recovery_field(const BVConfig& c, int n, double eps, const C0Result& prof);

// Elastic functional I(w) = int [ 1/2 eps^2 w''^2 + W(w') + w^2 ] with
// w(0) = w(1) = 0; w given at the n+1 nodes i/n.
double elastic_energy(std::span<const double> w_nodes, double eps,
                      const wells::WellParams& p, double m);

struct ElasticPair {
    double elastic = 0.0;
    double nonlocal = 0.0;
    Field u; // recovered midpoint field u = m - w'
};

// Recovers u = m - w' and evaluates the nonlocal form
// int [ 1/2 eps^2 u'^2 + W(m-u) ] + int int G(x,y) u(x) u(y).
ElasticPair elastic_to_nonlocal(std::span<const double> w_nodes, double eps,
                                const wells::WellParams& p, double m,
                                const kernels::KernelMatrix& green);

} // namespace seg::energy
