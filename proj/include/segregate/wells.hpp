#pragma once

#include "segregate/errors.hpp"

#include <functional>
#include <span>
#include <vector>

namespace seg::wells {

// Parameters of the logarithmic double well
//   W(u) = -1/2 j u^2 - 1/2 u^2 + kT [(1+u)ln(1+u) + (1-u)ln(1-u)].
// j is the local interaction mass j(x) = integral J(x,y) dy; it may vary
// with position, in which case callers evaluate with the per-position value.
struct WellParams {
    double j = 0.0;
    double kT = 0.3;
};

double entropy_term(double u); // (1+u)ln(1+u) + (1-u)ln(1-u), |u| < 1
double eval_W(double u, const WellParams& p);
double eval_W_prime(double u, const WellParams& p);

// Kernel-free part: G(u) = W(u) + 1/2 j u^2 and its derivatives.
double eval_G(double u, double kT);
double eval_g(double u, double kT);       // g = G'
double eval_g_prime(double u, double kT); // g' = -1 + 2 kT / (1 - u^2)

// Positive minimum of W(.; j, kT): the root of (1+j) u = kT ln((1+u)/(1-u)).
// Returns 0 when the well is single (kT >= (1+j)/2); 1 at kT = 0.
double well_position(double j, double kT);
double well_kTc(double j); // (1 + j) / 2

// Tabulated convex envelope of a sampled function. When built from G the
// flat-interval endpoints are refined by root finding on g(u) = v_star, and
// queries through envelope_value/gstar_value use the analytic branch.
struct EnvelopeTable {
    std::vector<double> u_grid;
    std::vector<double> G_values;
    std::vector<double> Gstar_values;
    std::vector<double> gstar_values;
    bool has_flat = false;
    double u_lower = 0.0;
    double u_upper = 0.0;
    double v_star = 0.0;
    bool analytic_G = false; // true when the table samples eval_G(., kT)
    double kT = 0.0;
};

struct FlatInterval {
    bool empty = true;
    double u_lower = 0.0;
    double u_upper = 0.0;
    double v_star = 0.0;
};

// Greatest convex minorant on the sample points (lower hull of the graph).
EnvelopeTable convex_envelope(std::span<const double> grid, std::span<const double> values);

struct EnvelopeOptions {
    int n_u = 4001;
    double delta_box = 1e-6; // grid spans [-1 + delta_box, 1 - delta_box]
};

// Envelope of G(., kT) with analytic endpoint refinement.
EnvelopeTable make_G_envelope(double kT, const EnvelopeOptions& opts = {});

FlatInterval flat_interval(const EnvelopeTable& t);

// G*(u) and g*(u) evaluated from the table (exact on analytic tables).
double envelope_value(const EnvelopeTable& t, double u);
double gstar_value(const EnvelopeTable& t, double u);

// Selection functions: inverse of g* off the plateau; at v = v_star they
// return the plateau endpoints. v must lie in the range of g*.
double s_lower(const EnvelopeTable& t, double v);
double s_upper(const EnvelopeTable& t, double v);

// Linear coefficient lambda such that f(u) + lambda u has equal-depth wells.
// Throws NoDoubleWell when f has no convexification bridge on (lo, hi).
double balance_wells(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-12);
double balance_wells(const WellParams& p, double delta_box = 1e-6);

} // namespace seg::wells
