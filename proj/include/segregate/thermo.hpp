#pragma once

#include "segregate/errors.hpp"

namespace seg::thermo {

// Van der Waals equation-of-state parameters. a = 0, b = 0 recovers the
// ideal gas. Reduced units (a = 3, b = 1/3, R = 8/3) place the critical
// point at Vc = Tc = Pc = 1.
struct EosParams {
    double a = 0.0; // attraction, pressure * volume^2
    double b = 0.0; // covolume, volume
    double R = 1.0; // gas constant, pressure * volume / temperature
};

struct CriticalPoint {
    double Vc, Tc, Pc;
};

// Coexisting molar volumes V1 < V2 at pressure Pstar for temperature T.
struct CoexistenceResult {
    double V1, V2, Pstar, T;
};

double ideal_pressure(double V, double T, const EosParams& p);
double vdw_pressure(double V, double T, const EosParams& p);

// Helmholtz free energy per mole, Psi = -RT ln(V - b) - a/V.
// Satisfies -dPsi/dV = vdw_pressure.
double vdw_free_energy(double V, double T, const EosParams& p);

// dP/dV at fixed T (analytic).
double vdw_dPdV(double V, double T, const EosParams& p);

// Closed form Vc = 3b, Tc = 8a/(27 R b), Pc = a/(27 b^2).
CriticalPoint critical_point(const EosParams& p);

struct MaxwellOptions {
    double v_max_factor = 50.0; // envelope grid extends to v_max_factor * b
    int grid_points = 2001;     // log-spaced samples of Psi(V)
    double wall_offset = 1e-6;  // grid starts at b * (1 + wall_offset)
};

// Maxwell coexistence via the convex envelope of Psi(V) (common tangent),
// refined by Newton iteration on equal pressure and equal chemical
// potential. Throws NoCoexistence for T >= Tc.
CoexistenceResult maxwell_construction(double T, const EosParams& p,
                                       const MaxwellOptions& opts = {});

// Equal-area residual of a coexistence pair, evaluated in closed form
// through Psi: integral_{V1}^{V2} (P - Pstar) dV.
double equal_area_residual(const CoexistenceResult& r, const EosParams& p);

} // namespace seg::thermo
