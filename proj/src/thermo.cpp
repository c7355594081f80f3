#include "segregate/thermo.hpp"

#include "segregate/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace seg::thermo {

double ideal_pressure(double V, double T, const EosParams& p) {
    if (V <= 0.0) throw std::domain_error("ideal_pressure: V must be positive");
    if (T <= 0.0) throw std::domain_error("ideal_pressure: T must be positive");
    return p.R * T / V;
}

double vdw_pressure(double V, double T, const EosParams& p) {
    if (T <= 0.0) throw std::domain_error("vdw_pressure: T must be positive");
    if (V <= p.b) throw std::domain_error("vdw_pressure: V must exceed the covolume b");
    return p.R * T / (V - p.b) - p.a / (V * V);
}

double vdw_free_energy(double V, double T, const EosParams& p) {
    if (T <= 0.0) throw std::domain_error("vdw_free_energy: T must be positive");
    if (V <= p.b) throw std::domain_error("vdw_free_energy: V must exceed the covolume b");
    return -p.R * T * std::log(V - p.b) - p.a / V;
}

double vdw_dPdV(double V, double T, const EosParams& p) {
    double d = V - p.b;
    return -p.R * T / (d * d) + 2.0 * p.a / (V * V * V);
}

CriticalPoint critical_point(const EosParams& p) {
    if (p.a <= 0.0 || p.b <= 0.0)
        throw std::domain_error("critical_point: no critical point without both a > 0 and b > 0");
    CriticalPoint c;
    c.Vc = 3.0 * p.b;
    c.Tc = 8.0 * p.a / (27.0 * p.R * p.b);
    c.Pc = p.a / (27.0 * p.b * p.b);
    return c;
}

namespace {

// Chemical potential along an isotherm: mu = Psi + P V.
double chem_potential(double V, double T, const EosParams& p) {
    return vdw_free_energy(V, T, p) + vdw_pressure(V, T, p) * V;
}

// Spinodal volumes: the two roots of dP/dV = 0 bracketing Vc.
void spinodals(double T, const EosParams& p, double Vc, double& Vs1, double& Vs2) {
    auto f = [&](double V) { return vdw_dPdV(V, T, p); };
    double lo = p.b * (1.0 + 1e-12);
    // dP/dV -> -inf at the wall and is positive somewhere below Vc for T < Tc
    double a = lo;
    double mid = Vc;
    for (int i = 0; i < 200; ++i) {
        mid = 0.5 * (a + Vc);
        if (f(mid) > 0.0) break;
        a = mid;
    }
    Vs1 = bisect(f, lo, mid, 1e-15 * Vc);
    // beyond Vc the derivative turns negative again
    double hi = Vc;
    for (int i = 0; i < 200; ++i) {
        hi *= 2.0;
        if (f(hi) < 0.0) break;
    }
    Vs2 = bisect(f, mid, hi, 1e-15 * Vc);
}

} // namespace

CoexistenceResult maxwell_construction(double T, const EosParams& p,
                                       const MaxwellOptions& opts) {
    if (T <= 0.0) throw std::domain_error("maxwell_construction: T must be positive");
    CriticalPoint cp = critical_point(p);
    if (T >= cp.Tc) throw NoCoexistence("maxwell_construction: T >= Tc, single phase");

    // Seed from the convex envelope of Psi on a log-spaced grid.
    double v_lo = p.b * (1.0 + opts.wall_offset);
    double v_hi = p.b * opts.v_max_factor;
    int n = opts.grid_points;
    std::vector<double> V(n), Psi(n);
    double llo = std::log(v_lo), lhi = std::log(v_hi);
    for (int i = 0; i < n; ++i) {
        V[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
        Psi[i] = vdw_free_energy(V[i], T, p);
    }
    std::vector<int> hull = lower_hull(V, Psi);
    double V1 = 0.0, V2 = 0.0, width = 0.0;
    for (size_t s = 0; s + 1 < hull.size(); ++s) {
        int i = hull[s], j = hull[s + 1];
        if (j > i + 1 && V[j] - V[i] > width) {
            width = V[j] - V[i];
            V1 = V[i];
            V2 = V[j];
        }
    }
    if (width == 0.0) {
        // Near-critical: the bridge is below grid resolution. Seed from the
        // leading vdW asymptotics V ~ Vc (1 -+ 2 sqrt(1 - T/Tc)).
        double dv = 2.0 * cp.Vc * std::sqrt(1.0 - T / cp.Tc);
        V1 = cp.Vc - dv;
        V2 = cp.Vc + dv;
    }

    // Spinodal bounds keep the Newton iterates on the correct branches.
    double Vs1, Vs2;
    spinodals(T, p, cp.Vc, Vs1, Vs2);
    if (!(V1 < Vs1)) V1 = 0.5 * (v_lo + Vs1);
    if (!(V2 > Vs2)) V2 = 2.0 * Vs2;

    // Newton on F = (P(V1) - P(V2), mu(V1) - mu(V2)).
    for (int it = 0; it < 200; ++it) {
        double F1 = vdw_pressure(V1, T, p) - vdw_pressure(V2, T, p);
        double F2 = chem_potential(V1, T, p) - chem_potential(V2, T, p);
        double a11 = vdw_dPdV(V1, T, p), a12 = -vdw_dPdV(V2, T, p);
        // d mu / dV = V dP/dV
        double a21 = V1 * vdw_dPdV(V1, T, p), a22 = -V2 * vdw_dPdV(V2, T, p);
        double det = a11 * a22 - a12 * a21;
        if (det == 0.0) break;
        double d1 = (F1 * a22 - F2 * a12) / det;
        double d2 = (a11 * F2 - a21 * F1) / det;
        // damped update staying outside the spinodal interval
        double t = 1.0;
        for (int k = 0; k < 60; ++k) {
            double n1 = V1 - t * d1, n2 = V2 - t * d2;
            if (n1 > p.b && n1 < Vs1 && n2 > Vs2) {
                V1 = n1;
                V2 = n2;
                break;
            }
            t *= 0.5;
        }
        if (std::abs(d1) < 1e-15 * cp.Vc && std::abs(d2) < 1e-15 * cp.Vc) break;
    }

    CoexistenceResult r;
    r.V1 = V1;
    r.V2 = V2;
    r.T = T;
    r.Pstar = vdw_pressure(V1, T, p);
    return r;
}

double equal_area_residual(const CoexistenceResult& r, const EosParams& p) {
    // integral P dV = Psi(V1) - Psi(V2) since P = -dPsi/dV
    double area = vdw_free_energy(r.V1, r.T, p) - vdw_free_energy(r.V2, r.T, p);
    return area - r.Pstar * (r.V2 - r.V1);
}

} // namespace seg::thermo
