#pragma once

#include <span>
#include <string>
#include <vector>

namespace seg::kernels {

enum class Family { box, gaussian, exponential, constant };

Family family_from_string(const std::string& s);
std::string family_name(Family f);

// Short-range interaction profile J^s(z) with prescribed line mass
// integral J^s = mass. Decaying families are truncated at 10 * scale and
// normalized on the truncated support. The constant family has no decay and
// is meaningful only on a bounded interval; its value is `mass` per unit
// length squared.
struct ShortRangeKernel {
    Family family = Family::gaussian;
    double scale = 0.1;
    double mass = 1.0;
};

double support_radius(const ShortRangeKernel& k); // infinity for constant
bool line_integrable(const ShortRangeKernel& k);  // false for constant
double family_value(const ShortRangeKernel& k, double z);
// Tail integral of the truncated profile: integral_{d}^{inf} J^s(z) dz, d >= 0.
double tail_mass(const ShortRangeKernel& k, double d);
// Numerical integral |z| J^s(z) dz of the raw (untruncated) profile over
// [-truncation, truncation]. Diverges with truncation for the constant family.
double first_moment(const ShortRangeKernel& k, double truncation);

enum class Kind { generic, green };

// Discretized symmetric kernel on the midpoint grid x_i = (i + 1/2)/n of
// [0,1]. Entries are kernel values; double integrals are h^2 sum sum J.
struct KernelMatrix {
    int n = 0;
    double h = 0.0;
    std::vector<double> values;   // n*n, row major, symmetric
    std::vector<double> row_mass; // j(x_i) = h * sum_j J_ij
    Kind kind = Kind::generic;

    double at(int i, int j) const { return values[static_cast<size_t>(i) * n + j]; }
    double& at(int i, int j) { return values[static_cast<size_t>(i) * n + j]; }
    // (J u)(x_i) = h sum_j J_ij u_j
    std::vector<double> apply(std::span<const double> u) const;
    double total_mass() const; // h^2 sum sum J = integral integral J
    void recompute_row_mass();
};

// Scaled short-range matrix with entries (1/eps) J^s((x_i - x_j)/eps).
// The constant family bypasses the scaling (entries = mass, eps-independent).
KernelMatrix build_short(const ShortRangeKernel& k, double eps, int n);

// Green's function of -d^2/dx^2 on zero-mean functions with Neumann
// conditions: G(x,y) = (x^2 + y^2)/2 - max(x,y) + 1/3, discretized at
// midpoints and double-centered so every row mass vanishes identically.
KernelMatrix neumann_green(int n);

// Constant long-range kernel J(x,y) = mass.
KernelMatrix build_constant_long(double mass, int n);

// Well-balanced combination: short - eps * long (the short matrix already
// carries its 1/eps scaling).
KernelMatrix build_balanced(const KernelMatrix& short_k, const KernelMatrix& long_k,
                            double eps);

} // namespace seg::kernels
