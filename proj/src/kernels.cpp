#include "segregate/kernels.hpp"

#include "segregate/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace seg::kernels {

namespace {
constexpr double kTruncationFactor = 10.0;

void check_kernel(const ShortRangeKernel& k) {
    if (k.family != Family::constant && k.scale <= 0.0)
        throw std::invalid_argument("kernel: scale must be positive");
    if (k.mass < 0.0) throw std::invalid_argument("kernel: mass must be nonnegative");
}

// Height normalizing the truncated profile to integrate to k.mass.
double profile_height(const ShortRangeKernel& k) {
    switch (k.family) {
        case Family::box:
            return k.mass / (2.0 * k.scale);
        case Family::gaussian: {
            double span = std::erf(kTruncationFactor / std::sqrt(2.0));
            return k.mass / (k.scale * std::sqrt(2.0 * M_PI) * span);
        }
        case Family::exponential: {
            double span = 1.0 - std::exp(-kTruncationFactor);
            return k.mass / (2.0 * k.scale * span);
        }
        case Family::constant:
            return k.mass;
    }
    return 0.0;
}
} // namespace

Family family_from_string(const std::string& s) {
    if (s == "box") return Family::box;
    if (s == "gaussian") return Family::gaussian;
    if (s == "exponential") return Family::exponential;
    if (s == "constant") return Family::constant;
    throw std::invalid_argument("unknown kernel family '" + s + "'");
}

std::string family_name(Family f) {
    switch (f) {
        case Family::box: return "box";
        case Family::gaussian: return "gaussian";
        case Family::exponential: return "exponential";
        case Family::constant: return "constant";
    }
    return "?";
}

double support_radius(const ShortRangeKernel& k) {
    switch (k.family) {
        case Family::box: return k.scale;
        case Family::gaussian:
        case Family::exponential: return kTruncationFactor * k.scale;
        case Family::constant: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

bool line_integrable(const ShortRangeKernel& k) {
    return k.family != Family::constant;
}

double family_value(const ShortRangeKernel& k, double z) {
    check_kernel(k);
    double az = std::abs(z);
    if (k.family == Family::constant) return k.mass;
    if (az > support_radius(k)) return 0.0;
    double H = profile_height(k);
    switch (k.family) {
        case Family::box: return H;
        case Family::gaussian: return H * std::exp(-0.5 * (az / k.scale) * (az / k.scale));
        case Family::exponential: return H * std::exp(-az / k.scale);
        default: return 0.0;
    }
}

double tail_mass(const ShortRangeKernel& k, double d) {
    check_kernel(k);
    if (d < 0.0) throw std::invalid_argument("tail_mass: d must be >= 0");
    if (k.family == Family::constant)
        throw std::invalid_argument("tail_mass: constant kernel has no line tail");
    double R = support_radius(k);
    if (d >= R) return 0.0;
    double H = profile_height(k);
    switch (k.family) {
        case Family::box:
            return H * (R - d);
        case Family::gaussian: {
            double s = k.scale * std::sqrt(2.0);
            return H * k.scale * std::sqrt(M_PI / 2.0) *
                   (std::erf(R / s) - std::erf(d / s));
        }
        case Family::exponential:
            return H * k.scale * (std::exp(-d / k.scale) - std::exp(-R / k.scale));
        default:
            return 0.0;
    }
}

double first_moment(const ShortRangeKernel& k, double truncation) {
    check_kernel(k);
    if (truncation <= 0.0) throw std::invalid_argument("first_moment: truncation must be positive");
    // raw (untruncated) profile shapes, normalized like the truncated ones
    double H = profile_height(k);
    auto raw = [&](double z) -> double {
        double az = std::abs(z);
        switch (k.family) {
            case Family::box: return az <= k.scale ? H : 0.0;
            case Family::gaussian: return H * std::exp(-0.5 * (az / k.scale) * (az / k.scale));
            case Family::exponential: return H * std::exp(-az / k.scale);
            case Family::constant: return k.mass;
        }
        return 0.0;
    };
    return 2.0 * adaptive_simpson([&](double z) { return z * raw(z); }, 0.0, truncation,
                                  1e-14);
}

std::vector<double> KernelMatrix::apply(std::span<const double> u) const {
    if (static_cast<int>(u.size()) != n)
        throw std::invalid_argument("KernelMatrix::apply: size mismatch");
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = values.data() + static_cast<size_t>(i) * n;
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += row[j] * u[j];
        out[i] = h * s;
    }
    return out;
}

double KernelMatrix::total_mass() const {
    return h * kahan_sum(row_mass);
}

void KernelMatrix::recompute_row_mass() {
    row_mass.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = values.data() + static_cast<size_t>(i) * n;
        row_mass[i] = h * kahan_sum(std::span<const double>(row, n));
    }
}

KernelMatrix build_short(const ShortRangeKernel& k, double eps, int n) {
    check_kernel(k);
    if (eps <= 0.0) throw std::invalid_argument("build_short: eps must be positive");
    if (n < 2) throw std::invalid_argument("build_short: n must be >= 2");
    KernelMatrix m;
    m.n = n;
    m.h = 1.0 / n;
    m.values.assign(static_cast<size_t>(n) * n, 0.0);
    if (k.family == Family::constant) {
        for (auto& v : m.values) v = k.mass;
    } else {
        // values depend only on |i - j|
        std::vector<double> band(n);
        for (int d = 0; d < n; ++d)
            band[d] = family_value(k, (d * m.h) / eps) / eps;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m.at(i, j) = band[std::abs(i - j)];
    }
    m.recompute_row_mass();
    return m;
}

KernelMatrix neumann_green(int n) {
    if (n < 2) throw std::invalid_argument("neumann_green: n must be >= 2");
    KernelMatrix m;
    m.n = n;
    m.h = 1.0 / n;
    m.kind = Kind::green;
    m.values.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        double x = (i + 0.5) * m.h;
        for (int j = 0; j <= i; ++j) {
            double y = (j + 0.5) * m.h;
            double g = 0.5 * (x * x + y * y) - std::max(x, y) + 1.0 / 3.0;
            m.at(i, j) = g;
            m.at(j, i) = g;
        }
    }
    // Double centering: kill the O(h^2) collocation residue so every row
    // integrates to zero exactly. Keeps symmetry; entry perturbation is O(h^2).
    std::vector<double> rmean(n, 0.0);
    double gmean = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* row = m.values.data() + static_cast<size_t>(i) * n;
        rmean[i] = kahan_sum(std::span<const double>(row, n)) / n;
        gmean += rmean[i];
    }
    gmean /= n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m.at(i, j) += gmean - rmean[i] - rmean[j];
    m.recompute_row_mass();
    return m;
}

KernelMatrix build_constant_long(double mass, int n) {
    if (n < 2) throw std::invalid_argument("build_constant_long: n must be >= 2");
    KernelMatrix m;
    m.n = n;
    m.h = 1.0 / n;
    m.values.assign(static_cast<size_t>(n) * n, mass);
    m.recompute_row_mass();
    return m;
}

KernelMatrix build_balanced(const KernelMatrix& short_k, const KernelMatrix& long_k,
                            double eps) {
    if (short_k.n != long_k.n)
        throw std::invalid_argument("build_balanced: grid mismatch");
    KernelMatrix m = short_k;
    m.kind = Kind::generic;
    for (size_t i = 0; i < m.values.size(); ++i)
        m.values[i] -= eps * long_k.values[i];
    m.recompute_row_mass();
    return m;
}

} // namespace seg::kernels
