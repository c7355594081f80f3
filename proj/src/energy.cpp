#include "segregate/energy.hpp"

#include "segregate/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seg::energy {

using kernels::KernelMatrix;
using kernels::ShortRangeKernel;

double Field::mass() const {
    return kahan_sum(values) * h();
}

int jump_count(const BVConfig& c) {
    return static_cast<int>(c.jumps.size());
}

void validate_bv(const BVConfig& c) {
    if (c.start_sign != 1 && c.start_sign != -1)
        throw std::invalid_argument("BVConfig: start_sign must be +-1");
    double prev = 0.0;
    for (double x : c.jumps) {
        if (!(x > prev && x < 1.0))
            throw std::invalid_argument("BVConfig: jumps must be strictly increasing in (0,1)");
        prev = x;
    }
}

double bv_mass(const BVConfig& c) {
    validate_bv(c);
    double m = 0.0, prev = 0.0;
    int sign = c.start_sign;
    for (double x : c.jumps) {
        m += sign * (x - prev);
        prev = x;
        sign = -sign;
    }
    m += sign * (1.0 - prev);
    return m;
}

double bv_value(const BVConfig& c, double x) {
    int sign = c.start_sign;
    for (double t : c.jumps) {
        if (x < t) break;
        sign = -sign;
    }
    return sign;
}

std::vector<double> bv_cell_averages(const BVConfig& c, int n) {
    validate_bv(c);
    // cumulative integral U(x) of the +-1 profile, evaluated exactly
    auto U = [&](double x) {
        double s = 0.0, prev = 0.0;
        int sign = c.start_sign;
        for (double t : c.jumps) {
            if (x <= t) {
                s += sign * (x - prev);
                return s;
            }
            s += sign * (t - prev);
            prev = t;
            sign = -sign;
        }
        s += sign * (x - prev);
        return s;
    };
    std::vector<double> avg(n);
    double h = 1.0 / n;
    for (int i = 0; i < n; ++i) avg[i] = (U((i + 1) * h) - U(i * h)) / h;
    return avg;
}

namespace {
void check_match(const Field& u, const KernelMatrix& J, const char* who) {
    if (u.n != J.n) throw std::invalid_argument(std::string(who) + ": grid mismatch");
    for (double v : u.values)
        if (!(std::abs(v) < 1.0))
            throw std::domain_error(std::string(who) + ": field leaves the box |u| < 1");
}
} // namespace

double energy_I(const Field& u, const KernelMatrix& J, double kT) {
    check_match(u, J, "energy_I");
    const int n = u.n;
    const double h = u.h();
    // interaction: 1/4 h^2 sum_ij J_ij (u_i - u_j)^2, compensated
    double s = 0.0, comp = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* row = J.values.data() + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            double d = u.values[i] - u.values[j];
            double term = row[j] * d * d - comp;
            double t = s + term;
            comp = (t - s) - term;
            s = t;
        }
    }
    double inter = 0.25 * h * h * s;
    std::vector<double> wv(n);
    for (int i = 0; i < n; ++i)
        wv[i] = wells::eval_W(u.values[i], {J.row_mass[i], kT});
    return inter + h * kahan_sum(wv);
}

double energy_I_split(const Field& u, const KernelMatrix& J, double kT) {
    check_match(u, J, "energy_I_split");
    const int n = u.n;
    const double h = u.h();
    std::vector<double> Ju = J.apply(u.values);
    double quad = kahan_dot(u.values, Ju); // = h sum_ij J_ij u_i u_j ... times h below
    std::vector<double> gv(n);
    for (int i = 0; i < n; ++i) gv[i] = wells::eval_G(u.values[i], kT);
    return -0.5 * h * quad + h * kahan_sum(gv);
}

double energy_I_star(const Field& u, const KernelMatrix& J, const wells::EnvelopeTable& t) {
    check_match(u, J, "energy_I_star");
    const int n = u.n;
    const double h = u.h();
    std::vector<double> Ju = J.apply(u.values);
    double quad = kahan_dot(u.values, Ju);
    std::vector<double> gv(n);
    for (int i = 0; i < n; ++i) gv[i] = wells::envelope_value(t, u.values[i]);
    return -0.5 * h * quad + h * kahan_sum(gv);
}

double well_floor_integral(const KernelMatrix& J, double kT) {
    std::vector<double> mins(J.n);
    for (int i = 0; i < J.n; ++i) {
        double jx = J.row_mass[i];
        double uw = wells::well_position(jx, kT);
        uw = std::min(uw, 1.0 - 1e-12);
        mins[i] = wells::eval_W(uw, {jx, kT});
    }
    return J.h * kahan_sum(mins);
}

double energy_excess(const Field& u, const KernelMatrix& J, double kT) {
    return energy_I(u, J, kT) - well_floor_integral(J, kT);
}

double green_longrange_term(const BVConfig& c) {
    validate_bv(c);
    double m = bv_mass(c);
    // W(x) = U(x) - m x is piecewise linear; 1/2 int W^2 in closed form
    double acc = 0.0, w = 0.0, prev = 0.0;
    int sign = c.start_sign;
    auto segment = [&](double len, double slope) {
        acc += w * w * len + w * slope * len * len + slope * slope * len * len * len / 3.0;
        w += slope * len;
    };
    for (double t : c.jumps) {
        segment(t - prev, sign - m);
        prev = t;
        sign = -sign;
    }
    segment(1.0 - prev, sign - m);
    return 0.5 * acc;
}

double energy_I0_green(const BVConfig& c, double c0) {
    return c0 * jump_count(c) + green_longrange_term(c);
}

double energy_I0(const BVConfig& c, double c0, const KernelMatrix& Jl) {
    validate_bv(c);
    const int n = Jl.n;
    const double h = Jl.h;
    std::vector<double> u = bv_cell_averages(c, n);
    double s = 0.0, comp = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* row = Jl.values.data() + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            double d = u[i] - u[j];
            double term = row[j] * d * d - comp;
            double t = s + term;
            comp = (t - s) - term;
            s = t;
        }
    }
    return c0 * jump_count(c) - 0.25 * h * h * s;
}

// ---------------------------------------------------------------------------
// Single-profile problem

C0Result compute_c0(const ProfileProblem& pp) {
    using wells::eval_W;
    using wells::eval_W_prime;
    if (pp.n < 8) throw std::invalid_argument("compute_c0: n too small");
    if (pp.L <= 0.0) throw std::invalid_argument("compute_c0: L must be positive");
    if (pp.kT < 0.0) throw std::domain_error("compute_c0: kT must be >= 0");
    if (pp.kT >= wells::well_kTc(pp.j))
        throw NoInterface("compute_c0: kT >= kTc(j), well is single");

    const int n = pp.n;
    const double hp = 2.0 * pp.L / n;
    const double box = 1.0 - pp.delta_box;
    double uw = std::min(wells::well_position(pp.j, pp.kT), box);
    const wells::WellParams wp{pp.j, pp.kT};
    const double wmin = eval_W(uw, wp);

    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = -pp.L + (i + 0.5) * hp;

    // kernel matrix (unscaled J^s on the profile grid)
    std::vector<double> band(n);
    const bool integrable = kernels::line_integrable(pp.kernel);
    for (int d = 0; d < n; ++d) band[d] = kernels::family_value(pp.kernel, d * hp);
    std::vector<double> K(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K[static_cast<size_t>(i) * n + j] = band[std::abs(i - j)];
    std::vector<double> krow(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += K[static_cast<size_t>(i) * n + j];
        krow[i] = hp * s;
    }
    // exterior pure-phase data (+uw for y > L, -uw for y < -L)
    std::vector<double> tail_hi(n, 0.0), tail_lo(n, 0.0);
    if (integrable) {
        for (int i = 0; i < n; ++i) {
            tail_hi[i] = kernels::tail_mass(pp.kernel, pp.L - x[i]);
            tail_lo[i] = kernels::tail_mass(pp.kernel, x[i] + pp.L);
        }
    }

    auto matvec = [&](const std::vector<double>& u) {
        std::vector<double> out(n, 0.0);
        for (int i = 0; i < n; ++i) {
            const double* row = K.data() + static_cast<size_t>(i) * n;
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += row[j] * u[j];
            out[i] = hp * s;
        }
        return out;
    };
    auto energy_of = [&](const std::vector<double>& u, const std::vector<double>& Ku) {
        // h^2 sum_ij K (u_i-u_j)^2 = 2 h sum k_i u_i^2 - 2 h sum u_i (Ku)_i
        double kern = 0.0, wsum = 0.0, ext = 0.0;
        for (int i = 0; i < n; ++i) {
            kern += krow[i] * u[i] * u[i] - u[i] * Ku[i];
            wsum += eval_W(u[i], wp) - wmin;
            double dp = u[i] - uw, dm = u[i] + uw;
            ext += tail_hi[i] * dp * dp + tail_lo[i] * dm * dm;
        }
        return pp.prefactor * (2.0 * hp * kern + 2.0 * hp * ext) + hp * wsum;
    };
    // continuum force (gradient / hp)
    auto force = [&](const std::vector<double>& u, const std::vector<double>& Ku,
                     std::vector<double>& g) {
        for (int i = 0; i < n; ++i) {
            double gk = 4.0 * (krow[i] * u[i] - Ku[i]);
            double ge = 4.0 * (tail_hi[i] * (u[i] - uw) + tail_lo[i] * (u[i] + uw));
            g[i] = pp.prefactor * (gk + ge) + eval_W_prime(u[i], wp);
        }
    };
    // diagonal preconditioner: the log well is very stiff near its minima and
    // would throttle a plain gradient method to useless step sizes
    auto precondition = [&](const std::vector<double>& u, std::vector<double>& D) {
        for (int i = 0; i < n; ++i) {
            double wpp = -(1.0 + pp.j) + 2.0 * pp.kT / (1.0 - u[i] * u[i]);
            double kern = 4.0 * pp.prefactor * (krow[i] + tail_hi[i] + tail_lo[i]);
            D[i] = kern + std::max(wpp, 0.0) + 0.5 * (1.0 + pp.j);
        }
    };

    // tanh seed at the kernel scale
    double w0 = integrable ? std::max(pp.kernel.scale, 4.0 * hp) : pp.L / 8.0;
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = uw * std::tanh(x[i] / w0);

    std::vector<double> Ku = matvec(u), g(n), D(n);
    double E = energy_of(u, Ku);
    force(u, Ku, g);
    double step = 1.0;
    int it = 0;
    bool converged = false;
    int stall = 0;
    std::vector<double> u_new(n);
    for (; it < pp.max_iters; ++it) {
        precondition(u, D);
        double lam = step;
        double E_new = E;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            double descent = 0.0;
            for (int i = 0; i < n; ++i) {
                u_new[i] = std::clamp(u[i] - lam * g[i] / D[i], -box, box);
                descent += g[i] * (u_new[i] - u[i]);
            }
            auto Ku_new = matvec(u_new);
            E_new = energy_of(u_new, Ku_new);
            if (descent <= 0.0 && E_new <= E + 1e-4 * hp * descent) {
                Ku = std::move(Ku_new);
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if (!accepted) break;
        stall = (E - E_new <= 1e-15 * (std::abs(E) + 1e-300)) ? stall + 1 : 0;
        u.swap(u_new);
        E = E_new;
        force(u, Ku, g);
        step = std::min(lam * 1.5, 2.0);
        if (stall >= 25) break;
        // preconditioned stationarity measure
        precondition(u, D);
        double pg = 0.0;
        for (int i = 0; i < n; ++i) {
            double p = std::clamp(u[i] - g[i] / D[i], -box, box) - u[i];
            pg += p * p;
        }
        pg = std::sqrt(pg * hp);
        if (pg <= pp.grad_tol) {
            converged = true;
            ++it;
            break;
        }
    }
    if (!converged) {
        precondition(u, D);
        double pg = 0.0;
        for (int i = 0; i < n; ++i) {
            double p = std::clamp(u[i] - g[i] / D[i], -box, box) - u[i];
            pg += p * p;
        }
        converged = std::sqrt(pg * hp) <= 10.0 * pp.grad_tol;
    }

    C0Result r;
    r.value = E;
    r.x = std::move(x);
    r.profile = std::move(u);
    r.u_well = uw;
    r.iterations = it;
    r.converged = converged;
    if (integrable)
        r.tail_gap = std::max(std::abs(r.profile.front() + uw), std::abs(r.profile.back() - uw));
    else
        r.tail_gap = std::numeric_limits<double>::quiet_NaN();
    return r;
}

Field recovery_field(const BVConfig& c, int n, double eps, const C0Result& prof) {
    validate_bv(c);
    if (prof.x.empty()) throw std::invalid_argument("recovery_field: empty profile");
    const double Lp = -prof.x.front();
    auto interp = [&](double xi) {
        if (xi <= prof.x.front()) return prof.profile.front();
        if (xi >= prof.x.back()) return prof.profile.back();
        double t = (xi - prof.x.front()) / (prof.x[1] - prof.x[0]);
        int i = std::min(static_cast<int>(t), static_cast<int>(prof.x.size()) - 2);
        double w = t - i;
        return prof.profile[i] * (1.0 - w) + prof.profile[i + 1] * w;
    };
    Field f(n);
    const int k = jump_count(c);
    for (int i = 0; i < n; ++i) {
        double x = f.x(i);
        // nearest jump and the sign right of it
        int jn = -1;
        double dn = 1e300;
        int sign = c.start_sign, sign_after = c.start_sign;
        for (int j = 0; j < k; ++j) {
            double d = std::abs(x - c.jumps[j]);
            if (d < dn) {
                dn = d;
                jn = j;
                sign_after = -sign;
            }
            sign = -sign;
        }
        if (jn >= 0 && dn <= eps * Lp) {
            double xi = (x - c.jumps[jn]) / eps;
            f.values[i] = sign_after * interp(xi);
        } else {
            f.values[i] = bv_value(c, x) * prof.u_well;
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// Elastic functional and its nonlocal form

namespace {
void check_w(std::span<const double> w, const char* who) {
    if (w.size() < 8) throw std::invalid_argument(std::string(who) + ": grid too small");
    if (w.front() != 0.0 || w.back() != 0.0)
        throw std::invalid_argument(std::string(who) + ": w must vanish at both ends");
}
} // namespace

double elastic_energy(std::span<const double> w, double eps, const wells::WellParams& p,
                      double m) {
    (void)m; // the mass enters only through the nonlocal form
    check_w(w, "elastic_energy");
    const int n = static_cast<int>(w.size()) - 1;
    const double h = 1.0 / n;

    // W(w') at midpoints
    std::vector<double> wprime(n);
    for (int i = 0; i < n; ++i) {
        wprime[i] = (w[i + 1] - w[i]) / h;
        if (!(std::abs(wprime[i]) < 1.0))
            throw std::domain_error("elastic_energy: |w'| must stay below 1");
    }
    std::vector<double> wvals(n);
    for (int i = 0; i < n; ++i) wvals[i] = wells::eval_W(wprime[i], p);
    double well_term = h * kahan_sum(wvals);

    // w^2 by trapezoid (zero ends)
    std::vector<double> sq(n - 1);
    for (int i = 1; i < n; ++i) sq[i - 1] = w[i] * w[i];
    double found_term = h * kahan_sum(sq);

    // w'' at nodes: central inside, one-sided second order at the walls
    std::vector<double> wpp(n + 1);
    for (int i = 1; i < n; ++i) wpp[i] = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h);
    wpp[0] = (2.0 * w[0] - 5.0 * w[1] + 4.0 * w[2] - w[3]) / (h * h);
    wpp[n] = (2.0 * w[n] - 5.0 * w[n - 1] + 4.0 * w[n - 2] - w[n - 3]) / (h * h);
    std::vector<double> bend(n + 1);
    for (int i = 0; i <= n; ++i) bend[i] = wpp[i] * wpp[i];
    double bend_term = h * (kahan_sum(bend) - 0.5 * bend[0] - 0.5 * bend[n]);

    return 0.5 * eps * eps * bend_term + well_term + found_term;
}

ElasticPair elastic_to_nonlocal(std::span<const double> w, double eps,
                                const wells::WellParams& p, double m,
                                const KernelMatrix& green) {
    check_w(w, "elastic_to_nonlocal");
    const int n = static_cast<int>(w.size()) - 1;
    if (green.n != n) throw std::invalid_argument("elastic_to_nonlocal: Green grid mismatch");
    const double h = 1.0 / n;

    ElasticPair out;
    out.elastic = elastic_energy(w, eps, p, m);

    // u = m - w' at midpoints
    out.u = Field(n);
    for (int i = 0; i < n; ++i) out.u.values[i] = m - (w[i + 1] - w[i]) / h;
    const auto& u = out.u.values;

    // u' on the midpoint grid itself: central differences of the field values
    // with one-sided second-order stencils at the walls. This route carries
    // its own O(h^2) discretization rather than reusing the nodal stencils.
    std::vector<double> upsq(n);
    for (int i = 1; i + 1 < n; ++i) {
        double up = (u[i + 1] - u[i - 1]) / (2.0 * h);
        upsq[i] = up * up;
    }
    {
        double up0 = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
        double upn = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
        upsq[0] = up0 * up0;
        upsq[n - 1] = upn * upn;
    }
    double grad_term = h * kahan_sum(upsq);

    std::vector<double> wvals(n);
    for (int i = 0; i < n; ++i) wvals[i] = wells::eval_W(m - u[i], p);
    double well_term = h * kahan_sum(wvals);

    std::vector<double> Gu = green.apply(u);
    double green_term = h * kahan_dot(u, Gu);

    out.nonlocal = 0.5 * eps * eps * grad_term + well_term + green_term;
    return out;
}

} // namespace seg::energy
