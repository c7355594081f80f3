#include "segregate/minimize.hpp"

#include "segregate/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seg::minimize {

using energy::BVConfig;
using energy::Field;
using kernels::KernelMatrix;

namespace {

// Alternating projection onto {box} cap {mass = m}: both sets are convex and
// intersect, so this converges geometrically. Ends with the exact mass shift.
void project_box_mass(std::vector<double>& u, double m, double box) {
    const int n = static_cast<int>(u.size());
    for (int it = 0; it < 50; ++it) {
        double mass = kahan_sum(u) / n;
        double shift = m - mass;
        bool clipped = false;
        for (auto& v : u) {
            v += shift;
            if (v > box) {
                v = box;
                clipped = true;
            } else if (v < -box) {
                v = -box;
                clipped = true;
            }
        }
        if (!clipped && std::abs(shift) <= 1e-13) break;
    }
    double mass = kahan_sum(u) / n;
    double shift = m - mass;
    for (auto& v : u) v += shift;
}

} // namespace

MinimizerResult local_minimize(const Field& init, const KernelMatrix& J, double kT,
                               double m, const MinimizeOptions& opts) {
    const int n = init.n;
    if (n != J.n) throw std::invalid_argument("local_minimize: grid mismatch");
    if (!(opts.grad_tol > 0.0) || !(opts.step0 > 0.0) || opts.max_iters < 1)
        throw std::invalid_argument("local_minimize: tolerances must be positive");
    if (!(opts.delta_box > 0.0 && opts.delta_box < 0.1))
        throw std::invalid_argument("local_minimize: delta_box must lie in (0, 0.1)");
    const double box = 1.0 - opts.delta_box;
    if (!(std::abs(m) < box))
        throw std::invalid_argument("local_minimize: infeasible mass |m| >= 1 - delta_box");
    const double h = 1.0 / n;

    std::vector<double> u = init.values;
    project_box_mass(u, m, box);

    // E(u) = -1/2 h <Ju, u> + h sum G(u_i); the j-part of W lives in the
    // quadratic term (exact split identity).
    auto energy_of = [&](const std::vector<double>& v, const std::vector<double>& Jv) {
        double quad = 0.0, gsum = 0.0;
        for (int i = 0; i < n; ++i) {
            quad += v[i] * Jv[i];
            gsum += wells::eval_G(v[i], kT);
        }
        return h * (-0.5 * quad + gsum);
    };
    // continuum force g_i = dE/du_i / h
    auto force_of = [&](const std::vector<double>& v, const std::vector<double>& Jv,
                        std::vector<double>& g) {
        for (int i = 0; i < n; ++i) g[i] = -Jv[i] + wells::eval_g(v[i], kT);
    };
    // diagonal preconditioner against the stiff log well near |u| -> 1
    auto precondition = [&](const std::vector<double>& v, std::vector<double>& D) {
        for (int i = 0; i < n; ++i) {
            double gp = -1.0 + 2.0 * kT / (1.0 - v[i] * v[i]);
            D[i] = std::max(gp, 0.0) + J.row_mass[i] + 1.0;
        }
    };
    // D-weighted multiplier of the mass constraint: removing it keeps the
    // preconditioned step on the mass tangent and zeroes the stationarity
    // measure at constrained optima
    auto multiplier = [&](const std::vector<double>& g, const std::vector<double>& D) {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
            num += g[i] / D[i];
            den += 1.0 / D[i];
        }
        return num / den;
    };
    auto stationarity = [&](const std::vector<double>& v, const std::vector<double>& g,
                            std::vector<double>& D) {
        precondition(v, D);
        double lam = multiplier(g, D);
        std::vector<double> probe(n);
        for (int i = 0; i < n; ++i) probe[i] = v[i] - (g[i] - lam) / D[i];
        project_box_mass(probe, m, box);
        double pg = 0.0;
        for (int i = 0; i < n; ++i) {
            double d = probe[i] - v[i];
            pg += d * d;
        }
        return std::sqrt(pg * h);
    };

    std::vector<double> Ju = J.apply(u);
    std::vector<double> g(n), D(n), u_new(n);
    double E = energy_of(u, Ju);
    force_of(u, Ju, g);
    double step = opts.step0;
    int it = 0;
    bool converged = false;
    int stall = 0;
    MinimizerResult r;
    r.energy_log.push_back(E);
    r.mass_log.push_back(kahan_sum(u) * h);
    for (; it < opts.max_iters; ++it) {
        precondition(u, D);
        double mult = multiplier(g, D);
        double lam = step;
        bool accepted = false;
        double E_new = E;
        for (int bt = 0; bt < 60; ++bt) {
            for (int i = 0; i < n; ++i) u_new[i] = u[i] - lam * (g[i] - mult) / D[i];
            project_box_mass(u_new, m, box);
            double descent = 0.0;
            for (int i = 0; i < n; ++i) descent += g[i] * (u_new[i] - u[i]);
            auto Ju_new = J.apply(u_new);
            E_new = energy_of(u_new, Ju_new);
            if (descent <= 0.0 && E_new <= E + 1e-4 * h * descent) {
                Ju = std::move(Ju_new);
                accepted = true;
                break;
            }
            lam *= opts.backtrack;
        }
        if (!accepted) break;
        stall = (E - E_new <= 1e-15 * (std::abs(E) + 1e-300)) ? stall + 1 : 0;
        u.swap(u_new);
        E = E_new;
        r.energy_log.push_back(E);
        r.mass_log.push_back(kahan_sum(u) * h);
        force_of(u, Ju, g);
        step = std::min(lam * 1.5, 4.0 * opts.step0);
        if (stall >= 25) break;
        if (stationarity(u, g, D) <= opts.grad_tol) {
            converged = true;
            ++it;
            break;
        }
    }
    if (!converged) converged = stationarity(u, g, D) <= 10.0 * opts.grad_tol;

    r.field.n = n;
    r.field.values = std::move(u);
    r.energy = E;
    r.iterations = it;
    r.converged = converged;
    r.census = detect_jumps(r.field);
    return r;
}

JumpCensus detect_jumps(const Field& u, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("detect_jumps: level must lie in (0,1)");
    const int n = u.n;
    const double h = u.h();
    JumpCensus census;
    auto sgn = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
    int i = 0;
    while (i + 1 < n) {
        int si = sgn(u.values[i]);
        if (si == 0) {
            ++i;
            continue;
        }
        // next nonzero sign
        int j = i + 1;
        while (j < n && sgn(u.values[j]) == 0) ++j;
        if (j >= n) break;
        int sj = sgn(u.values[j]);
        if (sj == si) {
            i = j;
            continue;
        }
        // crossing between cells i and j (zeros attach left: located at cell i)
        double xa = u.x(i), xb = u.x(j);
        double ua = u.values[i], ub = u.values[j];
        double loc = (j == i + 1) ? xa + (xb - xa) * ua / (ua - ub) : u.x(i + 1);
        // contiguous band of sub-level cells around the crossing
        int lo = i, hi = j;
        while (lo >= 0 && std::abs(u.values[lo]) < level) --lo;
        while (hi < n && std::abs(u.values[hi]) < level) ++hi;
        bool valid = lo >= 0 && hi < n && sgn(u.values[lo]) == si && sgn(u.values[hi]) == sj;
        if (valid) {
            int band = hi - lo - 1;
            census.locations.push_back(loc);
            census.widths.push_back(h * std::max(band, 1));
        }
        i = j;
    }
    census.count = static_cast<int>(census.locations.size());
    return census;
}

double criterion_C(const KernelMatrix& J, double kT, const Field& u, int i0) {
    if (u.n != J.n) throw std::invalid_argument("criterion_C: grid mismatch");
    if (i0 < 0 || i0 >= J.n) throw std::invalid_argument("criterion_C: x0 off the grid");
    std::vector<double> gp(u.n);
    for (int i = 0; i < u.n; ++i) gp[i] = wells::eval_g_prime(u.values[i], kT);
    double int_gp = u.h() * kahan_sum(gp);
    return 0.25 * J.at(i0, i0) + 0.5 * J.total_mass() - J.row_mass[i0] - int_gp;
}

std::optional<double> gap_avoidance_check(const Field& u, const wells::EnvelopeTable& t,
                                          const JumpCensus& census, int window_cells) {
    if (!t.has_flat) return std::nullopt;
    const int n = u.n;
    std::vector<char> excluded(n, 0);
    for (double loc : census.locations) {
        int c = std::clamp(static_cast<int>(loc * n), 0, n - 1);
        for (int i = std::max(0, c - window_cells); i <= std::min(n - 1, c + window_cells); ++i)
            excluded[i] = 1;
    }
    long total = 0, inside = 0;
    for (int i = 0; i < n; ++i) {
        if (excluded[i]) continue;
        ++total;
        if (u.values[i] > t.u_lower && u.values[i] < t.u_upper) ++inside;
    }
    if (total == 0) return 0.0;
    return static_cast<double>(inside) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Finite-dimensional jump optimization

namespace {

// mass(x) = s0 [ 2 sum_j (-1)^{j+1} x_j + (-1)^k ]
double mass_of_jumps(const std::vector<double>& x, int s0) {
    double acc = 0.0;
    double sign = 1.0;
    for (double v : x) {
        acc += sign * v;
        sign = -sign;
    }
    int k = static_cast<int>(x.size());
    return s0 * (2.0 * acc + ((k % 2 == 0) ? 1.0 : -1.0));
}

// Projection onto the affine mass constraint (Euclidean).
void project_mass_constraint(std::vector<double>& x, int s0, double m) {
    const int k = static_cast<int>(x.size());
    std::vector<double> A(k);
    for (int j = 0; j < k; ++j) A[j] = 2.0 * s0 * ((j % 2 == 0) ? 1.0 : -1.0);
    double r = mass_of_jumps(x, s0) - m;
    double a2 = 0.0;
    for (double a : A) a2 += a * a;
    for (int j = 0; j < k; ++j) x[j] -= A[j] * r / a2;
}

bool ordered(const std::vector<double>& x, double gap_min) {
    double prev = 0.0;
    for (double v : x) {
        if (!(v > prev + gap_min && v < 1.0 - gap_min)) return false;
        prev = v;
    }
    return true;
}

} // namespace

JumpOptimum optimize_jump_positions(int k, double c0, const KernelMatrix& Jl, double m,
                                    int start_sign) {
    if (start_sign != 1 && start_sign != -1)
        throw std::invalid_argument("optimize_jump_positions: start_sign must be +-1");
    if (k == 0) {
        if (m != 1.0 && m != -1.0)
            throw std::invalid_argument("optimize_jump_positions: k = 0 requires m = +-1 (parity)");
        BVConfig c;
        c.start_sign = static_cast<int>(m);
        JumpOptimum r;
        r.config = c;
        r.energy = energy::energy_I0(c, c0, Jl);
        return r;
    }
    if (k < 0) throw std::invalid_argument("optimize_jump_positions: k must be >= 0");
    if (!(std::abs(m) < 1.0))
        throw std::invalid_argument("optimize_jump_positions: |m| must be < 1 for k >= 1");

    const bool green = (Jl.kind == kernels::Kind::green);
    auto eval = [&](const std::vector<double>& x) {
        BVConfig c{x, start_sign};
        return green ? energy::energy_I0_green(c, c0) : energy::energy_I0(c, c0, Jl);
    };

    // deterministic feasible start: equally spaced, projected to the mass plane
    std::vector<double> x(k);
    for (int j = 0; j < k; ++j) x[j] = (j + 0.5) / k;
    project_mass_constraint(x, start_sign, m);
    if (!ordered(x, 1e-9)) {
        for (int j = 0; j < k; ++j) x[j] = (j + 1.0) / (k + 1.0);
        project_mass_constraint(x, start_sign, m);
        if (!ordered(x, 1e-9))
            throw std::invalid_argument("optimize_jump_positions: k incompatible with m");
    }

    std::vector<double> A(k);
    for (int j = 0; j < k; ++j) A[j] = 2.0 * start_sign * ((j % 2 == 0) ? 1.0 : -1.0);
    double a2 = 0.0;
    for (double a : A) a2 += a * a;

    auto grad = [&](const std::vector<double>& xs, std::vector<double>& g) {
        if (green) {
            BVConfig c{xs, start_sign};
            double mm = energy::bv_mass(c);
            // dF/dx_j = -Delta_j v(x_j) with v(x) = C - int_0^x W. The
            // unknown constant C enters parallel to the mass-constraint
            // normal, so the tangent projection below removes it. W is
            // piecewise linear, integrated exactly segment by segment.
            int sign = c.start_sign;
            double prev = 0.0, w = 0.0, intW = 0.0;
            std::vector<double> vj(k);
            for (int j = 0; j < k; ++j) {
                double len = xs[j] - prev;
                double slope = sign - mm;
                intW += w * len + 0.5 * slope * len * len;
                w += slope * len;
                vj[j] = -intW; // v(x_j) + const
                prev = xs[j];
                sign = -sign;
            }
            for (int j = 0; j < k; ++j) {
                double delta = -2.0 * start_sign * ((j % 2 == 0) ? 1.0 : -1.0);
                g[j] = -delta * vj[j];
            }
        } else {
            // central differences on the quadrature route
            std::vector<double> xp = xs;
            const double d = 1e-7;
            for (int j = 0; j < k; ++j) {
                xp[j] = xs[j] + d;
                double fp = eval(xp);
                xp[j] = xs[j] - d;
                double fmv = eval(xp);
                xp[j] = xs[j];
                g[j] = (fp - fmv) / (2.0 * d);
            }
        }
        // project the gradient onto the mass tangent
        double ga = 0.0;
        for (int j = 0; j < k; ++j) ga += g[j] * A[j];
        for (int j = 0; j < k; ++j) g[j] -= ga * A[j] / a2;
    };

    double F = eval(x);
    std::vector<double> g(k), xt(k);
    double step = 0.1;
    int it = 0;
    for (; it < 5000; ++it) {
        grad(x, g);
        double gn = 0.0;
        for (double v : g) gn += v * v;
        gn = std::sqrt(gn);
        if (gn < 1e-13) break;
        double lam = step;
        bool ok = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (int j = 0; j < k; ++j) xt[j] = x[j] - lam * g[j];
            project_mass_constraint(xt, start_sign, m);
            if (ordered(xt, 1e-12)) {
                double Ft = eval(xt);
                if (Ft <= F - 1e-4 * lam * gn * gn) {
                    x = xt;
                    F = Ft;
                    ok = true;
                    step = lam * 2.0;
                    break;
                }
            }
            lam *= 0.5;
        }
        if (!ok) break;
    }

    if (green) {
        // Newton polish on the KKT system with analytic derivatives:
        //   H_jl = Delta_j Delta_l G(x_j, x_l) + delta_jl Delta_j W(x_j)
        auto Gfun = [](double a, double b) {
            return 0.5 * (a * a + b * b) - std::max(a, b) + 1.0 / 3.0;
        };
        for (int newton = 0; newton < 40; ++newton) {
            BVConfig c{x, start_sign};
            double mm = energy::bv_mass(c);
            std::vector<double> delta(k), vj(k), Wj(k);
            {
                int sign = c.start_sign;
                double prev = 0.0, w = 0.0, intW = 0.0;
                for (int j = 0; j < k; ++j) {
                    double len = x[j] - prev;
                    double slope = sign - mm;
                    intW += w * len + 0.5 * slope * len * len;
                    w += slope * len;
                    vj[j] = -intW;
                    Wj[j] = w; // W just right of... continuous at x_j
                    prev = x[j];
                    sign = -sign;
                }
            }
            for (int j = 0; j < k; ++j)
                delta[j] = -2.0 * start_sign * ((j % 2 == 0) ? 1.0 : -1.0);
            const int dim = k + 1;
            std::vector<double> M(dim * dim, 0.0), rhs(dim, 0.0);
            for (int j = 0; j < k; ++j) {
                for (int l = 0; l < k; ++l)
                    M[j * dim + l] = delta[j] * delta[l] * Gfun(x[j], x[l]);
                M[j * dim + j] += delta[j] * Wj[j];
                M[j * dim + k] = A[j];
                M[k * dim + j] = A[j];
                rhs[j] = delta[j] * vj[j]; // -gradient
            }
            rhs[k] = -(mass_of_jumps(x, start_sign) - m);
            std::vector<double> d;
            try {
                d = solve_dense(M, rhs, dim);
            } catch (const std::exception&) {
                break;
            }
            double t = 1.0;
            bool moved = false;
            for (int bt = 0; bt < 50; ++bt) {
                for (int j = 0; j < k; ++j) xt[j] = x[j] + t * d[j];
                if (ordered(xt, 1e-12)) {
                    double Ft = eval(xt);
                    if (Ft <= F + 1e-12 * (std::abs(F) + 1.0)) {
                        x = xt;
                        F = Ft;
                        moved = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            double dn = 0.0;
            for (int j = 0; j < k; ++j) dn = std::max(dn, std::abs(d[j]));
            ++it;
            if (!moved || dn < 1e-14) break;
        }
        F = eval(x);
    }

    JumpOptimum r;
    r.config = BVConfig{x, start_sign};
    r.energy = F;
    r.iterations = it;
    return r;
}

Field mollify_ramp(const BVConfig& c, int n, double eps, double amplitude) {
    energy::validate_bv(c);
    Field f(n);
    auto ramp01 = [](double t) { return std::clamp(t, 0.0, 1.0); };
    for (int i = 0; i < n; ++i) {
        double x = f.x(i);
        double v = c.start_sign;
        int sign = c.start_sign;
        for (double t : c.jumps) {
            double to = -sign;
            v += (to - sign) * ramp01((x - (t - eps)) / (2.0 * eps));
            sign = static_cast<int>(to);
        }
        f.values[i] = amplitude * v;
    }
    return f;
}

ContinuationResult continuation(const BVConfig& c, double eps,
                                const ContinuationSetup& setup,
                                const MinimizeOptions& opts) {
    energy::validate_bv(c);
    ContinuationResult out;
    out.eps = eps;
    const int n = setup.n;
    const int k = energy::jump_count(c);

    KernelMatrix J = kernels::build_short(setup.short_kernel, eps, n);
    if (setup.long_kernel) J = kernels::build_balanced(J, *setup.long_kernel, eps);

    // bulk well level for the mollified seed
    std::vector<double> rm = J.row_mass;
    std::nth_element(rm.begin(), rm.begin() + n / 2, rm.end());
    double j_bulk = rm[n / 2];
    double uw = std::min(wells::well_position(j_bulk, setup.kT), 1.0 - opts.delta_box);

    Field init = mollify_ramp(c, n, eps, uw);
    double init_dist = 0.0;
    {
        auto sharp = energy::bv_cell_averages(c, n);
        for (int i = 0; i < n; ++i) {
            double d = init.values[i] - sharp[i];
            init_dist += d * d;
        }
        init_dist = std::sqrt(init_dist / n);
    }

    out.min = local_minimize(init, J, setup.kT, setup.m, opts);

    auto sharp = energy::bv_cell_averages(c, n);
    double dist = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = out.min.field.values[i] - sharp[i];
        dist += d * d;
    }
    out.l2_distance = std::sqrt(dist / n);

    out.scaled_excess = energy::energy_excess(out.min.field, J, setup.kT) / eps;
    if (setup.long_kernel) {
        out.i0_quarter = energy::energy_I0_green(c, setup.c0_quarter);
        out.i0_unit = energy::energy_I0_green(c, setup.c0_unit);
    } else {
        out.i0_quarter = setup.c0_quarter * k;
        out.i0_unit = setup.c0_unit * k;
    }
    out.gap_quarter = std::abs(out.scaled_excess - out.i0_quarter);
    out.gap_unit = std::abs(out.scaled_excess - out.i0_unit);

    if (!out.min.converged) {
        out.failed = true;
        out.reason = "did not converge";
    } else if (out.min.census.count != k) {
        out.failed = true;
        out.reason = "jump census changed";
    } else if (out.l2_distance > 2.0 * init_dist + 1e-9) {
        out.failed = true;
        out.reason = "left the trust ball around the sharp configuration";
    }
    return out;
}

ExponentFit exponent_fit(const energy::ProfileProblem& tmpl, std::span<const double> kTs) {
    ExponentFit fit;
    fit.kTc = wells::well_kTc(tmpl.j);
    if (kTs.size() < 3) throw std::invalid_argument("exponent_fit: need at least 3 points");
    for (double kT : kTs) {
        if (!(kT > 0.85 * fit.kTc - 1e-12 && kT < 0.995 * fit.kTc + 1e-12))
            throw std::invalid_argument("exponent_fit: kT grid must lie in [0.85, 0.995] kTc");
    }
    std::vector<double> lx, ly;
    for (double kT : kTs) {
        energy::ProfileProblem pp = tmpl;
        pp.kT = kT;
        energy::C0Result r;
        try {
            r = energy::compute_c0(pp);
        } catch (const std::exception& e) {
            throw std::runtime_error("exponent_fit: c0 solve failed at kT=" +
                                     std::to_string(kT) + ": " + e.what());
        }
        fit.kT.push_back(kT);
        fit.sigma.push_back(r.value);
        lx.push_back(std::log(fit.kTc - kT));
        ly.push_back(std::log(r.value));
    }
    LineFit lf = fit_line(lx, ly);
    fit.mu = lf.slope;
    fit.intercept = lf.intercept;
    fit.r2 = lf.r2;
    fit.flagged = fit.r2 < 0.99;
    return fit;
}

} // namespace seg::minimize
