#include "segregate/wells.hpp"

#include "segregate/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seg::wells {

namespace {
void check_box(double u, const char* who) {
    if (!(std::abs(u) < 1.0)) throw std::domain_error(std::string(who) + ": |u| must be < 1");
}
// Relative tolerance for plateau membership of g*.
constexpr double kPlateauTol = 1e-10;
} // namespace

double entropy_term(double u) {
    check_box(u, "entropy_term");
    // log1p keeps accuracy near the box walls
    return (1.0 + u) * std::log1p(u) + (1.0 - u) * std::log1p(-u);
}

double eval_W(double u, const WellParams& p) {
    check_box(u, "eval_W");
    return -0.5 * p.j * u * u - 0.5 * u * u + p.kT * entropy_term(u);
}

double eval_W_prime(double u, const WellParams& p) {
    check_box(u, "eval_W_prime");
    return -(p.j + 1.0) * u + p.kT * (std::log1p(u) - std::log1p(-u));
}

double eval_G(double u, double kT) {
    check_box(u, "eval_G");
    return -0.5 * u * u + kT * entropy_term(u);
}

double eval_g(double u, double kT) {
    check_box(u, "eval_g");
    return -u + kT * (std::log1p(u) - std::log1p(-u));
}

double eval_g_prime(double u, double kT) {
    check_box(u, "eval_g_prime");
    return -1.0 + 2.0 * kT / (1.0 - u * u);
}

double well_kTc(double j) {
    return 0.5 * (1.0 + j);
}

double well_position(double j, double kT) {
    if (kT < 0.0) throw std::domain_error("well_position: kT must be >= 0");
    if (kT >= well_kTc(j)) return 0.0;
    if (kT == 0.0) return 1.0;
    auto f = [&](double u) {
        return (1.0 + j) * u - kT * (std::log1p(u) - std::log1p(-u));
    };
    // f > 0 near 0+, f -> -inf as u -> 1-
    double hi = 1.0 - 1e-16;
    return bisect(f, 1e-16, hi, 1e-16);
}

namespace {

// Shared hull -> table assembly. Fills Gstar/gstar and the widest bridge.
EnvelopeTable build_table(std::span<const double> grid, std::span<const double> values) {
    const int n = static_cast<int>(grid.size());
    if (n < 3) throw std::invalid_argument("convex_envelope: need at least 3 points");
    for (int i = 1; i < n; ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("convex_envelope: grid not strictly increasing");
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(values[i]))
            throw std::invalid_argument("convex_envelope: non-finite value");

    EnvelopeTable t;
    t.u_grid.assign(grid.begin(), grid.end());
    t.G_values.assign(values.begin(), values.end());
    t.Gstar_values.resize(n);
    t.gstar_values.resize(n);

    std::vector<int> hull = lower_hull(grid, values);
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(values[i]));
    const double gap_tol = 1e-12 * (scale + 1.0);

    double best_width = 0.0;
    for (size_t s = 0; s + 1 < hull.size(); ++s) {
        int p = hull[s], q = hull[s + 1];
        double slope = (values[q] - values[p]) / (grid[q] - grid[p]);
        for (int i = p; i < q; ++i) {
            t.Gstar_values[i] = values[p] + slope * (grid[i] - grid[p]);
            t.gstar_values[i] = slope;
        }
        if (q > p + 1) {
            // candidate bridge; accept only if the graph sits strictly above it
            double max_gap = 0.0;
            for (int i = p + 1; i < q; ++i)
                max_gap = std::max(max_gap, values[i] - t.Gstar_values[i]);
            if (max_gap > gap_tol && grid[q] - grid[p] > best_width) {
                best_width = grid[q] - grid[p];
                t.has_flat = true;
                t.u_lower = grid[p];
                t.u_upper = grid[q];
                t.v_star = slope;
            }
        }
    }
    int last = hull.back();
    t.Gstar_values[last] = values[last];
    t.gstar_values[last] = t.gstar_values[last == 0 ? 0 : last - 1];
    return t;
}

} // namespace

EnvelopeTable convex_envelope(std::span<const double> grid, std::span<const double> values) {
    return build_table(grid, values);
}

EnvelopeTable make_G_envelope(double kT, const EnvelopeOptions& opts) {
    if (kT <= 0.0) throw std::domain_error("make_G_envelope: kT must be positive");
    const int n = opts.n_u;
    std::vector<double> grid(n), vals(n);
    double lo = -1.0 + opts.delta_box, hi = 1.0 - opts.delta_box;
    for (int i = 0; i < n; ++i) {
        grid[i] = lo + (hi - lo) * i / (n - 1);
        vals[i] = eval_G(grid[i], kT);
    }
    EnvelopeTable t = build_table(grid, vals);
    t.analytic_G = true;
    t.kT = kT;
    if (t.has_flat) {
        // Tangency refinement: alternate root finding on g(u) = v_star with
        // a slope update until the endpoints settle.
        double du = (hi - lo) / (n - 1);
        for (int pass = 0; pass < 4; ++pass) {
            auto fr = [&](double u) { return eval_g(u, kT) - t.v_star; };
            double a = std::max(lo, t.u_upper - 2.0 * du);
            double b = std::min(hi, t.u_upper + 2.0 * du);
            if (fr(a) * fr(b) < 0.0) t.u_upper = bisect(fr, a, b, 1e-15);
            a = std::max(lo, t.u_lower - 2.0 * du);
            b = std::min(hi, t.u_lower + 2.0 * du);
            if (fr(a) * fr(b) < 0.0) t.u_lower = bisect(fr, a, b, 1e-15);
            double v_new = (eval_G(t.u_upper, kT) - eval_G(t.u_lower, kT)) /
                           (t.u_upper - t.u_lower);
            if (std::abs(v_new - t.v_star) < 1e-15) {
                t.v_star = v_new;
                break;
            }
            t.v_star = v_new;
        }
        // rewrite the table over the refined plateau so stored values honor
        // the tangency exactly
        double Gl = eval_G(t.u_lower, kT);
        for (int i = 0; i < n; ++i) {
            if (grid[i] >= t.u_lower && grid[i] <= t.u_upper) {
                t.Gstar_values[i] = Gl + t.v_star * (grid[i] - t.u_lower);
                t.gstar_values[i] = t.v_star;
            }
        }
    }
    return t;
}

FlatInterval flat_interval(const EnvelopeTable& t) {
    FlatInterval f;
    if (t.has_flat) {
        f.empty = false;
        f.u_lower = t.u_lower;
        f.u_upper = t.u_upper;
        f.v_star = t.v_star;
    }
    return f;
}

namespace {
double interp(const std::vector<double>& x, const std::vector<double>& y, double u) {
    auto it = std::upper_bound(x.begin(), x.end(), u);
    int i = static_cast<int>(it - x.begin());
    if (i <= 0) return y.front();
    if (i >= static_cast<int>(x.size())) return y.back();
    double w = (u - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + w * (y[i] - y[i - 1]);
}
} // namespace

double envelope_value(const EnvelopeTable& t, double u) {
    if (u < t.u_grid.front() || u > t.u_grid.back())
        throw std::domain_error("envelope_value: u outside table range");
    if (t.has_flat && u >= t.u_lower && u <= t.u_upper) {
        double Gl = t.analytic_G ? eval_G(t.u_lower, t.kT)
                                 : interp(t.u_grid, t.G_values, t.u_lower);
        return Gl + t.v_star * (u - t.u_lower);
    }
    if (t.analytic_G) return eval_G(u, t.kT);
    return interp(t.u_grid, t.Gstar_values, u);
}

double gstar_value(const EnvelopeTable& t, double u) {
    if (u < t.u_grid.front() || u > t.u_grid.back())
        throw std::domain_error("gstar_value: u outside table range");
    if (t.has_flat && u >= t.u_lower && u <= t.u_upper) return t.v_star;
    if (t.analytic_G) return eval_g(u, t.kT);
    return interp(t.u_grid, t.gstar_values, u);
}

namespace {
double invert_gstar(const EnvelopeTable& t, double v, bool upper_branch) {
    double g_min = gstar_value(t, t.u_grid.front());
    double g_max = gstar_value(t, t.u_grid.back());
    double scale = std::max(std::abs(g_min), std::abs(g_max));
    if (v < g_min - kPlateauTol * scale || v > g_max + kPlateauTol * scale)
        throw std::domain_error("selection: v outside the range of g*");
    v = std::clamp(v, g_min, g_max);
    if (t.has_flat && std::abs(v - t.v_star) <= kPlateauTol * (scale + 1.0))
        return upper_branch ? t.u_upper : t.u_lower;
    double lo = t.u_grid.front(), hi = t.u_grid.back();
    if (t.has_flat) {
        if (v > t.v_star)
            lo = t.u_upper;
        else
            hi = t.u_lower;
    }
    if (t.analytic_G) {
        auto f = [&](double u) { return eval_g(u, t.kT) - v; };
        if (f(lo) == 0.0) return lo;
        if (f(hi) == 0.0) return hi;
        return bisect(f, lo, hi, 1e-15);
    }
    // monotone table inversion on the off-plateau branch
    auto f = [&](double u) { return gstar_value(t, u) - v; };
    return bisect(f, lo, hi, 1e-13);
}
} // namespace

double s_lower(const EnvelopeTable& t, double v) {
    return invert_gstar(t, v, false);
}

double s_upper(const EnvelopeTable& t, double v) {
    return invert_gstar(t, v, true);
}

namespace {

struct TwoMinima {
    bool ok = false;
    double u1 = 0.0, f1 = 0.0;
    double u2 = 0.0, f2 = 0.0;
};

// Locate the two deepest local minima of f on (lo, hi) by grid scan plus
// golden-section refinement.
TwoMinima find_two_minima(const std::function<double(double)>& f, double lo, double hi) {
    const int n = 4001;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = lo + (hi - lo) * i / (n - 1);
        y[i] = f(x[i]);
    }
    std::vector<int> mins;
    for (int i = 1; i + 1 < n; ++i)
        if (y[i] < y[i - 1] && y[i] <= y[i + 1]) mins.push_back(i);
    // interval endpoints act as constrained minima
    if (n >= 2 && y[0] < y[1]) mins.insert(mins.begin(), 0);
    if (y[n - 1] < y[n - 2]) mins.push_back(n - 1);
    TwoMinima r;
    if (mins.size() < 2) return r;
    // keep the two deepest, ordered by position
    std::sort(mins.begin(), mins.end(), [&](int a, int b) { return y[a] < y[b]; });
    int ia = mins[0], ib = mins[1];
    if (x[ia] > x[ib]) std::swap(ia, ib);

    auto refine = [&](int idx, double& ux, double& fx) {
        double a = x[std::max(0, idx - 1)], b = x[std::min(n - 1, idx + 1)];
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = f(c), fd = f(d);
        for (int it = 0; it < 120 && (b - a) > 1e-15; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = f(d);
            }
        }
        ux = 0.5 * (a + b);
        fx = f(ux);
    };
    refine(ia, r.u1, r.f1);
    refine(ib, r.u2, r.f2);
    r.ok = std::abs(r.u1 - r.u2) > 10.0 * (hi - lo) / n;
    return r;
}

} // namespace

double balance_wells(const std::function<double(double)>& f, double lo, double hi,
                     double tol) {
    // Seed from the convexification bridge: the common tangent slope v* gives
    // lambda = -v*; then equalize the refined well depths by bisection.
    const int n = 4001;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = lo + (hi - lo) * i / (n - 1);
        y[i] = f(x[i]);
    }
    EnvelopeTable t = build_table(x, y);
    if (!t.has_flat) throw NoDoubleWell("balance_wells: input has no convexification bridge");
    double lam0 = -t.v_star;

    auto depth_diff = [&](double lam) {
        TwoMinima m = find_two_minima([&](double u) { return f(u) + lam * u; }, lo, hi);
        if (!m.ok) throw NoDoubleWell("balance_wells: lost the double well during balancing");
        return m.f1 - m.f2;
    };

    double scale = std::abs(lam0) + 1.0;
    double w = 1e-3 * scale;
    double a = lam0 - w, b = lam0 + w;
    double fa = depth_diff(a), fb = depth_diff(b);
    for (int k = 0; k < 40 && fa * fb > 0.0; ++k) {
        w *= 2.0;
        a = lam0 - w;
        b = lam0 + w;
        fa = depth_diff(a);
        fb = depth_diff(b);
    }
    if (fa * fb > 0.0) {
        if (std::abs(depth_diff(lam0)) < tol) return lam0;
        throw NoDoubleWell("balance_wells: could not bracket the balancing coefficient");
    }
    return bisect(depth_diff, a, b, tol * 1e-3);
}

double balance_wells(const WellParams& p, double delta_box) {
    return balance_wells([&](double u) { return eval_W(u, p); }, -1.0 + delta_box,
                         1.0 - delta_box);
}

} // namespace seg::wells
