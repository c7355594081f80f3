// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Criteria 6-9 serialize their results to JSON records; criterion
// 10 reruns them and byte-compares the serializations.
#include "segregate/energy.hpp"
#include "segregate/kernels.hpp"
#include "segregate/minimize.hpp"
#include "segregate/numerics.hpp"
#include "segregate/thermo.hpp"
#include "segregate/wells.hpp"

#include "json.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

using namespace seg;
using json = nlohmann::ordered_json;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    json record = json::object();

    void require(bool ok, const std::string& why) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += why;
        }
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// --------------------------------------------------------------- criterion 1

Outcome criterion1() {
    Outcome o;
    thermo::EosParams p{3.0, 1.0 / 3.0, 8.0 / 3.0};
    for (double T : {0.85, 0.90, 0.95}) {
        auto r = thermo::maxwell_construction(T, p);
        double res = adaptive_simpson(
            [&](double V) { return thermo::vdw_pressure(V, T, p) - r.Pstar; }, r.V1, r.V2,
            1e-13);
        o.require(std::abs(res) < 1e-8,
                  "equal-area residual " + fmt(res) + " at T=" + fmt(T));
        o.require(r.V1 < 1.0 && r.V2 > 1.0, "coexistence pair does not straddle Vc");
    }
    auto near = thermo::maxwell_construction(0.9999, p);
    o.require(near.V2 - near.V1 < 0.05,
              "near-critical width " + fmt(near.V2 - near.V1) + " >= 0.05");
    return o;
}

// --------------------------------------------------------------- criterion 2

Outcome criterion2() {
    Outcome o;
    for (int i = 2; i <= 12; ++i) {
        double kT = i / 20.0;
        auto t = wells::make_G_envelope(kT);
        double scale = 0.0;
        for (double v : t.G_values) scale = std::max(scale, std::abs(v));
        for (size_t k = 0; k < t.u_grid.size(); ++k)
            o.require(t.Gstar_values[k] <= t.G_values[k] + 1e-12 * (scale + 1.0),
                      "G* > G at kT=" + fmt(kT));
        for (size_t k = 1; k + 1 < t.u_grid.size(); ++k) {
            double d2 = t.Gstar_values[k + 1] - 2.0 * t.Gstar_values[k] + t.Gstar_values[k - 1];
            if (d2 < -1e-12) {
                o.require(false, "G* not convex at kT=" + fmt(kT));
                break;
            }
        }
        o.require(t.has_flat == (kT < 0.5), "flat interval presence wrong at kT=" + fmt(kT));
        if (t.has_flat)
            o.require(std::abs(t.u_lower + t.u_upper) < 1e-8,
                      "plateau not symmetric at kT=" + fmt(kT));
    }
    return o;
}

// --------------------------------------------------------------- criterion 3

Outcome criterion3() {
    Outcome o;
    const int n = 256;
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> dk(-0.5, 1.0), du(-0.95, 0.95), dt(0.05, 0.65);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        kernels::KernelMatrix J;
        J.n = n;
        J.h = 1.0 / n;
        J.values.assign(static_cast<size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                double v = dk(rng);
                J.at(i, j) = v;
                J.at(j, i) = v;
            }
        J.recompute_row_mass();
        energy::Field u(n);
        for (auto& v : u.values) v = du(rng);
        double kT = dt(rng);
        double a = energy::energy_I(u, J, kT);
        double b = energy::energy_I_split(u, J, kT);
        worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    o.require(worst < 1e-12, "split identity relative error " + fmt(worst));
    o.detail = "worst rel err " + fmt(worst);
    return o;
}

// --------------------------------------------------------------- criterion 4

Outcome criterion4() {
    Outcome o;
    auto err_at = [](int n) {
        auto g = kernels::neumann_green(n);
        double worst = 0.0;
        for (int k = 1; k <= 5; ++k) {
            std::vector<double> f(n);
            for (int i = 0; i < n; ++i) f[i] = std::cos(k * M_PI * (i + 0.5) / n);
            auto Gf = g.apply(f);
            for (int i = 0; i < n; ++i)
                worst = std::max(worst, std::abs(Gf[i] - f[i] / (k * M_PI * k * M_PI)));
        }
        double row = 0.0;
        for (double rm : g.row_mass) row = std::max(row, std::abs(rm));
        return std::pair{worst, row};
    };
    auto [e256, row256] = err_at(256);
    auto [e512, row512] = err_at(512);
    const double C = 40.0;
    o.require(e256 <= C / (256.0 * 256.0), "eigenfunction error at n=256 above C/n^2");
    o.require(e512 <= C / (512.0 * 512.0), "eigenfunction error at n=512 above C/n^2");
    double order = std::log2(e256 / e512);
    o.require(order >= 1.9, "observed order " + fmt(order) + " < 1.9");
    o.require(row256 < 1e-10 && row512 < 1e-10, "row mass above 1e-10");
    o.detail = "order " + fmt(order) + ", max row mass " + fmt(std::max(row256, row512));
    return o;
}

// --------------------------------------------------------------- criterion 5

Outcome criterion5() {
    Outcome o;
    wells::WellParams p{0.0, 0.3};
    const double eps = 0.2, m = 0.05, amplitude = 0.8;
    const int modes = 6, fields = 10;
    auto mean_gap = [&](int n, bool check_each) {
        auto green = kernels::neumann_green(n);
        double acc = 0.0;
        for (int f = 0; f < fields; ++f) {
            std::mt19937_64 rng(7919 + f);
            std::uniform_real_distribution<double> d(-1.0, 1.0);
            std::vector<double> a(modes);
            double bound = 0.0;
            for (int k = 0; k < modes; ++k) {
                a[k] = d(rng) / ((k + 1.0) * (k + 1.0) * (k + 1.0));
                bound += std::abs(a[k]) * (k + 1.0) * M_PI;
            }
            for (auto& c : a) c *= amplitude / bound;
            std::vector<double> w(n + 1, 0.0);
            for (int i = 1; i < n; ++i) {
                double x = static_cast<double>(i) / n;
                double s = 0.0;
                for (int k = 0; k < modes; ++k) s += a[k] * std::sin((k + 1.0) * M_PI * x);
                w[i] = s;
            }
            auto pair = energy::elastic_to_nonlocal(w, eps, p, m, green);
            double rel = std::abs(pair.elastic - pair.nonlocal) / std::abs(pair.elastic);
            if (check_each && !(rel < 1e-3)) o.require(false, "rel gap " + fmt(rel) + " at n=1024");
            acc += rel;
        }
        return acc / fields;
    };
    double g1024 = mean_gap(1024, true);
    double g2048 = mean_gap(2048, false);
    double ratio = g1024 / g2048;
    o.require(ratio >= 3.5 && ratio <= 4.5, "doubling ratio " + fmt(ratio) + " outside [3.5,4.5]");
    o.detail = "mean rel gap " + fmt(g1024) + ", ratio " + fmt(ratio);
    return o;
}

// --------------------------------------------------------------- criterion 6

Outcome criterion6() {
    Outcome o;
    const int n = 2048;
    const double kT = 0.25, m = 0.0;
    kernels::ShortRangeKernel sk{kernels::Family::gaussian, 0.25, 1.0};
    auto green = kernels::neumann_green(n);
    auto table = wells::make_G_envelope(kT);
    energy::BVConfig cfg{{0.25, 0.75}, -1};
    minimize::MinimizeOptions opts;
    opts.grad_tol = 1e-9;
    // the interface core is a genuine jump (values clear the flat interval in
    // one cell); the eps-scaled structure is the tail layer, so the census
    // level sits between the jump bracket (~0.96) and the wells (~0.9993)
    const double level = 0.98;

    o.record["experiment"] = "sharp_interface_sweep";
    o.record["census_level"] = level;
    o.record["runs"] = json::array();
    double prev_width = 1e300;
    int census0 = -1;
    for (double eps : {0.2, 0.1, 0.05}) {
        auto J = kernels::build_balanced(kernels::build_short(sk, eps, n), green, eps);
        std::vector<double> rm = J.row_mass;
        std::nth_element(rm.begin(), rm.begin() + n / 2, rm.end());
        double uw = std::min(wells::well_position(rm[n / 2], kT), 1.0 - opts.delta_box);
        auto init = minimize::mollify_ramp(cfg, n, eps, uw);
        auto res = minimize::local_minimize(init, J, kT, m, opts);
        res.census = minimize::detect_jumps(res.field, level);
        o.require(res.converged, "not converged at eps=" + fmt(eps));
        if (census0 < 0) census0 = res.census.count;
        o.require(res.census.count == census0, "census changed at eps=" + fmt(eps));

        double wmax = 0.0, wmean = 0.0;
        for (double wv : res.census.widths) {
            wmax = std::max(wmax, wv);
            wmean += wv;
        }
        if (!res.census.widths.empty()) wmean /= res.census.widths.size();
        o.require(wmax <= 3.0 * eps, "interface width " + fmt(wmax) + " > 3 eps");
        o.require(wmean < prev_width, "width not strictly decreasing at eps=" + fmt(eps));
        prev_width = wmean;

        double Cmin = 1e300;
        for (int i = 0; i < n; i += n / 32)
            Cmin = std::min(Cmin, minimize::criterion_C(J, kT, res.field, i));
        auto frac = minimize::gap_avoidance_check(res.field, table, res.census);
        o.require(frac.has_value(), "flat interval unexpectedly empty");
        if (Cmin > 0.0 && frac)
            o.require(*frac == 0.0, "C > 0 but gap fraction " + fmt(*frac) + " at eps=" + fmt(eps));

        json run;
        run["eps"] = eps;
        run["converged"] = res.converged;
        run["census_count"] = res.census.count;
        run["widths"] = res.census.widths;
        run["locations"] = res.census.locations;
        run["criterion_C_min"] = Cmin;
        run["gap_fraction"] = frac ? *frac : -1.0;
        run["energy"] = res.energy;
        o.record["runs"].push_back(run);
    }
    o.detail = (o.detail.empty() ? "" : o.detail + "; ") + ("census " + std::to_string(census0));
    return o;
}

// --------------------------------------------------------------- criterion 7

Outcome criterion7() {
    Outcome o;
    auto green = kernels::neumann_green(512);
    const double c0 = 0.2;
    o.record["experiment"] = "jump_optimization";
    o.record["optima"] = json::array();

    for (int k : {2, 3, 4}) {
        auto r = minimize::optimize_jump_positions(k, c0, green, 0.0);
        std::vector<double> gaps;
        double prev = 0.0;
        for (double x : r.config.jumps) {
            gaps.push_back(x - prev);
            prev = x;
        }
        gaps.push_back(1.0 - prev);
        for (size_t i = 1; i + 1 < gaps.size(); ++i)
            o.require(std::abs(gaps[i] - 1.0 / k) < 1e-6,
                      "interior gap off 1/k at k=" + std::to_string(k));
        o.require(std::abs(2.0 * gaps.front() - 1.0 / k) < 1e-6 &&
                      std::abs(2.0 * gaps.back() - 1.0 / k) < 1e-6,
                  "wall gaps off 1/(2k) at k=" + std::to_string(k));
        json jk;
        jk["k"] = k;
        jk["positions"] = r.config.jumps;
        jk["energy"] = r.energy;
        o.record["optima"].push_back(jk);
    }

    // brute-force grid search at resolution 1e-3 (FD Poisson oracle on a grid
    // whose cells align with the scan): k = 2 on the mass-feasible line, k = 3
    // coarse-to-fine on the same 1e-3 lattice
    {
        auto r2 = minimize::optimize_jump_positions(2, c0, green, 0.0);
        double best = 1e300, at = 0.0;
        for (int i = 1; i < 500; ++i) {
            double x1 = i / 1000.0;
            auto u = oracle::sample_bv({x1, x1 + 0.5}, -1, 4000);
            double F = oracle::half_dirichlet_energy(u);
            if (F < best) {
                best = F;
                at = x1;
            }
        }
        o.require(std::abs(at - r2.config.jumps[0]) <= 1e-3 + 1e-12,
                  "k=2 brute-force mismatch");
    }
    {
        auto r3 = minimize::optimize_jump_positions(3, c0, green, 0.0);
        auto eval_triplet = [&](double x1, double x2) {
            double x3 = x2 - x1 + 0.5;
            if (!(x1 > 0.0 && x2 > x1 && x3 > x2 && x3 < 1.0)) return 1e300;
            auto u = oracle::sample_bv({x1, x2, x3}, -1, 4000);
            return oracle::half_dirichlet_energy(u);
        };
        double best = 1e300, a1 = 0, a2 = 0;
        for (int i = 5; i < 500; i += 5)
            for (int j = i + 5; j < 1000; j += 5) {
                double F = eval_triplet(i / 1000.0, j / 1000.0);
                if (F < best) {
                    best = F;
                    a1 = i / 1000.0;
                    a2 = j / 1000.0;
                }
            }
        for (int i = -5; i <= 5; ++i)
            for (int j = -5; j <= 5; ++j) {
                double F = eval_triplet(a1 + i / 1000.0, a2 + j / 1000.0);
                if (F < best) {
                    best = F;
                    a1 += i / 1000.0;
                    a2 += j / 1000.0;
                }
            }
        o.require(std::abs(a1 - r3.config.jumps[0]) <= 1e-3 + 1e-12 &&
                      std::abs(a2 - r3.config.jumps[1]) <= 1e-3 + 1e-12,
                  "k=3 brute-force mismatch");
    }

    // single-jump value against the quadrature oracle
    {
        energy::BVConfig c{{0.5}, -1};
        double exact = energy::energy_I0_green(c, c0);
        auto term_at = [&](int n) {
            auto u = oracle::sample_bv(c.jumps, c.start_sign, n);
            double mean = 0.0;
            for (double v : u) mean += v;
            mean /= u.size();
            for (auto& v : u) v -= mean;
            return oracle::half_dirichlet_energy(u);
        };
        double oracle_term = (4.0 * term_at(16000) - term_at(8000)) / 3.0;
        o.require(std::abs(exact - (c0 + oracle_term)) < 1e-6,
                  "single-jump I0 off the quadrature oracle");
        o.record["single_jump_I0"] = exact;
    }
    return o;
}

// --------------------------------------------------------------- criterion 8

Outcome criterion8() {
    Outcome o;
    // warmer quench than criterion 6: the physical epsilon-gap there is large
    // enough to dominate the lattice deficit of the finest sweep point
    const int n = 4096;
    const double kT = 0.35, m = 0.0;
    kernels::ShortRangeKernel sk{kernels::Family::gaussian, 0.3, 1.0};
    auto green = kernels::neumann_green(n);

    energy::ProfileProblem pp;
    pp.kernel = sk;
    pp.L = 1.0;
    pp.n = 2048;
    pp.j = 1.0;
    pp.kT = kT;
    pp.prefactor = 0.25;
    pp.grad_tol = 1e-10;
    double c0q = energy::compute_c0(pp).value;
    pp.prefactor = 1.0;
    double c0u = energy::compute_c0(pp).value;

    auto opt = minimize::optimize_jump_positions(2, c0q, green, m);

    minimize::ContinuationSetup setup;
    setup.short_kernel = sk;
    setup.long_kernel = &green;
    setup.n = n;
    setup.kT = kT;
    setup.m = m;
    setup.c0_quarter = c0q;
    setup.c0_unit = c0u;
    minimize::MinimizeOptions opts;
    opts.grad_tol = 1e-9;

    o.record["experiment"] = "continuation";
    o.record["c0"] = {{"quarter", c0q}, {"unit", c0u}};
    o.record["positions"] = opt.config.jumps;
    o.record["continuation"] = json::array();

    std::vector<double> gq, gu;
    for (double eps : {0.2, 0.1, 0.05}) {
        auto r = minimize::continuation(opt.config, eps, setup, opts);
        o.require(!r.failed, "continuation failed at eps=" + fmt(eps) + " (" + r.reason + ")");
        gq.push_back(r.gap_quarter);
        gu.push_back(r.gap_unit);
        json jr;
        jr["eps"] = eps;
        jr["scaled_excess"] = r.scaled_excess;
        jr["gap_quarter"] = r.gap_quarter;
        jr["gap_unit"] = r.gap_unit;
        jr["l2_distance"] = r.l2_distance;
        jr["census_count"] = r.min.census.count;
        o.record["continuation"].push_back(jr);
    }
    std::string convention = (gu.back() < gq.back()) ? "unit" : "quarter";
    const auto& gaps = (convention == "quarter") ? gq : gu;
    o.require(gaps[0] > gaps[1] && gaps[1] > gaps[2],
              "gaps not strictly decreasing under the " + convention + " convention");
    o.record["selected_convention"] = convention;
    o.detail = (o.detail.empty() ? "" : o.detail + "; ") + ("convention " + convention + ", gaps " + fmt(gaps[0]) + " > " + fmt(gaps[1]) + " > " + fmt(gaps[2]));
    return o;
}

// --------------------------------------------------------------- criterion 9

Outcome criterion9() {
    Outcome o;
    o.record["experiment"] = "critical_exponents";
    auto run_fit = [&](energy::ProfileProblem pp, const char* tag, double target) {
        double kTc = wells::well_kTc(pp.j);
        std::vector<double> kts;
        for (int i = 0; i < 8; ++i) kts.push_back(kTc * (0.9 + (0.99 - 0.9) * i / 7.0));
        auto fit = minimize::exponent_fit(pp, kts);
        o.require(std::abs(fit.mu - target) <= 0.15,
                  std::string(tag) + " exponent " + fmt(fit.mu) + " off " + fmt(target));
        o.require(fit.r2 >= 0.99, std::string(tag) + " fit r2 " + fmt(fit.r2) + " < 0.99");
        json jf;
        jf["kernel"] = tag;
        jf["mu"] = fit.mu;
        jf["r2"] = fit.r2;
        jf["kTc"] = fit.kTc;
        jf["sigma"] = fit.sigma;
        o.record[tag] = jf;
        return fit.mu;
    };

    energy::ProfileProblem cst;
    cst.kernel = {kernels::Family::constant, 0.0, 1.0};
    cst.L = 1.0;
    cst.n = 2048;
    cst.j = 2.0; // row mass of the constant kernel on [-L, L]
    cst.prefactor = 1.0;
    double mu_c = run_fit(cst, "constant", 2.0);

    energy::ProfileProblem gss;
    gss.kernel = {kernels::Family::gaussian, 0.04, 1.0};
    gss.L = 2.0;
    gss.n = 3072;
    gss.j = 0.0;
    gss.prefactor = 1.0;
    gss.grad_tol = 1e-10;
    double mu_g = run_fit(gss, "gaussian", 1.5);

    o.detail = (o.detail.empty() ? "" : o.detail + "; ") + ("constant mu " + fmt(mu_c) + ", classical mu " + fmt(mu_g));
    return o;
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        Outcome (*fn)();
        double budget_s;
    };
    const Entry entries[] = {
        {1, "Maxwell construction", criterion1, 1.0},
        {2, "envelope suite", criterion2, 1.0},
        {3, "energy split identity", criterion3, 5.0},
        {4, "Green's function oracle", criterion4, 5.0},
        {5, "elastic-nonlocal equivalence", criterion5, 10.0},
        {6, "sharp-interface asymptotics", criterion6, 120.0},
        {7, "Gamma-limit periodicity", criterion7, 30.0},
        {8, "continuation", criterion8, 120.0},
        {9, "critical exponents", criterion9, 180.0},
    };

    int failures = 0;
    std::string first_records, second_records;
    for (const auto& e : entries) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o = e.fn();
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs >= e.budget_s) {
            o.pass = false;
            o.detail += (o.detail.empty() ? "" : "; ") + std::string("runtime ") + fmt(secs) +
                        " s over budget " + fmt(e.budget_s) + " s";
        }
        if (e.id >= 6) first_records += o.record.dump();
        std::printf("[%s] criterion %d: %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", e.id,
                    e.name, secs, o.detail.empty() ? "" : " -- ", o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }

    // criterion 10: determinism of the criteria 6-9 records under rerun
    {
        auto t0 = std::chrono::steady_clock::now();
        second_records = criterion6().record.dump() + criterion7().record.dump() +
                         criterion8().record.dump() + criterion9().record.dump();
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = (first_records == second_records);
        std::printf("[%s] criterion 10: determinism (%.2f s)%s\n", pass ? "PASS" : "FAIL", secs,
                    pass ? "" : " -- rerun records differ");
        if (!pass) ++failures;
    }
    return failures;
}
