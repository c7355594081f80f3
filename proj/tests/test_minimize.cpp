#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "segregate/energy.hpp"
#include "segregate/kernels.hpp"
#include "segregate/minimize.hpp"
#include "segregate/numerics.hpp"

#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace seg;
using namespace seg::energy;
using namespace seg::kernels;
using namespace seg::minimize;

TEST_CASE("constant init stays constant when G is convex and no long kernel") {
    int n = 256;
    double m = 0.2, kT = 0.6;
    ShortRangeKernel k{Family::constant, 0.0, 0.8};
    auto J = build_short(k, 0.1, n);
    Field init(n, m);
    MinimizeOptions opts;
    auto r = local_minimize(init, J, kT, m, opts);
    CHECK(r.converged);
    for (double v : r.field.values) CHECK(v == doctest::Approx(m).epsilon(1e-10));
    CHECK(r.energy == doctest::Approx(wells::eval_W(m, {0.8, kT})).epsilon(1e-12));
    CHECK(r.census.count == 0);
}

TEST_CASE("descent property and exact mass at every iterate") {
    int n = 512;
    double m = 0.1, kT = 0.25;
    ShortRangeKernel k{Family::gaussian, 0.25, 1.0};
    auto J = build_balanced(build_short(k, 0.1, n), neumann_green(n), 0.1);
    Field init(n);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> d(-0.4, 0.4);
    for (auto& v : init.values) v = m + d(rng);
    auto r = local_minimize(init, J, kT, m, {});
    REQUIRE(r.energy_log.size() >= 2);
    for (size_t i = 1; i < r.energy_log.size(); ++i)
        CHECK(r.energy_log[i] <= r.energy_log[i - 1]);
    for (double mass : r.mass_log) CHECK(std::abs(mass - m) < 1e-12);
    CHECK(std::abs(r.field.mass() - m) < 1e-12);
    for (double v : r.field.values) CHECK(std::abs(v) <= 1.0 - 1e-6 + 1e-12);
}

TEST_CASE("infeasible mass is rejected") {
    auto J = build_short({Family::gaussian, 0.2, 1.0}, 0.1, 64);
    Field init(64, 0.0);
    CHECK_THROWS_AS(local_minimize(init, J, 0.25, 0.9999999, {}), std::invalid_argument);
}

TEST_CASE("detect_jumps on exact square waves") {
    int n = 800;
    for (int periods : {1, 2, 3}) {
        Field u(n);
        for (int i = 0; i < n; ++i) {
            double x = u.x(i);
            u.values[i] = (std::fmod(x * periods, 1.0) < 0.5) ? -0.9 : 0.9;
        }
        auto c = detect_jumps(u, 0.5);
        CHECK(c.count >= 2 * periods - 1);
        CHECK(c.count <= 2 * periods);
        for (double w : c.widths) CHECK(w == doctest::Approx(1.0 / n));
    }
    Field flat(n, 0.3);
    CHECK(detect_jumps(flat, 0.5).count == 0);
    CHECK_THROWS_AS(detect_jumps(flat, 1.5), std::invalid_argument);
}

TEST_CASE("detect_jumps: exact zeros attach to the left cell") {
    int n = 100;
    Field u(n);
    for (int i = 0; i < n; ++i) u.values[i] = (i < 50) ? -0.8 : 0.8;
    u.values[50] = 0.0; // exact zero at the crossing
    auto c = detect_jumps(u, 0.5);
    REQUIRE(c.count == 1);
    CHECK(c.locations[0] == doctest::Approx(u.x(50)));
    CHECK(c.widths[0] == doctest::Approx(1.0 / n));
}

TEST_CASE("detect_jumps width tracks the mollifier band") {
    int n = 2048;
    double sigma = 0.02, level = 0.5;
    Field u(n);
    for (int i = 0; i < n; ++i) u.values[i] = 0.95 * std::tanh((u.x(i) - 0.5) / sigma);
    auto c = detect_jumps(u, level);
    REQUIRE(c.count == 1);
    CHECK(c.locations[0] == doctest::Approx(0.5).epsilon(1e-3));
    // |u| < level exactly inside a band of half-width sigma*atanh(level/0.95)
    double band = 2.0 * sigma * std::atanh(level / 0.95);
    CHECK(std::abs(c.widths[0] - band) <= 2.0 / n);
}

TEST_CASE("criterion_C: constant kernel closed form and linearity in J") {
    int n = 256;
    auto J = build_constant_long(1.0, n);
    double kT = 0.25;
    Field u(n);
    for (int i = 0; i < n; ++i) u.values[i] = 0.9 * std::sin(2.0 * M_PI * u.x(i));
    std::vector<double> gp(n);
    for (int i = 0; i < n; ++i) gp[i] = wells::eval_g_prime(u.values[i], kT);
    double int_gp = kahan_sum(gp) / n;
    double C = criterion_C(J, kT, u, n / 3);
    CHECK(C == doctest::Approx(-0.25 - int_gp).epsilon(1e-12));

    // J -> 2J doubles the kernel terms and leaves the g' integral alone
    auto J2 = build_constant_long(2.0, n);
    double C2 = criterion_C(J2, kT, u, n / 3);
    CHECK(C2 + int_gp == doctest::Approx(2.0 * (C + int_gp)).epsilon(1e-10));
}

TEST_CASE("criterion_C at kT -> 0 with well-settled fields") {
    // g'(u) -> -1 as kT -> 0 at fixed |u| < 1, so int g' ~ -1
    int n = 512;
    auto J = build_short({Family::gaussian, 0.02, 0.05}, 0.05, n);
    double kT = 1e-3;
    Field u(n);
    for (int i = 0; i < n; ++i) u.values[i] = (u.x(i) < 0.5) ? -0.99 : 0.99;
    double C = criterion_C(J, kT, u, n / 2);
    double expect = 0.25 * J.at(n / 2, n / 2) + 0.5 * J.total_mass() - J.row_mass[n / 2] + 1.0;
    CHECK(C == doctest::Approx(expect).epsilon(0.05));
    CHECK(C > 0.0);
}

TEST_CASE("gap_avoidance_check extremes") {
    auto t = wells::make_G_envelope(0.25);
    REQUIRE(t.has_flat);
    int n = 1024;

    // square wave at the plateau endpoints: nothing strictly inside
    Field sq(n);
    for (int i = 0; i < n; ++i) sq.values[i] = (sq.x(i) < 0.5) ? t.u_lower : t.u_upper;
    auto census = detect_jumps(sq, 0.5);
    auto frac = gap_avoidance_check(sq, t, census);
    REQUIRE(frac.has_value());
    CHECK(*frac == doctest::Approx(0.0));

    // linear ramp inside the gap: almost everything inside
    Field ramp(n);
    for (int i = 0; i < n; ++i)
        ramp.values[i] = t.u_lower + (t.u_upper - t.u_lower) * ramp.x(i);
    auto frac2 = gap_avoidance_check(ramp, t, detect_jumps(ramp, 0.5));
    REQUIRE(frac2.has_value());
    CHECK(*frac2 > 0.95);

    // empty flat interval: not applicable
    auto t6 = wells::make_G_envelope(0.6);
    CHECK_FALSE(gap_avoidance_check(sq, t6, census).has_value());
}

TEST_CASE("end-to-end sharp interface run: C > 0 forces gap avoidance") {
    // narrow weak kernel at eps = 0.05: the criterion is positive and the
    // converged minimizer avoids the flat interval outside interface windows
    int n = 1024;
    double kT = 0.25, eps = 0.05;
    ShortRangeKernel sk{Family::gaussian, 0.012, 0.05};
    auto J = build_balanced(build_short(sk, eps, n), neumann_green(n), eps);
    BVConfig c{{0.25, 0.75}, -1};
    Field init = mollify_ramp(c, n, eps, 0.97);
    MinimizeOptions opts;
    opts.grad_tol = 1e-9;
    auto r = local_minimize(init, J, kT, 0.0, opts);
    CHECK(r.converged);
    CHECK(r.census.count == 2);

    auto t = wells::make_G_envelope(kT);
    double Cmin = 1e300;
    for (int i = 0; i < n; i += n / 16) Cmin = std::min(Cmin, criterion_C(J, kT, r.field, i));
    CHECK(Cmin > 0.0);
    auto frac = gap_avoidance_check(r.field, t, r.census);
    REQUIRE(frac.has_value());
    CHECK(*frac == doctest::Approx(0.0));
}

TEST_CASE("optimize_jump_positions: k = 1 lands at the center") {
    auto green = neumann_green(512);
    auto r = optimize_jump_positions(1, 0.3, green, 0.0);
    CHECK(r.config.jumps[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.energy == doctest::Approx(0.3 + 1.0 / 24.0).epsilon(1e-10));

    // brute-force scan oracle over the mass-feasible 1-jump grid: the single
    // jump carries mass 1 - 2 x1, so only cells with |mass| within half a
    // grid step of zero are admissible
    double best = 1e300, at = 0.0;
    for (int i = 1; i < 1000; ++i) {
        double x1 = i / 1000.0;
        if (std::abs(1.0 - 2.0 * x1) > 1e-3) continue;
        auto u = oracle::sample_bv({x1}, -1, 4000);
        double mean = 0.0;
        for (double v : u) mean += v;
        mean /= u.size();
        for (auto& v : u) v -= mean;
        double F = oracle::half_dirichlet_energy(u);
        if (F < best) {
            best = F;
            at = x1;
        }
    }
    CHECK(std::abs(at - r.config.jumps[0]) <= 1e-3 + 1e-12);
}

TEST_CASE("optimize_jump_positions: k = 2 periodic pattern against brute force") {
    auto green = neumann_green(512);
    auto r = optimize_jump_positions(2, 0.1, green, 0.0);
    REQUIRE(r.config.jumps.size() == 2);
    CHECK(r.config.jumps[0] == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(r.config.jumps[1] == doctest::Approx(0.75).epsilon(1e-8));

    // mass-zero pairs on the 1e-3 grid have x2 = x1 + 1/2 exactly
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
    CHECK(std::abs(at - r.config.jumps[0]) <= 1e-3 + 1e-12);
}

TEST_CASE("optimize_jump_positions: k = 3 against the 2D brute force") {
    auto green = neumann_green(512);
    auto r = optimize_jump_positions(3, 0.1, green, 0.0);
    REQUIRE(r.config.jumps.size() == 3);
    CHECK(r.config.jumps[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-7));
    CHECK(r.config.jumps[1] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(r.config.jumps[2] == doctest::Approx(5.0 / 6.0).epsilon(1e-7));

    // coarse 2D scan (5e-3) then local 1e-3 refinement around the winner
    double best = 1e300, a1 = 0, a2 = 0;
    auto eval_triplet = [&](double x1, double x2) {
        double x3 = x2 - x1 + 0.5;
        if (!(x2 > x1 && x3 > x2 && x3 < 1.0)) return 1e300;
        auto u = oracle::sample_bv({x1, x2, x3}, -1, 4000);
        return oracle::half_dirichlet_energy(u);
    };
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
    CHECK(std::abs(a1 - r.config.jumps[0]) <= 1e-3 + 1e-12);
    CHECK(std::abs(a2 - r.config.jumps[1]) <= 1e-3 + 1e-12);
}

TEST_CASE("periodicity: equal gaps after the translation quotient for k = 2,3,4") {
    auto green = neumann_green(512);
    for (int k : {2, 3, 4}) {
        auto r = optimize_jump_positions(k, 0.2, green, 0.0);
        REQUIRE(static_cast<int>(r.config.jumps.size()) == k);
        std::vector<double> gaps;
        double prev = 0.0;
        for (double x : r.config.jumps) {
            gaps.push_back(x - prev);
            prev = x;
        }
        gaps.push_back(1.0 - prev);
        // interior gaps equal 1/k; wall gaps are half (Neumann reflection)
        for (size_t i = 1; i + 1 < gaps.size(); ++i)
            CHECK(std::abs(gaps[i] - 1.0 / k) < 1e-6);
        CHECK(std::abs(2.0 * gaps.front() - 1.0 / k) < 1e-6);
        CHECK(std::abs(2.0 * gaps.back() - 1.0 / k) < 1e-6);
    }
}

TEST_CASE("optimize_jump_positions: c0 shifts move the value, not the optimizer") {
    auto green = neumann_green(256);
    auto a = optimize_jump_positions(2, 0.1, green, 0.0);
    auto b = optimize_jump_positions(2, 0.6, green, 0.0);
    for (int j = 0; j < 2; ++j)
        CHECK(a.config.jumps[j] == doctest::Approx(b.config.jumps[j]).epsilon(1e-10));
    CHECK(b.energy - a.energy == doctest::Approx(2 * 0.5).epsilon(1e-10));
}

TEST_CASE("optimize_jump_positions: parity and mass validation") {
    auto green = neumann_green(128);
    CHECK_THROWS_AS(optimize_jump_positions(0, 0.1, green, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(optimize_jump_positions(2, 0.1, green, 1.0), std::invalid_argument);
    auto r = optimize_jump_positions(0, 0.1, green, 1.0);
    CHECK(r.config.jumps.empty());
    CHECK(r.energy == doctest::Approx(0.0));
}

TEST_CASE("optimize_jump_positions with a nonzero mass") {
    auto green = neumann_green(512);
    double m = 0.3;
    auto r = optimize_jump_positions(2, 0.1, green, m);
    CHECK(bv_mass(r.config) == doctest::Approx(m).epsilon(1e-10));
    // symmetric about 1/2 and genuinely optimal under the constraint
    CHECK(r.config.jumps[0] + r.config.jumps[1] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("continuation reports rather than throws") {
    int n = 1024;
    ShortRangeKernel sk{Family::gaussian, 0.25, 1.0};
    auto green = neumann_green(n);
    ContinuationSetup setup;
    setup.short_kernel = sk;
    setup.long_kernel = &green;
    setup.n = n;
    setup.kT = 0.25;
    setup.m = 0.0;
    ProfileProblem pp;
    pp.kernel = sk;
    pp.n = 1024;
    pp.j = 1.0;
    pp.kT = 0.25;
    pp.prefactor = 0.25;
    setup.c0_quarter = compute_c0(pp).value;
    pp.prefactor = 1.0;
    setup.c0_unit = compute_c0(pp).value;

    BVConfig c{{0.25, 0.75}, -1};
    MinimizeOptions opts;
    auto r1 = continuation(c, 0.1, setup, opts);
    CHECK_FALSE(r1.failed);
    CHECK(r1.min.census.count == 2);
    CHECK(r1.gap_quarter < r1.gap_unit);

    auto r2 = continuation(c, 0.5, setup, opts); // far outside the asymptotic regime
    if (r2.failed) CHECK_FALSE(r2.reason.empty());
}

TEST_CASE("continuation distance shrinks with eps") {
    int n = 2048;
    ShortRangeKernel sk{Family::gaussian, 0.25, 1.0};
    auto green = neumann_green(n);
    ContinuationSetup setup;
    setup.short_kernel = sk;
    setup.long_kernel = &green;
    setup.n = n;
    setup.kT = 0.25;
    setup.m = 0.0;
    setup.c0_quarter = 0.2;
    setup.c0_unit = 0.57;
    BVConfig c{{0.25, 0.75}, -1};
    auto ra = continuation(c, 0.2, setup, {});
    auto rb = continuation(c, 0.05, setup, {});
    CHECK_FALSE(ra.failed);
    CHECK_FALSE(rb.failed);
    CHECK(rb.l2_distance < ra.l2_distance);
}

TEST_CASE("exponent_fit validates its grid and propagates kT in failures") {
    ProfileProblem pp;
    pp.kernel = {Family::constant, 0.0, 1.0};
    pp.n = 512;
    pp.j = 2.0;
    pp.prefactor = 1.0;
    std::vector<double> bad{0.1, 0.2, 0.3};
    CHECK_THROWS_AS(exponent_fit(pp, bad), std::invalid_argument);
}

TEST_CASE("exponent_fit on the constant kernel: tricritical slope") {
    ProfileProblem pp;
    pp.kernel = {Family::constant, 0.0, 1.0};
    pp.L = 1.0;
    pp.n = 512;
    pp.j = 2.0; // row mass of the constant kernel on [-L, L]
    pp.prefactor = 1.0;
    double kTc = wells::well_kTc(pp.j);
    std::vector<double> kts;
    for (int i = 0; i < 6; ++i) kts.push_back(kTc * (0.9 + 0.09 * i / 5.0));
    auto fit = exponent_fit(pp, kts);
    CHECK(fit.mu == doctest::Approx(2.0).epsilon(0.1));
    CHECK(fit.r2 > 0.99);
    CHECK_FALSE(fit.flagged);
}
