#pragma once

#include <functional>
#include <span>
#include <vector>

namespace seg {

// Compensated (Kahan) summation. Used wherever tests demand 1e-12 agreement
// between algebraically equal sums.
double kahan_sum(std::span<const double> x);
double kahan_dot(std::span<const double> a, std::span<const double> b);

// Indices of the lower convex hull of the graph (x[i], y[i]).
// x must be strictly increasing. Endpoints are always kept.
std::vector<int> lower_hull(std::span<const double> x, std::span<const double> y);

// Bisection on [a, b]; f(a) and f(b) must have opposite signs.
double bisect(const std::function<double(double)>& f, double a, double b,
              double tol = 1e-14, int max_iter = 200);

// Adaptive Simpson quadrature.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40);

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Dense Gaussian elimination with partial pivoting for small systems.
std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b, int n);

} // namespace seg
