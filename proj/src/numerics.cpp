#include "segregate/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace seg {

double kahan_sum(std::span<const double> x) {
    double s = 0.0, c = 0.0;
    for (double v : x) {
        double y = v - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double kahan_dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0, c = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double y = a[i] * b[i] - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

std::vector<int> lower_hull(std::span<const double> x, std::span<const double> y) {
    const int n = static_cast<int>(x.size());
    if (n < 2) throw std::invalid_argument("lower_hull: need at least 2 points");
    for (int i = 1; i < n; ++i)
        if (!(x[i] > x[i - 1])) throw std::invalid_argument("lower_hull: x not strictly increasing");
    std::vector<int> hull;
    hull.reserve(64);
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(y[i])) throw std::invalid_argument("lower_hull: non-finite value");
        while (hull.size() >= 2) {
            int p = hull[hull.size() - 2];
            int q = hull[hull.size() - 1];
            // q lies on or above segment p -> i: drop it
            double cross = (x[q] - x[p]) * (y[i] - y[p]) - (y[q] - y[p]) * (x[i] - x[p]);
            if (cross <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }
    return hull;
}

double bisect(const std::function<double(double)>& f, double a, double b,
              double tol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::invalid_argument("bisect: no sign change on bracket");
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    (void)fb;
    return 0.5 * (a + b);
}

namespace {
double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                   double fb, double m, double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, fa, m, fm, flm);
    double right = simpson(m, fm, b, fb, frm);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = simpson(a, fa, b, fb, fm);
    return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const int n = static_cast<int>(x.size());
    if (n < 2 || y.size() != x.size()) throw std::invalid_argument("fit_line: bad input");
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        if (A[piv * n + col] == 0.0) throw std::runtime_error("solve_dense: singular matrix");
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(A[col * n + c], A[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = A[r * n + col] / A[col * n + col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r * n + c] * x[c];
        x[r] = s / A[r * n + r];
    }
    return x;
}

} // namespace seg
