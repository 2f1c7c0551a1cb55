#include "ssopt/numerics.hpp"

#include <cmath>

namespace ssopt {

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = simpson(fa, flm, fm, m - a);
    double right = simpson(fm, frm, fb, b - m);
    double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol || depth <= 0) {
        if (depth <= 0 && std::fabs(delta) > 15.0 * tol)
            throw NumericsError("quadrature did not converge within depth budget");
        return left + right + delta / 15.0;
    }
    return adaptive_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_depth) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    double fa = f(a);
    double m = 0.5 * (a + b);
    double fm = f(m);
    double fb = f(b);
    double whole = simpson(fa, fm, fb, b - a);
    return sign * adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              const RootOptions& opt, double f_lo, double f_hi) {
    if (!(lo <= hi)) throw NumericsError("bisect: empty bracket");
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0)) throw NumericsError("bisect: bracket does not straddle a root");

    for (int i = 0; i < opt.max_iter; ++i) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo <= opt.x_tol * (1.0 + std::fabs(mid))) return mid;
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (f_hi > 0.0)) {
            hi = mid;
            f_hi = fm;
        } else {
            lo = mid;
            f_lo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              const RootOptions& opt) {
    return bisect(f, lo, hi, opt, f(lo), f(hi));
}

void expand_left(const std::function<double(double)>& f, double* lo, double hi,
                 const RootOptions& opt) {
    double width = hi - *lo;
    if (width <= 0.0) width = 1.0;
    while (!(f(*lo) < 0.0)) {
        width *= opt.expand_factor;
        if (width > opt.expand_cap)
            throw NumericsError("bracket expansion exceeded cap while searching left");
        *lo = hi - width;
    }
}

void expand_right(const std::function<double(double)>& f, double lo, double* hi,
                  const RootOptions& opt) {
    double width = *hi - lo;
    if (width <= 0.0) width = 1.0;
    while (!(f(*hi) > 0.0)) {
        width *= opt.expand_factor;
        if (width > opt.expand_cap)
            throw NumericsError("bracket expansion exceeded cap while searching right");
        *hi = lo + width;
    }
}

double golden_min(const std::function<double(double)>& f, double a, double b, double x_tol,
                  int max_iter) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < max_iter && (b - a) > x_tol * (1.0 + std::fabs(a) + std::fabs(b)); ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace ssopt
