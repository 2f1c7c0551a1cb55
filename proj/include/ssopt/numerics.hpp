#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace ssopt {

/// Thrown when an iterative scheme exhausts its budget without reaching the
/// requested tolerance.
class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive Simpson quadrature of f over [a,b] to absolute tolerance tol.
/// Exact for cubic integrands, so polynomial fast paths terminate at the
/// first level.
double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_depth = 48);

struct RootOptions {
    double tol = 1e-10;        ///< residual tolerance on |f|
    double x_tol = 1e-13;      ///< bracket width tolerance (scaled by 1+|x|)
    int max_iter = 200;
    double expand_factor = 2.0;
    double expand_cap = 1.152921504606847e18; ///< 2^60
};

/// Bisection on a bracket [lo, hi] with f(lo) and f(hi) of opposite sign
/// (either may be exactly zero). Signs may be supplied when an endpoint is
/// known analytically and must not be evaluated.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              const RootOptions& opt, double f_lo, double f_hi);

double bisect(const std::function<double(double)>& f, double lo, double hi,
              const RootOptions& opt);

/// Expand [*lo, hi] geometrically to the left until f(*lo) < 0, keeping hi
/// fixed. f(hi) must be >= 0. Throws on cap overflow.
void expand_left(const std::function<double(double)>& f, double* lo, double hi,
                 const RootOptions& opt);

/// Expand [lo, *hi] geometrically to the right until f(*hi) > 0, keeping lo
/// fixed. f(lo) must be <= 0.
void expand_right(const std::function<double(double)>& f, double lo, double* hi,
                  const RootOptions& opt);

/// Golden-section minimization of a unimodal f on [a,b]; returns the argmin.
double golden_min(const std::function<double(double)>& f, double a, double b, double x_tol,
                  int max_iter = 200);

} // namespace ssopt
