#include "ssopt/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ssopt {

namespace {

bool kinked(const HoldingCostModel& h) { return h.has_kink_at_zero(); }

} // namespace

Analytics::Analytics(const ProblemInstance& instance, AnalyticsOptions options)
    : instance_(validate_or_throw(instance)), options_(options) {
    if (!(options_.quad_tol > 0.0 && options_.quad_tol <= 1e-4))
        throw std::invalid_argument("quad_tol must lie in (0, 1e-4]");
    if (!(options_.root_tol > 0.0 && options_.root_tol <= 1e-4))
        throw std::invalid_argument("root_tol must lie in (0, 1e-4]");
    lambda_ = instance_.demand.lambda();
    closed_form_ = !options_.force_quadrature && instance_.holding.kind != HoldingKind::convex_poly;

    // Locate the minimizer of the stationary unit cost. Its derivative is
    // positive on [0, inf) and eventually negative to the left, so a bracket
    // [lo, 0] always exists; midpoints stay strictly negative, keeping the
    // search away from the kink of h.
    RootOptions ropt;
    ropt.expand_factor = options_.expand_factor;
    ropt.max_iter = options_.max_iter;
    auto dg = [this](double z) { return deriv_unchecked(z); };
    double lo = -1.0;
    try {
        expand_left(dg, &lo, 0.0, ropt);
    } catch (const NumericsError&) {
        throw NumericsError("internal error: no bracket for the stationary cost minimizer");
    }
    z_star_ = bisect(dg, lo, 0.0, ropt, deriv_unchecked(lo), +1.0);
    g0_min_ = steady_unit_cost(z_star_);

    double resid = std::fabs(deriv_unchecked(z_star_));
    double allowed = closed_form_ ? options_.root_tol : std::max(options_.root_tol, 16.0 * options_.quad_tol);
    if (resid > allowed * (1.0 + std::fabs(z_star_)))
        throw NumericsError("internal error: minimizer residual exceeds tolerance");
}

// ---------------------------------------------------------------------------
// Stationary unit cost
// ---------------------------------------------------------------------------

double Analytics::g0_closed(double z) const {
    const auto& h = instance_.holding;
    double mu = instance_.demand.mu;
    double lam = lambda_;
    if (h.kind == HoldingKind::quadratic) {
        return h.beta / mu * (z * z + 2.0 * z / lam + 2.0 / (lam * lam));
    }
    // piecewise linear
    if (z >= 0.0) return h.beta1 / mu * (1.0 / lam + z);
    return ((h.beta1 + h.beta2) * std::exp(lam * z) - h.beta2 * (1.0 + lam * z)) / (mu * lam);
}

double Analytics::g0_deriv_closed(double z) const {
    const auto& h = instance_.holding;
    double mu = instance_.demand.mu;
    double lam = lambda_;
    if (h.kind == HoldingKind::quadratic) return h.beta / mu * (2.0 * z + 2.0 / lam);
    if (z >= 0.0) return h.beta1 / mu;
    return ((h.beta1 + h.beta2) * std::exp(lam * z) - h.beta2) / mu;
}

double Analytics::truncation_horizon(double z) const {
    const auto& w = instance_.holding.bound;
    double lam = lambda_;
    double u = 8.0 / lam;
    for (int i = 0; i < 200; ++i) {
        double tail = std::exp(-lam * u) * (w.b0 + w.b1 * std::pow(std::fabs(z) + u, w.a));
        if (tail <= options_.quad_tol) return u;
        u *= 2.0;
    }
    throw NumericsError("quadrature truncation horizon did not converge");
}

double Analytics::g0_quadrature(double z) const {
    const auto& h = instance_.holding;
    double lam = lambda_;
    double u_max = truncation_horizon(z);
    auto f = [&](double y) { return h.eval(y + z) * std::exp(-lam * y); };
    double tol = options_.quad_tol * instance_.demand.mu / lam / 2.0;
    double raw;
    if (z < 0.0 && -z < u_max && kinked(h)) {
        // h has a kink where the argument crosses zero
        raw = integrate(f, 0.0, -z, tol / 2.0) + integrate(f, -z, u_max, tol / 2.0);
    } else {
        raw = integrate(f, 0.0, u_max, tol);
    }
    return lam / instance_.demand.mu * raw;
}

double Analytics::steady_unit_cost(double z) const {
    return closed_form_ ? g0_closed(z) : g0_quadrature(z);
}

double Analytics::deriv_unchecked(double z) const {
    if (closed_form_) return g0_deriv_closed(z);
    // d/dz (lam/mu) Int h(y+z) e^{-lam y} dy = lam*g0(z) - (lam/mu) h(z)
    return lambda_ * g0_quadrature(z) - lambda_ / instance_.demand.mu * instance_.holding.eval(z);
}

double Analytics::steady_unit_cost_deriv(double z) const {
    if (z == 0.0 && kinked(instance_.holding))
        throw std::invalid_argument("derivative rejected at a kink of the holding cost");
    return deriv_unchecked(z);
}

double Analytics::steady_cost_integral(double a, double b) const {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    auto f = [this](double y) { return steady_unit_cost(y); };
    // The curve is C^1 but its second derivative jumps at 0 for kinked h;
    // splitting there keeps the adaptive scheme sharp.
    if (a < 0.0 && 0.0 < b && kinked(instance_.holding))
        return sign * (integrate(f, a, 0.0, options_.quad_tol / 2.0) +
                       integrate(f, 0.0, b, options_.quad_tol / 2.0));
    return sign * integrate(f, a, b, options_.quad_tol);
}

// ---------------------------------------------------------------------------
// Matched levels and policy costs
// ---------------------------------------------------------------------------

MatchedLevels Analytics::matched_levels(double quantity) const {
    if (quantity < 0.0) throw std::invalid_argument("matched_levels: quantity must be >= 0");
    if (quantity == 0.0) return {z_star_, z_star_, 0.0};

    // Below this floor the bracket function is a difference of nearly equal
    // cost values and its sign is rounding noise. The pair splits the
    // quantity evenly around the minimizer to first order (the curvature is
    // continuous there), with O(quantity^2) error.
    if (quantity <= 1e-7 * (1.0 + std::fabs(z_star_)))
        return {z_star_ - 0.5 * quantity, z_star_ + 0.5 * quantity, quantity};

    auto gap = [&](double s) { return steady_unit_cost(s + quantity) - steady_unit_cost(s); };
    RootOptions ropt;
    ropt.max_iter = options_.max_iter;
    double s = bisect(gap, z_star_ - quantity, z_star_, ropt);
    MatchedLevels m{s, s + quantity, quantity};

    double gs = steady_unit_cost(m.reorder);
    double resid = std::fabs(steady_unit_cost(m.order_up_to) - gs);
    double allowed = closed_form_ ? options_.root_tol : std::max(options_.root_tol, 16.0 * options_.quad_tol);
    if (resid > allowed * (1.0 + std::fabs(gs)))
        throw NumericsError("matched level residual exceeds tolerance");
    return m;
}

double Analytics::average_cost(double reorder, double order_up_to) const {
    if (reorder > order_up_to) throw std::invalid_argument("average_cost requires s <= S");
    double mu = instance_.demand.mu;
    double k = instance_.ordering.k;
    if (reorder == order_up_to) {
        ExtReal ell = instance_.ordering.setup.infinitesimal_setup_rate();
        return (k + ell.as_double()) * mu + mu * steady_unit_cost(reorder);
    }
    double xi = order_up_to - reorder;
    // Subtracting the levels can miss a fee breakpoint by a few ulps and
    // land on the wrong side of a fee jump; snap within float noise so the
    // breakpoint rule applies as at the breakpoint itself.
    const SetupCostModel& setup = instance_.ordering.setup;
    if (setup.kind == SetupKind::step) {
        double noise = 32.0 * std::numeric_limits<double>::epsilon() *
                       std::max({1.0, std::fabs(reorder), std::fabs(order_up_to)});
        for (double q : setup.breakpoints)
            if (std::fabs(xi - q) <= noise) {
                xi = q;
                break;
            }
    }
    return k * mu + setup.eval(xi) * mu / xi +
           mu / xi * steady_cost_integral(reorder, order_up_to);
}

double Analytics::matched_holding_rate(double quantity) const {
    if (quantity < 0.0) throw std::invalid_argument("matched_holding_rate: quantity must be >= 0");
    double mu = instance_.demand.mu;
    if (quantity == 0.0) return mu * g0_min_;
    MatchedLevels m = matched_levels(quantity);
    // For tiny quantities, dividing the integral by the quantity amplifies
    // the rounding of the interval endpoints; a Simpson average of the
    // analytic point values is exact to fourth order and well conditioned.
    if (quantity <= 1e-7 * (1.0 + std::fabs(z_star_)))
        return mu *
               (steady_unit_cost(m.reorder) + 4.0 * steady_unit_cost(0.5 * (m.reorder + m.order_up_to)) +
                steady_unit_cost(m.order_up_to)) /
               6.0;
    return mu / quantity * steady_cost_integral(m.reorder, m.order_up_to);
}

double Analytics::fixed_quantity_cost(double quantity) const {
    if (quantity < 0.0) throw std::invalid_argument("fixed_quantity_cost: quantity must be >= 0");
    double mu = instance_.demand.mu;
    double k = instance_.ordering.k;
    if (quantity == 0.0) {
        ExtReal ell = instance_.ordering.setup.infinitesimal_setup_rate();
        return (k + ell.as_double()) * mu + mu * g0_min_;
    }
    // The setup fee is evaluated at the requested quantity itself so that
    // breakpoint semantics stay exact.
    return k * mu + instance_.ordering.setup.eval(quantity) * mu / quantity +
           matched_holding_rate(quantity);
}

// ---------------------------------------------------------------------------
// Sublevel-set functionals
// ---------------------------------------------------------------------------

double Analytics::sublevel_width(double y) const {
    if (y < g0_min_ - 1e-12 * (1.0 + std::fabs(g0_min_)))
        throw std::invalid_argument("sublevel_width: level below the minimum cost");
    if (y <= g0_min_) return 0.0;

    RootOptions ropt;
    ropt.expand_factor = options_.expand_factor;
    ropt.max_iter = options_.max_iter;

    // Left branch: the curve decreases strictly to the minimum.
    auto left_f = [&](double z) { return y - steady_unit_cost(z); };
    double lo = z_star_ - 1.0;
    expand_left(left_f, &lo, z_star_, ropt);
    double left = bisect(left_f, lo, z_star_, ropt, left_f(lo), y - g0_min_);

    // Right branch: strictly increasing from the minimum.
    auto right_f = [&](double z) { return steady_unit_cost(z) - y; };
    double hi = z_star_ + 1.0;
    expand_right(right_f, z_star_, &hi, ropt);
    double right = bisect(right_f, z_star_, hi, ropt, g0_min_ - y, right_f(hi));

    return right - left;
}

double Analytics::sublevel_area(double u) const {
    if (u < g0_min_ - 1e-12 * (1.0 + std::fabs(g0_min_)))
        throw std::invalid_argument("sublevel_area: level below the minimum cost");
    if (u <= g0_min_) return 0.0;
    // Substitute y = min + t^2: the width behaves like sqrt(y - min) near the
    // bottom, so the transformed integrand is smooth at t = 0.
    double span = std::sqrt(u - g0_min_);
    auto f = [&](double t) { return 2.0 * t * sublevel_width(g0_min_ + t * t); };
    return integrate(f, 0.0, span, options_.quad_tol);
}

double Analytics::matched_gap_area(double quantity) const {
    if (quantity < 0.0) throw std::invalid_argument("matched_gap_area: quantity must be >= 0");
    if (quantity == 0.0) return 0.0;
    MatchedLevels m = matched_levels(quantity);
    return steady_unit_cost(m.reorder) * quantity -
           steady_cost_integral(m.reorder, m.order_up_to);
}

// ---------------------------------------------------------------------------
// Relative value functions and the lower-bound certificate
// ---------------------------------------------------------------------------

double Analytics::relative_value(double z, double anchor, double nu) const {
    return -(z - anchor) * nu / instance_.demand.mu + steady_cost_integral(anchor, z);
}

namespace {

void record(CertificateReport& report, const std::string& name, double worst, double where,
            double tol) {
    CertificateCheck c;
    c.name = name;
    c.worst_violation = worst;
    c.location = where;
    c.passed = worst >= -tol;
    if (!c.passed) report.passed = false;
    report.checks.push_back(std::move(c));
}

} // namespace

CertificateReport Analytics::verify_lower_bound(double reorder, double order_up_to, double nu,
                                                const CertificateOptions& opts) const {
    CertificateReport report;
    report.passed = true;
    report.claimed_cost = nu;
    report.tol = opts.tol;
    report.pair_seed = opts.pair_seed;
    report.grid_points = opts.grid_points;

    double mu = instance_.demand.mu;
    double k = instance_.ordering.k;
    double nu_policy = average_cost(reorder, order_up_to);
    report.policy_cost = nu_policy;
    if (!std::isfinite(nu_policy) || !std::isfinite(nu)) {
        record(report, "finite_cost", -1.0, reorder, opts.tol);
        return report;
    }

    // Flattening level: matched reorder level of a quantity whose
    // fixed-quantity cost exceeds the bound plus the worst-case average
    // setup fee. Such a quantity exists because the fixed-quantity cost
    // diverges.
    double k_bar = instance_.ordering.setup.sup_value();
    double nu_ref = std::max(nu_policy, nu);
    double xi_bar = std::max(order_up_to - reorder, 1.0);
    bool found = false;
    for (int i = 0; i < 200; ++i) {
        if (fixed_quantity_cost(xi_bar) >
            k_bar * mu / xi_bar + nu_ref + 1e-3 * (1.0 + std::fabs(nu_ref))) {
            found = true;
            break;
        }
        xi_bar *= 2.0;
    }
    if (!found) {
        record(report, "flatten_probe", -1.0, xi_bar, opts.tol);
        return report;
    }
    double s_low = matched_levels(xi_bar).reorder;
    report.flatten_level = s_low;
    report.probe_quantity = xi_bar;

    // Grid
    double pad = opts.span_factor * (order_up_to - reorder + 1.0);
    double lo = reorder - pad;
    double hi = order_up_to + pad;
    report.grid_lo = lo;
    report.grid_hi = hi;
    int n = std::max(opts.grid_points, 8);
    std::vector<double> zs(n);
    for (int i = 0; i < n; ++i) zs[i] = lo + (hi - lo) * i / (n - 1);

    double g0_low = steady_unit_cost(s_low);

    // Flattened relative value function, anchored at the flattening level.
    // Below it the integrand is the constant g0(s_low).
    std::vector<double> v(n);
    {
        // cumulative integral of g0(max(y, s_low)) from s_low to each grid point
        std::vector<double> cum(n, 0.0);
        int first_above = n;
        for (int i = 0; i < n; ++i)
            if (zs[i] >= s_low) {
                first_above = i;
                break;
            }
        if (first_above < n) {
            cum[first_above] = steady_cost_integral(s_low, zs[first_above]);
            for (int i = first_above + 1; i < n; ++i)
                cum[i] = cum[i - 1] + steady_cost_integral(zs[i - 1], zs[i]);
        }
        for (int i = first_above - 1; i >= 0; --i) cum[i] = g0_low * (zs[i] - s_low);
        for (int i = 0; i < n; ++i) v[i] = -nu_policy / mu * (zs[i] - s_low) + cum[i];
    }

    // (a) generator inequality at twice-differentiable points
    {
        double worst = 0.0, where = zs.front();
        bool kink = kinked(instance_.holding);
        for (int i = 0; i < n; ++i) {
            double z = zs[i];
            if (std::fabs(z - s_low) < 1e-9) continue;
            double vp, vpp;
            if (z > s_low) {
                if (kink && z == 0.0) continue;
                vp = -nu_policy / mu + steady_unit_cost(z);
                vpp = deriv_unchecked(z);
            } else {
                vp = -nu_policy / mu + g0_low;
                vpp = 0.0;
            }
            double resid = 0.5 * sigma2() * vpp - mu * vp + instance_.holding.eval(z) - nu;
            if (resid < worst) {
                worst = resid;
                where = z;
            }
        }
        record(report, "generator_inequality", worst, where, opts.tol);
    }

    // (b) order-cost inequality on random grid pairs, plus the extreme pair:
    // the function rises to a peak and falls to a valley, so the peak-valley
    // pair realizes the least slack.
    {
        double worst = 0.0, where = 0.0;
        auto check_pair = [&](int i, int j) { // requires zs[i] > zs[j]
            double gap = zs[i] - zs[j];
            double slack = v[i] - v[j] + instance_.ordering.setup.eval(gap) + k * gap;
            if (slack < worst) {
                worst = slack;
                where = gap;
            }
        };
        int valley = 0;
        for (int i = 1; i < n; ++i)
            if (v[i] < v[valley]) valley = i;
        int peak = 0;
        for (int i = 1; i <= valley; ++i)
            if (v[i] > v[peak]) peak = i;
        if (peak < valley) check_pair(valley, peak);

        std::mt19937_64 rng(opts.pair_seed);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int p = 0; p < opts.pair_count; ++p) {
            int i = pick(rng), j = pick(rng);
            if (i == j) continue;
            if (zs[i] < zs[j]) std::swap(i, j);
            check_pair(i, j);
        }
        record(report, "order_cost_inequality", worst, where, opts.tol);
    }

    // (c) growth bounds on the derivative
    {
        const auto& w = instance_.holding.bound;
        double a0 = nu_policy / mu + std::max(g0_low, steady_unit_cost(0.0)) + 1.0;
        double pow_coef = w.b1 * std::pow(2.0, w.a - 1);
        double tail_const = (w.b0 + pow_coef * std::tgamma(w.a + 1.0) / std::pow(lambda_, w.a)) / mu;
        double worst = 0.0, where = zs.front();
        for (int i = 0; i < n; ++i) {
            double z = zs[i];
            double vp = -nu_policy / mu + steady_unit_cost(std::max(z, s_low));
            double cap = z < 0.0 ? a0
                                 : nu_policy / mu + tail_const +
                                       pow_coef / mu * std::pow(z, w.a) + 1.0;
            double slack = cap - std::fabs(vp);
            if (slack < worst) {
                worst = slack;
                where = z;
            }
        }
        record(report, "derivative_growth", worst, where, opts.tol);
    }

    return report;
}

} // namespace ssopt
