#include "ssopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ssopt {

// ---------------------------------------------------------------------------
// Holding cost evaluation
// ---------------------------------------------------------------------------

namespace {

double poly_side(const std::vector<double>& coeffs, double t) {
    // sum_i coeffs[i-1] * t^i, t >= 0
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = (acc + *it) * t;
    return acc;
}

double poly_side_deriv(const std::vector<double>& coeffs, double t) {
    double acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 0;) {
        double i = static_cast<double>(j + 1);
        acc = acc * t + i * coeffs[j];
    }
    return acc;
}

} // namespace

double HoldingCostModel::eval(double z) const {
    switch (kind) {
    case HoldingKind::piecewise_linear:
        return z >= 0.0 ? beta1 * z : -beta2 * z;
    case HoldingKind::quadratic:
        return beta * z * z;
    case HoldingKind::convex_poly:
        return z >= 0.0 ? poly_side(pos_coeffs, z) : poly_side(neg_coeffs, -z);
    }
    return 0.0;
}

double HoldingCostModel::deriv(double z) const {
    switch (kind) {
    case HoldingKind::piecewise_linear:
        return z >= 0.0 ? beta1 : -beta2;
    case HoldingKind::quadratic:
        return 2.0 * beta * z;
    case HoldingKind::convex_poly:
        return z >= 0.0 ? poly_side_deriv(pos_coeffs, z) : -poly_side_deriv(neg_coeffs, -z);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Setup cost evaluation
// ---------------------------------------------------------------------------

double SetupCostModel::eval(double xi) const {
    if (xi < 0.0) throw std::invalid_argument("setup cost: order quantity must be >= 0");
    if (xi == 0.0) return 0.0;
    if (kind == SetupKind::constant) return kappa;

    // Step form: values[n] on (Q_{n-1}, Q_n); min of neighbors at Q_n.
    auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), xi);
    std::size_t n = static_cast<std::size_t>(it - breakpoints.begin());
    if (it != breakpoints.end() && *it == xi) return std::min(values[n], values[n + 1]);
    return values[n];
}

bool SetupCostModel::vanishes_near_zero() const {
    if (kind == SetupKind::constant) return kappa == 0.0;
    return values.front() == 0.0;
}

ExtReal SetupCostModel::infinitesimal_setup_rate() const {
    // For both supported forms, K is constant on a right neighborhood of 0,
    // so the rate is 0 when that constant is 0 and infinite otherwise.
    return vanishes_near_zero() ? ExtReal::finite(0.0) : ExtReal::infinity();
}

double SetupCostModel::sup_value() const {
    if (kind == SetupKind::constant) return kappa;
    return *std::max_element(values.begin(), values.end());
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

void add(ValidationReport& r, const std::string& tag, double v, const std::string& msg) {
    r.violations.push_back({tag, v, msg});
}

bool finite(double v) { return std::isfinite(v); }

void check_demand(const BrownianDemand& d, ValidationReport& r) {
    if (!finite(d.mu) || d.mu <= 0.0) add(r, "demand", d.mu, "drift rate mu must be finite and > 0");
    if (!finite(d.sigma2) || d.sigma2 <= 0.0)
        add(r, "demand", d.sigma2, "variance rate sigma2 must be finite and > 0");
}

void check_setup(const SetupCostModel& s, ValidationReport& r) {
    if (s.kind == SetupKind::constant) {
        if (!finite(s.kappa)) add(r, "S2", s.kappa, "constant setup cost must be finite");
        else if (s.kappa < 0.0) add(r, "S1", s.kappa, "constant setup cost must be >= 0");
        return;
    }
    if (s.values.size() != s.breakpoints.size() + 1) {
        add(r, "step_form", static_cast<double>(s.values.size()),
            "step setup: values must have exactly breakpoints+1 entries");
        return;
    }
    for (std::size_t i = 0; i < s.breakpoints.size(); ++i) {
        double q = s.breakpoints[i];
        if (!finite(q) || q <= 0.0) add(r, "step_form", q, "breakpoints must be finite and > 0");
        if (i > 0 && !(q > s.breakpoints[i - 1]))
            add(r, "step_form", q, "breakpoints must be strictly increasing");
    }
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        double v = s.values[i];
        if (!finite(v)) add(r, "S2", v, "step setup values must be finite");
        else if (v < 0.0) add(r, "S1", v, "step setup values must be >= 0");
        if (i > 0 && v == s.values[i - 1])
            add(r, "step_form", v, "adjacent step values must differ");
    }
    // S3/S4 hold by construction for the step form: the right limit at zero
    // is values[0], and eval() takes the lower fee at each breakpoint.
}

void check_holding(const HoldingCostModel& h, ValidationReport& r, std::string& grid_desc) {
    switch (h.kind) {
    case HoldingKind::piecewise_linear:
        if (!finite(h.beta1) || h.beta1 <= 0.0)
            add(r, "H4", h.beta1, "piecewise_linear: beta1 must be > 0");
        if (!finite(h.beta2) || h.beta2 <= 0.0)
            add(r, "H4", h.beta2, "piecewise_linear: beta2 must be > 0");
        return;
    case HoldingKind::quadratic:
        if (!finite(h.beta) || h.beta <= 0.0) add(r, "H4", h.beta, "quadratic: beta must be > 0");
        return;
    case HoldingKind::convex_poly:
        break;
    }

    if (h.pos_coeffs.empty() || h.neg_coeffs.empty()) {
        add(r, "H4", 0.0, "convex_poly: both coefficient lists must be non-empty");
        return;
    }
    bool any_pos = false, any_neg = false;
    for (double c : h.pos_coeffs) {
        if (!finite(c) || c < 0.0) add(r, "H2", c, "convex_poly: coefficients must be >= 0");
        if (c > 0.0) any_pos = true;
    }
    for (double c : h.neg_coeffs) {
        if (!finite(c) || c < 0.0) add(r, "H2", c, "convex_poly: coefficients must be >= 0");
        if (c > 0.0) any_neg = true;
    }
    if (!any_pos) add(r, "H4", 0.0, "convex_poly: holding side must be strictly increasing");
    if (!any_neg) add(r, "H4", 0.0, "convex_poly: shortage side must be strictly decreasing");
    if (h.bound.a < 1 || !finite(h.bound.b0) || h.bound.b0 <= 0.0 || !finite(h.bound.b1) ||
        h.bound.b1 <= 0.0) {
        add(r, "witness", h.bound.b0, "convex_poly: growth witness (a,b0,b1) must be positive");
        return;
    }
    if (!r.violations.empty()) return;

    // Sampled checks for H2 (midpoint convexity), H4 (one-sided slopes), and
    // H5 (growth bound) on a symmetric log grid.
    const int n = 129;
    grid_desc = "convex_poly sampled grid: +-10^[-3,3], 129 log-spaced points per side";
    std::vector<double> zs;
    zs.reserve(2 * n);
    for (int i = 0; i < n; ++i) {
        double e = -3.0 + 6.0 * i / (n - 1);
        double z = std::pow(10.0, e);
        zs.push_back(z);
        zs.push_back(-z);
    }
    for (double z : zs) {
        double hz = h.eval(z);
        double mid = h.eval(z / 2.0);
        if (mid > (h.eval(0.0) + hz) / 2.0 + 1e-12 * (1.0 + std::fabs(hz)))
            add(r, "H2", z, "convex_poly: midpoint convexity violated at sampled point");
        double d = h.deriv(z);
        if (z > 0.0 && !(d > 0.0)) add(r, "H4", z, "convex_poly: h' must be > 0 for z > 0");
        if (z < 0.0 && !(d < 0.0)) add(r, "H4", z, "convex_poly: h' must be < 0 for z < 0");
        double cap = h.bound.b0 + h.bound.b1 * std::pow(std::fabs(z), h.bound.a);
        if (hz > cap * (1.0 + 1e-12))
            add(r, "H5", z, "convex_poly: growth witness does not dominate h at sampled point");
        if (r.violations.size() > 16) return; // report stays readable
    }
}

void check_ordering(const OrderingCostModel& o, ValidationReport& r) {
    if (!finite(o.k) || o.k < 0.0) add(r, "ordering", o.k, "proportional rate k must be >= 0");
    check_setup(o.setup, r);
}

/// Fill in the (H5) witness for the built-in kinds.
PolyBoundWitness derive_witness(const HoldingCostModel& h) {
    switch (h.kind) {
    case HoldingKind::piecewise_linear: {
        double b = std::max(h.beta1, h.beta2);
        return {1, b, b};
    }
    case HoldingKind::quadratic:
        return {2, h.beta, h.beta};
    case HoldingKind::convex_poly:
        return h.bound;
    }
    return {};
}

} // namespace

ValidationReport validate(const ProblemInstance& instance) {
    ValidationReport r;
    check_demand(instance.demand, r);
    check_holding(instance.holding, r, r.sampled_grid);
    check_ordering(instance.ordering, r);
    if (!std::isfinite(instance.x0))
        add(r, "demand", instance.x0, "initial inventory x0 must be finite");
    return r;
}

ProblemInstance validate_or_throw(const ProblemInstance& instance) {
    ValidationReport r = validate(instance);
    if (!r.ok()) {
        std::ostringstream os;
        os << "invalid problem instance:";
        for (const auto& v : r.violations)
            os << " [" << v.tag << "] " << v.message << " (value " << v.offending_value << ");";
        throw std::invalid_argument(os.str());
    }
    ProblemInstance out = instance;
    out.holding.bound = derive_witness(out.holding);
    return out;
}

} // namespace ssopt
