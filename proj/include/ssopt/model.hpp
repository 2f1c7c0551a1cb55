#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ssopt/ext_real.hpp"

namespace ssopt {

// ---------------------------------------------------------------------------
// Demand
// ---------------------------------------------------------------------------

/// Brownian demand: cumulative demand over [0,t] is mu*t - sigma*B(t).
struct BrownianDemand {
    double mu = 0.0;     ///< drift rate, demand units per time, > 0
    double sigma2 = 0.0; ///< variance rate, demand units^2 per time, > 0

    /// 2*mu/sigma2, the exponential rate of the stationary overshoot of the
    /// reflected inventory process.
    double lambda() const { return 2.0 * mu / sigma2; }
};

// ---------------------------------------------------------------------------
// Holding and shortage cost
// ---------------------------------------------------------------------------

enum class HoldingKind { piecewise_linear, quadratic, convex_poly };

/// Witness for the polynomial growth bound h(z) <= b0 + b1*|z|^a.
struct PolyBoundWitness {
    int a = 1;
    double b0 = 1.0;
    double b1 = 1.0;
};

/// Convex holding/shortage cost rate h with h(0)=0, decreasing on the
/// shortage side and increasing on the holding side.
///
/// Built-in kinds:
///   piecewise_linear: h(z) = beta1*z (z>=0), -beta2*z (z<0)
///   quadratic:        h(z) = beta*z^2
///   convex_poly:      h(z) = sum_i pos[i]*z^i (z>=0), sum_i neg[i]*(-z)^i (z<0),
///                     i starting at 1, all coefficients >= 0
struct HoldingCostModel {
    HoldingKind kind = HoldingKind::quadratic;
    double beta1 = 0.0; ///< piecewise_linear, holding side
    double beta2 = 0.0; ///< piecewise_linear, shortage side
    double beta = 0.0;  ///< quadratic
    std::vector<double> pos_coeffs; ///< convex_poly, power i = index+1
    std::vector<double> neg_coeffs; ///< convex_poly, power i = index+1
    PolyBoundWitness bound; ///< growth witness; derived for built-in kinds

    double eval(double z) const;
    /// One-sided derivative: at a kink the right derivative for z >= 0 and
    /// the left derivative for z < 0.
    double deriv(double z) const;
    bool has_kink_at_zero() const { return kind != HoldingKind::quadratic; }
};

// ---------------------------------------------------------------------------
// Ordering cost
// ---------------------------------------------------------------------------

enum class SetupKind { constant, step };

/// Non-proportional part K of the ordering cost, as a function of order
/// quantity. Restricted to a nonnegative constant or a bounded step
/// function that is lower semicontinuous: at a breakpoint the buyer pays
/// the lower of the two adjacent fees.
struct SetupCostModel {
    SetupKind kind = SetupKind::constant;
    double kappa = 0.0;               ///< constant kind
    std::vector<double> breakpoints;  ///< step kind, strictly increasing, > 0
    std::vector<double> values;       ///< step kind, size = breakpoints+1

    /// K(xi). K(0) = 0; at a breakpoint, min of the adjacent values.
    double eval(double xi) const;

    /// liminf of K(xi)/xi as xi -> 0+. Infinite iff K(0+) > 0.
    ExtReal infinitesimal_setup_rate() const;

    /// sup over xi > 0 of K(xi).
    double sup_value() const;

    bool vanishes_near_zero() const; ///< K(0+) == 0
};

/// Full ordering cost C(xi) = K(xi) + k*xi for xi > 0.
struct OrderingCostModel {
    double k = 0.0; ///< proportional rate, >= 0
    SetupCostModel setup;

    double eval(double xi) const { return xi > 0.0 ? setup.eval(xi) + k * xi : 0.0; }
};

// ---------------------------------------------------------------------------
// Problem instance
// ---------------------------------------------------------------------------

struct ProblemInstance {
    BrownianDemand demand;
    HoldingCostModel holding;
    OrderingCostModel ordering;
    double x0 = 0.0; ///< initial inventory, simulator only
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// One violated condition. `tag` names the condition (S1..S4, H1..H5) or a
/// structural tag ("demand", "ordering", "step_form", "witness").
struct Violation {
    std::string tag;
    double offending_value = 0.0;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::string sampled_grid; ///< description of the grid used for sampled checks
    bool ok() const { return violations.empty(); }
};

/// All-or-nothing validation of a raw instance. Exact checks for the
/// built-in holding kinds; sampled-grid checks (H2/H4/H5) for convex_poly,
/// with the grid recorded in the report.
ValidationReport validate(const ProblemInstance& instance);

/// Convenience: validate and throw std::invalid_argument listing all
/// violated condition tags.
ProblemInstance validate_or_throw(const ProblemInstance& instance);

} // namespace ssopt
