#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssopt/model.hpp"
#include "ssopt/numerics.hpp"

namespace ssopt {

/// Numerical controls for quadrature and root finding.
struct AnalyticsOptions {
    double quad_tol = 1e-10; ///< absolute quadrature tolerance, in (0, 1e-4]
    double root_tol = 1e-10; ///< residual tolerance for roots, in (0, 1e-4]
    double expand_factor = 2.0;
    int max_iter = 200;
    /// Bypass the closed-form fast paths of the built-in holding kinds and
    /// evaluate everything by quadrature. Used for cross-checks.
    bool force_quadrature = false;
};

/// Reorder / order-up-to pair with equal stationary unit cost at both ends.
struct MatchedLevels {
    double reorder;     ///< lower level
    double order_up_to; ///< upper level, reorder + quantity
    double quantity;    ///< order quantity, >= 0
};

struct CertificateOptions {
    int grid_points = 4096;
    double span_factor = 10.0; ///< grid covers [s - f*(S-s+1), S + f*(S-s+1)]
    double tol = 1e-7;
    int pair_count = 10000;         ///< random pairs for the order-cost inequality
    std::uint64_t pair_seed = 2016; ///< recorded for reproducibility
};

struct CertificateCheck {
    std::string name;
    bool passed = false;
    double worst_violation = 0.0; ///< most negative slack observed
    double location = 0.0;        ///< grid point (or pair gap) of the worst slack
};

/// Result of the lower-bound verification. The candidate passes when the
/// flattened value function certifies the claimed cost as a lower bound on
/// every admissible policy's average cost.
struct CertificateReport {
    bool passed = false;
    double claimed_cost = 0.0;
    double policy_cost = 0.0; ///< recomputed average cost of the candidate policy
    double flatten_level = 0.0;
    double probe_quantity = 0.0; ///< quantity whose fixed-quantity cost exceeds the bound
    double grid_lo = 0.0, grid_hi = 0.0;
    int grid_points = 0;
    double tol = 0.0;
    std::uint64_t pair_seed = 0;
    std::vector<CertificateCheck> checks;
};

/// Closed-form and quadrature-based functions of a validated instance:
/// the stationary unit cost curve, its minimizer, matched level pairs,
/// policy average costs, sublevel-set functionals, relative value
/// functions, and the lower-bound certificate.
///
/// Immutable after construction; all evaluations are pure and safe for
/// concurrent use.
class Analytics {
public:
    explicit Analytics(const ProblemInstance& instance, AnalyticsOptions options = {});

    const ProblemInstance& instance() const { return instance_; }
    const AnalyticsOptions& options() const { return options_; }
    double mu() const { return instance_.demand.mu; }
    double sigma2() const { return instance_.demand.sigma2; }
    double lambda() const { return lambda_; }
    double proportional_rate() const { return instance_.ordering.k; }
    const SetupCostModel& setup() const { return instance_.ordering.setup; }

    /// Expected holding and shortage cost per unit of demand under a base
    /// stock policy at level z. Strictly quasi-convex with a negative
    /// minimizer.
    double steady_unit_cost(double z) const;

    /// First derivative of the stationary unit cost. Rejects evaluation at
    /// an exact kink of h (z = 0 for the kinked holding kinds).
    double steady_unit_cost_deriv(double z) const;

    /// The unique minimizer of the stationary unit cost; always < 0.
    /// Equals the optimal base stock level.
    double optimal_base_stock() const { return z_star_; }

    /// Stationary unit cost at its minimizer.
    double min_steady_unit_cost() const { return g0_min_; }

    /// The unique pair (s, s+xi) with equal stationary unit cost.
    /// quantity = 0 collapses to the optimal base stock level.
    MatchedLevels matched_levels(double quantity) const;

    /// Long-run average cost of the (s,S) policy; +infinity for the base
    /// stock case when infinitesimal orders carry an infinite setup rate.
    double average_cost(double reorder, double order_up_to) const;

    /// Minimum long-run average cost when every order has the given
    /// quantity (base stock when quantity = 0).
    double fixed_quantity_cost(double quantity) const;

    /// Holding component of the fixed-quantity cost: the averaged
    /// stationary unit cost over the matched interval, times the drift.
    double matched_holding_rate(double quantity) const;

    /// Width of the sublevel set {z : steady_unit_cost(z) <= y}.
    double sublevel_width(double y) const;

    /// Integral of the sublevel width from the minimum cost up to u.
    double sublevel_area(double u) const;

    /// Area between the matched-level cost line and the cost curve over the
    /// matched interval; strictly increasing in the quantity from 0.
    double matched_gap_area(double quantity) const;

    /// Relative value function: cost disadvantage of level z against the
    /// anchor level, for a policy with average cost nu. Zero at the anchor.
    double relative_value(double z, double anchor, double nu) const;

    /// Lower-bound certificate for a candidate optimum (s, S, nu).
    CertificateReport verify_lower_bound(double reorder, double order_up_to, double nu,
                                         const CertificateOptions& opts = {}) const;

    /// Integral of the stationary unit cost over [a, b] (adaptive Simpson
    /// over certified point values).
    double steady_cost_integral(double a, double b) const;

private:
    double g0_closed(double z) const;
    double g0_deriv_closed(double z) const;
    double g0_quadrature(double z) const;
    double truncation_horizon(double z) const;
    double deriv_unchecked(double z) const; ///< one-sided at kinks

    ProblemInstance instance_;
    AnalyticsOptions options_;
    double lambda_ = 0.0;
    bool closed_form_ = false;
    double z_star_ = 0.0;
    double g0_min_ = 0.0;
};

} // namespace ssopt
