#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssopt/analytics.hpp"

namespace ssopt {

enum class SolveMethod { base_stock, constant_k, step_algorithm, grid };

std::string to_string(SolveMethod m);

/// Optimal policy for a constant setup fee.
struct ConstantSetupSolution {
    double quantity = 0.0;    ///< optimal order quantity (0 means base stock)
    double reorder = 0.0;
    double order_up_to = 0.0;
    double avg_cost = 0.0;
    double residual_gap_area = 0.0; ///< |matched_gap_area(quantity) - fee|
    double residual_area_eq = 0.0;  ///< |sublevel_area(avg_cost/mu - k) - fee|
    double residual_levels = 0.0;   ///< |g0(reorder) - (avg_cost/mu - k)|
};

/// Where the unconstrained optimal quantity of a step piece falls relative
/// to the piece's quantity interval.
enum class CellPosition { below, inside, above };

std::string to_string(CellPosition p);

/// Per-piece record of the step-setup selection procedure.
struct CandidateRow {
    int index = 0;          ///< 1-based piece index
    double fee = 0.0;       ///< setup fee of the piece
    double cell_lo = 0.0;   ///< quantity interval lower end
    double cell_hi = 0.0;   ///< quantity interval upper end (inf for the last piece)
    double unconstrained_cost = 0.0;
    double unconstrained_reorder = 0.0;
    double unconstrained_order_up_to = 0.0;
    double unconstrained_quantity = 0.0;
    CellPosition position = CellPosition::inside;
    double clamped_quantity = 0.0; ///< quantity projected onto the piece interval
    bool in_candidate_set = false; ///< fee actually applies at the clamped quantity
    double clamped_cost = 0.0;     ///< average cost at the clamped quantity with this piece's fee
    bool evaluated = false;        ///< policy levels computed (candidate-set members)
    double reorder = 0.0;
    double order_up_to = 0.0;
    double avg_cost = 0.0;
};

struct GridSolveOptions {
    int log_points = 512;     ///< log-spaced points per continuity cell
    int uniform_points = 512; ///< uniform points per continuity cell
    double refine_tol = 1e-10;
};

struct SolveOptions {
    bool run_certificate = true;
    bool cross_check_grid = false;
    CertificateOptions certificate;
    GridSolveOptions grid;
};

struct SolveResult {
    double reorder = 0.0;
    double order_up_to = 0.0;
    double avg_cost = 0.0;
    SolveMethod method = SolveMethod::grid;
    std::vector<CandidateRow> candidates;         ///< step algorithm only
    std::vector<int> alternate_minimizers;        ///< other indices tied at the optimum
    std::vector<std::pair<std::string, double>> residuals;
    std::optional<CertificateReport> certificate;
    std::optional<double> grid_avg_cost; ///< cross-check result when requested
    std::optional<double> grid_gap;
    double quad_tol = 0.0;
    double root_tol = 0.0;
};

/// Policy optimizer over a fixed analytics context. Stateless beyond the
/// shared immutable context; safe for concurrent use.
class Solver {
public:
    explicit Solver(const Analytics& analytics) : a_(analytics) {}

    /// Exact optimum when the setup fee is a constant kappa >= 0, via
    /// bisection on the strictly increasing matched gap area.
    ConstantSetupSolution solve_constant_setup(double kappa) const;

    /// Exact optimum for a step setup cost: the base-stock shortcut when the
    /// first fee vanishes, otherwise the per-piece selection procedure.
    SolveResult solve_step_setup(const SolveOptions& opts = {}) const;

    /// Derivative-free fallback: scans the fixed-quantity cost over a
    /// geometric + uniform grid per continuity cell with golden-section
    /// refinement, valid for any supported setup model.
    SolveResult solve_by_grid(const GridSolveOptions& opts = {}) const;

    /// Dispatch on the setup model, then certify the result; optionally
    /// cross-check against the grid solver.
    SolveResult solve(const SolveOptions& opts = {}) const;

private:
    SolveResult base_stock_result() const;
    double cell_cost(double fee, double quantity) const; ///< fixed fee, matched levels
    void finalize(SolveResult& r, const SolveOptions& opts) const;

    const Analytics& a_;
};

} // namespace ssopt
