#include "ssopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ssopt {

std::string to_string(SolveMethod m) {
    switch (m) {
    case SolveMethod::base_stock: return "base_stock";
    case SolveMethod::constant_k: return "constant_k";
    case SolveMethod::step_algorithm: return "step_algorithm";
    case SolveMethod::grid: return "grid";
    }
    return "?";
}

std::string to_string(CellPosition p) {
    switch (p) {
    case CellPosition::below: return "below";
    case CellPosition::inside: return "inside";
    case CellPosition::above: return "above";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Constant setup fee
// ---------------------------------------------------------------------------

ConstantSetupSolution Solver::solve_constant_setup(double kappa) const {
    if (!(kappa >= 0.0)) throw std::invalid_argument("solve_constant_setup: fee must be >= 0");
    double mu = a_.mu();
    double k = a_.proportional_rate();

    ConstantSetupSolution sol;
    if (kappa == 0.0) {
        double z = a_.optimal_base_stock();
        sol.quantity = 0.0;
        sol.reorder = sol.order_up_to = z;
        sol.avg_cost = k * mu + mu * a_.min_steady_unit_cost();
        sol.residual_levels = 0.0;
        sol.residual_gap_area = 0.0;
        sol.residual_area_eq = std::fabs(a_.sublevel_area(sol.avg_cost / mu - k));
        return sol;
    }

    // The matched gap area is continuous, strictly increasing from 0 and
    // unbounded, so a sign-changing bracket for area = kappa always exists.
    auto f = [&](double xi) { return a_.matched_gap_area(xi) - kappa; };
    double lo = 1.0, hi = 1.0;
    for (int i = 0; i < 1200 && f(lo) >= 0.0; ++i) lo *= 0.5;
    RootOptions ropt;
    expand_right(f, lo, &hi, ropt);
    double xi_hat = bisect(f, lo, hi, ropt);

    MatchedLevels m = a_.matched_levels(xi_hat);
    double g_s = a_.steady_unit_cost(m.reorder);
    sol.quantity = xi_hat;
    sol.reorder = m.reorder;
    sol.order_up_to = m.order_up_to;
    sol.avg_cost = k * mu + mu * g_s;
    sol.residual_gap_area = std::fabs(a_.matched_gap_area(xi_hat) - kappa);
    sol.residual_area_eq = std::fabs(a_.sublevel_area(-k + sol.avg_cost / mu) - kappa);
    sol.residual_levels = std::fabs(g_s - (-k + sol.avg_cost / mu));
    return sol;
}

// ---------------------------------------------------------------------------
// Step setup fee: selection procedure
// ---------------------------------------------------------------------------

double Solver::cell_cost(double fee, double quantity) const {
    return a_.proportional_rate() * a_.mu() + fee * a_.mu() / quantity +
           a_.matched_holding_rate(quantity);
}

SolveResult Solver::base_stock_result() const {
    SolveResult r;
    double z = a_.optimal_base_stock();
    r.reorder = r.order_up_to = z;
    r.avg_cost = a_.proportional_rate() * a_.mu() + a_.mu() * a_.min_steady_unit_cost();
    r.method = SolveMethod::base_stock;
    r.residuals.emplace_back("avg_cost_vs_policy_cost",
                             std::fabs(r.avg_cost - a_.average_cost(z, z)));
    return r;
}

SolveResult Solver::solve_step_setup(const SolveOptions& opts) const {
    const SetupCostModel& setup = a_.setup();
    if (setup.kind != SetupKind::step)
        throw std::invalid_argument("solve_step_setup requires a step setup model");

    if (setup.values.front() == 0.0) {
        // Small orders are free of setup fees, so the optimum degenerates to
        // the base stock policy at the cost-curve minimizer.
        SolveResult r = base_stock_result();
        finalize(r, opts);
        return r;
    }

    const std::size_t N = setup.values.size();
    const double inf = std::numeric_limits<double>::infinity();
    SolveResult r;
    r.method = SolveMethod::step_algorithm;
    r.candidates.resize(N);

    for (std::size_t i = 0; i < N; ++i) {
        CandidateRow& row = r.candidates[i];
        row.index = static_cast<int>(i) + 1;
        row.fee = setup.values[i];
        row.cell_lo = i == 0 ? 0.0 : setup.breakpoints[i - 1];
        row.cell_hi = i + 1 < N ? setup.breakpoints[i] : inf;

        ConstantSetupSolution hat = solve_constant_setup(row.fee);
        row.unconstrained_cost = hat.avg_cost;
        row.unconstrained_reorder = hat.reorder;
        row.unconstrained_order_up_to = hat.order_up_to;
        row.unconstrained_quantity = hat.quantity;

        if (hat.quantity <= row.cell_lo) {
            row.position = CellPosition::below;
            row.clamped_quantity = row.cell_lo;
        } else if (hat.quantity >= row.cell_hi) {
            row.position = CellPosition::above;
            row.clamped_quantity = row.cell_hi;
        } else {
            row.position = CellPosition::inside;
            row.clamped_quantity = hat.quantity;
        }

        row.in_candidate_set = setup.eval(row.clamped_quantity) == row.fee;
        row.clamped_cost = row.position == CellPosition::inside
                               ? hat.avg_cost
                               : cell_cost(row.fee, row.clamped_quantity);

        if (row.in_candidate_set) {
            row.evaluated = true;
            if (row.position == CellPosition::inside) {
                row.reorder = hat.reorder;
                row.order_up_to = hat.order_up_to;
                row.avg_cost = hat.avg_cost;
            } else {
                MatchedLevels m = a_.matched_levels(row.clamped_quantity);
                row.reorder = m.reorder;
                row.order_up_to = m.order_up_to;
                row.avg_cost = row.clamped_cost;
            }
        }
    }

    const CandidateRow* best = nullptr;
    for (const CandidateRow& row : r.candidates)
        if (row.in_candidate_set && (!best || row.avg_cost < best->avg_cost)) best = &row;
    if (!best) throw NumericsError("internal error: empty candidate set for step setup");

    for (const CandidateRow& row : r.candidates)
        if (row.in_candidate_set && row.index != best->index &&
            std::fabs(row.avg_cost - best->avg_cost) <= 1e-9 * (1.0 + std::fabs(best->avg_cost)))
            r.alternate_minimizers.push_back(row.index);

    r.reorder = best->reorder;
    r.order_up_to = best->order_up_to;
    r.avg_cost = best->avg_cost;
    r.residuals.emplace_back("avg_cost_vs_policy_cost",
                             std::fabs(r.avg_cost - a_.average_cost(r.reorder, r.order_up_to)));
    finalize(r, opts);
    return r;
}

// ---------------------------------------------------------------------------
// Grid fallback
// ---------------------------------------------------------------------------

SolveResult Solver::solve_by_grid(const GridSolveOptions& opts) const {
    const SetupCostModel& setup = a_.setup();
    double mu = a_.mu();
    double k_bar = setup.sup_value();
    ExtReal ell = setup.infinitesimal_setup_rate();

    double best_xi = -1.0; // -1 encodes the base stock candidate
    double best_cost = std::numeric_limits<double>::infinity();
    auto consider = [&](double xi) {
        double c = a_.fixed_quantity_cost(std::max(xi, 0.0));
        if (c < best_cost) {
            best_cost = c;
            best_xi = std::max(xi, 0.0);
        }
    };

    if (!ell.is_infinite()) consider(0.0);

    // Seed the incumbent with the unconstrained optimum for the largest fee
    // and the fee breakpoints, then expand the scan ceiling until the cost
    // there clears the incumbent by the worst-case average fee.
    double seed_xi = 1.0;
    if (k_bar > 0.0) seed_xi = solve_constant_setup(k_bar).quantity;
    consider(seed_xi);
    if (setup.kind == SetupKind::step)
        for (double q : setup.breakpoints) consider(q);

    double xi_max = 8.0 * std::max(seed_xi, 1.0);
    for (int i = 0; i < 200; ++i) {
        if (a_.fixed_quantity_cost(xi_max) > best_cost + k_bar * mu / xi_max) break;
        xi_max *= 2.0;
    }

    std::vector<double> bounds{0.0};
    if (setup.kind == SetupKind::step)
        for (double q : setup.breakpoints)
            if (q < xi_max) bounds.push_back(q);
    bounds.push_back(xi_max);

    for (std::size_t c = 0; c + 1 < bounds.size(); ++c) {
        double lo = bounds[c], hi = bounds[c + 1];
        double fee = setup.eval(0.5 * (lo + hi));
        double lo_eff = std::max(lo, hi * 1e-9);

        for (int i = 0; i < opts.log_points; ++i) {
            double t = static_cast<double>(i + 1) / opts.log_points;
            consider(lo_eff * std::pow(hi / lo_eff, t));
        }
        for (int i = 1; i < opts.uniform_points; ++i)
            consider(lo + (hi - lo) * i / opts.uniform_points);

        // Within a cell the fee is constant, so the fee-fixed cost is
        // strictly unimodal and golden-section refinement is exact.
        double xi_ref = golden_min([&](double xi) { return cell_cost(fee, xi); }, lo_eff, hi,
                                   opts.refine_tol);
        consider(xi_ref);
    }
    if (setup.kind == SetupKind::step)
        for (double q : setup.breakpoints)
            if (q >= xi_max) consider(q); // lower-fee points beyond the scan ceiling

    SolveResult r;
    r.method = SolveMethod::grid;
    if (best_xi <= 0.0) {
        r.reorder = r.order_up_to = a_.optimal_base_stock();
    } else {
        MatchedLevels m = a_.matched_levels(best_xi);
        r.reorder = m.reorder;
        r.order_up_to = m.order_up_to;
    }
    r.avg_cost = best_cost;
    r.residuals.emplace_back("avg_cost_vs_policy_cost",
                             std::fabs(r.avg_cost - a_.average_cost(r.reorder, r.order_up_to)));
    return r;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

void Solver::finalize(SolveResult& r, const SolveOptions& opts) const {
    r.quad_tol = a_.options().quad_tol;
    r.root_tol = a_.options().root_tol;
    if (opts.run_certificate)
        r.certificate = a_.verify_lower_bound(r.reorder, r.order_up_to, r.avg_cost,
                                              opts.certificate);
    if (opts.cross_check_grid && r.method != SolveMethod::grid) {
        SolveResult g = solve_by_grid(opts.grid);
        r.grid_avg_cost = g.avg_cost;
        r.grid_gap = std::fabs(g.avg_cost - r.avg_cost);
    }
}

SolveResult Solver::solve(const SolveOptions& opts) const {
    const SetupCostModel& setup = a_.setup();
    if (setup.kind == SetupKind::step) return solve_step_setup(opts);

    if (setup.kappa == 0.0) {
        SolveResult r = base_stock_result();
        finalize(r, opts);
        return r;
    }
    ConstantSetupSolution sol = solve_constant_setup(setup.kappa);
    SolveResult r;
    r.method = SolveMethod::constant_k;
    r.reorder = sol.reorder;
    r.order_up_to = sol.order_up_to;
    r.avg_cost = sol.avg_cost;
    r.residuals.emplace_back("gap_area_eq", sol.residual_gap_area);
    r.residuals.emplace_back("area_eq", sol.residual_area_eq);
    r.residuals.emplace_back("level_eq", sol.residual_levels);
    r.residuals.emplace_back("avg_cost_vs_policy_cost",
                             std::fabs(r.avg_cost - a_.average_cost(r.reorder, r.order_up_to)));
    finalize(r, opts);
    return r;
}

} // namespace ssopt
