#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ssopt/analytics.hpp"
#include "ssopt/model.hpp"

namespace ssopt {

/// Discretization and replication plan for Monte Carlo runs.
struct PathConfig {
    double horizon = 1e4;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    int replications = 8;
    double burn_in = 0.1; ///< fraction of the horizon discarded, in [0, 0.5)

    void validate() const; ///< dt <= horizon/1e4, replications >= 1
    std::size_t steps() const { return static_cast<std::size_t>(horizon / dt + 0.5); }
};

/// Ordering policy executed by the simulator.
struct PolicySpec {
    enum class Kind { order_up_to, base_stock, bounded };
    Kind kind = Kind::order_up_to;
    double reorder = 0.0;
    double level = 0.0; ///< order-up-to level; equals reorder for base stock
    int bound = 0;      ///< order-up-to bound of the modified policy, >= 1
    std::shared_ptr<const PolicySpec> base; ///< bounded kind only

    static PolicySpec order_up_to_policy(double s, double S);
    static PolicySpec base_stock_policy(double s);
    static PolicySpec bounded_policy(PolicySpec base, int m);
    void validate() const;
};

struct CostLedger {
    double holding = 0.0;
    double setup = 0.0; ///< jump fees plus the infinitesimal-order component
    double proportional = 0.0;
    double total() const { return holding + setup + proportional; }
};

struct RunOptions {
    bool record_trajectory = false;
    std::size_t sample_stride = 0; ///< >0: keep every stride-th level after burn-in
};

struct Trajectory {
    std::vector<double> t, z, y, cumulative_cost;
};

/// One replication. Ledgers cover the post-burn-in window only.
struct RunResult {
    CostLedger ledger;
    double measured_time = 0.0;
    long orders = 0; ///< jump orders in the measured window
    double ordered_quantity = 0.0;
    double final_level = 0.0;
    double min_level = 0.0;
    std::vector<double> level_samples;
    Trajectory trajectory;

    // bounded kind: the base policy run on the same path, plus coupling checks
    CostLedger base_ledger;
    long base_orders = 0;
    long coupling_violations = 0;
    double worst_dominance_gap = 0.0; ///< max of (bounded level - base level)
};

struct SimulationEstimate {
    double avg_cost = 0.0;
    CostLedger components; ///< per-time averages; they sum to avg_cost
    double std_error = 0.0;
    long cycles = 0; ///< orders observed across replications
    double dt = 0.0;
    double horizon = 0.0;
    double burn_in = 0.0;
    int replications = 0;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> stream_seeds;
    std::vector<double> replication_costs;
};

struct ComparisonRow {
    int bound = 0;
    double bounded_cost = 0.0;
    double bounded_se = 0.0;
    double base_cost = 0.0;
    double base_se = 0.0;
    double bound_value = 0.0; ///< 4*mu*sup(K)/m
    bool holds = false;
    long coupling_violations = 0;
};

/// Monte Carlo engine over a validated instance: exact Gaussian demand
/// increments, policy execution, cost accounting, and the coupled
/// order-up-to-bounded comparison.
class Simulator {
public:
    explicit Simulator(const ProblemInstance& instance);

    const ProblemInstance& instance() const { return instance_; }

    /// Per-replication RNG stream seed, splittable from the master seed.
    static std::uint64_t stream_seed(std::uint64_t master, int replication);

    /// Exact demand-process increments over n steps: Normal(-mu*dt, sigma2*dt).
    std::vector<double> sample_increments(std::size_t n, double dt,
                                          std::uint64_t stream) const;

    /// Execute one replication of a policy on the stream's path.
    RunResult run_policy(const PolicySpec& policy, const PathConfig& config,
                         std::uint64_t stream, const RunOptions& opts = {}) const;

    /// Replicated time-average cost with jackknife standard error.
    /// Replications run in parallel (capped by SSOPT_THREADS) and are merged
    /// in replication order.
    SimulationEstimate estimate_average_cost(const PolicySpec& policy,
                                             const PathConfig& config) const;

    /// Tail probability P[level > v at time t] of the reflected process with
    /// barrier m started from x.
    double reflected_tail_probability(double v, double t, double m, double x) const;

    /// For each bound, simulate the coupled (base, bounded) pair and test the
    /// comparison inequality at three combined standard errors.
    std::vector<ComparisonRow> run_bounded_comparison(const PolicySpec& base,
                                                      const std::vector<int>& bounds,
                                                      const PathConfig& config) const;

private:
    ProblemInstance instance_;
};

} // namespace ssopt
