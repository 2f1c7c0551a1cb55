#include "ssopt/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <thread>

namespace ssopt {

// ---------------------------------------------------------------------------
// Config and policy specs
// ---------------------------------------------------------------------------

void PathConfig::validate() const {
    if (!(horizon > 0.0) || !(dt > 0.0)) throw std::invalid_argument("horizon and dt must be > 0");
    if (dt > horizon / 1e4) throw std::invalid_argument("dt must be <= horizon / 1e4");
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (!(burn_in >= 0.0 && burn_in < 0.5)) throw std::invalid_argument("burn_in must lie in [0, 0.5)");
}

PolicySpec PolicySpec::order_up_to_policy(double s, double S) {
    PolicySpec p;
    p.kind = Kind::order_up_to;
    p.reorder = s;
    p.level = S;
    return p;
}

PolicySpec PolicySpec::base_stock_policy(double s) {
    PolicySpec p;
    p.kind = Kind::base_stock;
    p.reorder = s;
    p.level = s;
    return p;
}

PolicySpec PolicySpec::bounded_policy(PolicySpec base, int m) {
    PolicySpec p;
    p.kind = Kind::bounded;
    p.bound = m;
    p.base = std::make_shared<const PolicySpec>(std::move(base));
    return p;
}

void PolicySpec::validate() const {
    switch (kind) {
    case Kind::order_up_to:
        if (!(reorder <= level)) throw std::invalid_argument("order-up-to policy requires s <= S");
        return;
    case Kind::base_stock:
        return;
    case Kind::bounded:
        if (bound < 1) throw std::invalid_argument("bounded policy requires an integer bound >= 1");
        if (!base) throw std::invalid_argument("bounded policy requires a base policy");
        if (base->kind == Kind::bounded)
            throw std::invalid_argument("bounded policy cannot be nested");
        base->validate();
        return;
    }
}

// ---------------------------------------------------------------------------
// RNG streams
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct IncrementStream {
    std::mt19937_64 eng;
    std::normal_distribution<double> dist;
    std::uniform_real_distribution<double> unit;
    IncrementStream(std::uint64_t seed, double mean, double sd)
        : eng(seed), dist(mean, sd), unit(0.0, 1.0) {}
    double next() { return dist(eng); }

    /// Minimum of the Brownian path over one step, conditional on its
    /// increment dx (Brownian-bridge minimum; drift cancels given the
    /// endpoints). var is sigma^2 * dt.
    double bridge_min(double dx, double var) {
        double u = 1.0 - unit(eng); // (0, 1]
        return 0.5 * (dx - std::sqrt(dx * dx - 2.0 * var * std::log(u)));
    }
};

int thread_cap() {
    int cap = static_cast<int>(std::thread::hardware_concurrency());
    if (cap < 1) cap = 1;
    if (const char* env = std::getenv("SSOPT_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) cap = std::min(cap, v);
    }
    return cap;
}

} // namespace

std::uint64_t Simulator::stream_seed(std::uint64_t master, int replication) {
    return splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(replication) + 1));
}

Simulator::Simulator(const ProblemInstance& instance) : instance_(validate_or_throw(instance)) {}

std::vector<double> Simulator::sample_increments(std::size_t n, double dt,
                                                 std::uint64_t stream) const {
    IncrementStream inc(stream, -instance_.demand.mu * dt,
                        std::sqrt(instance_.demand.sigma2 * dt));
    std::vector<double> out(n);
    for (auto& v : out) v = inc.next();
    return out;
}

// ---------------------------------------------------------------------------
// Policy execution
// ---------------------------------------------------------------------------

namespace {

struct StepRecorder {
    const RunOptions& opts;
    RunResult& out;
    double cumulative = 0.0;

    void record(double t, double z, double y, double step_cost, bool measured, std::size_t i) {
        cumulative += step_cost;
        if (measured && opts.sample_stride > 0 && i % opts.sample_stride == 0)
            out.level_samples.push_back(z);
        if (opts.record_trajectory) {
            out.trajectory.t.push_back(t);
            out.trajectory.z.push_back(z);
            out.trajectory.y.push_back(y);
            out.trajectory.cumulative_cost.push_back(cumulative);
        }
    }
};

} // namespace

RunResult Simulator::run_policy(const PolicySpec& policy, const PathConfig& config,
                                std::uint64_t stream, const RunOptions& opts) const {
    policy.validate();
    config.validate();

    const double mu = instance_.demand.mu;
    const double dt = config.dt;
    const std::size_t n = config.steps();
    const std::size_t i_burn = static_cast<std::size_t>(config.burn_in * n + 0.5);
    const auto& h = instance_.holding;
    const auto& setup = instance_.ordering.setup;
    const double k = instance_.ordering.k;

    IncrementStream inc(stream, -mu * dt, std::sqrt(instance_.demand.sigma2 * dt));
    RunResult out;
    out.measured_time = (n - i_burn) * dt;
    StepRecorder rec{opts, out};

    if (policy.kind == PolicySpec::Kind::order_up_to) {
        const double s = policy.reorder, S = policy.level;
        const double fee = setup.eval(S - s) + k * (S - s); // nominal per-order charge
        const double setup_part = setup.eval(S - s);
        double z = S; // start at the order-up-to level to shorten transients
        double y = 0.0;
        out.min_level = z;
        rec.record(0.0, z, y, 0.0, false, 0);
        for (std::size_t i = 1; i <= n; ++i) {
            bool measured = i > i_burn;
            double z_pre = z + inc.next();
            double hold = 0.5 * (h.eval(z) + h.eval(z_pre)) * dt;
            double step_cost = hold;
            z = z_pre;
            if (z <= s) {
                double q = S - z;
                y += q;
                step_cost += fee;
                if (measured) {
                    out.ledger.setup += setup_part;
                    out.ledger.proportional += k * (S - s);
                    ++out.orders;
                    out.ordered_quantity += q;
                }
                z = S;
            }
            if (measured) out.ledger.holding += hold;
            out.min_level = std::min(out.min_level, z);
            rec.record(i * dt, z, y, step_cost, measured, i);
        }
        out.final_level = z;
        return out;
    }

    if (policy.kind == PolicySpec::Kind::base_stock) {
        ExtReal ell = setup.infinitesimal_setup_rate();
        if (ell.is_infinite())
            throw std::invalid_argument(
                "base stock policy has infinite cost when small orders carry a setup fee");
        const double rate = k + ell.value();
        const double var = instance_.demand.sigma2 * dt;
        const double s = policy.reorder;
        double z = std::max(instance_.x0, s);
        double y = std::max(s - instance_.x0, 0.0);
        double init_cost = y > 0.0 ? setup.eval(y) + k * y : 0.0; // jump order at time zero
        out.min_level = z;
        rec.record(0.0, z, y, init_cost, false, 0);
        for (std::size_t i = 1; i <= n; ++i) {
            bool measured = i > i_burn;
            double dx = inc.next();
            // reflect against the within-step path minimum, so the running
            // supremum of (s - X) is sampled exactly at grid times
            double dy = std::max(s - (z + inc.bridge_min(dx, var)), 0.0);
            double z_post = z + dx + dy;
            double hold = 0.5 * (h.eval(z) + h.eval(z_post)) * dt;
            double step_cost = hold + rate * dy;
            y += dy;
            if (measured) {
                out.ledger.holding += hold;
                out.ledger.proportional += k * dy;
                out.ledger.setup += ell.value() * dy;
                out.ordered_quantity += dy;
            }
            z = z_post;
            out.min_level = std::min(out.min_level, z);
            rec.record(i * dt, z, y, step_cost, measured, i);
        }
        out.final_level = z;
        return out;
    }

    // Bounded modification: run the base policy and the modified policy on
    // the same path, applying the jump rules and the suppression of
    // continuous ordering above the bound.
    const PolicySpec& base = *policy.base;
    const double m = static_cast<double>(policy.bound);
    const bool base_is_ss = base.kind == PolicySpec::Kind::order_up_to;
    const double s = base.reorder, S = base.level;
    const double var = instance_.demand.sigma2 * dt;
    double base_setup_part = 0.0, ell_rate = 0.0;
    if (base_is_ss) {
        base_setup_part = setup.eval(S - s);
    } else {
        ExtReal ell = setup.infinitesimal_setup_rate();
        if (ell.is_infinite())
            throw std::invalid_argument(
                "base stock policy has infinite cost when small orders carry a setup fee");
        ell_rate = ell.value();
    }

    double z = base_is_ss ? S : std::max(instance_.x0, s);
    double zm = z;
    double y = 0.0, ym = 0.0;
    out.min_level = zm;
    rec.record(0.0, zm, ym, 0.0, false, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        bool measured = i > i_burn;
        double dx = inc.next();
        double z_pre = z + dx;
        double zm_pre = zm + dx;
        double zm_prev = zm;

        // base policy action
        bool base_jumped = false;
        double base_jump = 0.0, dyc = 0.0;
        double z_post = z_pre;
        if (base_is_ss) {
            if (z_pre <= s) {
                base_jumped = true;
                base_jump = S - z_pre;
                z_post = S;
            }
        } else {
            dyc = std::max(s - (z + inc.bridge_min(dx, var)), 0.0);
            z_post = z_pre + dyc;
        }

        // bounded policy response
        double zm_post = zm_pre;
        double m_setup = 0.0, m_prop = 0.0, m_quantity = 0.0;
        long m_orders = 0;
        if (base_jumped) {
            double jump = 0.0;
            if (zm_pre <= m / 2.0)
                jump = zm_pre + base_jump <= m ? base_jump : m - zm_pre; // match or top up to m
            if (jump > 0.0) {
                zm_post = zm_pre + jump;
                m_setup += setup.eval(jump);
                m_prop += k * jump;
                m_quantity += jump;
                ++m_orders;
            }
        } else if (dyc > 0.0 && zm_pre <= m) {
            zm_post = zm_pre + dyc; // continuous ordering allowed below the bound
            m_setup += ell_rate * dyc;
            m_prop += k * dyc;
            m_quantity += dyc;
        }

        // zero-hitting rule at non-jump times: grid sign change stands in
        // for the hitting time
        if (!base_jumped && zm_prev > 0.0 && zm_post <= 0.0) {
            double target = z_post > 0.0 ? std::min(z_post, m)
                                         : zm_post + std::min(z_post - zm_post, m);
            if (target > zm_post) {
                double jump = target - zm_post;
                zm_post = target;
                m_setup += setup.eval(jump);
                m_prop += k * jump;
                m_quantity += jump;
                ++m_orders;
            }
        }

        // coupling invariants: dominance everywhere, equality on shortage
        if (zm_post > z_post + 1e-9) ++out.coupling_violations;
        if (zm_post < -1e-12 && std::fabs(zm_post - z_post) > 1e-9) ++out.coupling_violations;
        out.worst_dominance_gap = std::max(out.worst_dominance_gap, zm_post - z_post);

        double hold_m = 0.5 * (h.eval(zm) + h.eval(zm_post)) * dt;
        double hold_base = 0.5 * (h.eval(z) + h.eval(z_post)) * dt;
        if (measured) {
            out.ledger.holding += hold_m;
            out.ledger.setup += m_setup;
            out.ledger.proportional += m_prop;
            out.orders += m_orders;
            out.ordered_quantity += m_quantity;
            out.base_ledger.holding += hold_base;
            if (base_jumped) {
                out.base_ledger.setup += base_setup_part;
                out.base_ledger.proportional += k * (S - s);
                ++out.base_orders;
            }
            if (dyc > 0.0) {
                out.base_ledger.setup += ell_rate * dyc;
                out.base_ledger.proportional += k * dyc;
            }
        }
        y += base_jumped ? base_jump : dyc;
        ym += m_quantity;
        z = z_post;
        zm = zm_post;
        out.min_level = std::min(out.min_level, zm);
        rec.record(i * dt, zm, ym, hold_m + m_setup + m_prop, measured, i);
    }
    out.final_level = zm;
    return out;
}

// ---------------------------------------------------------------------------
// Replicated estimates
// ---------------------------------------------------------------------------

namespace {

double jackknife_se(const std::vector<double>& xs) {
    const std::size_t r = xs.size();
    if (r < 2) return 0.0;
    double sum = 0.0;
    for (double x : xs) sum += x;
    double acc = 0.0;
    for (double x : xs) {
        double loo = (sum - x) / (r - 1);
        double dev = loo - sum / r;
        acc += dev * dev;
    }
    // jackknife variance of the mean: (r-1)/r * sum of squared deviations
    return std::sqrt((r - 1.0) / r * acc);
}

} // namespace

SimulationEstimate Simulator::estimate_average_cost(const PolicySpec& policy,
                                                    const PathConfig& config) const {
    policy.validate();
    config.validate();
    const int r = config.replications;

    std::vector<RunResult> runs(r);
    std::vector<std::uint64_t> streams(r);
    for (int i = 0; i < r; ++i) streams[i] = stream_seed(config.seed, i);

    int workers = std::min(r, thread_cap());
    if (workers <= 1) {
        for (int i = 0; i < r; ++i) runs[i] = run_policy(policy, config, streams[i], {});
    } else {
        std::atomic<int> next{0};
        std::exception_ptr failure;
        std::mutex failure_mu;
        auto work = [&] {
            try {
                for (int i = next.fetch_add(1); i < r; i = next.fetch_add(1))
                    runs[i] = run_policy(policy, config, streams[i], {});
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    SimulationEstimate est;
    est.dt = config.dt;
    est.horizon = config.horizon;
    est.burn_in = config.burn_in;
    est.replications = r;
    est.master_seed = config.seed;
    est.stream_seeds = streams;

    std::vector<double> rates(r);
    for (int i = 0; i < r; ++i) {
        const RunResult& run = runs[i];
        rates[i] = run.ledger.total() / run.measured_time;
        est.components.holding += run.ledger.holding / run.measured_time / r;
        est.components.setup += run.ledger.setup / run.measured_time / r;
        est.components.proportional += run.ledger.proportional / run.measured_time / r;
        est.cycles += run.orders;
    }
    est.replication_costs = rates;
    for (double x : rates) est.avg_cost += x / r;
    est.std_error = jackknife_se(rates);
    return est;
}

double Simulator::reflected_tail_probability(double v, double t, double m, double x) const {
    if (!(t > 0.0)) throw std::invalid_argument("reflected_tail_probability requires t > 0");
    if (v < m) return 1.0;
    const double mu = instance_.demand.mu;
    const double sigma = std::sqrt(instance_.demand.sigma2);
    const double lambda = instance_.demand.lambda();
    auto Phi = [](double u) { return 0.5 * std::erfc(-u / std::sqrt(2.0)); };
    double top = std::max(x, m);
    double rt = sigma * std::sqrt(t);
    return Phi((-v + top - mu * t) / rt) +
           std::exp(-lambda * (v - m)) * Phi((-v - top + mu * t) / rt);
}

std::vector<ComparisonRow> Simulator::run_bounded_comparison(const PolicySpec& base,
                                                             const std::vector<int>& bounds,
                                                             const PathConfig& config) const {
    base.validate();
    config.validate();
    double k_bar = instance_.ordering.setup.sup_value();
    if (!std::isfinite(k_bar))
        throw std::invalid_argument("comparison requires a bounded setup cost");
    const double mu = instance_.demand.mu;
    const int r = config.replications;

    std::vector<ComparisonRow> table;
    table.reserve(bounds.size());
    for (int m : bounds) {
        PolicySpec bounded = PolicySpec::bounded_policy(base, m);
        std::vector<double> rates_m(r), rates_base(r);
        long violations = 0;
        for (int i = 0; i < r; ++i) {
            RunResult run = run_policy(bounded, config, stream_seed(config.seed, i), {});
            rates_m[i] = run.ledger.total() / run.measured_time;
            rates_base[i] = run.base_ledger.total() / run.measured_time;
            violations += run.coupling_violations;
        }
        ComparisonRow row;
        row.bound = m;
        for (int i = 0; i < r; ++i) {
            row.bounded_cost += rates_m[i] / r;
            row.base_cost += rates_base[i] / r;
        }
        row.bounded_se = jackknife_se(rates_m);
        row.base_se = jackknife_se(rates_base);
        row.bound_value = 4.0 * mu * k_bar / m;
        double combined = std::sqrt(row.bounded_se * row.bounded_se + row.base_se * row.base_se);
        row.holds = row.bounded_cost <= row.base_cost + row.bound_value + 3.0 * combined;
        row.coupling_violations = violations;
        table.push_back(row);
    }
    return table;
}

} // namespace ssopt
