// ssopt: (s,S) policy optimizer and simulator for Brownian-demand inventory
// systems with quantity-dependent setup costs.
//
// Subcommands:
//   solve     compute the optimal policy and its lower-bound certificate
//   sweep     tabulate the fixed-quantity cost over a quantity range (CSV)
//   simulate  Monte Carlo estimate of a policy's average cost vs analytics
//   verify    re-run the certificate on a stored solve result
//   compare   coupled simulation of order-up-to-bounded modifications
//
// Exit codes: 0 ok, 2 validation/parse error, 3 certificate failure,
// 4 simulation contradicts analytics.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ssopt/analytics.hpp"
#include "ssopt/json_io.hpp"
#include "ssopt/model.hpp"
#include "ssopt/simulator.hpp"
#include "ssopt/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitCertificate = 3;
constexpr int kExitMismatch = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ssopt::ParseError("cannot open input file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content << "\n";
}

ssopt::ProblemInstance load_instance(const std::string& path) {
    ssopt::ProblemInstance inst = ssopt::parse_instance_text(read_file(path));
    ssopt::ValidationReport report = ssopt::validate(inst);
    if (!report.ok()) {
        std::cerr << "instance validation failed:\n";
        for (const auto& v : report.violations)
            std::cerr << "  [" << v.tag << "] " << v.message << " (value " << v.offending_value
                      << ")\n";
        throw ssopt::ParseError("invalid instance");
    }
    return inst;
}

ssopt::PolicySpec parse_policy(const std::string& text) {
    double s = 0.0, S = 0.0;
    bool have_s = false, have_S = false;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto eq = part.find('=');
        if (eq == std::string::npos) throw ssopt::ParseError("policy: expected s=<v>,S=<v>");
        std::string key = part.substr(0, eq);
        double value = std::stod(part.substr(eq + 1));
        if (key == "s") {
            s = value;
            have_s = true;
        } else if (key == "S") {
            S = value;
            have_S = true;
        } else {
            throw ssopt::ParseError("policy: unknown key '" + key + "'");
        }
    }
    if (!have_s || !have_S) throw ssopt::ParseError("policy: both s and S are required");
    if (s == S) return ssopt::PolicySpec::base_stock_policy(s);
    return ssopt::PolicySpec::order_up_to_policy(s, S);
}

struct CommonArgs {
    std::string input;
    std::string output;
};

int cmd_solve(const CommonArgs& io, const std::string& method, ssopt::SolveOptions opts,
              ssopt::AnalyticsOptions aopts) {
    ssopt::ProblemInstance inst = load_instance(io.input);
    ssopt::Analytics analytics(inst, aopts);
    ssopt::Solver solver(analytics);

    ssopt::SolveResult result;
    if (method == "grid") {
        result = solver.solve_by_grid(opts.grid);
        if (opts.run_certificate)
            result.certificate = analytics.verify_lower_bound(
                result.reorder, result.order_up_to, result.avg_cost, opts.certificate);
    } else if (method == "step") {
        result = solver.solve_step_setup(opts);
    } else {
        result = solver.solve(opts);
    }

    write_output(io.output, ssopt::solve_result_to_json(result, inst).dump(2));
    if (result.certificate && !result.certificate->passed) {
        std::cerr << "certificate failed\n";
        return kExitCertificate;
    }
    return kExitOk;
}

int cmd_sweep(const CommonArgs& io, double xi_min, double xi_max, int xi_steps,
              ssopt::AnalyticsOptions aopts) {
    if (xi_steps < 1 || xi_max < xi_min || xi_min < 0.0)
        throw ssopt::ParseError("sweep: need xi-steps >= 1 and 0 <= xi-min <= xi-max");
    ssopt::ProblemInstance inst = load_instance(io.input);
    ssopt::Analytics analytics(inst, aopts);

    std::ostringstream csv;
    csv << "xi,theta,s_tilde,S_tilde";
    csv.precision(12);
    for (int i = 0; i < xi_steps; ++i) {
        double xi = xi_steps == 1 ? xi_min
                                  : xi_min + (xi_max - xi_min) * i / (xi_steps - 1);
        ssopt::MatchedLevels m = analytics.matched_levels(xi);
        double theta = analytics.fixed_quantity_cost(xi);
        csv << "\n" << xi << "," << theta << "," << m.reorder << "," << m.order_up_to;
    }
    write_output(io.output, csv.str());
    return kExitOk;
}

int cmd_simulate(const CommonArgs& io, const std::string& policy_text,
                 ssopt::PathConfig config, double tolerance, const std::string& trajectory_path,
                 ssopt::AnalyticsOptions aopts) {
    ssopt::ProblemInstance inst = load_instance(io.input);
    ssopt::PolicySpec policy = parse_policy(policy_text);
    ssopt::Simulator sim(inst);
    ssopt::SimulationEstimate est = sim.estimate_average_cost(policy, config);

    ssopt::Analytics analytics(inst, aopts);
    double analytic = analytics.average_cost(policy.reorder, policy.level);
    double rel = std::fabs(est.avg_cost - analytic) / std::max(std::fabs(analytic), 1e-12);

    nlohmann::json out = ssopt::estimate_to_json(est, policy, inst);
    out["analytic"] = {{"avg_cost", analytic},
                       {"rel_error", rel},
                       {"tolerance", tolerance},
                       {"consistent", rel <= tolerance}};
    write_output(io.output, out.dump(2));

    if (!trajectory_path.empty()) {
        ssopt::RunOptions ropts;
        ropts.record_trajectory = true;
        ssopt::RunResult run =
            sim.run_policy(policy, config, ssopt::Simulator::stream_seed(config.seed, 0), ropts);
        std::ostringstream csv;
        csv.precision(12);
        csv << "t,Z,Y,cumulative_cost";
        for (std::size_t i = 0; i < run.trajectory.t.size(); ++i)
            csv << "\n"
                << run.trajectory.t[i] << "," << run.trajectory.z[i] << ","
                << run.trajectory.y[i] << "," << run.trajectory.cumulative_cost[i];
        write_output(trajectory_path, csv.str());
    }

    if (rel > tolerance) {
        std::cerr << "simulated average cost " << est.avg_cost << " deviates from analytic "
                  << analytic << " by " << rel * 100.0 << "%\n";
        return kExitMismatch;
    }
    return kExitOk;
}

int cmd_verify(const CommonArgs& io, ssopt::CertificateOptions copts,
               ssopt::AnalyticsOptions aopts) {
    nlohmann::json doc = nlohmann::json::parse(read_file(io.input));
    ssopt::StoredSolveResult stored = ssopt::parse_solve_result(doc);
    ssopt::validate_or_throw(stored.instance);
    ssopt::Analytics analytics(stored.instance, aopts);
    ssopt::CertificateReport report = analytics.verify_lower_bound(
        stored.reorder, stored.order_up_to, stored.avg_cost, copts);
    write_output(io.output, ssopt::certificate_to_json(report).dump(2));
    return report.passed ? kExitOk : kExitCertificate;
}

int cmd_compare(const CommonArgs& io, const std::string& policy_text,
                const std::vector<int>& m_list, ssopt::PathConfig config) {
    ssopt::ProblemInstance inst = load_instance(io.input);
    ssopt::PolicySpec base = parse_policy(policy_text);
    ssopt::Simulator sim(inst);
    std::vector<ssopt::ComparisonRow> rows = sim.run_bounded_comparison(base, m_list, config);
    write_output(io.output, ssopt::comparison_to_json(rows, config, inst).dump(2));

    bool all_hold = true;
    for (const auto& r : rows) {
        std::cerr << "m=" << r.bound << " bounded=" << r.bounded_cost << " base=" << r.base_cost
                  << " bound=" << r.bound_value << (r.holds ? " ok" : " VIOLATED") << "\n";
        all_hold = all_hold && r.holds;
    }
    return all_hold ? kExitOk : kExitMismatch;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"(s,S) policy optimizer for Brownian demand with quantity-dependent setup costs"};
    app.require_subcommand(1);

    CommonArgs io;
    std::string method = "auto";
    std::string policy_text;
    std::string trajectory_path;
    double tolerance = 0.02;
    double xi_min = 0.0, xi_max = 0.0;
    int xi_steps = 0;
    std::vector<int> m_list{1, 2, 4, 8};
    bool no_certificate = false, cross_check = false;

    ssopt::AnalyticsOptions aopts;
    ssopt::SolveOptions sopts;
    ssopt::PathConfig config;

    auto add_io = [&](CLI::App* cmd, bool input_required = true) {
        cmd->add_option("--input", io.input, "instance (or result) JSON file")
            ->required(input_required);
        cmd->add_option("--output", io.output, "output file (stdout when omitted)");
    };
    auto add_tols = [&](CLI::App* cmd) {
        cmd->add_option("--quad-tol", aopts.quad_tol, "absolute quadrature tolerance");
        cmd->add_option("--root-tol", aopts.root_tol, "root-finding residual tolerance");
    };
    auto add_sim = [&](CLI::App* cmd) {
        cmd->add_option("--horizon", config.horizon, "simulation horizon");
        cmd->add_option("--dt", config.dt, "time step");
        cmd->add_option("--seed", config.seed, "master seed");
        cmd->add_option("--reps", config.replications, "replications");
        cmd->add_option("--burn-in", config.burn_in, "burn-in fraction of the horizon");
    };

    CLI::App* solve = app.add_subcommand("solve", "compute the optimal (s,S) policy");
    add_io(solve);
    add_tols(solve);
    solve->add_option("--method", method, "auto, step, or grid")
        ->check(CLI::IsMember({"auto", "step", "grid"}));
    solve->add_option("--tol", sopts.certificate.tol, "certificate tolerance");
    solve->add_option("--grid-points", sopts.certificate.grid_points, "certificate grid points");
    solve->add_option("--cell-points", sopts.grid.log_points,
                      "grid-solver points per continuity cell (log and uniform each)");
    solve->add_flag("--no-certificate", no_certificate, "skip the lower-bound certificate");
    solve->add_flag("--cross-check", cross_check, "also run the grid solver and report the gap");

    CLI::App* sweep = app.add_subcommand("sweep", "tabulate the fixed-quantity cost (CSV)");
    add_io(sweep);
    add_tols(sweep);
    sweep->add_option("--xi-min", xi_min, "smallest quantity")->required();
    sweep->add_option("--xi-max", xi_max, "largest quantity")->required();
    sweep->add_option("--xi-steps", xi_steps, "number of grid points")->required();

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimate for a policy");
    add_io(simulate);
    add_tols(simulate);
    add_sim(simulate);
    simulate->add_option("--policy", policy_text, "policy as s=<v>,S=<v>")->required();
    simulate->add_option("--tol", tolerance, "declared simulation-vs-analytic tolerance");
    simulate->add_option("--trajectory", trajectory_path, "dump one replication as CSV");

    CLI::App* verify = app.add_subcommand("verify", "re-run the certificate on a result file");
    add_io(verify);
    add_tols(verify);
    verify->add_option("--tol", sopts.certificate.tol, "certificate tolerance");
    verify->add_option("--grid-points", sopts.certificate.grid_points, "certificate grid points");

    CLI::App* compare = app.add_subcommand("compare", "coupled bounded-policy comparison");
    add_io(compare);
    add_sim(compare);
    compare->add_option("--policy", policy_text, "base policy as s=<v>,S=<v>")->required();
    compare->add_option("--m-list", m_list, "order-up-to bounds");

    CLI11_PARSE(app, argc, argv);

    sopts.run_certificate = !no_certificate;
    sopts.cross_check_grid = cross_check;
    sopts.grid.uniform_points = sopts.grid.log_points;

    try {
        if (solve->parsed()) return cmd_solve(io, method, sopts, aopts);
        if (sweep->parsed()) return cmd_sweep(io, xi_min, xi_max, xi_steps, aopts);
        if (simulate->parsed())
            return cmd_simulate(io, policy_text, config, tolerance, trajectory_path, aopts);
        if (verify->parsed()) return cmd_verify(io, sopts.certificate, aopts);
        if (compare->parsed()) return cmd_compare(io, policy_text, m_list, config);
    } catch (const ssopt::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
