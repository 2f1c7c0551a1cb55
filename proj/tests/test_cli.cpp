#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

std::string tmp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

int run_cli(const std::string& args) {
    // run inside the temp dir so the relative paths in args resolve there
    std::string cmd = "cd " + std::filesystem::temp_directory_path().string() + " && " +
                      std::string(SSOPT_BIN) + " " + args + " 2> cli_stderr.txt";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const char* kInstanceB36 = R"({
  "demand": {"mu": 1.0, "sigma2": 2.0},
  "holding": {"kind": "quadratic", "beta": 1.0},
  "ordering": {"k": 0.0, "setup": {"kind": "constant", "kappa": 36.0}},
  "x0": 0.0
})";

const char* kInstanceStepFree = R"({
  "demand": {"mu": 1.0, "sigma2": 2.0},
  "holding": {"kind": "quadratic", "beta": 1.0},
  "ordering": {"k": 0.0, "setup": {"kind": "step", "breakpoints": [4.0], "values": [0.0, 48.0]}},
  "x0": 0.0
})";

} // namespace

TEST_CASE("cli solve writes the optimum and verify round-trips") {
    write_file(tmp("cli_b36.json"), kInstanceB36);
    int rc = run_cli("solve --input cli_b36.json --output cli_b36_result.json "
                     "--grid-points 1024");
    CHECK(rc == 0);

    nlohmann::json result = nlohmann::json::parse(read_file(tmp("cli_b36_result.json")));
    CHECK(result.at("s_star").get<double>() == doctest::Approx(-4.0).epsilon(1e-8));
    CHECK(result.at("S_star").get<double>() == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(result.at("nu_star").get<double>() == doctest::Approx(10.0).epsilon(1e-8));
    CHECK(result.at("method") == "constant_k");
    CHECK(result.at("certificate").at("passed").get<bool>());
    CHECK(result.contains("instance"));

    CHECK(run_cli("verify --input cli_b36_result.json --grid-points 1024 "
                  "--output cli_b36_verify.json") == 0);

    // corrupt the stored cost: the certificate must fail with exit 3
    result["nu_star"] = 10.8;
    write_file(tmp("cli_b36_bad.json"), result.dump());
    CHECK(run_cli("verify --input cli_b36_bad.json --grid-points 1024 "
                  "--output cli_b36_bad_verify.json") == 3);
}

TEST_CASE("cli solve reports the base-stock branch for a free first piece") {
    write_file(tmp("cli_step_free.json"), kInstanceStepFree);
    CHECK(run_cli("solve --input cli_step_free.json --output cli_step_free_result.json "
                  "--grid-points 1024") == 0);
    nlohmann::json result = nlohmann::json::parse(read_file(tmp("cli_step_free_result.json")));
    CHECK(result.at("method") == "base_stock");
    CHECK(result.at("s_star").get<double>() == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(result.at("nu_star").get<double>() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("cli rejects malformed and invalid inputs with exit 2") {
    write_file(tmp("cli_broken.json"), "{\"demand\": {\"mu\": 1.0,");
    CHECK(run_cli("solve --input cli_broken.json") == 2);
    std::string err = read_file(tmp("cli_stderr.txt"));
    CHECK(err.find("line") != std::string::npos);
    CHECK(err.find("column") != std::string::npos);

    write_file(tmp("cli_negative.json"), R"({
      "demand": {"mu": 1.0, "sigma2": 2.0},
      "holding": {"kind": "quadratic", "beta": 1.0},
      "ordering": {"k": 0.0, "setup": {"kind": "step", "breakpoints": [4.0], "values": [-1.0, 2.0]}}
    })");
    CHECK(run_cli("solve --input cli_negative.json") == 2);
    CHECK(read_file(tmp("cli_stderr.txt")).find("S1") != std::string::npos);
}

TEST_CASE("cli sweep emits the quantity table") {
    write_file(tmp("cli_b36.json"), kInstanceB36);
    CHECK(run_cli("sweep --input cli_b36.json --xi-min 1 --xi-max 10 --xi-steps 10 "
                  "--output cli_sweep.csv") == 0);
    std::string csv = read_file(tmp("cli_sweep.csv"));
    CHECK(csv.rfind("xi,theta,s_tilde,S_tilde", 0) == 0);

    // the row at quantity 6 carries the optimal cost 10
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    bool found = false;
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string xi, theta;
        std::getline(fields, xi, ',');
        std::getline(fields, theta, ',');
        if (std::stod(xi) == 6.0) {
            found = true;
            CHECK(std::stod(theta) == doctest::Approx(10.0).epsilon(1e-8));
        }
    }
    CHECK(found);

    CHECK(run_cli("sweep --input cli_b36.json --xi-min 2 --xi-max 2 --xi-steps 1 "
                  "--output cli_sweep_one.csv") == 0);
    std::string one = read_file(tmp("cli_sweep_one.csv"));
    CHECK(std::count(one.begin(), one.end(), '\n') == 2); // header + single row + final newline

    CHECK(run_cli("sweep --input cli_b36.json --xi-min 5 --xi-max 2 --xi-steps 3") == 2);
}

TEST_CASE("cli simulate compares against the analytic cost") {
    write_file(tmp("cli_b36.json"), kInstanceB36);
    int rc = run_cli("simulate --input cli_b36.json --policy s=-4,S=2 --horizon 400 "
                     "--dt 0.01 --reps 4 --seed 11 --tol 0.2 --output cli_sim.json "
                     "--trajectory cli_traj.csv");
    CHECK(rc == 0);
    nlohmann::json out = nlohmann::json::parse(read_file(tmp("cli_sim.json")));
    CHECK(out.at("analytic").at("avg_cost").get<double>() == doctest::Approx(10.0).epsilon(1e-8));
    CHECK(out.at("analytic").at("consistent").get<bool>());
    CHECK(out.at("replications").get<int>() == 4);
    CHECK(read_file(tmp("cli_traj.csv")).rfind("t,Z,Y,cumulative_cost", 0) == 0);

    // an absurd tolerance forces the mismatch exit code
    CHECK(run_cli("simulate --input cli_b36.json --policy s=-4,S=2 --horizon 400 "
                  "--dt 0.01 --reps 2 --seed 11 --tol 1e-9") == 4);
}

TEST_CASE("cli compare runs the bounded-policy table") {
    write_file(tmp("cli_b36.json"), kInstanceB36);
    CHECK(run_cli("compare --input cli_b36.json --policy s=-4,S=2 --m-list 2 4 "
                  "--horizon 200 --dt 0.002 --reps 2 --seed 3 --output cli_compare.json") == 0);
    nlohmann::json out = nlohmann::json::parse(read_file(tmp("cli_compare.json")));
    REQUIRE(out.at("rows").size() == 2);
    CHECK(out.at("rows")[0].at("bound").get<double>() == doctest::Approx(4.0 * 36.0 / 2.0));
    CHECK(out.at("rows")[0].at("holds").get<bool>());
}
