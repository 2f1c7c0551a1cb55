#pragma once

#include <string>

#include <json.hpp>

#include "ssopt/model.hpp"
#include "ssopt/simulator.hpp"
#include "ssopt/solver.hpp"

namespace ssopt {

/// Raised on malformed or out-of-schema problem documents; carries a
/// human-readable location when available.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Parse a problem document. Unknown fields are rejected; numbers are IEEE
/// doubles. The returned instance is not yet validated.
ProblemInstance parse_instance(const nlohmann::json& doc);

/// Parse from text with line/column diagnostics on syntax errors.
ProblemInstance parse_instance_text(const std::string& text);

nlohmann::json instance_to_json(const ProblemInstance& instance);

nlohmann::json solve_result_to_json(const SolveResult& result, const ProblemInstance& instance);

/// Minimal reverse mapping used by result re-verification: the embedded
/// instance and the reported optimum.
struct StoredSolveResult {
    ProblemInstance instance;
    double reorder = 0.0;
    double order_up_to = 0.0;
    double avg_cost = 0.0;
};
StoredSolveResult parse_solve_result(const nlohmann::json& doc);

nlohmann::json certificate_to_json(const CertificateReport& report);

nlohmann::json estimate_to_json(const SimulationEstimate& estimate, const PolicySpec& policy,
                                const ProblemInstance& instance);

nlohmann::json comparison_to_json(const std::vector<ComparisonRow>& rows,
                                  const PathConfig& config, const ProblemInstance& instance);

nlohmann::json path_config_to_json(const PathConfig& config);

} // namespace ssopt
