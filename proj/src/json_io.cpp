#include "ssopt/json_io.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ssopt {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed,
                  std::initializer_list<const char*> required) {
    if (!obj.is_object()) throw ParseError(std::string(where) + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) throw ParseError(std::string(where) + ": unknown field '" + it.key() + "'");
    }
    for (const char* k : required)
        if (!obj.contains(k))
            throw ParseError(std::string(where) + ": missing field '" + k + "'");
}

double get_number(const json& obj, const char* where, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_number()) throw ParseError(std::string(where) + "." + key + ": expected a number");
    return v.get<double>();
}

std::vector<double> get_number_list(const json& obj, const char* where, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_array()) throw ParseError(std::string(where) + "." + key + ": expected an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number())
            throw ParseError(std::string(where) + "." + key + ": expected numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr; // JSON has no infinity
}

} // namespace

ProblemInstance parse_instance(const json& doc) {
    require_keys(doc, "instance", {"demand", "holding", "ordering", "x0"},
                 {"demand", "holding", "ordering"});
    ProblemInstance inst;

    const json& d = doc.at("demand");
    require_keys(d, "demand", {"mu", "sigma2"}, {"mu", "sigma2"});
    inst.demand.mu = get_number(d, "demand", "mu");
    inst.demand.sigma2 = get_number(d, "demand", "sigma2");

    const json& h = doc.at("holding");
    if (!h.is_object() || !h.contains("kind") || !h.at("kind").is_string())
        throw ParseError("holding: expected an object with a string 'kind'");
    std::string hkind = h.at("kind").get<std::string>();
    if (hkind == "piecewise_linear") {
        require_keys(h, "holding", {"kind", "beta1", "beta2"}, {"beta1", "beta2"});
        inst.holding.kind = HoldingKind::piecewise_linear;
        inst.holding.beta1 = get_number(h, "holding", "beta1");
        inst.holding.beta2 = get_number(h, "holding", "beta2");
    } else if (hkind == "quadratic") {
        require_keys(h, "holding", {"kind", "beta"}, {"beta"});
        inst.holding.kind = HoldingKind::quadratic;
        inst.holding.beta = get_number(h, "holding", "beta");
    } else if (hkind == "convex_poly") {
        require_keys(h, "holding", {"kind", "pos_coeffs", "neg_coeffs", "bound_witness"},
                     {"pos_coeffs", "neg_coeffs", "bound_witness"});
        inst.holding.kind = HoldingKind::convex_poly;
        inst.holding.pos_coeffs = get_number_list(h, "holding", "pos_coeffs");
        inst.holding.neg_coeffs = get_number_list(h, "holding", "neg_coeffs");
        const json& w = h.at("bound_witness");
        require_keys(w, "bound_witness", {"a", "b0", "b1"}, {"a", "b0", "b1"});
        if (!w.at("a").is_number_integer())
            throw ParseError("bound_witness.a: expected an integer");
        inst.holding.bound.a = w.at("a").get<int>();
        inst.holding.bound.b0 = get_number(w, "bound_witness", "b0");
        inst.holding.bound.b1 = get_number(w, "bound_witness", "b1");
    } else {
        throw ParseError("holding.kind: expected piecewise_linear, quadratic, or convex_poly");
    }

    const json& o = doc.at("ordering");
    require_keys(o, "ordering", {"k", "setup"}, {"k", "setup"});
    inst.ordering.k = get_number(o, "ordering", "k");
    const json& s = o.at("setup");
    if (!s.is_object() || !s.contains("kind") || !s.at("kind").is_string())
        throw ParseError("setup: expected an object with a string 'kind'");
    std::string skind = s.at("kind").get<std::string>();
    if (skind == "constant") {
        require_keys(s, "setup", {"kind", "kappa"}, {"kappa"});
        inst.ordering.setup.kind = SetupKind::constant;
        inst.ordering.setup.kappa = get_number(s, "setup", "kappa");
    } else if (skind == "step") {
        require_keys(s, "setup", {"kind", "breakpoints", "values"}, {"breakpoints", "values"});
        inst.ordering.setup.kind = SetupKind::step;
        inst.ordering.setup.breakpoints = get_number_list(s, "setup", "breakpoints");
        inst.ordering.setup.values = get_number_list(s, "setup", "values");
    } else {
        throw ParseError("setup.kind: expected constant or step");
    }

    if (doc.contains("x0")) inst.x0 = get_number(doc, "instance", "x0");
    return inst;
}

ProblemInstance parse_instance_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // translate the byte offset into line/column diagnostics
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << "JSON syntax error at line " << line << ", column " << col << ": " << e.what();
        throw ParseError(os.str());
    }
    return parse_instance(doc);
}

json instance_to_json(const ProblemInstance& inst) {
    json h;
    switch (inst.holding.kind) {
    case HoldingKind::piecewise_linear:
        h = {{"kind", "piecewise_linear"}, {"beta1", inst.holding.beta1},
             {"beta2", inst.holding.beta2}};
        break;
    case HoldingKind::quadratic:
        h = {{"kind", "quadratic"}, {"beta", inst.holding.beta}};
        break;
    case HoldingKind::convex_poly:
        h = {{"kind", "convex_poly"},
             {"pos_coeffs", inst.holding.pos_coeffs},
             {"neg_coeffs", inst.holding.neg_coeffs},
             {"bound_witness",
              {{"a", inst.holding.bound.a}, {"b0", inst.holding.bound.b0},
               {"b1", inst.holding.bound.b1}}}};
        break;
    }
    json s;
    if (inst.ordering.setup.kind == SetupKind::constant)
        s = {{"kind", "constant"}, {"kappa", inst.ordering.setup.kappa}};
    else
        s = {{"kind", "step"},
             {"breakpoints", inst.ordering.setup.breakpoints},
             {"values", inst.ordering.setup.values}};
    return {{"demand", {{"mu", inst.demand.mu}, {"sigma2", inst.demand.sigma2}}},
            {"holding", h},
            {"ordering", {{"k", inst.ordering.k}, {"setup", s}}},
            {"x0", inst.x0}};
}

json certificate_to_json(const CertificateReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"worst_violation", c.worst_violation},
                          {"location", c.location}});
    return {{"passed", r.passed},
            {"claimed_cost", r.claimed_cost},
            {"policy_cost", finite_or_null(r.policy_cost)},
            {"flatten_level", r.flatten_level},
            {"probe_quantity", r.probe_quantity},
            {"grid", {{"lo", r.grid_lo}, {"hi", r.grid_hi}, {"points", r.grid_points}}},
            {"tol", r.tol},
            {"pair_seed", r.pair_seed},
            {"checks", checks}};
}

json solve_result_to_json(const SolveResult& r, const ProblemInstance& instance) {
    json candidates = json::array();
    for (const auto& row : r.candidates) {
        candidates.push_back({{"index", row.index},
                              {"fee", row.fee},
                              {"cell_lo", row.cell_lo},
                              {"cell_hi", finite_or_null(row.cell_hi)},
                              {"unconstrained_cost", row.unconstrained_cost},
                              {"unconstrained_reorder", row.unconstrained_reorder},
                              {"unconstrained_order_up_to", row.unconstrained_order_up_to},
                              {"unconstrained_quantity", row.unconstrained_quantity},
                              {"position", to_string(row.position)},
                              {"clamped_quantity", row.clamped_quantity},
                              {"in_candidate_set", row.in_candidate_set},
                              {"clamped_cost", row.clamped_cost},
                              {"evaluated", row.evaluated},
                              {"reorder", row.reorder},
                              {"order_up_to", row.order_up_to},
                              {"avg_cost", row.avg_cost}});
    }
    json residuals = json::object();
    for (const auto& [name, value] : r.residuals) residuals[name] = value;
    json out{{"s_star", r.reorder},
             {"S_star", r.order_up_to},
             {"nu_star", finite_or_null(r.avg_cost)},
             {"method", to_string(r.method)},
             {"candidate_table", candidates},
             {"alternate_minimizers", r.alternate_minimizers},
             {"residuals", residuals},
             {"tolerances", {{"quad_tol", r.quad_tol}, {"root_tol", r.root_tol}}},
             {"instance", instance_to_json(instance)}};
    if (r.certificate) out["certificate"] = certificate_to_json(*r.certificate);
    if (r.grid_avg_cost) {
        out["grid_cross_check"] = {{"nu", *r.grid_avg_cost}, {"gap", *r.grid_gap}};
    }
    return out;
}

StoredSolveResult parse_solve_result(const json& doc) {
    if (!doc.is_object() || !doc.contains("instance") || !doc.contains("s_star") ||
        !doc.contains("S_star") || !doc.contains("nu_star"))
        throw ParseError("result document: missing instance or optimum fields");
    StoredSolveResult out;
    out.instance = parse_instance(doc.at("instance"));
    out.reorder = doc.at("s_star").get<double>();
    out.order_up_to = doc.at("S_star").get<double>();
    out.avg_cost = doc.at("nu_star").get<double>();
    return out;
}

json path_config_to_json(const PathConfig& c) {
    return {{"horizon", c.horizon}, {"dt", c.dt},           {"seed", c.seed},
            {"replications", c.replications}, {"burn_in", c.burn_in}};
}

static json policy_to_json(const PolicySpec& p) {
    switch (p.kind) {
    case PolicySpec::Kind::order_up_to:
        return {{"kind", "ss"}, {"s", p.reorder}, {"S", p.level}};
    case PolicySpec::Kind::base_stock:
        return {{"kind", "base_stock"}, {"s", p.reorder}};
    case PolicySpec::Kind::bounded:
        return {{"kind", "bounded"}, {"m", p.bound}, {"base", policy_to_json(*p.base)}};
    }
    return nullptr;
}

json estimate_to_json(const SimulationEstimate& e, const PolicySpec& policy,
                      const ProblemInstance& instance) {
    return {{"avg_cost", e.avg_cost},
            {"components",
             {{"holding", e.components.holding},
              {"setup", e.components.setup},
              {"proportional", e.components.proportional}}},
            {"std_error", e.std_error},
            {"cycles", e.cycles},
            {"dt", e.dt},
            {"horizon", e.horizon},
            {"burn_in", e.burn_in},
            {"replications", e.replications},
            {"master_seed", e.master_seed},
            {"stream_seeds", e.stream_seeds},
            {"replication_costs", e.replication_costs},
            {"policy", policy_to_json(policy)},
            {"instance", instance_to_json(instance)}};
}

json comparison_to_json(const std::vector<ComparisonRow>& rows, const PathConfig& config,
                        const ProblemInstance& instance) {
    json table = json::array();
    for (const auto& r : rows)
        table.push_back({{"m", r.bound},
                         {"bounded_cost", r.bounded_cost},
                         {"bounded_se", r.bounded_se},
                         {"base_cost", r.base_cost},
                         {"base_se", r.base_se},
                         {"bound", r.bound_value},
                         {"holds", r.holds},
                         {"coupling_violations", r.coupling_violations}});
    return {{"rows", table},
            {"config", path_config_to_json(config)},
            {"instance", instance_to_json(instance)}};
}

} // namespace ssopt
