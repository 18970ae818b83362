#include "config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace swing {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const std::string& k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw std::invalid_argument("unknown field '" + it.key() + "' in " + where);
    }
}

double get_num(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key))
        throw std::invalid_argument("missing field '" + std::string(key) + "' in " + where);
    const json& v = obj.at(key);
    if (!v.is_number())
        throw std::invalid_argument("field '" + std::string(key) + "' in " + where +
                                    " must be a number");
    return v.get<double>();
}

ModelKind kind_from_string(const std::string& s) {
    if (s == "gbm-call") return ModelKind::GbmCall;
    if (s == "indicator-deterministic") return ModelKind::IndicatorDeterministic;
    if (s == "indicator-exponential") return ModelKind::IndicatorExponential;
    if (s == "constant") return ModelKind::Constant;
    throw std::invalid_argument("unknown model kind: " + s);
}

json model_to_json(const ModelParams& p, double L) {
    json m;
    m["kind"] = to_string(p.kind);
    m["T"] = p.T;
    m["N"] = p.N;
    m["L"] = L;
    switch (p.kind) {
        case ModelKind::GbmCall:
            m["S0"] = p.S0;
            m["K"] = p.K;
            m["sigma"] = p.sigma;
            m["r"] = p.r;
            break;
        case ModelKind::IndicatorDeterministic: m["tstar"] = p.tstar; break;
        case ModelKind::IndicatorExponential: m["lambda"] = p.lambda; break;
        case ModelKind::Constant: m["value"] = p.value; break;
    }
    return m;
}

json check_to_json(const CheckResult& c, int N, int M) {
    json j;
    j["name"] = c.name;
    j["max_residual"] = c.max_residual;
    j["mean_residual"] = c.mean_residual;
    j["tolerance"] = c.tolerance;
    j["pass"] = c.pass;
    j["cells"] = c.cells;
    j["grid"] = json{{"N", N}, {"M", M}};
    return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

} // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw std::invalid_argument("config must be a JSON object");
    reject_unknown(root,
                   {"model", "M", "y0", "n_paths", "seed", "policy_rule", "eps_switch",
                    "random_controls", "tolerances", "out_dir"},
                   "config");
    if (!root.contains("model") || !root.at("model").is_object())
        throw std::invalid_argument("config needs a 'model' object");

    RunConfig cfg;
    const json& m = root.at("model");
    if (!m.contains("kind") || !m.at("kind").is_string())
        throw std::invalid_argument("model needs a string 'kind'");
    cfg.params.kind = kind_from_string(m.at("kind").get<std::string>());

    std::vector<std::string> allowed = {"kind", "T", "N", "L"};
    switch (cfg.params.kind) {
        case ModelKind::GbmCall:
            allowed.insert(allowed.end(), {"S0", "K", "sigma", "r"});
            break;
        case ModelKind::IndicatorDeterministic: allowed.push_back("tstar"); break;
        case ModelKind::IndicatorExponential: allowed.push_back("lambda"); break;
        case ModelKind::Constant: allowed.push_back("value"); break;
    }
    reject_unknown(m, allowed, "model");

    cfg.params.T = get_num(m, "T", "model");
    const double n_steps = get_num(m, "N", "model");
    if (n_steps != static_cast<int>(n_steps))
        throw std::invalid_argument("field 'N' in model must be an integer");
    cfg.params.N = static_cast<int>(n_steps);
    cfg.L = get_num(m, "L", "model");
    switch (cfg.params.kind) {
        case ModelKind::GbmCall:
            cfg.params.S0 = get_num(m, "S0", "model");
            cfg.params.K = get_num(m, "K", "model");
            cfg.params.sigma = get_num(m, "sigma", "model");
            cfg.params.r = get_num(m, "r", "model");
            break;
        case ModelKind::IndicatorDeterministic:
            cfg.params.tstar = get_num(m, "tstar", "model");
            break;
        case ModelKind::IndicatorExponential:
            cfg.params.lambda = get_num(m, "lambda", "model");
            break;
        case ModelKind::Constant:
            cfg.params.value = m.contains("value") ? get_num(m, "value", "model") : 0.0;
            break;
    }

    if (root.contains("M")) {
        const double mm = get_num(root, "M", "config");
        if (mm != static_cast<int>(mm))
            throw std::invalid_argument("field 'M' in config must be an integer");
        cfg.M = static_cast<int>(mm);
    }
    if (root.contains("y0")) cfg.y0 = get_num(root, "y0", "config");
    if (root.contains("n_paths")) {
        const double np = get_num(root, "n_paths", "config");
        if (np != static_cast<long long>(np))
            throw std::invalid_argument("field 'n_paths' in config must be an integer");
        cfg.n_paths = static_cast<long long>(np);
    }
    if (root.contains("seed")) {
        const json& s = root.at("seed");
        if (!s.is_number_unsigned() && !s.is_number_integer())
            throw std::invalid_argument("field 'seed' in config must be a nonnegative integer");
        if (s.is_number_integer() && s.get<long long>() < 0)
            throw std::invalid_argument("field 'seed' in config must be a nonnegative integer");
        cfg.seed = s.get<uint64_t>();
    }
    if (root.contains("policy_rule")) {
        if (!root.at("policy_rule").is_string())
            throw std::invalid_argument("field 'policy_rule' in config must be a string");
        cfg.policy_rule = policy_rule_from_string(root.at("policy_rule").get<std::string>());
    }
    if (root.contains("eps_switch")) cfg.eps_switch = get_num(root, "eps_switch", "config");
    if (root.contains("random_controls")) {
        const double rc = get_num(root, "random_controls", "config");
        if (rc != static_cast<int>(rc) || rc < 0)
            throw std::invalid_argument(
                "field 'random_controls' in config must be a nonnegative integer");
        cfg.random_controls = static_cast<int>(rc);
    }
    if (root.contains("tolerances")) {
        const json& t = root.at("tolerances");
        if (!t.is_object()) throw std::invalid_argument("'tolerances' must be an object");
        reject_unknown(t, {"exact", "bspde", "chain_rule_random"}, "tolerances");
        if (t.contains("exact")) cfg.tolerances.exact = get_num(t, "exact", "tolerances");
        if (t.contains("bspde")) cfg.tolerances.bspde = get_num(t, "bspde", "tolerances");
        if (t.contains("chain_rule_random"))
            cfg.tolerances.chain_rule_random = get_num(t, "chain_rule_random", "tolerances");
    }
    if (root.contains("out_dir")) {
        if (!root.at("out_dir").is_string())
            throw std::invalid_argument("field 'out_dir' in config must be a string");
        cfg.out_dir = root.at("out_dir").get<std::string>();
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string config_hash(const RunConfig& cfg) {
    json j;
    j["model"] = model_to_json(cfg.params, cfg.L);
    j["M"] = cfg.M;
    j["y0"] = cfg.y0;
    j["n_paths"] = cfg.n_paths;
    j["seed"] = cfg.seed;
    j["policy_rule"] = to_string(cfg.policy_rule);
    j["eps_switch"] = cfg.eps_switch;
    j["random_controls"] = cfg.random_controls;
    j["tolerances"] = json{{"exact", cfg.tolerances.exact},
                           {"bspde", cfg.tolerances.bspde},
                           {"chain_rule_random", cfg.tolerances.chain_rule_random}};
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(j.dump())));
    return std::string(buf);
}

double bspde_budget_default(const LatticeModel& model, const VolumeGrid& vgrid) {
    double max_payoff = 0.0;
    for (const auto& step : model.steps)
        for (const LatticeNode& node : step) max_payoff = std::max(max_payoff, node.payoff);
    return vgrid.L * model.tgrid.dt * std::max(1.0, max_payoff) * (1.0 + 1e-6);
}

double effective_bspde_budget(const RunConfig& cfg, const LatticeModel& model,
                              const VolumeGrid& vgrid) {
    return cfg.tolerances.bspde >= 0.0 ? cfg.tolerances.bspde
                                       : bspde_budget_default(model, vgrid);
}

double effective_chain_random_budget(const RunConfig& cfg, const LatticeModel& model,
                                     const VolumeGrid& vgrid) {
    return cfg.tolerances.chain_rule_random >= 0.0 ? cfg.tolerances.chain_rule_random
                                                   : bspde_budget_default(model, vgrid);
}

std::vector<CheckResult> run_all_checks(const RunConfig& cfg, const LatticeModel& model,
                                        const VolumeGrid& vgrid, const SurfaceBundle& bundle) {
    std::vector<CheckResult> checks;
    checks.push_back(
        bspde_residual(model, vgrid, bundle, effective_bspde_budget(cfg, model, vgrid)));
    for (CheckResult& c : boundary_checks(model, vgrid, bundle)) checks.push_back(std::move(c));
    for (CheckResult& c : structural_checks(model, vgrid, bundle)) checks.push_back(std::move(c));

    // Chain rule: the exact identities (stay-everywhere and the DP policy) at
    // the float-noise budget, then seeded random controls at the O(dt) one.
    std::vector<Control> exact_controls;
    exact_controls.push_back(zero_control(model, vgrid));
    exact_controls.push_back(dp_argmax_control(model, vgrid, bundle.J));
    CheckResult exact = chain_rule_check(model, vgrid, bundle.J, exact_controls,
                                         cfg.tolerances.exact);
    exact.name = "chain_rule_exact_controls";
    checks.push_back(std::move(exact));

    if (cfg.random_controls > 0) {
        std::vector<Control> random_controls;
        for (int k = 0; k < cfg.random_controls; ++k)
            random_controls.push_back(random_control(model, vgrid, cfg.seed, k));
        CheckResult rnd = chain_rule_check(model, vgrid, bundle.J, random_controls,
                                           effective_chain_random_budget(cfg, model, vgrid));
        rnd.name = "chain_rule_random_controls";
        checks.push_back(std::move(rnd));
    }

    const int j0 = level_of(vgrid, cfg.y0);
    for (CheckResult& c :
         optimality_gap_checks(model, vgrid, bundle.J, j0, cfg.seed, std::min(cfg.random_controls, 5)))
        checks.push_back(std::move(c));

    // Model-specific oracles: the DP value sits within one exercise cell of
    // the closed form at every grid point (the exponential kind carries an
    // extra first-order bias from paying a full cell on the death step).
    if (model.kind == ModelKind::IndicatorDeterministic ||
        model.kind == ModelKind::IndicatorExponential) {
        double max_err = 0.0, sum_err = 0.0;
        long long cells = 0;
        const int N = model.tgrid.N;
        for (int i = 0; i <= N; ++i) {
            for (int n = 0; n < model.nodes(i); ++n) {
                const bool alive = model.state_label(i, n) == "alive";
                for (int j = 0; j <= vgrid.M; ++j) {
                    const OracleValue o = analytic_indicator_value(
                        cfg.params, vgrid.L, model.tgrid.t(i), vgrid.y(j), alive);
                    const double err = std::abs(bundle.j_at(i, n, j) - o.value);
                    max_err = std::max(max_err, err);
                    sum_err += err;
                    ++cells;
                }
            }
        }
        const double cell = vgrid.L * model.tgrid.dt;
        const double tol = model.kind == ModelKind::IndicatorDeterministic
                               ? cell * (1.0 + 1e-6)
                               : 2.0 * cell;
        checks.push_back(make_check("closed_form_match", max_err, cells ? sum_err / cells : 0.0,
                                    tol, cells));
    }

    long long decision_cells = 0;
    for (int i = 0; i < model.tgrid.N; ++i)
        decision_cells += static_cast<long long>(model.nodes(i)) * vgrid.M;
    if (decision_cells <= 24)
        checks.push_back(brute_force_check(model, vgrid, bundle.J, 1e-12));

    return checks;
}

bool all_pass(const std::vector<CheckResult>& checks) {
    for (const CheckResult& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string verify_report_json(const RunConfig& cfg, const LatticeModel& model,
                               const VolumeGrid& vgrid, const std::vector<CheckResult>& checks) {
    json j;
    j["model"] = model_to_json(cfg.params, cfg.L);
    j["grid"] = json{{"N", model.tgrid.N}, {"M", vgrid.M}};
    j["seed"] = cfg.seed;
    j["config_hash"] = config_hash(cfg);
    json arr = json::array();
    for (const CheckResult& c : checks) arr.push_back(check_to_json(c, model.tgrid.N, vgrid.M));
    j["checks"] = arr;
    j["all_pass"] = all_pass(checks);
    return dump(j);
}

std::string price_report_json(const RunConfig& cfg, const LatticeModel& model,
                              const VolumeGrid& vgrid, const SurfaceBundle& bundle,
                              const PriceResult& result, const CheckResult& surface_summary) {
    json j;
    j["model"] = model_to_json(cfg.params, cfg.L);
    j["grid"] = json{{"N", model.tgrid.N}, {"M", vgrid.M}};
    j["y0"] = cfg.y0;
    j["start_level"] = result.start_level;
    j["n_paths"] = cfg.n_paths;
    j["seed"] = cfg.seed;
    j["policy_rule"] = to_string(result.policy.rule);
    j["primal"] = json{{"mean", result.primal.mean}, {"stderr", result.primal.std_error}};
    j["dual"] = json{{"mean", result.dual.estimate.mean},
                     {"stderr", result.dual.estimate.std_error},
                     {"map", to_string(result.dual.map)},
                     {"max_path_value", result.dual.max_path_value}};
    j["gap"] = result.gap;
    j["value_surface_at_start"] = bundle.j_at(0, 0, result.start_level);
    j["surface_summary"] = json{{"name", surface_summary.name},
                                {"max_residual", surface_summary.max_residual},
                                {"mean_residual", surface_summary.mean_residual},
                                {"tolerance", surface_summary.tolerance},
                                {"pass", surface_summary.pass}};
    j["config_hash"] = config_hash(cfg);
    return dump(j);
}

std::string solve_metadata_json(const RunConfig& cfg, const LatticeModel& model,
                                const VolumeGrid& vgrid, const SurfaceBundle& bundle,
                                const std::string& surface_filename) {
    json j;
    j["model"] = model_to_json(cfg.params, cfg.L);
    j["grid"] = json{{"N", model.tgrid.N}, {"M", vgrid.M},
                     {"dt", model.tgrid.dt}, {"dy", vgrid.dy}};
    j["surface_csv"] = surface_filename;
    j["csv_header"] = "i,t,node,state,j,y,J,D,W";
    j["y0"] = cfg.y0;
    j["value_at_start"] = bundle.j_at(0, 0, level_of(vgrid, cfg.y0));
    j["config_hash"] = config_hash(cfg);
    return dump(j);
}

} // namespace swing
