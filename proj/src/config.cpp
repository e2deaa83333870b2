#include "dlms/config.hpp"

#include <fstream>
#include <set>
#include <string>

namespace dlms {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw Error(Errc::config, field + ": " + why);
}

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) {
        bad(where.empty() ? "config" : where, "expected an object");
    }
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : obj.items()) {
        if (!allowed.contains(item.key())) {
            bad(join(where, item.key()), "unknown key");
        }
    }
}

double get_number(const json& v, const std::string& field) {
    if (!v.is_number()) {
        bad(field, "expected a number");
    }
    return v.get<double>();
}

std::uint64_t get_count(const json& v, const std::string& field) {
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
        bad(field, "must be nonnegative");
    }
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
        bad(field, "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

Round get_round(const json& v, const std::string& field) {
    if (!v.is_number_integer()) {
        bad(field, "expected an integer");
    }
    return v.get<Round>();
}

bool get_bool(const json& v, const std::string& field) {
    if (!v.is_boolean()) {
        bad(field, "expected true or false");
    }
    return v.get<bool>();
}

std::string get_string(const json& v, const std::string& field) {
    if (!v.is_string()) {
        bad(field, "expected a string");
    }
    return v.get<std::string>();
}

Vector get_vector(const json& v, const std::string& field) {
    if (!v.is_array() || v.empty()) {
        bad(field, "expected a nonempty array of numbers");
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t j = 0; j < v.size(); ++j) {
        out(static_cast<Eigen::Index>(j)) = get_number(v[j], field);
    }
    return out;
}

std::vector<AgentId> get_ids(const json& v, const std::string& field) {
    if (!v.is_array()) {
        bad(field, "expected an array of agent ids");
    }
    std::vector<AgentId> out;
    for (const auto& x : v) {
        out.push_back(get_count(x, field));
    }
    return out;
}

VarianceRange get_range(const json& v, const std::string& field) {
    if (v.is_number()) {
        const double x = v.get<double>();
        return {x, x};
    }
    if (!v.is_array() || v.size() != 2) {
        bad(field, "expected a number or [lo, hi]");
    }
    return {get_number(v[0], field), get_number(v[1], field)};
}

void parse_topology(const json& t, ScenarioConfig& cfg, const std::filesystem::path& base_dir) {
    const std::string kind = t.contains("kind") ? get_string(t["kind"], "topology.kind") : "geometric";
    if (kind == "geometric") {
        only_keys(t, "topology", {"kind", "n_agents", "radius", "gap", "max_tries"});
        cfg.topology.kind = TopologySpec::Kind::geometric;
        if (t.contains("n_agents")) {
            cfg.topology.n_agents = get_count(t["n_agents"], "topology.n_agents");
        }
        if (t.contains("radius")) {
            cfg.topology.radius = get_number(t["radius"], "topology.radius");
        }
        if (t.contains("gap")) {
            cfg.topology.gap = get_number(t["gap"], "topology.gap");
        }
        if (t.contains("max_tries")) {
            cfg.topology.max_tries = static_cast<int>(get_count(t["max_tries"], "topology.max_tries"));
        }
    } else if (kind == "file") {
        only_keys(t, "topology", {"kind", "path"});
        if (!t.contains("path")) {
            bad("topology.path", "required for a file topology");
        }
        std::filesystem::path p = get_string(t["path"], "topology.path");
        if (p.is_relative()) {
            p = base_dir / p;
        }
        cfg.topology.kind = TopologySpec::Kind::graph;
        cfg.topology.graph = load_topology(p);
    } else if (kind == "explicit") {
        only_keys(t, "topology", {"kind", "n_agents", "edges", "compromised"});
        json g = t;
        g.erase("kind");
        try {
            cfg.topology.graph = topology_from_json(g);
        } catch (const Error& e) {
            bad("topology", e.what());
        }
        cfg.topology.kind = TopologySpec::Kind::graph;
    } else {
        bad("topology.kind", "expected geometric, file or explicit");
    }
}

void parse_targets(const json& t, ScenarioConfig& cfg) {
    only_keys(t, "targets", {"stationary", "centers", "amplitude", "omega", "assignment"});
    if (t.contains("stationary")) {
        cfg.targets.stationary = get_bool(t["stationary"], "targets.stationary");
    }
    if (t.contains("centers")) {
        if (!t["centers"].is_array() || t["centers"].empty()) {
            bad("targets.centers", "expected a nonempty array of vectors");
        }
        for (const auto& c : t["centers"]) {
            cfg.targets.centers.push_back(get_vector(c, "targets.centers"));
        }
    }
    if (t.contains("amplitude")) {
        cfg.targets.amplitude = get_number(t["amplitude"], "targets.amplitude");
    }
    if (t.contains("omega")) {
        cfg.targets.omega = get_number(t["omega"], "targets.omega");
    }
    if (t.contains("assignment")) {
        cfg.targets.assignment = get_ids(t["assignment"], "targets.assignment");
    }
}

void parse_F(const json& v, ScenarioConfig& cfg) {
    if (v.is_string()) {
        if (v.get<std::string>() != "auto") {
            bad("F", "expected an integer, a per-agent map or \"auto\"");
        }
        cfg.F.kind = FSpec::Kind::automatic;
    } else if (v.is_object()) {
        cfg.F.kind = FSpec::Kind::per_agent;
        for (const auto& item : v.items()) {
            AgentId k = 0;
            try {
                std::size_t used = 0;
                k = std::stoull(item.key(), &used);
                if (used != item.key().size()) {
                    throw std::invalid_argument(item.key());
                }
            } catch (const std::exception&) {
                bad("F", "per-agent keys must be agent ids, got \"" + item.key() + "\"");
            }
            cfg.F.per_agent[k] = get_count(item.value(), "F." + item.key());
        }
    } else {
        cfg.F.kind = FSpec::Kind::fixed;
        cfg.F.global = get_count(v, "F");
    }
}

void parse_attack(const json& a, ScenarioConfig& cfg) {
    only_keys(a, "attack",
              {"kind", "compromised", "victims", "start_round", "r", "mu_A", "target", "trajectory",
               "amplitude", "omega", "compensate", "strict", "strict_ratio", "init"});
    auto& at = cfg.attack;
    const std::string kind = a.contains("kind") ? get_string(a["kind"], "attack.kind") : "none";
    if (kind == "none") {
        at.kind = AttackKind::none;
    } else if (kind == "strong") {
        at.kind = AttackKind::strong;
    } else if (kind == "weak") {
        at.kind = AttackKind::weak;
    } else {
        bad("attack.kind", "expected none, strong or weak");
    }

    if (a.contains("compromised")) {
        const json& c = a["compromised"];
        if (c.is_string()) {
            const std::string s = c.get<std::string>();
            if (s == "plan") {
                at.selection = AttackSpec::Selection::plan;
            } else if (s == "graph") {
                at.selection = AttackSpec::Selection::from_graph;
            } else {
                bad("attack.compromised", "expected a list, \"plan\", \"graph\" or {count, f_local}");
            }
        } else if (c.is_object()) {
            only_keys(c, "attack.compromised", {"count", "f_local"});
            at.selection = AttackSpec::Selection::f_local_random;
            if (c.contains("count")) {
                at.count = get_count(c["count"], "attack.compromised.count");
            }
            if (c.contains("f_local")) {
                at.f_local = get_count(c["f_local"], "attack.compromised.f_local");
            }
        } else {
            at.selection = AttackSpec::Selection::listed;
            const auto ids = get_ids(c, "attack.compromised");
            at.compromised = std::set<AgentId>(ids.begin(), ids.end());
        }
    } else if (at.kind != AttackKind::none) {
        at.selection = cfg.topology.kind == TopologySpec::Kind::graph
                           ? AttackSpec::Selection::from_graph
                           : AttackSpec::Selection::listed;
    }
    if (a.contains("victims")) {
        at.victims = get_ids(a["victims"], "attack.victims");
    }
    if (a.contains("start_round")) {
        at.start_round = get_round(a["start_round"], "attack.start_round");
    }
    if (a.contains("r")) {
        at.r = get_number(a["r"], "attack.r");
    }
    if (a.contains("mu_A")) {
        at.mu_A = get_number(a["mu_A"], "attack.mu_A");
    }
    if (a.contains("target")) {
        at.target = get_vector(a["target"], "attack.target");
    }
    if (a.contains("trajectory")) {
        const std::string t = get_string(a["trajectory"], "attack.trajectory");
        if (t != "stationary" && t != "circular") {
            bad("attack.trajectory", "expected stationary or circular");
        }
        at.circular = t == "circular";
    }
    if (a.contains("amplitude")) {
        at.amplitude = get_number(a["amplitude"], "attack.amplitude");
    }
    if (a.contains("omega")) {
        at.omega = get_number(a["omega"], "attack.omega");
    }
    if (a.contains("compensate")) {
        at.compensate = get_bool(a["compensate"], "attack.compensate");
    }
    if (a.contains("strict")) {
        at.strict = get_bool(a["strict"], "attack.strict");
    }
    if (a.contains("strict_ratio")) {
        at.strict_ratio = get_number(a["strict_ratio"], "attack.strict_ratio");
    }
    if (a.contains("init")) {
        const std::string s = get_string(a["init"], "attack.init");
        if (s != "uniform" && s != "random") {
            bad("attack.init", "expected uniform or random");
        }
        at.random_init = s == "random";
    }
}

}  // namespace

Topology load_topology(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::io, "cannot open " + path.string() + ": file not found or unreadable");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(Errc::config, path.string() + ": " + e.what());
    }
    return topology_from_json(j);
}

ScenarioConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
    only_keys(j, "",
              {"schema", "seed", "rounds", "dim", "mu", "nu", "regressor_var", "noise_var",
               "algorithm", "F", "F_select", "resilient", "topology", "targets", "attack",
               "prune_threshold", "snapshot_rounds", "convergence_window",
               "convergence_threshold", "steady_window", "agent_log_stride"});
    if (!j.contains("schema")) {
        bad("schema", "missing; expected 1");
    }
    if (!j["schema"].is_number_integer() || j["schema"].get<int>() != kConfigSchema) {
        bad("schema", "unsupported version; expected 1");
    }

    ScenarioConfig cfg;
    if (j.contains("seed")) {
        cfg.seed = get_count(j["seed"], "seed");
    }
    if (j.contains("rounds")) {
        cfg.rounds = get_round(j["rounds"], "rounds");
    }
    if (j.contains("dim")) {
        cfg.dim = get_count(j["dim"], "dim");
    }
    if (j.contains("mu")) {
        cfg.mu = get_number(j["mu"], "mu");
    }
    if (j.contains("nu")) {
        cfg.nu = get_number(j["nu"], "nu");
    }
    if (j.contains("regressor_var")) {
        cfg.regressor_var = get_range(j["regressor_var"], "regressor_var");
    }
    if (j.contains("noise_var")) {
        cfg.noise_var = get_range(j["noise_var"], "noise_var");
    }
    if (j.contains("algorithm")) {
        const std::string a = get_string(j["algorithm"], "algorithm");
        if (a == "noncoop") {
            cfg.algorithm = Algorithm::noncoop;
        } else if (a == "dlmsaw") {
            cfg.algorithm = Algorithm::dlmsaw;
        } else if (a == "rdlmsaw") {
            cfg.algorithm = Algorithm::rdlmsaw;
        } else {
            bad("algorithm", "expected noncoop, dlmsaw or rdlmsaw");
        }
    }
    if (j.contains("F")) {
        parse_F(j["F"], cfg);
    }
    if (j.contains("F_select")) {
        const json& f = j["F_select"];
        only_keys(f, "F_select", {"epoch", "margin"});
        if (f.contains("epoch")) {
            cfg.F.select.epoch = get_round(f["epoch"], "F_select.epoch");
        }
        if (f.contains("margin")) {
            cfg.F.select.margin = get_number(f["margin"], "F_select.margin");
        }
    }
    if (j.contains("resilient")) {
        const json& r = j["resilient"];
        only_keys(r, "resilient", {"window", "warmup", "max_subsets"});
        if (r.contains("window")) {
            cfg.resilient.window = get_count(r["window"], "resilient.window");
        }
        if (r.contains("warmup")) {
            cfg.resilient.warmup = get_count(r["warmup"], "resilient.warmup");
        }
        if (r.contains("max_subsets")) {
            cfg.resilient.max_subsets = get_count(r["max_subsets"], "resilient.max_subsets");
        }
    }
    if (j.contains("topology")) {
        if (!j["topology"].is_object()) {
            bad("topology", "expected an object");
        }
        parse_topology(j["topology"], cfg, base_dir);
    }
    if (j.contains("targets")) {
        parse_targets(j["targets"], cfg);
    }
    if (j.contains("attack")) {
        parse_attack(j["attack"], cfg);
    }
    if (j.contains("prune_threshold")) {
        cfg.prune_threshold = get_number(j["prune_threshold"], "prune_threshold");
    }
    if (j.contains("snapshot_rounds")) {
        const json& s = j["snapshot_rounds"];
        if (!s.is_array()) {
            bad("snapshot_rounds", "expected an array of rounds");
        }
        for (const auto& x : s) {
            cfg.snapshot_rounds.push_back(get_round(x, "snapshot_rounds"));
        }
    }
    if (j.contains("convergence_window")) {
        cfg.convergence_window = get_round(j["convergence_window"], "convergence_window");
    }
    if (j.contains("convergence_threshold")) {
        cfg.convergence_threshold = get_number(j["convergence_threshold"], "convergence_threshold");
    }
    if (j.contains("steady_window")) {
        cfg.steady_window = get_round(j["steady_window"], "steady_window");
    }
    if (j.contains("agent_log_stride")) {
        cfg.agent_log_stride = get_round(j["agent_log_stride"], "agent_log_stride");
    }
    validate(cfg);
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::io, "cannot open " + path.string() + ": file not found or unreadable");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(Errc::config, path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

}  // namespace dlms
