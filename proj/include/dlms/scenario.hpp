#pragma once

#include "dlms/attack.hpp"
#include "dlms/common.hpp"
#include "dlms/diffusion.hpp"
#include "dlms/network.hpp"
#include "dlms/resilient.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace dlms {

enum class Algorithm { noncoop, dlmsaw, rdlmsaw };
enum class AttackKind { none, strong, weak };

std::string_view to_string(Algorithm a);
std::string_view to_string(AttackKind a);

struct VarianceRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct TopologySpec {
    enum class Kind { geometric, graph } kind = Kind::geometric;
    std::size_t n_agents = 100;
    double radius = 0.18;
    double gap = 0.0;
    int max_tries = 10000;
    std::optional<Topology> graph;  // Kind::graph
};

/// Two-task localization by default: blue agents track [0.1, 0.1], green
/// agents [0.9, 0.9]. Non-stationary targets circle their center.
struct TargetSpec {
    bool stationary = true;
    std::vector<Vector> centers;
    double amplitude = 0.1;
    double omega = 1.0 / 2000.0;
    std::vector<std::size_t> assignment;  // task per agent; empty → split by x
};

struct FSpec {
    enum class Kind { fixed, per_agent, automatic } kind = Kind::fixed;
    std::size_t global = 0;
    std::map<AgentId, std::size_t> per_agent;
    FSelectParams select;
};

struct AttackSpec {
    AttackKind kind = AttackKind::none;
    enum class Selection { listed, plan, f_local_random, from_graph } selection = Selection::listed;
    std::set<AgentId> compromised;  // Selection::listed
    std::size_t count = 1;          // Selection::f_local_random
    std::size_t f_local = 1;
    std::optional<std::vector<AgentId>> victims;  // default: every normal neighbor
    Round start_round = 0;
    double r = 0.002;
    double mu_A = 0.002;
    Vector target;  // w^a; default [0.5, 0.5, ...]
    bool circular = false;
    double amplitude = 0.1;
    double omega = 1.0 / 2000.0;
    bool compensate = true;
    bool strict = false;
    double strict_ratio = 0.1;
    bool random_init = false;
};

struct ScenarioConfig {
    std::optional<std::uint64_t> seed;
    Round rounds = 5000;
    std::size_t dim = 2;
    double mu = 0.01;
    double nu = 0.01;
    std::optional<VarianceRange> regressor_var;  // default [0.8, 1.2]; weak attack [0.75, 0.85]
    std::optional<VarianceRange> noise_var;      // default [0.15, 0.2]; weak attack [0.75, 0.85]
    Algorithm algorithm = Algorithm::dlmsaw;
    FSpec F;
    ResilientParams resilient;
    AttackSpec attack;
    TopologySpec topology;
    TargetSpec targets;
    double prune_threshold = 0.01;
    std::vector<Round> snapshot_rounds;
    Round convergence_window = 500;
    double convergence_threshold = 0.02;
    Round steady_window = 500;
    Round agent_log_stride = 1;

    VarianceRange effective_regressor_var() const;
    VarianceRange effective_noise_var() const;
};

/// Throws Error(Errc::config) naming the first offending field.
void validate(const ScenarioConfig& cfg);

/// Everything drawn once before the first round.
struct ScenarioSetup {
    Topology topology;
    std::vector<Point2> positions;
    std::vector<std::size_t> task;
    std::vector<double> regressor_var;
    std::vector<double> noise_var;
    std::map<AgentId, std::vector<AgentId>> attackers_of;  // victim → attackers
    std::vector<AgentId> victims;
};

ScenarioSetup build_setup(const ScenarioConfig& cfg, std::mt19937_64& rng);

/// Compromise `count` random agents while keeping every normal agent's
/// neighborhood within `f_local` compromised members.
std::set<AgentId> select_f_local(const Topology& t, std::size_t count, std::size_t f_local,
                                 std::mt19937_64& rng);

/// w⁰_{k,i}.
Vector target_at(const ScenarioConfig& cfg, const ScenarioSetup& setup, AgentId k, Round i);

/// d = u w⁰ + v with u ~ N(0, σ²_u I), v ~ N(0, σ²_v).
StreamSample generate_sample(const ScenarioConfig& cfg, const ScenarioSetup& setup, AgentId k,
                             Round i, std::mt19937_64& rng,
                             std::normal_distribution<double>& normal);

/// Mean ‖w⁰_k − w_k‖² over the given (normal) agents.
double empirical_msd(std::span<const Vector> estimates, std::span<const Vector> targets);

struct RoundRecord {
    Round round = 0;
    double msd = 0.0;
    double victim_distance = std::numeric_limits<double>::quiet_NaN();
    double attacker_precision = std::numeric_limits<double>::quiet_NaN();
};

struct WeightSnapshot {
    Round round = 0;
    DirectedWeights weights;
};

struct MetricsLog {
    std::vector<RoundRecord> rounds;
    std::vector<Round> logged_rounds;          // rounds kept in the per-agent series
    std::vector<std::vector<Vector>> estimates;  // [agent][logged index]
    std::vector<std::vector<double>> err_sq;     // [agent][logged index]
    std::map<AgentId, std::vector<double>> precision;  // [victim][round]; NaN before first estimate
    std::vector<WeightSnapshot> snapshots;
    DirectedWeights final_weights;
    std::vector<std::size_t> final_F;
    std::vector<std::vector<std::size_t>> F_history;  // [agent][epoch end]
    Topology initial_topology;
    Topology final_topology;
};

struct SimulationResult {
    ScenarioSetup setup;
    MetricsLog metrics;
};

SimulationResult run_simulation(const ScenarioConfig& cfg);

double steady_state_msd(const MetricsLog& log, Round window);

/// Mean over the last `window` rounds of ‖w_{k,i} − ref(i)‖.
double trailing_mean_distance(const MetricsLog& log, AgentId k, Round window,
                              const std::function<Vector(Round)>& ref);

/// ‖mean_{last window} w_{k,i} − mean ref(i)‖: the steady offset with the
/// per-round noise averaged out.
double trailing_mean_error(const MetricsLog& log, AgentId k, Round window,
                           const std::function<Vector(Round)>& ref);

/// Attacker-selected state for a victim at round i.
Vector attack_target_at(const ScenarioConfig& cfg, Round i);

/// Edges between a compromised node and a normal one that the pruning rule removed.
std::size_t pruned_attack_links(const MetricsLog& log);

void write_metrics_csv(std::ostream& out, const MetricsLog& log);
void write_agents_csv(std::ostream& out, const MetricsLog& log);
nlohmann::json summarize(const ScenarioConfig& cfg, const SimulationResult& result);

}  // namespace dlms
