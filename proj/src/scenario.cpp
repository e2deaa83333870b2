#include "dlms/scenario.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>

namespace dlms {

std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::noncoop: return "noncoop";
    case Algorithm::dlmsaw: return "dlmsaw";
    case Algorithm::rdlmsaw: return "rdlmsaw";
    }
    return "?";
}

std::string_view to_string(AttackKind a) {
    switch (a) {
    case AttackKind::none: return "none";
    case AttackKind::strong: return "strong";
    case AttackKind::weak: return "weak";
    }
    return "?";
}

VarianceRange ScenarioConfig::effective_regressor_var() const {
    if (regressor_var) {
        return *regressor_var;
    }
    return attack.kind == AttackKind::weak ? VarianceRange{0.75, 0.85} : VarianceRange{0.8, 1.2};
}

VarianceRange ScenarioConfig::effective_noise_var() const {
    if (noise_var) {
        return *noise_var;
    }
    return attack.kind == AttackKind::weak ? VarianceRange{0.75, 0.85} : VarianceRange{0.15, 0.2};
}

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw Error(Errc::config, field + ": " + why);
}

void check_range(const std::string& field, const VarianceRange& v) {
    if (!(v.lo > 0.0) || !(v.hi >= v.lo) || !std::isfinite(v.hi)) {
        bad(field, "need 0 < lo <= hi");
    }
}

std::size_t n_agents_of(const ScenarioConfig& cfg) {
    return cfg.topology.kind == TopologySpec::Kind::graph && cfg.topology.graph
               ? cfg.topology.graph->size()
               : cfg.topology.n_agents;
}

std::vector<Vector> default_centers(std::size_t dim) {
    return {Vector::Constant(static_cast<Eigen::Index>(dim), 0.1),
            Vector::Constant(static_cast<Eigen::Index>(dim), 0.9)};
}

const std::vector<Vector>& centers_of(const ScenarioConfig& cfg, std::vector<Vector>& scratch) {
    if (!cfg.targets.centers.empty()) {
        return cfg.targets.centers;
    }
    scratch = default_centers(cfg.dim);
    return scratch;
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
    if (cfg.rounds < 1) {
        bad("rounds", "must be at least 1");
    }
    if (cfg.dim < 1) {
        bad("dim", "must be at least 1");
    }
    if (!(cfg.mu > 0.0 && cfg.mu <= 1.0)) {
        bad("mu", "must lie in (0, 1]");
    }
    if (!(cfg.nu > 0.0 && cfg.nu <= 1.0)) {
        bad("nu", "must lie in (0, 1]");
    }
    check_range("regressor_var", cfg.effective_regressor_var());
    check_range("noise_var", cfg.effective_noise_var());

    const auto& topo = cfg.topology;
    if (topo.kind == TopologySpec::Kind::geometric) {
        if (topo.n_agents < 1) {
            bad("topology.n_agents", "must be at least 1");
        }
        if (!(topo.radius > 0.0)) {
            bad("topology.radius", "must be positive");
        }
        if (!(topo.gap >= 0.0 && topo.gap < 1.0)) {
            bad("topology.gap", "must lie in [0, 1)");
        }
    } else if (!topo.graph) {
        bad("topology", "graph source has no graph");
    }
    const std::size_t n = n_agents_of(cfg);

    for (const Vector& c : cfg.targets.centers) {
        if (static_cast<std::size_t>(c.size()) != cfg.dim) {
            bad("targets.centers", "every center needs dim entries");
        }
    }
    std::vector<Vector> scratch;
    const std::size_t n_tasks = centers_of(cfg, scratch).size();
    if (!cfg.targets.assignment.empty()) {
        if (cfg.targets.assignment.size() != n) {
            bad("targets.assignment", "needs one task per agent");
        }
        for (std::size_t t : cfg.targets.assignment) {
            if (t >= n_tasks) {
                bad("targets.assignment", "task index out of range");
            }
        }
    }
    if (!cfg.targets.stationary && cfg.dim < 2) {
        bad("targets.stationary", "moving targets need dim >= 2");
    }

    for (const auto& [k, f] : cfg.F.per_agent) {
        (void)f;
        if (k >= n) {
            bad("F", "agent " + std::to_string(k) + " out of range");
        }
    }
    if (cfg.F.select.epoch < 1) {
        bad("F.epoch", "must be at least 1");
    }
    if (cfg.resilient.window < 1) {
        bad("resilient.window", "must be at least 1");
    }

    const auto& a = cfg.attack;
    if (a.kind != AttackKind::none) {
        if (!(a.r > 0.0 && a.r < 1.0)) {
            bad("attack.r", "must lie in (0, 1)");
        }
        if (a.kind == AttackKind::weak && !(a.mu_A > 0.0)) {
            bad("attack.mu_A", "must be positive");
        }
        if (a.target.size() != 0 && static_cast<std::size_t>(a.target.size()) != cfg.dim) {
            bad("attack.target", "needs dim entries");
        }
        if (a.circular && cfg.dim < 2) {
            bad("attack.trajectory", "circular trajectory needs dim >= 2");
        }
        if (a.start_round < 0) {
            bad("attack.start_round", "must be nonnegative");
        }
        if (a.selection == AttackSpec::Selection::listed) {
            for (AgentId c : a.compromised) {
                if (c >= n) {
                    bad("attack.compromised", "agent " + std::to_string(c) + " out of range");
                }
            }
        }
        if (a.victims) {
            for (AgentId v : *a.victims) {
                if (v >= n) {
                    bad("attack.victims", "agent " + std::to_string(v) + " out of range");
                }
            }
        }
        if (a.strict && !(a.strict_ratio > 0.0)) {
            bad("attack.strict_ratio", "must be positive");
        }
    }
    if (!(cfg.prune_threshold >= 0.0)) {
        bad("prune_threshold", "must be nonnegative");
    }
    if (cfg.convergence_window < 1) {
        bad("convergence_window", "must be at least 1");
    }
    if (cfg.steady_window < 1) {
        bad("steady_window", "must be at least 1");
    }
    if (cfg.agent_log_stride < 1) {
        bad("agent_log_stride", "must be at least 1");
    }
}

std::set<AgentId> select_f_local(const Topology& t, std::size_t count, std::size_t f_local,
                                  std::mt19937_64& rng) {
    std::vector<AgentId> order(t.size());
    std::iota(order.begin(), order.end(), AgentId{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::set<AgentId> chosen;
    std::vector<std::size_t> load(t.size(), 0);  // compromised members of N_v
    for (AgentId c : order) {
        if (chosen.size() == count) {
            break;
        }
        bool ok = true;
        for (AgentId v : t.neighbors(c)) {
            if (v != c && !chosen.contains(v) && load[v] + 1 > f_local) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            continue;
        }
        chosen.insert(c);
        for (AgentId v : t.neighbors(c)) {
            ++load[v];
        }
    }
    if (chosen.size() < count) {
        throw Error(Errc::config, "attack.count: cannot place " + std::to_string(count) +
                                      " attackers under a " + std::to_string(f_local) +
                                      "-local bound");
    }
    return chosen;
}

ScenarioSetup build_setup(const ScenarioConfig& cfg, std::mt19937_64& rng) {
    validate(cfg);
    ScenarioSetup s;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    if (cfg.topology.kind == TopologySpec::Kind::geometric) {
        auto g = random_geometric_graph(cfg.topology.n_agents, cfg.topology.radius, rng,
                                        cfg.topology.max_tries, cfg.topology.gap);
        s.topology = std::move(g.topology);
        s.positions = std::move(g.positions);
    } else {
        s.topology = *cfg.topology.graph;
        if (cfg.targets.assignment.empty()) {
            s.positions.resize(s.topology.size());
            for (auto& p : s.positions) {
                p.x = unit(rng);
                p.y = unit(rng);
            }
        }
    }
    const std::size_t n = s.topology.size();

    std::vector<Vector> scratch;
    const std::size_t n_tasks = centers_of(cfg, scratch).size();
    if (!cfg.targets.assignment.empty()) {
        s.task = cfg.targets.assignment;
    } else {
        // Contiguous groups by x: for two tasks this is the median split.
        std::vector<AgentId> by_x(n);
        std::iota(by_x.begin(), by_x.end(), AgentId{0});
        std::stable_sort(by_x.begin(), by_x.end(), [&](AgentId a, AgentId b) {
            return s.positions[a].x < s.positions[b].x;
        });
        s.task.assign(n, 0);
        for (std::size_t j = 0; j < n; ++j) {
            s.task[by_x[j]] = j * n_tasks / n;
        }
    }

    const VarianceRange ru = cfg.effective_regressor_var();
    const VarianceRange rv = cfg.effective_noise_var();
    std::uniform_real_distribution<double> du(ru.lo, ru.hi);
    std::uniform_real_distribution<double> dv(rv.lo, rv.hi);
    s.regressor_var.resize(n);
    s.noise_var.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        s.regressor_var[k] = ru.lo == ru.hi ? ru.lo : du(rng);
        s.noise_var[k] = rv.lo == rv.hi ? rv.lo : dv(rng);
    }

    const auto& a = cfg.attack;
    std::set<AgentId> compromised;
    if (a.kind != AttackKind::none) {
        switch (a.selection) {
        case AttackSpec::Selection::listed: compromised = a.compromised; break;
        case AttackSpec::Selection::plan: compromised = plan_network_attack(s.topology); break;
        case AttackSpec::Selection::f_local_random:
            compromised = select_f_local(s.topology, a.count, a.f_local, rng);
            break;
        case AttackSpec::Selection::from_graph: compromised = s.topology.compromised(); break;
        }
    }
    s.topology = s.topology.with_compromised(compromised);

    std::set<AgentId> allowed;
    if (a.victims) {
        allowed.insert(a.victims->begin(), a.victims->end());
    }
    std::set<AgentId> victims;
    for (AgentId c : compromised) {
        for (AgentId k : s.topology.neighbors(c)) {
            if (k == c || compromised.contains(k) || (a.victims && !allowed.contains(k))) {
                continue;
            }
            s.attackers_of[k].push_back(c);
            victims.insert(k);
        }
    }
    s.victims.assign(victims.begin(), victims.end());
    return s;
}

Vector target_at(const ScenarioConfig& cfg, const ScenarioSetup& setup, AgentId k, Round i) {
    if (k >= setup.task.size()) {
        throw Error(Errc::invalid_agent, "agent " + std::to_string(k) + " out of range");
    }
    std::vector<Vector> scratch;
    Vector w = centers_of(cfg, scratch)[setup.task[k]];
    if (!cfg.targets.stationary) {
        const double phase = 2.0 * std::numbers::pi * cfg.targets.omega * static_cast<double>(i);
        w(0) += cfg.targets.amplitude * std::cos(phase);
        w(1) += cfg.targets.amplitude * std::sin(phase);
    }
    return w;
}

StreamSample generate_sample(const ScenarioConfig& cfg, const ScenarioSetup& setup, AgentId k,
                             Round i, std::mt19937_64& rng,
                             std::normal_distribution<double>& normal) {
    const Vector w0 = target_at(cfg, setup, k, i);
    StreamSample s;
    s.u.resize(w0.size());
    const double su = std::sqrt(setup.regressor_var[k]);
    for (Eigen::Index j = 0; j < s.u.size(); ++j) {
        s.u(j) = su * normal(rng);
    }
    const double v = std::sqrt(setup.noise_var[k]) * normal(rng);
    s.d = s.u.dot(w0) + v;
    return s;
}

double empirical_msd(std::span<const Vector> estimates, std::span<const Vector> targets) {
    if (estimates.empty()) {
        throw Error(Errc::empty_input, "no agents to average over");
    }
    if (estimates.size() != targets.size()) {
        throw Error(Errc::shape, "estimates and targets are not aligned");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < estimates.size(); ++j) {
        sum += (targets[j] - estimates[j]).squaredNorm();
    }
    return sum / static_cast<double>(estimates.size());
}

Vector attack_target_at(const ScenarioConfig& cfg, Round i) {
    Vector base = cfg.attack.target.size() != 0
                      ? cfg.attack.target
                      : Vector(Vector::Constant(static_cast<Eigen::Index>(cfg.dim), 0.5));
    if (cfg.attack.circular) {
        return TargetTrajectory::circular(base, cfg.attack.amplitude, cfg.attack.omega).at(i);
    }
    return base;
}

namespace {

AttackTarget make_attack_target(const ScenarioConfig& cfg) {
    const auto& a = cfg.attack;
    Vector base = a.target.size() != 0
                      ? a.target
                      : Vector(Vector::Constant(static_cast<Eigen::Index>(cfg.dim), 0.5));
    AttackTarget t;
    t.trajectory = a.circular ? TargetTrajectory::circular(base, a.amplitude, a.omega)
                              : TargetTrajectory::stationary(base);
    t.r = a.r;
    t.compensate = a.compensate;
    return t;
}

void record_weights(DirectedWeights& out, const std::vector<WeightRow>& rows) {
    out.clear();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (std::size_t j = 0; j < rows[k].size(); ++j) {
            const AgentId l = rows[k].ids[j];
            if (l != k) {
                out[{l, k}] = rows[k].values[j];
            }
        }
    }
}

WeightRow self_only(const Topology& t, AgentId k) {
    const auto& nk = t.neighbors(k);
    WeightRow row(nk, std::vector<double>(nk.size(), 0.0));
    *row.find(k) = 1.0;
    return row;
}

}  // namespace

SimulationResult run_simulation(const ScenarioConfig& cfg) {
    validate(cfg);
    if (!cfg.seed) {
        throw Error(Errc::config, "seed: no seed given");
    }
    std::mt19937_64 rng(*cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    SimulationResult result;
    result.setup = build_setup(cfg, rng);
    const ScenarioSetup& setup = result.setup;
    const Topology& topo = setup.topology;
    const std::size_t n = topo.size();
    const auto normals = topo.normal_agents();
    if (normals.empty()) {
        throw Error(Errc::config, "attack: every agent is compromised");
    }

    std::vector<AgentState> states;
    states.reserve(n);
    for (AgentId k = 0; k < n; ++k) {
        states.push_back(AgentState::make(k, topo, cfg.dim, cfg.mu, cfg.nu));
    }

    std::vector<CostWindow> windows;
    std::vector<std::size_t> F(n, 0);
    std::vector<FSelector> selectors;
    if (cfg.algorithm == Algorithm::rdlmsaw) {
        windows.assign(n, CostWindow(cfg.resilient.window));
        for (AgentId k = 0; k < n; ++k) {
            if (cfg.F.kind == FSpec::Kind::fixed) {
                F[k] = cfg.F.global;
            } else if (cfg.F.kind == FSpec::Kind::per_agent) {
                auto it = cfg.F.per_agent.find(k);
                F[k] = it == cfg.F.per_agent.end() ? cfg.F.global : it->second;
            } else {
                selectors.emplace_back(cfg.dim, cfg.mu, topo.degree(k), cfg.F.select);
            }
        }
        // Refuse oversized searches up front rather than mid-run.
        if (cfg.F.kind != FSpec::Kind::automatic) {
            for (AgentId k = 0; k < n; ++k) {
                const std::size_t others = topo.degree(k);
                if (F[k] > 0 && F[k] < others &&
                    binomial(others, F[k]) > cfg.resilient.max_subsets) {
                    throw Error(Errc::combinatorial_guard,
                                "F = " + std::to_string(F[k]) + " at agent " + std::to_string(k) +
                                    " needs C(" + std::to_string(others) + "," +
                                    std::to_string(F[k]) + ") removal sets");
                }
            }
        }
    }

    const auto& acfg = cfg.attack;
    const AttackTarget attack_target = make_attack_target(cfg);
    std::map<AgentId, StrongAttacker> strong;
    std::map<AgentId, WeakAttacker> weak;
    for (const auto& [victim, attackers] : setup.attackers_of) {
        for (AgentId c : attackers) {
            if (acfg.kind == AttackKind::strong) {
                auto& att = strong[c];
                att.node = c;
                att.start_round = acfg.start_round;
                att.strict = acfg.strict;
                att.strict_ratio = acfg.strict_ratio;
                att.targets[victim] = attack_target;
            } else if (acfg.kind == AttackKind::weak) {
                auto& att = weak[c];
                att.node = c;
                att.mu_A = acfg.mu_A;
                att.start_round = acfg.start_round;
                att.targets[victim] = attack_target;
            }
        }
    }
    if (acfg.random_init) {
        for (auto& [c, att] : weak) {
            for (const auto& [victim, target] : att.targets) {
                (void)target;
                att.A_hat.emplace(victim, random_weight_row(topo.neighbors(victim), rng));
            }
        }
    }

    MetricsLog& log = result.metrics;
    log.initial_topology = topo;
    log.rounds.reserve(static_cast<std::size_t>(cfg.rounds));
    log.estimates.assign(n, {});
    log.err_sq.assign(n, {});
    for (AgentId v : setup.victims) {
        if (acfg.kind == AttackKind::weak) {
            log.precision[v].assign(static_cast<std::size_t>(cfg.rounds),
                                    std::numeric_limits<double>::quiet_NaN());
        }
    }
    if (!selectors.empty()) {
        log.F_history.assign(n, {});
    }
    std::set<Round> snapshot_at(cfg.snapshot_rounds.begin(), cfg.snapshot_rounds.end());

    MessageBoard board(topo);
    std::vector<StreamSample> samples(n);
    std::vector<Vector> psi(n);
    std::vector<WeightRow> rows(n);
    std::vector<Vector> w_now;
    std::vector<Vector> w_true;
    w_now.reserve(normals.size());
    w_true.reserve(normals.size());

    for (Round i = 0; i < cfg.rounds; ++i) {
        for (AgentId k = 0; k < n; ++k) {
            samples[k] = generate_sample(cfg, setup, k, i, rng, normal);
        }
        board.clear();
        for (AgentId k = 0; k < n; ++k) {
            psi[k] = lms_adapt(states[k], samples[k]);
            board.publish(k, psi[k]);
        }

        // Crafted messages; ψ of this round is already on the board.
        double precision_sum = 0.0;
        std::size_t precision_count = 0;
        const bool attacking = i >= acfg.start_round;
        if (attacking) {
            for (const auto& [c, att] : strong) {
                for (const auto& [victim, target] : att.targets) {
                    (void)target;
                    const Vector w_prev =
                        recover_state(psi[victim], samples[victim], states[victim].mu);
                    std::vector<Vector> others;
                    if (att.strict) {
                        for (AgentId l : topo.neighbors(victim)) {
                            if (!topo.is_compromised(l)) {
                                others.push_back(psi[l]);
                            }
                        }
                    }
                    board.send(c, victim, craft_strong_message(att, victim, w_prev, i, others));
                }
            }
            for (auto& [c, att] : weak) {
                for (const auto& [victim, target] : att.targets) {
                    (void)target;
                    auto hist = att.psi_history.find(victim);
                    if (hist == att.psi_history.end()) {
                        continue;  // nothing observed yet: stay honest this round
                    }
                    weak_update_weights(att, victim, hist->second, psi[victim]);
                    const Vector w_hat = weak_estimate_state(att, victim, hist->second);
                    const double p = (w_hat - states[victim].w).norm();
                    precision_sum += p;
                    ++precision_count;
                    auto& series = log.precision[victim];
                    series[static_cast<std::size_t>(i)] =
                        std::isnan(series[static_cast<std::size_t>(i)])
                            ? p
                            : std::min(series[static_cast<std::size_t>(i)], p);
                    board.send(c, victim, craft_weak_message(att, victim, w_hat, i));
                }
            }
        }
        // The weak attacker sees every ψ its victims receive.
        if (i + 1 >= acfg.start_round) {
            for (auto& [c, att] : weak) {
                for (const auto& [victim, target] : att.targets) {
                    (void)target;
                    att.psi_history[victim] = board.inbox(victim);
                }
            }
        }

        switch (cfg.algorithm) {
        case Algorithm::noncoop:
            for (AgentId k = 0; k < n; ++k) {
                states[k].w = psi[k];
                rows[k] = self_only(topo, k);
            }
            break;
        case Algorithm::dlmsaw:
            for (AgentId k = 0; k < n; ++k) {
                rows[k] = dlmsaw_step(states[k], board);
            }
            break;
        case Algorithm::rdlmsaw:
            for (AgentId k = 0; k < n; ++k) {
                const std::size_t f = selectors.empty() ? F[k] : selectors[k].F();
                rows[k] = rdlmsaw_step(states[k], windows[k], samples[k], board, f, cfg.resilient);
            }
            if (!selectors.empty()) {
                const bool epoch_end = (i + 1) % cfg.F.select.epoch == 0;
                for (AgentId k = 0; k < n; ++k) {
                    selectors[k].observe(windows[k], samples[k], states[k].w);
                    if (epoch_end) {
                        log.F_history[k].push_back(selectors[k].F());
                    }
                }
            }
            break;
        }

        w_now.clear();
        w_true.clear();
        for (AgentId k : normals) {
            w_now.push_back(states[k].w);
            w_true.push_back(target_at(cfg, setup, k, i));
        }
        RoundRecord rec;
        rec.round = i;
        rec.msd = empirical_msd(w_now, w_true);
        if (acfg.kind != AttackKind::none && attacking && !setup.victims.empty()) {
            const Vector wa = attack_target_at(cfg, i);
            double sum = 0.0;
            for (AgentId v : setup.victims) {
                sum += (states[v].w - wa).norm();
            }
            rec.victim_distance = sum / static_cast<double>(setup.victims.size());
        }
        if (precision_count > 0) {
            rec.attacker_precision = precision_sum / static_cast<double>(precision_count);
        }
        log.rounds.push_back(rec);

        if (i % cfg.agent_log_stride == 0 || i == cfg.rounds - 1) {
            log.logged_rounds.push_back(i);
            for (AgentId k = 0; k < n; ++k) {
                log.estimates[k].push_back(states[k].w);
                log.err_sq[k].push_back((states[k].w - target_at(cfg, setup, k, i)).squaredNorm());
            }
        }
        if (snapshot_at.contains(i)) {
            WeightSnapshot snap;
            snap.round = i;
            record_weights(snap.weights, rows);
            log.snapshots.push_back(std::move(snap));
        }
    }

    record_weights(log.final_weights, rows);
    log.final_topology = prune_links(topo, log.final_weights, cfg.prune_threshold);
    log.final_F = F;
    for (std::size_t k = 0; k < selectors.size(); ++k) {
        log.final_F[k] = selectors[k].F();
    }
    return result;
}

double steady_state_msd(const MetricsLog& log, Round window) {
    if (log.rounds.empty()) {
        throw Error(Errc::empty_input, "no rounds recorded");
    }
    const std::size_t w = std::min(static_cast<std::size_t>(std::max<Round>(window, 1)),
                                   log.rounds.size());
    double sum = 0.0;
    for (std::size_t j = log.rounds.size() - w; j < log.rounds.size(); ++j) {
        sum += log.rounds[j].msd;
    }
    return sum / static_cast<double>(w);
}

namespace {

std::size_t trailing_start(const MetricsLog& log, AgentId k, Round window) {
    if (k >= log.estimates.size() || log.estimates[k].empty()) {
        throw Error(Errc::invalid_agent, "no estimates for agent " + std::to_string(k));
    }
    const Round last = log.logged_rounds.back();
    std::size_t j = log.logged_rounds.size();
    while (j > 0 && log.logged_rounds[j - 1] > last - window) {
        --j;
    }
    return j;
}

}  // namespace

double trailing_mean_distance(const MetricsLog& log, AgentId k, Round window,
                              const std::function<Vector(Round)>& ref) {
    const std::size_t start = trailing_start(log, k, window);
    double sum = 0.0;
    for (std::size_t j = start; j < log.logged_rounds.size(); ++j) {
        sum += (log.estimates[k][j] - ref(log.logged_rounds[j])).norm();
    }
    return sum / static_cast<double>(log.logged_rounds.size() - start);
}

double trailing_mean_error(const MetricsLog& log, AgentId k, Round window,
                           const std::function<Vector(Round)>& ref) {
    const std::size_t start = trailing_start(log, k, window);
    Vector acc = Vector::Zero(log.estimates[k][start].size());
    for (std::size_t j = start; j < log.logged_rounds.size(); ++j) {
        acc += log.estimates[k][j] - ref(log.logged_rounds[j]);
    }
    return acc.norm() / static_cast<double>(log.logged_rounds.size() - start);
}

std::size_t pruned_attack_links(const MetricsLog& log) {
    const Topology& before = log.initial_topology;
    std::size_t count = 0;
    for (const auto& [a, b] : before.edges()) {
        if (before.is_compromised(a) != before.is_compromised(b) &&
            !log.final_topology.has_edge(a, b)) {
            ++count;
        }
    }
    return count;
}

namespace {

std::string num(double x) {
    if (std::isnan(x)) {
        return "";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_metrics_csv(std::ostream& out, const MetricsLog& log) {
    out << "round,msd_linear,msd_db,mean_victim_target_dist,mean_attacker_precision\n";
    for (const auto& r : log.rounds) {
        out << r.round << ',' << num(r.msd) << ',' << num(to_db(r.msd)) << ','
            << num(r.victim_distance) << ',' << num(r.attacker_precision) << '\n';
    }
}

void write_agents_csv(std::ostream& out, const MetricsLog& log) {
    const std::size_t dim =
        log.estimates.empty() || log.estimates[0].empty()
            ? 0
            : static_cast<std::size_t>(log.estimates[0][0].size());
    out << "round,agent,err_sq";
    for (std::size_t m = 1; m <= dim; ++m) {
        out << ",w_" << m;
    }
    out << '\n';
    for (std::size_t j = 0; j < log.logged_rounds.size(); ++j) {
        for (std::size_t k = 0; k < log.estimates.size(); ++k) {
            out << log.logged_rounds[j] << ',' << k << ',' << num(log.err_sq[k][j]);
            for (Eigen::Index m = 0; m < log.estimates[k][j].size(); ++m) {
                out << ',' << num(log.estimates[k][j](m));
            }
            out << '\n';
        }
    }
}

nlohmann::json summarize(const ScenarioConfig& cfg, const SimulationResult& result) {
    using nlohmann::json;
    const auto& setup = result.setup;
    const auto& log = result.metrics;
    const auto normals = setup.topology.normal_agents();

    std::vector<double> noise;
    for (AgentId k : normals) {
        noise.push_back(setup.noise_var[k]);
    }
    const double msd = steady_state_msd(log, cfg.steady_window);

    json j;
    j["seed"] = *cfg.seed;
    j["algorithm"] = to_string(cfg.algorithm);
    j["attack"] = to_string(cfg.attack.kind);
    j["rounds"] = cfg.rounds;
    j["n_agents"] = setup.topology.size();
    j["msd_db"] = {{std::string(to_string(cfg.algorithm)), to_db(msd)}};
    j["msd_linear"] = msd;
    j["theory"] = {
        {"msd_noncoop_db", to_db(msd_noncooperative(cfg.mu, cfg.dim, noise))},
        {"msd_diffusion_db", to_db(msd_diffusion(cfg.mu, cfg.dim, noise))},
    };

    // First round whose trailing-window mean distance to the true target
    // falls below the threshold; null if it never does.
    json conv = json::object();
    const Round win = cfg.convergence_window;
    for (AgentId k : normals) {
        const auto& rounds = log.logged_rounds;
        std::vector<double> dist(rounds.size());
        for (std::size_t m = 0; m < rounds.size(); ++m) {
            dist[m] = std::sqrt(log.err_sq[k][m]);
        }
        json hit = nullptr;
        double sum = 0.0;
        std::size_t lo = 0;
        for (std::size_t m = 0; m < rounds.size(); ++m) {
            sum += dist[m];
            while (rounds[lo] <= rounds[m] - win) {
                sum -= dist[lo++];
            }
            if (rounds[m] + 1 >= win && sum / static_cast<double>(m - lo + 1) <
                                            cfg.convergence_threshold) {
                hit = rounds[m];
                break;
            }
        }
        conv[std::to_string(k)] = hit;
    }
    j["convergence_round"] = conv;

    json success = json::array();
    for (AgentId v : setup.victims) {
        const double d = trailing_mean_distance(
            log, v, win, [&](Round i) { return attack_target_at(cfg, i); });
        success.push_back({{"victim", v},
                           {"attackers", setup.attackers_of.at(v)},
                           {"trailing_distance", d},
                           {"captured", d < cfg.convergence_threshold}});
    }
    j["attack_success"] = success;
    j["compromised"] = setup.topology.compromised();
    j["pruned_attack_links"] = pruned_attack_links(log);
    if (cfg.algorithm == Algorithm::rdlmsaw) {
        j["final_F"] = log.final_F;
    }
    return j;
}

}  // namespace dlms
