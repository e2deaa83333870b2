#pragma once

#include "dlms/common.hpp"
#include "dlms/diffusion.hpp"
#include "dlms/network.hpp"

#include <functional>
#include <map>
#include <random>
#include <set>
#include <span>
#include <vector>

namespace dlms {

/// Attacker-selected state w^a_{k,i} = base + θ_i. A stationary trajectory
/// has no θ.
struct TargetTrajectory {
    Vector base;
    std::function<Vector(Round)> theta;
    std::function<Vector(Round)> delta_theta;  // θ_{i+1} − θ_i

    static TargetTrajectory stationary(Vector base);
    /// θ_i = amplitude · [cos 2πωi, sin 2πωi] on the first two coordinates.
    static TargetTrajectory circular(Vector base, double amplitude, double omega);

    bool is_stationary() const { return !theta; }
    Vector theta_at(Round i) const;
    Vector delta_at(Round i) const;
    Vector at(Round i) const { return base + theta_at(i); }
};

struct AttackTarget {
    TargetTrajectory trajectory;
    double r = 0.002;
    /// Adds Δθ_{i−1}/r to the steering point so the victim tracks θ_i
    /// instead of lagging behind it.
    bool compensate = true;
};

struct StrongAttacker {
    AgentId node = 0;
    std::map<AgentId, AttackTarget> targets;
    Round start_round = 0;
    /// Strict mode: skip the step (r = 0) in rounds where
    /// ‖r(w − x)‖ > strict_ratio · min_l ‖ψ_l − w‖.
    bool strict = false;
    double strict_ratio = 0.1;
};

struct WeakAttacker {
    AgentId node = 0;
    double mu_A = 0.002;
    std::map<AgentId, AttackTarget> targets;
    Round start_round = 0;
    std::map<AgentId, WeightRow> A_hat;       // estimated a_{lk} over N_k, per victim
    std::map<AgentId, PsiMap> psi_history;    // Ψ_{k,i−1}: last round's inbox of each victim
    std::size_t reinit_count = 0;
};

/// Exact w_{k,i−1} from ψ_{k,i} and the victim's sample and step size.
Vector recover_state(const Vector& psi_k, const StreamSample& sample, double mu_k);

/// Steering point x_i for round i.
Vector attack_point(const AttackTarget& target, Round i);

/// w − r (w − x_i).
Vector steer(const Vector& w_prev, double r, const Vector& x);

/// ψ_{a,i} for `victim`. `others` are the ψ the victim receives from its
/// other neighbors this round; only consulted in strict mode.
Vector craft_strong_message(const StrongAttacker& att, AgentId victim, const Vector& w_prev,
                            Round i, std::span<const Vector> others = {});

/// Rounds until (1 − r)^i ≤ ε.
Round attack_convergence_time(double r, double epsilon);

/// Clip negatives to zero, then divide by the sum. Returns false (and leaves
/// the row untouched) if nothing positive survives the clip.
bool clip_and_normalize(std::vector<double>& row);

WeightRow uniform_weight_row(const std::vector<AgentId>& neighborhood);
WeightRow random_weight_row(const std::vector<AgentId>& neighborhood, std::mt19937_64& rng);

/// One SGD step on ‖ψ_{k,i} − Â Ψ_{k,i−1}‖² followed by clip/normalize.
/// Falls back to uniform (and sets *reinitialized) if the clip zeroes the row.
WeightRow sgd_weight_step(const WeightRow& a_hat, const PsiMap& psi_prev,
                          const Vector& psi_victim_now, double mu_A,
                          bool* reinitialized = nullptr);

const WeightRow& weak_update_weights(WeakAttacker& att, AgentId victim, const PsiMap& psi_prev,
                                     const Vector& psi_victim_now);

/// ŵ = Â Ψ.
Vector weak_estimate_state(const WeakAttacker& att, AgentId victim, const PsiMap& psi);

Vector craft_weak_message(const WeakAttacker& att, AgentId victim, const Vector& w_hat_prev,
                          Round i);

/// Nodes to compromise so every normal agent borders an attacker.
std::set<AgentId> plan_network_attack(const Topology& t);

}  // namespace dlms
