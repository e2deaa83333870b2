#include "dlms/attack.hpp"

#include <limits>
#include <numbers>
#include <string>

namespace dlms {

namespace {

const AttackTarget& target_for(const std::map<AgentId, AttackTarget>& targets, AgentId victim) {
    auto it = targets.find(victim);
    if (it == targets.end()) {
        throw Error(Errc::not_a_target, "agent " + std::to_string(victim) + " is not targeted");
    }
    return it->second;
}

}  // namespace

TargetTrajectory TargetTrajectory::stationary(Vector base) {
    TargetTrajectory t;
    t.base = std::move(base);
    return t;
}

TargetTrajectory TargetTrajectory::circular(Vector base, double amplitude, double omega) {
    if (base.size() < 2) {
        throw Error(Errc::shape, "circular trajectory needs at least two coordinates");
    }
    TargetTrajectory t;
    const auto dim = base.size();
    t.base = std::move(base);
    auto theta = [dim, amplitude, omega](Round i) {
        const double phase = 2.0 * std::numbers::pi * omega * static_cast<double>(i);
        Vector v = Vector::Zero(dim);
        v(0) = amplitude * std::cos(phase);
        v(1) = amplitude * std::sin(phase);
        return v;
    };
    t.theta = theta;
    t.delta_theta = [theta](Round i) -> Vector { return theta(i + 1) - theta(i); };
    return t;
}

Vector TargetTrajectory::theta_at(Round i) const {
    return theta ? theta(i) : Vector(Vector::Zero(base.size()));
}

Vector TargetTrajectory::delta_at(Round i) const {
    return delta_theta ? delta_theta(i) : Vector(Vector::Zero(base.size()));
}

Vector recover_state(const Vector& psi_k, const StreamSample& sample, double mu_k) {
    if (psi_k.size() != sample.u.size()) {
        throw Error(Errc::shape, "regressor and message dimensions differ");
    }
    const double denom = 1.0 - mu_k * sample.u.squaredNorm();
    if (std::abs(denom) < 1e-12) {
        throw Error(Errc::singular_recovery, "1 - mu*|u|^2 vanishes; state not recoverable");
    }
    const double err = (sample.d - sample.u.dot(psi_k)) / denom;
    return psi_k - (mu_k * err) * sample.u;
}

Vector attack_point(const AttackTarget& target, Round i) {
    const auto& traj = target.trajectory;
    if (traj.is_stationary()) {
        return traj.base;
    }
    Vector x = traj.base + traj.theta_at(i - 1);
    if (target.compensate && target.r > 0.0) {
        x += traj.delta_at(i - 1) / target.r;
    }
    return x;
}

Vector steer(const Vector& w_prev, double r, const Vector& x) {
    if (w_prev.size() != x.size()) {
        throw Error(Errc::shape, "estimate and target dimensions differ");
    }
    return w_prev - r * (w_prev - x);
}

Vector craft_strong_message(const StrongAttacker& att, AgentId victim, const Vector& w_prev,
                            Round i, std::span<const Vector> others) {
    const AttackTarget& target = target_for(att.targets, victim);
    const Vector x = attack_point(target, i);
    if (att.strict && !others.empty()) {
        double closest = std::numeric_limits<double>::infinity();
        for (const Vector& psi : others) {
            closest = std::min(closest, (psi - w_prev).norm());
        }
        if (target.r * (w_prev - x).norm() > att.strict_ratio * closest) {
            return w_prev;
        }
    }
    return steer(w_prev, target.r, x);
}

Round attack_convergence_time(double r, double epsilon) {
    if (!(r > 0.0 && r < 1.0) || !(epsilon > 0.0 && epsilon < 1.0)) {
        throw Error(Errc::domain, "need 0 < r < 1 and 0 < epsilon < 1");
    }
    const double exact = std::log(epsilon) / std::log1p(-r);
    // Guard against 1.9999999 style round-off before taking the ceiling.
    const double nearest = std::round(exact);
    if (std::abs(exact - nearest) < 1e-9) {
        return static_cast<Round>(nearest);
    }
    return static_cast<Round>(std::ceil(exact));
}

bool clip_and_normalize(std::vector<double>& row) {
    std::vector<double> clipped(row.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        clipped[j] = std::max(row[j], 0.0);
        sum += clipped[j];
    }
    if (!(sum > 0.0)) {
        return false;
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
        row[j] = clipped[j] / sum;
    }
    return true;
}

WeightRow uniform_weight_row(const std::vector<AgentId>& neighborhood) {
    if (neighborhood.empty()) {
        throw Error(Errc::no_neighbors, "empty neighborhood");
    }
    const double a = 1.0 / static_cast<double>(neighborhood.size());
    return WeightRow(neighborhood, std::vector<double>(neighborhood.size(), a));
}

WeightRow random_weight_row(const std::vector<AgentId>& neighborhood, std::mt19937_64& rng) {
    if (neighborhood.empty()) {
        throw Error(Errc::no_neighbors, "empty neighborhood");
    }
    // Normalized exponentials are uniform on the simplex.
    std::exponential_distribution<double> exp1(1.0);
    std::vector<double> row(neighborhood.size());
    for (double& a : row) {
        a = exp1(rng);
    }
    clip_and_normalize(row);
    return WeightRow(neighborhood, std::move(row));
}

WeightRow sgd_weight_step(const WeightRow& a_hat, const PsiMap& psi_prev,
                          const Vector& psi_victim_now, double mu_A, bool* reinitialized) {
    if (reinitialized != nullptr) {
        *reinitialized = false;
    }
    std::vector<const Vector*> rows(a_hat.size());
    for (std::size_t j = 0; j < a_hat.size(); ++j) {
        rows[j] = psi_prev.find(a_hat.ids[j]);
        if (rows[j] == nullptr) {
            throw Error(Errc::incomplete_messages,
                        "no previous message from agent " + std::to_string(a_hat.ids[j]));
        }
        if (rows[j]->size() != psi_victim_now.size()) {
            throw Error(Errc::shape, "message dimensions differ");
        }
    }
    // residual = ψ_k − Â Ψ (1×M); gradient row = residual Ψᵀ (1×|N_k|).
    Vector residual = psi_victim_now;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        residual -= a_hat.values[j] * *rows[j];
    }
    std::vector<double> next(a_hat.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
        next[j] = a_hat.values[j] + mu_A * residual.dot(*rows[j]);
    }
    if (!clip_and_normalize(next)) {
        if (reinitialized != nullptr) {
            *reinitialized = true;
        }
        return uniform_weight_row(a_hat.ids);
    }
    return WeightRow(a_hat.ids, std::move(next));
}

const WeightRow& weak_update_weights(WeakAttacker& att, AgentId victim, const PsiMap& psi_prev,
                                     const Vector& psi_victim_now) {
    target_for(att.targets, victim);
    auto it = att.A_hat.find(victim);
    if (it == att.A_hat.end()) {
        it = att.A_hat.emplace(victim, uniform_weight_row(psi_prev.ids)).first;
    }
    bool reinit = false;
    it->second = sgd_weight_step(it->second, psi_prev, psi_victim_now, att.mu_A, &reinit);
    if (reinit) {
        ++att.reinit_count;
    }
    return it->second;
}

Vector weak_estimate_state(const WeakAttacker& att, AgentId victim, const PsiMap& psi) {
    auto it = att.A_hat.find(victim);
    if (it == att.A_hat.end()) {
        throw Error(Errc::not_a_target, "no weight estimate for agent " + std::to_string(victim));
    }
    for (AgentId l : it->second.ids) {
        if (psi.find(l) == nullptr) {
            throw Error(Errc::incomplete_messages, "no message from agent " + std::to_string(l));
        }
    }
    return combine(it->second, psi);
}

Vector craft_weak_message(const WeakAttacker& att, AgentId victim, const Vector& w_hat_prev,
                          Round i) {
    const AttackTarget& target = target_for(att.targets, victim);
    return steer(w_hat_prev, target.r, attack_point(target, i));
}

std::set<AgentId> plan_network_attack(const Topology& t) {
    return greedy_min_dominating_set(t).members;
}

}  // namespace dlms
