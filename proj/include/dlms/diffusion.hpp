#pragma once

#include "dlms/common.hpp"
#include "dlms/network.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace dlms {

/// One streaming observation d_k(i) = u_{k,i} w + v_k(i).
struct StreamSample {
    double d = 0.0;
    Vector u;
};

using GammaMap = NeighborMap<double>;
using WeightRow = NeighborMap<double>;
using PsiMap = NeighborMap<Vector>;

/// γ² entries below this are raised to it before inversion.
inline constexpr double kGammaFloor = 1e-12;

struct AgentState {
    AgentId id = 0;
    Vector w;
    GammaMap gamma_sq;  // keyed by N_k, starts at exactly 0
    double mu = 0.01;
    double nu = 0.01;

    static AgentState make(AgentId id, const Topology& t, std::size_t dim, double mu, double nu);
    std::size_t dim() const { return static_cast<std::size_t>(w.size()); }
};

/// ψ = w + μ uᵀ (d − u w).
Vector lms_adapt(const Vector& w, double mu, const StreamSample& sample);
Vector lms_adapt(const AgentState& state, const StreamSample& sample);

/// γ²_{lk} ← (1 − ν) γ²_{lk} + ν ‖ψ_l − w_prev‖². Returns the new value.
double update_gamma(AgentState& state, AgentId l, const Vector& psi_l, const Vector& w_prev);

/// Relative-variance rule: a_{lk} ∝ 1 / max(γ²_{lk}, kGammaFloor).
WeightRow adaptive_weights(const GammaMap& gamma_sq);

/// Σ_l a_{lk} ψ_l over entries with nonzero weight.
Vector combine(const WeightRow& weights, const PsiMap& psis);

// Small step-size steady-state approximations.
double msd_noncooperative(double mu, std::size_t dim, std::span<const double> noise_vars);
double msd_diffusion(double mu, std::size_t dim, std::span<const double> noise_vars);
/// Network MSD once the graph splits into the given connected blocks.
double msd_partitioned(double mu, std::size_t dim, const std::vector<std::vector<double>>& partition);
/// msd_partitioned − msd_diffusion over the union of the blocks; never negative.
double msd_partition_delta(double mu, std::size_t dim,
                           const std::vector<std::vector<double>>& partition);

/// Per-round ψ exchange. Senders publish one value for all neighbors; a
/// Byzantine sender may override it for a specific receiver.
class MessageBoard {
public:
    MessageBoard() = default;
    explicit MessageBoard(const Topology& topology);

    void publish(AgentId sender, Vector psi);
    void send(AgentId sender, AgentId receiver, Vector psi);

    const Vector& get(AgentId sender, AgentId receiver) const;
    const Vector& published(AgentId sender) const;
    bool has_override(AgentId sender, AgentId receiver) const;

    /// Everything receiver k sees this round, keyed by N_k.
    PsiMap inbox(AgentId receiver) const;

    void clear();

private:
    Topology topology_;
    std::vector<std::optional<Vector>> published_;
    std::map<Edge, Vector> direct_;  // (sender, receiver)
};

/// Combine phase for one agent: γ update against state.w (= w_{k,i−1}),
/// adaptive weights, weighted combination. Returns the weights used.
WeightRow dlmsaw_step(AgentState& state, const MessageBoard& board);

/// dlmsaw_step for every state; each reads only the board and its own state.
std::vector<WeightRow> dlmsaw_round(std::span<AgentState> states, const MessageBoard& board);

}  // namespace dlms
