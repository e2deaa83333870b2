#pragma once

#include "dlms/common.hpp"
#include "dlms/diffusion.hpp"

#include <deque>
#include <span>
#include <vector>

namespace dlms {

/// FIFO of the agent's most recent (d, u) samples.
class CostWindow {
public:
    explicit CostWindow(std::size_t capacity = 100);

    void push(const StreamSample& sample);
    std::size_t size() const { return d_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return d_.empty(); }

    /// Mean of (d − u ψ)² over the buffered samples.
    double cost(const Vector& psi) const;

private:
    std::size_t capacity_;
    std::deque<double> d_;
    std::deque<Vector> u_;
};

double window_cost(const CostWindow& window, const Vector& psi);

using CostMap = NeighborMap<double>;

/// Σ_{l∈kept} γ⁻⁴_l J_l / (Σ_{m∈kept} γ⁻²_m)², γ² floored like adaptive_weights.
double removal_objective(const GammaMap& gamma_sq, const CostMap& costs,
                         std::span<const AgentId> kept);

struct RemovalSelection {
    std::vector<AgentId> discarded;  // ascending
    WeightRow weights;               // over all of N_k; zero on discarded ids
    double objective = 0.0;
};

std::size_t binomial(std::size_t n, std::size_t k);

/// Tries every size-F subset of N_k \ {self} (the agent itself is never
/// discarded) and keeps the one minimizing removal_objective on what
/// remains; ties go to the lexicographically smallest discarded set.
/// F beyond the neighbor count keeps only the agent itself.
RemovalSelection select_removal_set(const GammaMap& gamma_sq, const CostMap& costs, std::size_t F,
                                    AgentId self, std::size_t max_subsets = 100000);

struct ResilientParams {
    std::size_t window = 100;
    /// Below this many buffered samples the agent combines like DLMSAW.
    std::size_t warmup = 10;
    std::size_t max_subsets = 100000;
};

/// One R-DLMSAW combine for `state`. `sample` is the agent's own sample of
/// this round; it is pushed into `window` before costs are evaluated.
WeightRow rdlmsaw_step(AgentState& state, CostWindow& window, const StreamSample& sample,
                       const MessageBoard& board, std::size_t F, const ResilientParams& params = {});

/// rdlmsaw_step over all agents; F and windows are aligned with states.
std::vector<WeightRow> rdlmsaw_round(std::span<AgentState> states, std::span<CostWindow> windows,
                                     std::span<const StreamSample> samples,
                                     const MessageBoard& board, std::span<const std::size_t> F,
                                     const ResilientParams& params = {});

struct FSelectParams {
    Round epoch = 500;
    /// F grows only if the cooperative cost beats the noncooperative one by
    /// more than this relative margin.
    double margin = 0.05;
};

/// Per-agent F heuristic: keep a noncooperative LMS estimate alongside the
/// cooperative one, compare their window costs averaged over each epoch,
/// and raise F by one whenever cooperation costs more.
class FSelector {
public:
    FSelector(std::size_t dim, double mu, std::size_t max_F, FSelectParams params = {});

    /// Call once per round after the cooperative estimate is updated.
    /// Returns true if F changed.
    bool observe(const CostWindow& window, const StreamSample& sample, const Vector& w_coop);

    std::size_t F() const { return F_; }
    const Vector& w_noncoop() const { return w_ncop_; }

private:
    double mu_;
    std::size_t max_F_;
    FSelectParams params_;
    std::size_t F_ = 0;
    Vector w_ncop_;
    double coop_sum_ = 0.0;
    double ncop_sum_ = 0.0;
    Round in_epoch_ = 0;
};

}  // namespace dlms
