#include "dlms/resilient.hpp"

#include <limits>
#include <string>

namespace dlms {

CostWindow::CostWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        throw Error(Errc::config, "cost window capacity must be positive");
    }
}

void CostWindow::push(const StreamSample& sample) {
    if (!u_.empty() && u_.front().size() != sample.u.size()) {
        throw Error(Errc::shape, "regressor dimension changed inside the cost window");
    }
    d_.push_back(sample.d);
    u_.push_back(sample.u);
    if (d_.size() > capacity_) {
        d_.pop_front();
        u_.pop_front();
    }
}

double CostWindow::cost(const Vector& psi) const {
    if (d_.empty()) {
        throw Error(Errc::empty_window, "cost window holds no samples");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < d_.size(); ++j) {
        if (u_[j].size() != psi.size()) {
            throw Error(Errc::shape, "message and regressor dimensions differ");
        }
        const double e = d_[j] - u_[j].dot(psi);
        sum += e * e;
    }
    return sum / static_cast<double>(d_.size());
}

double window_cost(const CostWindow& window, const Vector& psi) { return window.cost(psi); }

double removal_objective(const GammaMap& gamma_sq, const CostMap& costs,
                         std::span<const AgentId> kept) {
    if (kept.empty()) {
        throw Error(Errc::empty_set, "kept set is empty");
    }
    double num = 0.0;
    double den = 0.0;
    for (AgentId l : kept) {
        const double* g = gamma_sq.find(l);
        const double* j = costs.find(l);
        if (g == nullptr || j == nullptr) {
            throw Error(Errc::invalid_neighbor, "no gamma/cost for agent " + std::to_string(l));
        }
        const double inv2 = 1.0 / std::max(*g, kGammaFloor);
        num += inv2 * inv2 * *j;
        den += inv2;
    }
    return num / (den * den);
}

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::size_t out = 1;
    for (std::size_t j = 1; j <= k; ++j) {
        // Exact at every step: out * (n - k + j) is divisible by j.
        if (out > std::numeric_limits<std::size_t>::max() / (n - k + j)) {
            return std::numeric_limits<std::size_t>::max();
        }
        out = out * (n - k + j) / j;
    }
    return out;
}

namespace {

WeightRow expand_weights(const GammaMap& gamma_sq, const std::vector<AgentId>& kept) {
    GammaMap kept_gamma;
    kept_gamma.ids = kept;
    kept_gamma.values.reserve(kept.size());
    for (AgentId l : kept) {
        kept_gamma.values.push_back(*gamma_sq.find(l));
    }
    const WeightRow partial = adaptive_weights(kept_gamma);
    WeightRow full(gamma_sq.ids, std::vector<double>(gamma_sq.size(), 0.0));
    for (std::size_t j = 0; j < partial.size(); ++j) {
        *full.find(partial.ids[j]) = partial.values[j];
    }
    return full;
}

}  // namespace

RemovalSelection select_removal_set(const GammaMap& gamma_sq, const CostMap& costs, std::size_t F,
                                    AgentId self, std::size_t max_subsets) {
    if (gamma_sq.find(self) == nullptr) {
        throw Error(Errc::invalid_neighbor, "agent is missing from its own neighborhood");
    }
    std::vector<AgentId> others;
    for (AgentId l : gamma_sq.ids) {
        if (l != self) {
            others.push_back(l);
        }
    }

    RemovalSelection best;
    if (F >= others.size()) {
        best.discarded = others;
        const std::vector<AgentId> kept{self};
        best.weights = expand_weights(gamma_sq, kept);
        best.objective = removal_objective(gamma_sq, costs, kept);
        return best;
    }

    const std::size_t count = binomial(others.size(), F);
    if (count > max_subsets) {
        throw Error(Errc::combinatorial_guard,
                    "C(" + std::to_string(others.size()) + "," + std::to_string(F) + ") = " +
                        std::to_string(count) + " removal sets exceeds limit " +
                        std::to_string(max_subsets));
    }

    // Lexicographic walk over index combinations; strict < keeps the first
    // (smallest) discarded set among ties.
    std::vector<std::size_t> idx(F);
    for (std::size_t j = 0; j < F; ++j) {
        idx[j] = j;
    }
    std::vector<AgentId> kept;
    std::vector<AgentId> best_kept;
    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<bool> dropped(others.size());
    while (true) {
        std::fill(dropped.begin(), dropped.end(), false);
        for (std::size_t j : idx) {
            dropped[j] = true;
        }
        kept.clear();
        for (AgentId l : gamma_sq.ids) {
            if (l == self) {
                kept.push_back(l);
                continue;
            }
            auto pos = static_cast<std::size_t>(
                std::lower_bound(others.begin(), others.end(), l) - others.begin());
            if (!dropped[pos]) {
                kept.push_back(l);
            }
        }
        const double obj = removal_objective(gamma_sq, costs, kept);
        if (obj < best_obj || best_kept.empty()) {
            best_obj = obj;
            best_kept = kept;
            best.discarded.clear();
            for (std::size_t j : idx) {
                best.discarded.push_back(others[j]);
            }
        }
        // Advance to the next combination.
        std::size_t j = F;
        while (j > 0 && idx[j - 1] == others.size() - F + (j - 1)) {
            --j;
        }
        if (j == 0) {
            break;
        }
        ++idx[j - 1];
        for (std::size_t m = j; m < F; ++m) {
            idx[m] = idx[m - 1] + 1;
        }
    }
    best.weights = expand_weights(gamma_sq, best_kept);
    best.objective = best_obj;
    return best;
}

WeightRow rdlmsaw_step(AgentState& state, CostWindow& window, const StreamSample& sample,
                       const MessageBoard& board, std::size_t F, const ResilientParams& params) {
    const PsiMap psis = board.inbox(state.id);
    const Vector w_prev = state.w;
    for (std::size_t j = 0; j < psis.size(); ++j) {
        update_gamma(state, psis.ids[j], psis.values[j], w_prev);
    }
    window.push(sample);

    WeightRow weights;
    if (F == 0 || (window.size() < params.warmup && F < psis.size() - 1)) {
        weights = adaptive_weights(state.gamma_sq);
    } else {
        CostMap costs(psis.ids, std::vector<double>(psis.size()));
        for (std::size_t j = 0; j < psis.size(); ++j) {
            costs.values[j] = window.cost(psis.values[j]);
        }
        weights = select_removal_set(state.gamma_sq, costs, F, state.id, params.max_subsets).weights;
    }
    state.w = combine(weights, psis);
    return weights;
}

std::vector<WeightRow> rdlmsaw_round(std::span<AgentState> states, std::span<CostWindow> windows,
                                     std::span<const StreamSample> samples,
                                     const MessageBoard& board, std::span<const std::size_t> F,
                                     const ResilientParams& params) {
    if (windows.size() != states.size() || samples.size() != states.size() ||
        F.size() != states.size()) {
        throw Error(Errc::shape, "per-agent inputs are not aligned");
    }
    std::vector<WeightRow> out;
    out.reserve(states.size());
    for (std::size_t j = 0; j < states.size(); ++j) {
        out.push_back(rdlmsaw_step(states[j], windows[j], samples[j], board, F[j], params));
    }
    return out;
}

FSelector::FSelector(std::size_t dim, double mu, std::size_t max_F, FSelectParams params)
    : mu_(mu),
      max_F_(max_F),
      params_(params),
      w_ncop_(Vector::Zero(static_cast<Eigen::Index>(dim))) {
    if (params_.epoch <= 0) {
        throw Error(Errc::config, "F selection epoch must be positive");
    }
}

bool FSelector::observe(const CostWindow& window, const StreamSample& sample,
                        const Vector& w_coop) {
    w_ncop_ = lms_adapt(w_ncop_, mu_, sample);
    coop_sum_ += window.cost(w_coop);
    ncop_sum_ += window.cost(w_ncop_);
    if (++in_epoch_ < params_.epoch) {
        return false;
    }
    const bool raise = coop_sum_ > (1.0 + params_.margin) * ncop_sum_ && F_ < max_F_;
    coop_sum_ = 0.0;
    ncop_sum_ = 0.0;
    in_epoch_ = 0;
    if (raise) {
        ++F_;
    }
    return raise;
}

}  // namespace dlms
