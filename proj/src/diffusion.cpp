#include "dlms/diffusion.hpp"

#include <numeric>
#include <string>

namespace dlms {

namespace {

void check_dims(const Vector& w, const Vector& u) {
    if (w.size() != u.size()) {
        throw Error(Errc::shape, "regressor has " + std::to_string(u.size()) +
                                     " entries, estimate has " + std::to_string(w.size()));
    }
}

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

void check_msd_inputs(double mu, std::span<const double> noise_vars) {
    if (noise_vars.empty()) {
        throw Error(Errc::empty_input, "noise variance list is empty");
    }
    if (!(mu > 0.0)) {
        throw Error(Errc::domain, "step size must be positive");
    }
}

}  // namespace

AgentState AgentState::make(AgentId id, const Topology& t, std::size_t dim, double mu, double nu) {
    AgentState s;
    s.id = id;
    s.w = Vector::Zero(static_cast<Eigen::Index>(dim));
    const auto& n = t.neighbors(id);
    s.gamma_sq = GammaMap(n, std::vector<double>(n.size(), 0.0));
    s.mu = mu;
    s.nu = nu;
    return s;
}

Vector lms_adapt(const Vector& w, double mu, const StreamSample& sample) {
    check_dims(w, sample.u);
    const double err = sample.d - sample.u.dot(w);
    return w + (mu * err) * sample.u;
}

Vector lms_adapt(const AgentState& state, const StreamSample& sample) {
    return lms_adapt(state.w, state.mu, sample);
}

double update_gamma(AgentState& state, AgentId l, const Vector& psi_l, const Vector& w_prev) {
    double* g = state.gamma_sq.find(l);
    if (g == nullptr) {
        throw Error(Errc::invalid_neighbor, "agent " + std::to_string(l) +
                                                " is not a neighbor of " + std::to_string(state.id));
    }
    check_dims(w_prev, psi_l);
    *g = (1.0 - state.nu) * *g + state.nu * (psi_l - w_prev).squaredNorm();
    return *g;
}

WeightRow adaptive_weights(const GammaMap& gamma_sq) {
    if (gamma_sq.empty()) {
        throw Error(Errc::no_neighbors, "cannot weight an empty neighborhood");
    }
    std::vector<double> inv(gamma_sq.size());
    double total = 0.0;
    for (std::size_t j = 0; j < gamma_sq.size(); ++j) {
        double g = gamma_sq.values[j];
        if (g < 0.0) {
            throw Error(Errc::domain, "negative gamma^2");
        }
        inv[j] = 1.0 / std::max(g, kGammaFloor);
        total += inv[j];
    }
    for (double& a : inv) {
        a /= total;
    }
    return WeightRow(gamma_sq.ids, std::move(inv));
}

Vector combine(const WeightRow& weights, const PsiMap& psis) {
    Vector out;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        const double a = weights.values[j];
        if (a == 0.0) {
            continue;
        }
        const Vector* psi = psis.find(weights.ids[j]);
        if (psi == nullptr) {
            throw Error(Errc::incomplete_messages,
                        "no message from agent " + std::to_string(weights.ids[j]));
        }
        if (out.size() == 0) {
            out = Vector::Zero(psi->size());
        }
        check_dims(out, *psi);
        out += a * *psi;
    }
    if (out.size() == 0) {
        throw Error(Errc::incomplete_messages, "all combination weights are zero");
    }
    return out;
}

double msd_noncooperative(double mu, std::size_t dim, std::span<const double> noise_vars) {
    check_msd_inputs(mu, noise_vars);
    return mu * static_cast<double>(dim) / 2.0 * mean_of(noise_vars);
}

double msd_diffusion(double mu, std::size_t dim, std::span<const double> noise_vars) {
    return msd_noncooperative(mu, dim, noise_vars) / static_cast<double>(noise_vars.size());
}

double msd_partitioned(double mu, std::size_t dim,
                       const std::vector<std::vector<double>>& partition) {
    std::size_t n = 0;
    for (const auto& block : partition) {
        if (block.empty()) {
            throw Error(Errc::empty_input, "partition block is empty");
        }
        n += block.size();
    }
    if (n == 0) {
        throw Error(Errc::empty_input, "partition is empty");
    }
    if (!(mu > 0.0)) {
        throw Error(Errc::domain, "step size must be positive");
    }
    double sum = 0.0;
    for (const auto& block : partition) {
        sum += std::accumulate(block.begin(), block.end(), 0.0) / static_cast<double>(block.size());
    }
    return mu * static_cast<double>(dim) / (2.0 * static_cast<double>(n)) * sum;
}

double msd_partition_delta(double mu, std::size_t dim,
                           const std::vector<std::vector<double>>& partition) {
    const double after = msd_partitioned(mu, dim, partition);
    std::size_t n = 0;
    double total = 0.0;
    for (const auto& block : partition) {
        n += block.size();
        total += std::accumulate(block.begin(), block.end(), 0.0);
    }
    const double nn = static_cast<double>(n);
    const double before = mu * static_cast<double>(dim) / 2.0 * total / (nn * nn);
    return std::max(0.0, after - before);
}

MessageBoard::MessageBoard(const Topology& topology)
    : topology_(topology), published_(topology.size()) {}

void MessageBoard::publish(AgentId sender, Vector psi) {
    if (sender >= published_.size()) {
        throw Error(Errc::invalid_agent, "sender " + std::to_string(sender) + " out of range");
    }
    published_[sender] = std::move(psi);
}

void MessageBoard::send(AgentId sender, AgentId receiver, Vector psi) {
    if (sender != receiver && !topology_.has_edge(sender, receiver)) {
        throw Error(Errc::invalid_neighbor, "no link " + std::to_string(sender) + "->" +
                                                std::to_string(receiver));
    }
    direct_[{sender, receiver}] = std::move(psi);
}

const Vector& MessageBoard::get(AgentId sender, AgentId receiver) const {
    if (auto it = direct_.find({sender, receiver}); it != direct_.end()) {
        return it->second;
    }
    return published(sender);
}

const Vector& MessageBoard::published(AgentId sender) const {
    if (sender >= published_.size() || !published_[sender]) {
        throw Error(Errc::incomplete_messages, "agent " + std::to_string(sender) +
                                                   " has not published this round");
    }
    return *published_[sender];
}

bool MessageBoard::has_override(AgentId sender, AgentId receiver) const {
    return direct_.contains({sender, receiver});
}

PsiMap MessageBoard::inbox(AgentId receiver) const {
    const auto& n = topology_.neighbors(receiver);
    std::vector<Vector> psis;
    psis.reserve(n.size());
    for (AgentId l : n) {
        psis.push_back(get(l, receiver));
    }
    return PsiMap(n, std::move(psis));
}

void MessageBoard::clear() {
    for (auto& p : published_) {
        p.reset();
    }
    direct_.clear();
}

WeightRow dlmsaw_step(AgentState& state, const MessageBoard& board) {
    const PsiMap psis = board.inbox(state.id);
    const Vector w_prev = state.w;
    for (std::size_t j = 0; j < psis.size(); ++j) {
        update_gamma(state, psis.ids[j], psis.values[j], w_prev);
    }
    WeightRow weights = adaptive_weights(state.gamma_sq);
    state.w = combine(weights, psis);
    return weights;
}

std::vector<WeightRow> dlmsaw_round(std::span<AgentState> states, const MessageBoard& board) {
    std::vector<WeightRow> out;
    out.reserve(states.size());
    for (AgentState& s : states) {
        out.push_back(dlmsaw_step(s, board));
    }
    return out;
}

}  // namespace dlms
