#include "dlms/network.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace dlms {

std::string_view to_string(Errc code) {
    switch (code) {
    case Errc::invalid_agent: return "invalid-agent";
    case Errc::invalid_neighbor: return "invalid-neighbor";
    case Errc::shape: return "shape";
    case Errc::no_neighbors: return "no-neighbors";
    case Errc::incomplete_messages: return "incomplete-messages";
    case Errc::incomplete_weights: return "incomplete-weights";
    case Errc::empty_input: return "empty-input";
    case Errc::singular_recovery: return "singular-recovery";
    case Errc::not_a_target: return "not-a-target";
    case Errc::domain: return "domain";
    case Errc::empty_window: return "empty-window";
    case Errc::empty_set: return "empty-set";
    case Errc::config: return "config";
    case Errc::combinatorial_guard: return "combinatorial-guard";
    case Errc::io: return "io";
    }
    return "unknown";
}

Topology::Topology(std::size_t n_agents) : adjacency_(n_agents) {
    for (AgentId k = 0; k < n_agents; ++k) {
        adjacency_[k].push_back(k);
    }
}

Topology::Topology(std::size_t n_agents, const std::vector<Edge>& edges,
                   const std::set<AgentId>& compromised)
    : Topology(n_agents) {
    for (auto [a, b] : edges) {
        check_agent(a);
        check_agent(b);
        if (a == b) {
            throw Error(Errc::invalid_agent, "self-loop on agent " + std::to_string(a));
        }
        auto& na = adjacency_[a];
        if (std::find(na.begin(), na.end(), b) == na.end()) {
            na.push_back(b);
            adjacency_[b].push_back(a);
        }
    }
    for (auto& n : adjacency_) {
        std::sort(n.begin(), n.end());
    }
    for (AgentId c : compromised) {
        check_agent(c);
    }
    compromised_ = compromised;
}

void Topology::check_agent(AgentId k) const {
    if (k >= adjacency_.size()) {
        throw Error(Errc::invalid_agent, "agent " + std::to_string(k) + " out of range (n_agents=" +
                                             std::to_string(adjacency_.size()) + ")");
    }
}

const std::vector<AgentId>& Topology::neighbors(AgentId k) const {
    check_agent(k);
    return adjacency_[k];
}

bool Topology::has_edge(AgentId a, AgentId b) const {
    if (a == b) {
        return false;
    }
    const auto& n = neighbors(a);
    return std::binary_search(n.begin(), n.end(), b);
}

std::size_t Topology::max_degree() const {
    std::size_t d = 0;
    for (AgentId k = 0; k < size(); ++k) {
        d = std::max(d, degree(k));
    }
    return d;
}

std::vector<Edge> Topology::edges() const {
    std::vector<Edge> out;
    for (AgentId a = 0; a < size(); ++a) {
        for (AgentId b : adjacency_[a]) {
            if (a < b) {
                out.emplace_back(a, b);
            }
        }
    }
    return out;
}

std::size_t Topology::edge_count() const {
    std::size_t twice = 0;
    for (const auto& n : adjacency_) {
        twice += n.size() - 1;
    }
    return twice / 2;
}

std::vector<AgentId> Topology::normal_agents() const {
    std::vector<AgentId> out;
    for (AgentId k = 0; k < size(); ++k) {
        if (!is_compromised(k)) {
            out.push_back(k);
        }
    }
    return out;
}

bool Topology::connected() const {
    if (size() == 0) {
        return true;
    }
    std::vector<bool> seen(size(), false);
    std::queue<AgentId> q;
    q.push(0);
    seen[0] = true;
    std::size_t count = 1;
    while (!q.empty()) {
        AgentId k = q.front();
        q.pop();
        for (AgentId l : adjacency_[k]) {
            if (!seen[l]) {
                seen[l] = true;
                ++count;
                q.push(l);
            }
        }
    }
    return count == size();
}

Topology Topology::with_compromised(const std::set<AgentId>& compromised) const {
    return Topology(size(), edges(), compromised);
}

Topology Topology::without_edges(const std::vector<Edge>& removed) const {
    std::set<Edge> drop;
    for (auto [a, b] : removed) {
        drop.emplace(std::min(a, b), std::max(a, b));
    }
    std::vector<Edge> kept;
    for (const Edge& e : edges()) {
        if (!drop.contains(e)) {
            kept.push_back(e);
        }
    }
    return Topology(size(), kept, compromised_);
}

bool is_dominating_set(const Topology& t, const std::set<AgentId>& set) {
    std::vector<bool> covered(t.size(), false);
    for (AgentId m : set) {
        for (AgentId l : t.neighbors(m)) {
            covered[l] = true;
        }
    }
    return std::all_of(covered.begin(), covered.end(), [](bool c) { return c; });
}

DominatingSet greedy_min_dominating_set(const Topology& t) {
    DominatingSet out;
    std::vector<bool> covered(t.size(), false);
    std::size_t remaining = t.size();
    while (remaining > 0) {
        AgentId best = 0;
        std::size_t best_gain = 0;
        for (AgentId k = 0; k < t.size(); ++k) {
            std::size_t gain = 0;
            for (AgentId l : t.neighbors(k)) {
                gain += covered[l] ? 0 : 1;
            }
            if (gain > best_gain) {
                best_gain = gain;
                best = k;
            }
        }
        out.members.insert(best);
        for (AgentId l : t.neighbors(best)) {
            if (!covered[l]) {
                covered[l] = true;
                --remaining;
            }
        }
    }
    return out;
}

Topology prune_links(const Topology& t, const DirectedWeights& weights, double threshold) {
    std::vector<Edge> removed;
    for (auto [k, l] : t.edges()) {
        auto lk = weights.find({l, k});
        auto kl = weights.find({k, l});
        if (lk == weights.end() || kl == weights.end()) {
            throw Error(Errc::incomplete_weights, "missing weight on edge {" + std::to_string(k) +
                                                      "," + std::to_string(l) + "}");
        }
        if (lk->second < threshold && kl->second < threshold) {
            removed.emplace_back(k, l);
        }
    }
    return t.without_edges(removed);
}

GeometricGraph random_geometric_graph(std::size_t n_agents, double radius, std::mt19937_64& rng,
                                      int max_tries, double gap) {
    if (n_agents == 0 || radius <= 0.0) {
        throw Error(Errc::config, "geometric graph needs n_agents > 0 and radius > 0");
    }
    if (!(gap >= 0.0 && gap < 1.0)) {
        throw Error(Errc::config, "geometric graph gap must lie in [0, 1)");
    }
    const double half = (1.0 - gap) / 2.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r2 = radius * radius;
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        std::vector<Point2> pos(n_agents);
        for (AgentId k = 0; k < n_agents; ++k) {
            if (gap > 0.0) {
                // Balanced clusters, so the x-median falls inside the gap.
                pos[k].x = unit(rng) * half;
                if (k >= (n_agents + 1) / 2) {
                    pos[k].x += half + gap;
                }
            } else {
                pos[k].x = unit(rng);
            }
            pos[k].y = unit(rng);
        }
        std::vector<Edge> edges;
        for (AgentId a = 0; a < n_agents; ++a) {
            for (AgentId b = a + 1; b < n_agents; ++b) {
                double dx = pos[a].x - pos[b].x;
                double dy = pos[a].y - pos[b].y;
                if (dx * dx + dy * dy <= r2) {
                    edges.emplace_back(a, b);
                }
            }
        }
        Topology t(n_agents, edges);
        if (t.connected()) {
            return {std::move(t), std::move(pos)};
        }
    }
    throw Error(Errc::config, "no connected geometric graph after " + std::to_string(max_tries) +
                                  " draws; increase radius");
}

nlohmann::json topology_to_json(const Topology& t) {
    nlohmann::json j;
    j["n_agents"] = t.size();
    auto edges = nlohmann::json::array();
    for (auto [a, b] : t.edges()) {
        edges.push_back({a, b});
    }
    j["edges"] = std::move(edges);
    j["compromised"] = std::vector<AgentId>(t.compromised().begin(), t.compromised().end());
    return j;
}

Topology topology_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object()) {
            throw Error(Errc::config, "graph must be a JSON object");
        }
        for (const auto& [key, _] : j.items()) {
            if (key != "n_agents" && key != "edges" && key != "compromised") {
                throw Error(Errc::config, "unknown graph field '" + key + "'");
            }
        }
        auto n = j.at("n_agents").get<std::int64_t>();
        if (n <= 0) {
            throw Error(Errc::config, "n_agents must be positive");
        }
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) {
                throw Error(Errc::config, "edge entries must be [a, b] pairs");
            }
            edges.emplace_back(e[0].get<AgentId>(), e[1].get<AgentId>());
        }
        std::set<AgentId> compromised;
        if (j.contains("compromised")) {
            for (const auto& c : j.at("compromised")) {
                compromised.insert(c.get<AgentId>());
            }
        }
        return Topology(static_cast<std::size_t>(n), edges, compromised);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::config, std::string("malformed graph: ") + e.what());
    }
}

}  // namespace dlms
