#pragma once

#include "dlms/common.hpp"

#include <json.hpp>

#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace dlms {

using Edge = std::pair<AgentId, AgentId>;

/// Undirected agent graph. Neighborhoods are self-inclusive and sorted.
/// Immutable after construction; use the with_* helpers to derive variants.
class Topology {
public:
    Topology() = default;
    explicit Topology(std::size_t n_agents);
    Topology(std::size_t n_agents, const std::vector<Edge>& edges,
             const std::set<AgentId>& compromised = {});

    std::size_t size() const { return adjacency_.size(); }

    /// N_k: every l adjacent to k, plus k itself, ascending.
    const std::vector<AgentId>& neighbors(AgentId k) const;
    bool has_edge(AgentId a, AgentId b) const;
    std::size_t degree(AgentId k) const { return neighbors(k).size() - 1; }
    std::size_t max_degree() const;

    /// Edges as (low, high) pairs in ascending order.
    std::vector<Edge> edges() const;
    std::size_t edge_count() const;

    const std::set<AgentId>& compromised() const { return compromised_; }
    bool is_compromised(AgentId k) const { return compromised_.contains(k); }
    std::vector<AgentId> normal_agents() const;

    bool connected() const;

    Topology with_compromised(const std::set<AgentId>& compromised) const;
    Topology without_edges(const std::vector<Edge>& removed) const;

    bool operator==(const Topology&) const = default;

private:
    void check_agent(AgentId k) const;

    std::vector<std::vector<AgentId>> adjacency_;
    std::set<AgentId> compromised_;
};

struct DominatingSet {
    std::set<AgentId> members;
};

/// True iff every agent outside `set` has a graph neighbor inside it.
bool is_dominating_set(const Topology& t, const std::set<AgentId>& set);

/// Greedy cover: repeatedly take the agent that covers the most uncovered
/// agents (itself plus neighbors), lowest id on ties.
DominatingSet greedy_min_dominating_set(const Topology& t);

/// a_{lk} keyed by (l, k): the weight receiver k assigns to sender l.
using DirectedWeights = std::map<Edge, double>;

/// Removes {k,l} iff a_{lk} < threshold and a_{kl} < threshold.
Topology prune_links(const Topology& t, const DirectedWeights& weights, double threshold = 0.01);

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct GeometricGraph {
    Topology topology;
    std::vector<Point2> positions;
};

/// Random geometric graph on the unit square; redrawn until connected.
/// A nonzero gap leaves the vertical band of that width around x = 0.5
/// empty and puts ceil(n/2) agents left of it, giving two spatial clusters
/// joined only by links across the band.
GeometricGraph random_geometric_graph(std::size_t n_agents, double radius, std::mt19937_64& rng,
                                      int max_tries = 10000, double gap = 0.0);

nlohmann::json topology_to_json(const Topology& t);
Topology topology_from_json(const nlohmann::json& j);

}  // namespace dlms
