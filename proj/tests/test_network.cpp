#include "dlms/network.hpp"

#include <doctest.h>

#include <random>

using namespace dlms;

namespace {

Topology path(std::size_t n) {
    std::vector<Edge> e;
    for (AgentId k = 0; k + 1 < n; ++k) {
        e.emplace_back(k, k + 1);
    }
    return Topology(n, e);
}

Topology complete(std::size_t n) {
    std::vector<Edge> e;
    for (AgentId a = 0; a < n; ++a) {
        for (AgentId b = a + 1; b < n; ++b) {
            e.emplace_back(a, b);
        }
    }
    return Topology(n, e);
}

Topology random_graph(std::size_t n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<Edge> e;
    for (AgentId a = 0; a < n; ++a) {
        for (AgentId b = a + 1; b < n; ++b) {
            if (coin(rng)) {
                e.emplace_back(a, b);
            }
        }
    }
    return Topology(n, e);
}

std::size_t brute_min_dominating(const Topology& t) {
    const std::size_t n = t.size();
    std::size_t best = n;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::uint32_t covered = mask;
        for (AgentId k = 0; k < n; ++k) {
            if (mask >> k & 1u) {
                for (AgentId l : t.neighbors(k)) {
                    covered |= 1u << l;
                }
            }
        }
        if (covered == (1u << n) - 1) {
            best = std::min<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(mask)));
        }
    }
    return best;
}

DirectedWeights all_weights(const Topology& t, double value) {
    DirectedWeights w;
    for (auto [a, b] : t.edges()) {
        w[{a, b}] = value;
        w[{b, a}] = value;
    }
    return w;
}

}  // namespace

TEST_CASE("neighborhoods include the agent itself") {
    CHECK(path(3).neighbors(1) == std::vector<AgentId>{0, 1, 2});
    CHECK(Topology(1).neighbors(0) == std::vector<AgentId>{0});
    Topology star(4, {{0, 1}, {0, 2}, {0, 3}});
    CHECK(star.neighbors(2) == std::vector<AgentId>{0, 2});
    CHECK(star.degree(0) == 3);
}

TEST_CASE("topology rejects bad ids and self loops") {
    auto code = [](auto f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::io;
    };
    CHECK(code([] { (void)path(3).neighbors(3); }) == Errc::invalid_agent);
    CHECK(code([] { Topology(2, {{0, 2}}); }) == Errc::invalid_agent);
    CHECK(code([] { Topology(2, {}, {5}); }) == Errc::invalid_agent);
    CHECK_THROWS_AS(Topology(2, {{1, 1}}), Error);
}

TEST_CASE("dominating set membership") {
    CHECK(is_dominating_set(complete(5), {0}));
    CHECK(is_dominating_set(path(5), {1, 3}));
    CHECK_FALSE(is_dominating_set(path(5), {0}));
    CHECK_THROWS_AS(is_dominating_set(path(3), {7}), Error);
}

TEST_CASE("greedy dominating set examples") {
    Topology star(7, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 6}});
    CHECK(greedy_min_dominating_set(star).members == std::set<AgentId>{0});
    CHECK(greedy_min_dominating_set(path(3)).members == std::set<AgentId>{1});
    Topology triangles(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
    CHECK(greedy_min_dominating_set(triangles).members == std::set<AgentId>{0, 3});
    CHECK(greedy_min_dominating_set(Topology(3)).members == std::set<AgentId>{0, 1, 2});
}

TEST_CASE("greedy dominating set is valid and near the minimum") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<std::size_t> size(1, 8);
    std::uniform_real_distribution<double> density(0.1, 0.8);
    for (int trial = 0; trial < 300; ++trial) {
        const Topology t = random_graph(size(rng), density(rng), rng);
        const auto g = greedy_min_dominating_set(t).members;
        REQUIRE(is_dominating_set(t, g));
        // Classical greedy bound: |greedy| <= min * H(Δ + 1).
        double harmonic = 0.0;
        for (std::size_t j = 1; j <= t.max_degree() + 1; ++j) {
            harmonic += 1.0 / static_cast<double>(j);
        }
        CHECK(static_cast<double>(g.size()) <=
              static_cast<double>(brute_min_dominating(t)) * harmonic + 1e-9);
    }
}

TEST_CASE("prune_links follows the two-sided threshold") {
    Topology t(2, {{0, 1}});
    CHECK(prune_links(t, {{{0, 1}, 0.5}, {{1, 0}, 0.5}}).has_edge(0, 1));
    CHECK_FALSE(prune_links(t, {{{0, 1}, 0.001}, {{1, 0}, 0.002}}).has_edge(0, 1));
    CHECK(prune_links(t, {{{0, 1}, 0.001}, {{1, 0}, 0.5}}).has_edge(0, 1));
    try {
        (void)prune_links(t, {{{0, 1}, 0.001}});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::incomplete_weights);
    }
}

TEST_CASE("prune_links never adds edges and is idempotent") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 0.03);
    for (int trial = 0; trial < 100; ++trial) {
        const Topology t = random_graph(10, 0.4, rng);
        DirectedWeights w = all_weights(t, 0.0);
        for (auto& [edge, value] : w) {
            value = unit(rng);
        }
        const Topology once = prune_links(t, w);
        const Topology twice = prune_links(once, w);
        CHECK(once == twice);
        for (auto [a, b] : once.edges()) {
            CHECK(t.has_edge(a, b));
        }
    }
}

TEST_CASE("random geometric graphs are connected and reproducible") {
    std::mt19937_64 a(3);
    std::mt19937_64 b(3);
    const auto g1 = random_geometric_graph(40, 0.3, a);
    const auto g2 = random_geometric_graph(40, 0.3, b);
    CHECK(g1.topology.connected());
    CHECK(g1.topology == g2.topology);
    for (auto [k, l] : g1.topology.edges()) {
        const double dx = g1.positions[k].x - g1.positions[l].x;
        const double dy = g1.positions[k].y - g1.positions[l].y;
        CHECK(dx * dx + dy * dy <= 0.09);
    }
}

TEST_CASE("gap leaves the middle band empty with balanced sides") {
    std::mt19937_64 rng(5);
    const auto g = random_geometric_graph(41, 0.25, rng, 10000, 0.1);
    std::size_t left = 0;
    for (const auto& p : g.positions) {
        CHECK((p.x < 0.45 || p.x >= 0.55));
        left += p.x < 0.5 ? 1 : 0;
    }
    CHECK(left == 21);
    CHECK_THROWS_AS(random_geometric_graph(10, 0.3, rng, 10, 1.0), Error);
}

TEST_CASE("topology JSON round-trips") {
    const Topology t(5, {{0, 1}, {1, 2}, {3, 4}}, {2});
    const auto j = topology_to_json(t);
    CHECK(j["n_agents"] == 5);
    CHECK(topology_from_json(j) == t);
    CHECK(topology_from_json(nlohmann::json::parse(j.dump())) == t);
    CHECK_THROWS_AS(topology_from_json(nlohmann::json::parse(R"({"n_agents": 2, "edges": [[0, 3]]})")),
                    Error);
}
