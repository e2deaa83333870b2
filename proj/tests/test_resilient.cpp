#include "dlms/resilient.hpp"

#include <doctest.h>

#include <random>

using namespace dlms;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index j = 0;
    for (double x : xs) {
        v(j++) = x;
    }
    return v;
}

Errc code_of(auto f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::io;
}

}  // namespace

TEST_CASE("window cost") {
    CostWindow w(3);
    CHECK(code_of([&] { window_cost(w, vec({0.0, 0.0})); }) == Errc::empty_window);
    w.push({1.0, vec({1.0, 0.0})});
    CHECK(window_cost(w, vec({0.0, 0.0})) == 1.0);
    CHECK(window_cost(w, vec({1.0, 5.0})) == 0.0);
    w.push({std::sqrt(3.0), vec({1.0, 0.0})});
    CHECK(window_cost(w, vec({0.0, 0.0})) == doctest::Approx(2.0));
    w.push({0.0, vec({0.0, 1.0})});
    w.push({0.0, vec({0.0, 1.0})});
    CHECK(w.size() == 3);
    // The first sample has been evicted.
    CHECK(window_cost(w, vec({0.0, 0.0})) == doctest::Approx(1.0));
}

TEST_CASE("removal objective") {
    const GammaMap g({0, 1, 2}, {1.0, 1.0, 1.0});
    const CostMap j2({0, 1, 2}, {2.0, 2.0, 2.0});
    const std::vector<AgentId> one = {0};
    CHECK(removal_objective(g, j2, one) == doctest::Approx(2.0));
    const CostMap j1({0, 1, 2}, {1.0, 1.0, 1.0});
    const std::vector<AgentId> two = {0, 1};
    CHECK(removal_objective(g, j1, two) == doctest::Approx(0.5));
    const std::vector<AgentId> three = {0, 1, 2};
    CHECK(removal_objective(g, j2, three) == doctest::Approx(2.0 / 3.0));
    CHECK(code_of([&] { removal_objective(g, j1, std::vector<AgentId>{}); }) == Errc::empty_set);
}

TEST_CASE("binomial") {
    CHECK(binomial(5, 0) == 1);
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(3, 5) == 0);
    CHECK(binomial(30, 15) == 155117520);
}

TEST_CASE("removal set examples") {
    const GammaMap g({0, 1, 2, 3}, {1.0, 1.0, 1.0, 0.01});
    const CostMap j({0, 1, 2, 3}, {1.0, 1.0, 1.0, 100.0});

    const auto none = select_removal_set(g, j, 0, 0);
    CHECK(none.discarded.empty());
    const auto plain = adaptive_weights(g);
    CHECK(none.weights.ids == plain.ids);
    CHECK(none.weights.values == plain.values);

    const auto f1 = select_removal_set(g, j, 1, 0);
    CHECK(f1.discarded == std::vector<AgentId>{3});
    CHECK(f1.weights.at(3) == 0.0);
    CHECK(f1.weights.at(1) == doctest::Approx(1.0 / 3.0));

    const auto all = select_removal_set(g, j, 7, 2);
    CHECK(all.discarded == std::vector<AgentId>{0, 1, 3});
    CHECK(all.weights.at(2) == 1.0);
}

TEST_CASE("self is never discarded") {
    // Self looks worst on both counts, but a neighbor goes instead.
    const GammaMap g({0, 1, 2}, {0.001, 1.0, 1.0});
    const CostMap j({0, 1, 2}, {50.0, 1.0, 1.0});
    const auto r = select_removal_set(g, j, 1, 0);
    CHECK(r.discarded.size() == 1);
    CHECK(r.discarded[0] != 0);
    CHECK(r.weights.at(0) > 0.0);
}

TEST_CASE("ties go to the smallest discarded set") {
    const GammaMap g({0, 1, 2, 3}, {1.0, 1.0, 1.0, 1.0});
    const CostMap j({0, 1, 2, 3}, {1.0, 1.0, 1.0, 1.0});
    CHECK(select_removal_set(g, j, 2, 0).discarded == std::vector<AgentId>{1, 2});
    CHECK(select_removal_set(g, j, 1, 1).discarded == std::vector<AgentId>{0});
}

TEST_CASE("combinatorial guard") {
    std::vector<AgentId> ids(31);
    for (AgentId k = 0; k < ids.size(); ++k) {
        ids[k] = k;
    }
    const GammaMap g(ids, std::vector<double>(31, 1.0));
    const CostMap j(ids, std::vector<double>(31, 1.0));
    CHECK(code_of([&] { select_removal_set(g, j, 10, 0); }) == Errc::combinatorial_guard);
    CHECK_NOTHROW(select_removal_set(g, j, 2, 0));
}

TEST_CASE("kept weights stay on the simplex") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + trial % 8;
        std::vector<AgentId> ids(n);
        std::vector<double> g(n);
        std::vector<double> j(n);
        for (std::size_t k = 0; k < n; ++k) {
            ids[k] = 3 * k;
            g[k] = std::pow(10.0, -5.0 + 5.0 * unit(rng));
            j[k] = std::pow(10.0, -2.0 + 3.0 * unit(rng));
        }
        const std::size_t F = trial % 4;
        const auto r = select_removal_set(GammaMap(ids, g), CostMap(ids, j), F, ids[trial % n]);
        CHECK(r.discarded.size() == std::min(F, n - 1));
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const bool dropped = std::find(r.discarded.begin(), r.discarded.end(), ids[k]) !=
                                 r.discarded.end();
            CHECK((dropped ? r.weights.values[k] == 0.0 : r.weights.values[k] > 0.0));
            sum += r.weights.values[k];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("R-DLMSAW with F = 0 is DLMSAW bit for bit") {
    const Topology t(4, {{0, 1}, {1, 2}, {2, 3}, {0, 2}});
    std::vector<AgentState> a;
    std::vector<AgentState> b;
    for (AgentId k = 0; k < 4; ++k) {
        a.push_back(AgentState::make(k, t, 2, 0.01, 0.01));
        b.push_back(AgentState::make(k, t, 2, 0.01, 0.01));
    }
    std::vector<CostWindow> windows(4, CostWindow(100));
    const std::vector<std::size_t> F(4, 0);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    for (int i = 0; i < 400; ++i) {
        std::vector<StreamSample> s;
        for (AgentId k = 0; k < 4; ++k) {
            const Vector u = vec({n(rng), n(rng)});
            s.push_back({u.dot(vec({0.3, 0.6})) + 0.3 * n(rng), u});
        }
        MessageBoard ba(t);
        MessageBoard bb(t);
        for (AgentId k = 0; k < 4; ++k) {
            ba.publish(k, lms_adapt(a[k], s[k]));
            bb.publish(k, lms_adapt(b[k], s[k]));
        }
        dlmsaw_round(a, ba);
        rdlmsaw_round(b, windows, s, bb, F);
        for (AgentId k = 0; k < 4; ++k) {
            REQUIRE(a[k].w == b[k].w);
        }
    }
}

namespace {

// Agent 0 with two honest neighbors and neighbor 3 steering it toward a wrong
// point the way a strong attacker does. Returns agent 0's final estimate.
Vector run_with_liar(std::size_t F) {
    const Topology t(4, {{0, 1}, {0, 2}, {0, 3}});
    std::vector<AgentState> st;
    for (AgentId k = 0; k < 4; ++k) {
        st.push_back(AgentState::make(k, t, 2, 0.01, 0.01));
    }
    std::vector<CostWindow> windows(4, CostWindow(100));
    const Vector truth = vec({0.2, 0.4});
    const Vector lure = vec({0.7, 0.9});
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n;
    for (int i = 0; i < 3000; ++i) {
        std::vector<StreamSample> s;
        for (AgentId k = 0; k < 4; ++k) {
            const Vector u = vec({n(rng), n(rng)});
            s.push_back({u.dot(truth) + 0.3 * n(rng), u});
        }
        MessageBoard board(t);
        for (AgentId k = 0; k < 4; ++k) {
            board.publish(k, lms_adapt(st[k], s[k]));
        }
        board.send(3, 0, st[0].w - 0.002 * (st[0].w - lure));
        for (AgentId k = 0; k < 4; ++k) {
            rdlmsaw_step(st[k], windows[k], s[k], board, k == 0 ? F : 0);
        }
    }
    return st[0].w;
}

}  // namespace

TEST_CASE("R-DLMSAW drops a steering neighbor that captures DLMSAW") {
    CHECK((run_with_liar(0) - vec({0.7, 0.9})).norm() < 0.01);
    CHECK((run_with_liar(1) - vec({0.2, 0.4})).norm() < 0.05);
}

TEST_CASE("F selection") {
    SUBCASE("clean stream keeps F at zero") {
        FSelector sel(2, 0.01, 3, {100, 0.05});
        CostWindow w(100);
        std::mt19937_64 rng(1);
        std::normal_distribution<double> n;
        const Vector truth = vec({0.5, -0.5});
        for (int i = 0; i < 2000; ++i) {
            const Vector u = vec({n(rng), n(rng)});
            const StreamSample s{u.dot(truth) + 0.1 * n(rng), u};
            w.push(s);
            sel.observe(w, s, truth);
        }
        CHECK(sel.F() == 0);
    }
    SUBCASE("a biased cooperative estimate raises F up to the cap") {
        FSelector sel(2, 0.01, 2, {100, 0.05});
        CostWindow w(100);
        std::mt19937_64 rng(2);
        std::normal_distribution<double> n;
        const Vector truth = vec({0.5, -0.5});
        int changes = 0;
        for (int i = 0; i < 2000; ++i) {
            const Vector u = vec({n(rng), n(rng)});
            const StreamSample s{u.dot(truth) + 0.1 * n(rng), u};
            w.push(s);
            changes += sel.observe(w, s, vec({2.0, 2.0})) ? 1 : 0;
        }
        CHECK(sel.F() == 2);
        CHECK(changes == 2);
    }
    SUBCASE("no neighbors means F stays zero") {
        FSelector sel(2, 0.01, 0, {10, 0.05});
        CostWindow w(100);
        for (int i = 0; i < 100; ++i) {
            const StreamSample s{1.0, vec({1.0, 0.0})};
            w.push(s);
            sel.observe(w, s, vec({9.0, 9.0}));
        }
        CHECK(sel.F() == 0);
    }
}
