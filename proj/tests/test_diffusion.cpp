#include "dlms/diffusion.hpp"

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

StreamSample sample(double d, std::initializer_list<double> u) { return {d, vec(u)}; }

Errc code_of(auto f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::io;
}

void check_simplex(const WeightRow& row) {
    double sum = 0.0;
    for (double a : row.values) {
        CHECK(a >= 0.0);
        sum += a;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

}  // namespace

TEST_CASE("lms_adapt examples") {
    const Vector w = vec({0.3, -0.2});
    CHECK(lms_adapt(w, 0.0, sample(5.0, {1.0, 2.0})) == w);
    const Vector psi = lms_adapt(vec({0.0, 0.0}), 0.1, sample(1.0, {1.0, 0.0}));
    CHECK(psi(0) == doctest::Approx(0.1));
    CHECK(psi(1) == 0.0);
    const Vector w0 = vec({0.1, 0.9});
    const Vector u = vec({0.7, -1.3});
    CHECK((lms_adapt(w0, 0.05, {u.dot(w0), u}) - w0).norm() < 1e-15);
    CHECK(code_of([] { lms_adapt(Vector::Zero(2), 0.1, sample(1.0, {1.0})); }) == Errc::shape);
}

TEST_CASE("update_gamma examples") {
    const Topology t(2, {{0, 1}});
    AgentState s = AgentState::make(0, t, 2, 0.01, 1.0);
    CHECK(s.gamma_sq.at(0) == 0.0);
    CHECK(s.gamma_sq.at(1) == 0.0);
    s.gamma_sq.set(1, 7.0);
    CHECK(update_gamma(s, 1, vec({2.0, 0.0}), vec({0.0, 0.0})) == 4.0);

    s.nu = 0.01;
    s.gamma_sq.set(0, 0.0);
    CHECK(update_gamma(s, 0, vec({0.0, 2.0}), vec({0.0, 0.0})) == doctest::Approx(0.04));
    s.gamma_sq.set(0, 3.0);
    CHECK(update_gamma(s, 0, vec({1.0, 1.0}), vec({1.0, 1.0})) == doctest::Approx(0.99 * 3.0));

    CHECK(code_of([&] { update_gamma(s, 5, vec({0, 0}), vec({0, 0})); }) == Errc::invalid_neighbor);
}

TEST_CASE("adaptive_weights examples") {
    const auto even = adaptive_weights(GammaMap({1, 2}, {1.0, 1.0}));
    CHECK(even.at(1) == doctest::Approx(0.5));
    CHECK(even.at(2) == doctest::Approx(0.5));
    const auto skew = adaptive_weights(GammaMap({1, 2}, {1.0, 3.0}));
    CHECK(skew.at(1) == doctest::Approx(0.75));
    CHECK(skew.at(2) == doctest::Approx(0.25));
    const auto floored = adaptive_weights(GammaMap({0, 1, 2}, {1.0, 0.0, 1.0}));
    CHECK(floored.at(1) == doctest::Approx(1.0).epsilon(1e-9));
    check_simplex(floored);
    CHECK(code_of([] { adaptive_weights(GammaMap{}); }) == Errc::no_neighbors);
}

TEST_CASE("adaptive weights are a simplex row for any nonnegative gammas") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> exp10(-14.0, 2.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<AgentId> ids;
        std::vector<double> g;
        for (AgentId l = 0; l < 1 + trial % 9; ++l) {
            ids.push_back(l * 2);
            g.push_back(trial % 7 == 0 && l == 0 ? 0.0 : std::pow(10.0, exp10(rng)));
        }
        const auto row = adaptive_weights(GammaMap(ids, g));
        CHECK(row.ids == ids);
        check_simplex(row);
    }
}

TEST_CASE("combine examples") {
    const PsiMap psis({3, 5}, {vec({0.0, 0.0}), vec({1.0, 1.0})});
    CHECK(combine(WeightRow({3, 5}, {0.0, 1.0}), psis) == psis.at(5));
    CHECK(combine(WeightRow({3, 5}, {0.5, 0.5}), psis).isApprox(vec({0.5, 0.5})));
    const PsiMap axes({3, 5}, {vec({1.0, 0.0}), vec({0.0, 1.0})});
    CHECK(combine(WeightRow({3, 5}, {0.75, 0.25}), axes).isApprox(vec({0.75, 0.25})));
    CHECK(code_of([&] { combine(WeightRow({3, 9}, {0.5, 0.5}), psis); }) ==
          Errc::incomplete_messages);
}

TEST_CASE("closed-form MSD") {
    const std::vector<double> mid(100, 0.175);
    CHECK(msd_noncooperative(0.01, 2, mid) == doctest::Approx(0.00175));
    CHECK(to_db(msd_noncooperative(0.01, 2, mid)) == doctest::Approx(-27.57).epsilon(1e-4));
    CHECK(msd_diffusion(0.01, 2, mid) == doctest::Approx(1.75e-5));
    CHECK(to_db(msd_diffusion(0.01, 2, mid)) == doctest::Approx(-47.57).epsilon(1e-4));
    CHECK(msd_noncooperative(0.01, 2, std::vector<double>(5, 0.0)) == 0.0);
    CHECK(msd_noncooperative(0.01, 2, std::vector<double>{1.0}) == doctest::Approx(0.01));
    CHECK(msd_diffusion(0.01, 2, std::vector<double>{0.3}) ==
          msd_noncooperative(0.01, 2, std::vector<double>{0.3}));
    CHECK(msd_diffusion(0.01, 2, std::vector<double>(200, 0.175)) ==
          doctest::Approx(msd_diffusion(0.01, 2, mid) / 2.0));
    CHECK(code_of([] { msd_noncooperative(0.01, 2, std::vector<double>{}); }) ==
          Errc::empty_input);
}

TEST_CASE("partition delta") {
    const std::vector<double> all = {0.1, 0.2, 0.15, 0.3};
    CHECK(msd_partition_delta(0.01, 2, {all}) == doctest::Approx(0.0));
    CHECK(msd_partition_delta(0.01, 2, {{0.1, 0.1}, {0.1, 0.1}}) == doctest::Approx(2.5e-4));
    std::vector<std::vector<double>> singletons;
    for (double s : all) {
        singletons.push_back({s});
    }
    CHECK(msd_partition_delta(0.01, 2, singletons) ==
          doctest::Approx(msd_noncooperative(0.01, 2, all) - msd_diffusion(0.01, 2, all)));
    CHECK(code_of([] { msd_partition_delta(0.01, 2, {}); }) == Errc::empty_input);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> var(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> blocks(1, 6);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<double>> p(blocks(rng));
        for (auto& b : p) {
            b.resize(blocks(rng));
            for (double& s : b) {
                s = var(rng);
            }
        }
        CHECK(msd_partition_delta(0.01, 2, p) >= 0.0);
    }
}

TEST_CASE("message board overrides are per receiver") {
    const Topology t(3, {{0, 1}, {0, 2}});
    MessageBoard board(t);
    board.publish(0, vec({1.0}));
    board.publish(1, vec({2.0}));
    board.publish(2, vec({3.0}));
    board.send(0, 1, vec({9.0}));
    CHECK(board.get(0, 1)(0) == 9.0);
    CHECK(board.get(0, 2)(0) == 1.0);
    CHECK(board.has_override(0, 1));
    CHECK_FALSE(board.has_override(0, 2));
    const PsiMap in = board.inbox(0);
    CHECK(in.ids == std::vector<AgentId>{0, 1, 2});
    CHECK(in.at(0)(0) == 1.0);
    board.clear();
    CHECK_THROWS_AS((void)board.published(0), Error);
}

TEST_CASE("dlmsaw with a lone agent is noncooperative LMS") {
    const Topology t(1);
    AgentState s = AgentState::make(0, t, 2, 0.05, 0.01);
    Vector ref = Vector::Zero(2);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n;
    for (int i = 0; i < 50; ++i) {
        const StreamSample x{n(rng), vec({n(rng), n(rng)})};
        MessageBoard board(t);
        board.publish(0, lms_adapt(s, x));
        const auto row = dlmsaw_step(s, board);
        ref = lms_adapt(ref, 0.05, x);
        CHECK(row.at(0) == 1.0);
        CHECK(s.w == ref);
    }
}

TEST_CASE("symmetric agents stay equal") {
    const Topology t(2, {{0, 1}});
    std::vector<AgentState> st = {AgentState::make(0, t, 2, 0.01, 0.01),
                                  AgentState::make(1, t, 2, 0.01, 0.01)};
    const Vector w0 = vec({0.4, -0.1});
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n;
    for (int i = 0; i < 1000; ++i) {
        const Vector u = vec({n(rng), n(rng)});
        const StreamSample x{u.dot(w0), u};
        MessageBoard board(t);
        for (auto& s : st) {
            board.publish(s.id, lms_adapt(s, x));
        }
        const auto rows = dlmsaw_round(st, board);
        for (const auto& row : rows) {
            check_simplex(row);
        }
        CHECK(st[0].w == st[1].w);
    }
    CHECK((st[0].w - w0).norm() < 0.05);
}

TEST_CASE("memoryless weights match a direct formula") {
    const Topology t(3, {{0, 1}, {0, 2}});
    AgentState s = AgentState::make(0, t, 2, 0.01, 1.0);
    s.w = vec({0.2, 0.2});
    MessageBoard board(t);
    board.publish(0, vec({0.3, 0.2}));
    board.publish(1, vec({0.2, 0.5}));
    board.publish(2, vec({-0.2, 0.2}));
    const Vector prev = s.w;
    const auto row = dlmsaw_step(s, board);
    const double g0 = 0.01;
    const double g1 = 0.09;
    const double g2 = 0.16;
    const double z = 1 / g0 + 1 / g1 + 1 / g2;
    CHECK(row.at(0) == doctest::Approx(1 / g0 / z));
    CHECK(row.at(1) == doctest::Approx(1 / g1 / z));
    CHECK(row.at(2) == doctest::Approx(1 / g2 / z));
    CHECK(s.w.isApprox(row.at(0) * vec({0.3, 0.2}) + row.at(1) * vec({0.2, 0.5}) +
                       row.at(2) * vec({-0.2, 0.2})));
    CHECK(prev == vec({0.2, 0.2}));
}
