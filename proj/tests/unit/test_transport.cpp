#include "transport.hpp"

#include "../oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <map>
#include <random>

using namespace mcr;
using namespace mcr::transport;

namespace {

Network random_network(std::mt19937_64& gen, int rows, int cols, int max_links, bool with_flows) {
    Network net(Grid{rows, cols, 2.0}, 20.0);
    const int n = rows * cols;
    std::uniform_int_distribution<int> node(0, n - 1);
    std::uniform_real_distribution<double> speed(10.0, 120.0);
    std::uniform_real_distribution<double> flow(0.0, 3000.0);
    std::uniform_int_distribution<int> count(0, max_links);
    const int want = count(gen);
    for (int tries = 0; static_cast<int>(net.link_count()) < want && tries < 1000; ++tries) {
        const int a = node(gen);
        const int b = node(gen);
        if (a == b || net.has_link(a, b)) continue;
        net.add_link(a, b, speed(gen), 1000.0);
    }
    if (with_flows) {
        for (std::size_t k = 0; k < net.link_count(); ++k) net.set_flow(k, flow(gen));
    }
    return net;
}

Matrix random_od(std::mt19937_64& gen, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 50.0);
    Matrix od(n, n);
    for (double& v : od.values()) v = u(gen);
    return od;
}

TravelTimeMatrix as_times(const Matrix& m) { return TravelTimeMatrix{m, false}; }

} // namespace

TEST_SUITE("transport") {

TEST_CASE("BPR volume-delay") {
    CHECK(bpr_time(0.2, 0.0, 1000, 0.15, 4) == 0.2);
    CHECK(bpr_time(0.2, 1000, 1000, 0.15, 4) == doctest::Approx(0.2 * 1.15).epsilon(1e-15));
    CHECK(bpr_time(0.2, 2000, 1000, 0.15, 4) == doctest::Approx(0.2 * 3.4).epsilon(1e-15));
    double prev = bpr_time(1.0, 0.0, 100, 0.15, 4);
    for (double f = 1.0; f < 1000.0; f *= 1.7) {
        const double t = bpr_time(1.0, f, 100, 0.15, 4);
        CHECK(t > prev);
        prev = t;
    }
}

TEST_CASE("network construction and JSON edge list") {
    auto cfg = world::default_config();
    Network net = network_from_config(cfg);
    CHECK(net.link_count() == 0);
    net.add_link(7, 3, 60, 1500);
    CHECK(net.links()[0].from == 3);
    CHECK(net.links()[0].to == 7);
    CHECK(net.has_link(3, 7));
    CHECK_THROWS_AS(net.add_link(3, 7, 60, 1500), std::invalid_argument);
    CHECK_THROWS_AS(net.add_link(4, 4, 60, 1500), std::invalid_argument);
    CHECK_THROWS_AS(net.add_link(0, 100, 60, 1500), std::invalid_argument);
    net.add_link(10, 55, 45, 900);
    const Network back = network_from_json_text(network_to_json_text(net), cfg);
    REQUIRE(back.link_count() == 2);
    CHECK(back.links()[1].v_link == 45);
    CHECK(back.links()[1].capacity == 900);
}

TEST_CASE("empty network gives straight-line times") {
    Network net(Grid{4, 5, 1.5}, 25.0);
    const auto t = shortest_times(net);
    const auto afc = afc_times(net);
    for (std::size_t i = 0; i < 20; ++i) {
        for (std::size_t j = 0; j < 20; ++j) {
            const double expect = i == j ? 0.75 / 25.0 : oracle::euclid_km(net.grid(), int(i), int(j)) / 25.0;
            CHECK(t(i, j) == doctest::Approx(expect).epsilon(1e-14));
            CHECK(afc(i, j) == doctest::Approx(expect).epsilon(1e-14));
        }
    }
}

TEST_CASE("a fast link along a segment sets that pair's time") {
    Network net(Grid{5, 5, 2.0}, 20.0);
    net.add_link(0, 24, 60.0, 1500);
    const auto t = shortest_times(net);
    CHECK(t(0, 24) == doctest::Approx(net.grid().distance_km(0, 24) / 60.0).epsilon(1e-14));
    CHECK(t(24, 0) == t(0, 24));
}

TEST_CASE("shortest times match an all-pairs oracle") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 40; ++trial) {
        const int rows = 1 + trial % 5;
        const int cols = 1 + (trial / 5) % 5;
        const Network net = random_network(gen, rows, cols, 30, trial % 2 == 0);
        for (bool congested : {true, false}) {
            const auto d = shortest_times(net, congested ? LinkTimes::congested : LinkTimes::free_flow);
            const auto ref = oracle::all_pairs(net.grid(), 20.0, net.links(), congested);
            for (std::size_t i = 0; i < ref.rows(); ++i) {
                for (std::size_t j = 0; j < ref.cols(); ++j) {
                    const double expect = i == j ? net.intra_cell_time() : ref(i, j);
                    CHECK(std::abs(d(i, j) - expect) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("triangle consistency and monotonicity under link addition") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 10; ++trial) {
        Network net = random_network(gen, 4, 4, 12, true);
        const auto d = shortest_times(net);
        const double floor = net.intra_cell_time();
        for (std::size_t i = 0; i < 16; ++i) {
            for (std::size_t j = 0; j < 16; ++j) {
                for (std::size_t k = 0; k < 16; ++k) CHECK(d(i, k) <= d(i, j) + d(j, k) + 2 * floor + 1e-12);
            }
        }
        const auto before = shortest_times(net, LinkTimes::free_flow);
        std::uniform_int_distribution<int> node(0, 15);
        int a = node(gen), b = node(gen);
        while (a == b || net.has_link(a, b)) {
            a = node(gen);
            b = node(gen);
        }
        net.add_link(a, b, 70.0, 1000);
        const auto after = shortest_times(net, LinkTimes::free_flow);
        for (std::size_t i = 0; i < 16; ++i) {
            for (std::size_t j = 0; j < 16; ++j) CHECK(after(i, j) <= before(i, j));
        }
    }
}

TEST_CASE("demand generation") {
    world::Metropolis m(Grid{2, 3, 1.0}, 2, 1);
    SUBCASE("empty metropolis") {
        const auto d = generate_demand(m);
        CHECK(d.origins.sum() == 0.0);
        CHECK(d.destinations.sum() == 0.0);
        const auto od = distribute(d, afc_times(Network(m.grid(), 20.0)), 1.0, {});
        CHECK(od.total().sum() == 0.0);
    }
    SUBCASE("all workers in one cell") {
        m.workers()(4, 0) = 50;
        m.workers()(4, 1) = 30;
        m.jobs()(0, 0) = 50;
        m.jobs()(5, 1) = 30;
        const auto d = generate_demand(m);
        const auto od = distribute(d, afc_times(Network(m.grid(), 20.0)), 1.0, {}).total();
        for (std::size_t i = 0; i < 6; ++i) CHECK((od.row_sum(i) > 0) == (i == 4));
        CHECK(od.row_sum(4) == doctest::Approx(80.0).epsilon(1e-9));
    }
    SUBCASE("marginals agree with world totals") {
        std::mt19937_64 gen(3);
        std::uniform_real_distribution<double> u(0, 10);
        for (double& v : m.workers().values()) v = u(gen);
        for (double& v : m.jobs().values()) v = u(gen);
        const auto d = generate_demand(m);
        for (int s = 0; s < 2; ++s) {
            CHECK(d.origins.column_sum(s) == doctest::Approx(m.total_workers(s)).epsilon(1e-12));
            CHECK(d.destinations.column_sum(s) == doctest::Approx(m.total_jobs(s)).epsilon(1e-12));
        }
    }
}

TEST_CASE("gravity model") {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(0.5, 20.0);
    std::uniform_real_distribution<double> hours(0.05, 2.0);
    const std::size_t n = 10;
    auto instance = [&] {
        std::vector<double> o(n), e(n);
        for (auto& v : o) v = u(gen);
        for (auto& v : e) v = u(gen);
        double so = 0, se = 0;
        for (double v : o) so += v;
        for (double v : e) se += v;
        for (auto& v : e) v *= so / se;
        Matrix t(n, n);
        for (double& v : t.values()) v = hours(gen);
        return std::tuple{o, e, t};
    };

    SUBCASE("lambda = 0 is the product solution") {
        auto [o, e, t] = instance();
        const auto r = furness_distribution(o, e, as_times(t), 0.0, 1e-12, 1000);
        double total = 0;
        for (double v : e) total += v;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) CHECK(oracle::rel_err(r.flows(i, j), o[i] * e[j] / total) <= 1e-9);
        }
    }
    SUBCASE("single zone") {
        const std::vector<double> o{7.0}, e{7.0};
        Matrix t(1, 1, 0.1);
        const auto r = furness_distribution(o, e, as_times(t), 1.0, 1e-12, 100);
        CHECK(r.flows(0, 0) == doctest::Approx(7.0).epsilon(1e-14));
    }
    SUBCASE("random instance matches a reference Furness") {
        auto [o, e, t] = instance();
        const auto r = furness_distribution(o, e, as_times(t), 0.3, 1e-12, 10000);
        CHECK(r.converged);
        const auto ref = oracle::furness(o, e, t, 0.3);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(oracle::rel_err(r.flows.row_sum(i), o[i]) <= 1e-6);
            CHECK(oracle::rel_err(r.flows.column_sum(i), e[i]) <= 1e-6);
            for (std::size_t j = 0; j < n; ++j) CHECK(oracle::rel_err(r.flows(i, j), ref(i, j)) <= 1e-8);
        }
    }
    SUBCASE("higher lambda shortens trips") {
        auto [o, e, t] = instance();
        double prev = std::numeric_limits<double>::infinity();
        for (double lambda : {0.0, 0.2, 0.5, 1.0, 3.0}) {
            const auto r = furness_distribution(o, e, as_times(t), lambda, 1e-12, 10000);
            const double cost = total_travel_time(r.flows, as_times(t));
            CHECK(cost <= prev * (1 + 1e-12));
            prev = cost;
        }
    }
    SUBCASE("unbalanced marginals are rejected") {
        const std::vector<double> o{1.0, 2.0}, e{1.0, 1.0};
        CHECK_THROWS_AS(furness_distribution(o, e, as_times(Matrix(2, 2, 0.1)), 1.0, 1e-9, 100), std::invalid_argument);
    }
    SUBCASE("distribute rescales destinations to the origin total") {
        world::Metropolis m(Grid{2, 2, 1.0}, 1, 1);
        m.workers()(0, 0) = 10;
        m.workers()(3, 0) = 30;
        m.jobs()(1, 0) = 5;
        m.jobs()(2, 0) = 15;
        const auto od = distribute(generate_demand(m), afc_times(Network(m.grid(), 20.0)), 1.0, {});
        CHECK(od.total().sum() == doctest::Approx(40.0).epsilon(1e-12));
        CHECK(od.total().column_sum(2) == doctest::Approx(30.0).epsilon(1e-8));
    }
}

TEST_CASE("total travel time") {
    Matrix od(2, 2);
    TravelTimeMatrix t{Matrix(2, 2, 0.5), true};
    CHECK(total_travel_time(od, t) == 0.0);
    od(0, 1) = 10.0;
    CHECK(total_travel_time(od, t) == 5.0);

    std::mt19937_64 gen(8);
    const auto big = random_od(gen, 12);
    std::uniform_real_distribution<double> h(0.0, 1.0);
    Matrix hours(12, 12);
    for (double& v : hours.values()) v = h(gen);
    double expect = 0.0;
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t j = 0; j < 12; ++j) expect += big(i, j) * hours(i, j);
    }
    CHECK(total_travel_time(big, as_times(hours)) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("assignment") {
    SUBCASE("zero demand leaves free-flow times") {
        Network net(Grid{3, 3, 2.0}, 20.0);
        net.add_link(0, 8, 60, 1000);
        const auto r = assign_traffic(Matrix(9, 9), net, 4);
        CHECK(r.network.links()[0].flow == 0.0);
        const auto ff = shortest_times(net, LinkTimes::free_flow);
        CHECK(r.times.hours == ff.hours);
    }
    SUBCASE("identical parallel routes share demand equally") {
        Network net(Grid{3, 3, 2.0}, 20.0);
        net.add_link(3, 1, 60, 1000);
        net.add_link(1, 5, 60, 1000);
        net.add_link(3, 7, 60, 1000);
        net.add_link(7, 5, 60, 1000);
        Matrix od(9, 9);
        od(3, 5) = 800;
        od(5, 3) = 800;
        for (int it : {2, 3, 6}) {
            const auto r = assign_traffic(od, net, it);
            const auto& l = r.network.links();
            CHECK(std::abs(l[0].flow - l[2].flow) <= 1e-6);
            CHECK(std::abs(l[1].flow - l[3].flow) <= 1e-6);
            CHECK(l[0].flow > 0.0);
        }
    }
    SUBCASE("single route toy") {
        // One 2 km link, demand twice its capacity, local roads at 20 km/h (0.1 h).
        Matrix od(2, 2);
        od(0, 1) = 2000;
        SUBCASE("link stays faster than the local road") {
            Network net(Grid{1, 2, 2.0}, 20.0);
            net.add_link(0, 1, 80, 1000); // 0.025 h free, 0.085 h congested
            const auto r = assign_traffic(od, net, 4);
            CHECK(r.network.links()[0].flow == doctest::Approx(2000).epsilon(1e-12));
            CHECK(r.times(0, 1) == doctest::Approx(0.025 * 3.4).epsilon(1e-12));
        }
        SUBCASE("congested link loses to the local road") {
            Network net(Grid{1, 2, 2.0}, 20.0);
            net.add_link(0, 1, 60, 1000); // 1/30 h free, 0.1133 h congested
            const auto r = assign_traffic(od, net, 1);
            CHECK(r.network.links()[0].flow == doctest::Approx(2000).epsilon(1e-12));
            CHECK(r.times(0, 1) == doctest::Approx(0.1).epsilon(1e-12));
            const auto next = all_or_nothing(od, r.network);
            CHECK(next[0] == 0.0);
        }
    }
    SUBCASE("loads follow the unique shortest path") {
        std::mt19937_64 gen(99);
        int checked = 0;
        for (int trial = 0; trial < 60; ++trial) {
            const Network net = random_network(gen, 2, 3, 7, trial % 3 == 0);
            std::uniform_int_distribution<int> node(0, 5);
            const int from = node(gen);
            int to = node(gen);
            if (from == to) continue;
            std::vector<std::pair<double, std::vector<int>>> paths;
            oracle::enumerate_paths(net.grid(), 20.0, net.links(), from, to, [&](double t, const std::vector<int>& used) {
                auto sorted = used;
                std::sort(sorted.begin(), sorted.end());
                paths.emplace_back(t, sorted);
            });
            double best = std::numeric_limits<double>::infinity();
            for (const auto& p : paths) best = std::min(best, p.first);
            std::vector<int> best_links;
            bool unique = true;
            bool first = true;
            for (const auto& p : paths) {
                if (p.first > best + 1e-9) continue;
                if (first) best_links = p.second;
                else if (p.second != best_links) unique = false;
                first = false;
            }
            // Collinear straight legs tie with the direct leg but load the same links.
            if (!unique) continue;
            Matrix od(6, 6);
            od(static_cast<std::size_t>(from), static_cast<std::size_t>(to)) = 37.5;
            const auto load = all_or_nothing(od, net);
            std::map<int, double> expect;
            for (int k : best_links) expect[k] += 37.5;
            for (std::size_t k = 0; k < load.size(); ++k) {
                CHECK(load[k] == doctest::Approx(expect[static_cast<int>(k)]).epsilon(1e-12));
            }
            const auto d = network_distances(net);
            CHECK(std::abs(d(from, to) - best) <= 1e-12);
            ++checked;
        }
        CHECK(checked > 20);
    }
}

}
