#include <doctest.h>

#include <atomic>
#include <cmath>

#include "cosched/error.hpp"
#include "cosched/rng.hpp"
#include "cosched/scheduler.hpp"
#include "test_util.hpp"

using namespace cosched;
using testutil::TempFile;
using testutil::make_profile;

namespace {

// Complete graph with seeded uniform weights; t_alone drawn as well so that
// odd graphs can be dummy-augmented.
DegradationGraph random_graph(int n, std::uint64_t seed, double wlo = 1.0, double whi = 100.0) {
    Rng rng(seed);
    std::vector<double> t(n);
    for (auto& x : t) x = rng.uniform(10.0, 200.0);
    std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = rng.uniform(wlo, whi);
            w[static_cast<std::size_t>(i) * n + j] = v;
            w[static_cast<std::size_t>(j) * n + i] = v;
        }
    return DegradationGraph::from_weights(std::move(t), w);
}

DegradationGraph graph_from_edge_weights(int n, const std::vector<std::array<double, 3>>& edges,
                                         double t_alone = 1.0) {
    std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
    for (const auto& [i, j, v] : edges) {
        w[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)] = v;
        w[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(i)] = v;
    }
    return DegradationGraph::from_weights(std::vector<double>(n, t_alone), w);
}

void check_partition(const Pairing& p, int n) {
    std::vector<int> seen(n, 0);
    for (auto [i, j] : p.pairs) {
        CHECK(i < j);
        ++seen[i];
        ++seen[j];
    }
    for (int s : p.solos) ++seen[s];
    for (int i = 0; i < n; ++i) CHECK(seen[i] == 1);
}

} // namespace

TEST_CASE("degradation graph edge weights") {
    SUBCASE("asymmetric degradations take the worse degraded runtime") {
        DegradationGraph g = DegradationGraph::from_degradations({100.0, 200.0}, {0.0, 50.0, 0.0, 0.0});
        // deg(0,1)=50% -> 150s; deg(1,0)=0% -> 200s
        CHECK(g.weight_at(0, 1) == doctest::Approx(200.0));
        CHECK(g.weight_at(1, 0) == g.weight_at(0, 1));
        CHECK(g.deg_at(0, 1) == 50.0);
        CHECK(g.deg_at(1, 0) == 0.0);
    }
    SUBCASE("zero degradations give max of baselines") {
        DegradationGraph g = DegradationGraph::from_degradations({100.0, 200.0, 50.0},
                                                                 std::vector<double>(9, 0.0));
        CHECK(g.weight_at(0, 1) == 200.0);
        CHECK(g.weight_at(0, 2) == 100.0);
        CHECK(g.weight_at(1, 2) == 200.0);
    }
    SUBCASE("weight is bounded below by both baselines when degradations are non-negative") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 4;
            std::vector<double> t(n), d(n * n, 0.0);
            for (auto& x : t) x = rng.uniform(10, 100);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) d[i * n + j] = rng.uniform(0, 150);
            const auto g = DegradationGraph::from_degradations(t, d);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    CHECK(g.weight_at(i, j) >= std::max(g.t_alone[i], g.t_alone[j]) - 1e-12);
        }
    }
}

TEST_CASE("build_degradation_graph issues n(n-1) predictions and matches the serial path") {
    std::vector<ApplicationProfile> profiles;
    JobQueue queue;
    for (int i = 0; i < 50; ++i) {
        profiles.push_back(make_profile("app" + std::to_string(i), 50.0 + i, 1e6 * (i + 1)));
        queue.jobs.push_back(profiles.back().app_id);
    }
    std::atomic<int> calls{0};
    PredictFn predict = [&calls](const ApplicationProfile& p, const ApplicationProfile& i) {
        calls.fetch_add(1, std::memory_order_relaxed);
        return 0.01 * (p.t_alone_s + i.t_alone_s);
    };
    const auto g = build_degradation_graph(queue, profiles, predict);
    CHECK(g.n == 50);
    CHECK(g.edge_count() == 1225);
    CHECK(calls.load() == 2450);

    const auto gs = build_degradation_graph_serial(queue, profiles, predict);
    CHECK(g.deg == gs.deg);
    CHECK(g.weight == gs.weight);
    CHECK(g.t_alone == gs.t_alone);

    JobQueue bad;
    bad.jobs = {"missing"};
    CHECK_THROWS_AS(build_degradation_graph(bad, profiles, predict), Error);
}

TEST_CASE("blossom solves the hand instance") {
    const auto g = graph_from_edge_weights(
        4, {{{0, 1, 5}}, {{2, 3, 5}}, {{0, 2, 1}}, {{1, 3, 1}}, {{0, 3, 10}}, {{1, 2, 10}}});
    const auto p = solve_blossom(g);
    REQUIRE(p.pairs.size() == 2);
    CHECK(p.solos.empty());
    CHECK(p.pairs[0] == std::pair<int, int>(0, 2));
    CHECK(p.pairs[1] == std::pair<int, int>(1, 3));
    CHECK(p.total_weight == doctest::Approx(2.0));
}

TEST_CASE("two jobs form the single pair") {
    const auto g = graph_from_edge_weights(2, {{{0, 1, 7.5}}});
    for (const Pairing& p : {solve_blossom(g), solve_greedy(g), brute_force_matching(g)}) {
        REQUIRE(p.pairs.size() == 1);
        CHECK(p.pairs[0] == std::pair<int, int>(0, 1));
        CHECK(p.total_weight == doctest::Approx(7.5));
    }
}

TEST_CASE("greedy follows the sorted edge list") {
    SUBCASE("agrees with blossom on the hand instance") {
        const auto g = graph_from_edge_weights(
            4, {{{0, 1, 5}}, {{2, 3, 5}}, {{0, 2, 1}}, {{1, 3, 1}}, {{0, 3, 10}}, {{1, 2, 10}}});
        const auto p = solve_greedy(g);
        REQUIRE(p.pairs.size() == 2);
        CHECK(p.pairs[0] == std::pair<int, int>(0, 2));
        CHECK(p.pairs[1] == std::pair<int, int>(1, 3));
        CHECK(p.total_weight == doctest::Approx(2.0));
    }
    SUBCASE("adversarial instance where greedy is dominated") {
        const auto g = graph_from_edge_weights(
            4, {{{0, 1, 1}}, {{2, 3, 100}}, {{0, 2, 2}}, {{1, 3, 2}}, {{0, 3, 3}}, {{1, 2, 3}}});
        const auto greedy = solve_greedy(g);
        CHECK(greedy.total_weight == doctest::Approx(101.0));
        REQUIRE(greedy.pairs.size() == 2);
        CHECK(greedy.pairs[0] == std::pair<int, int>(0, 1));
        CHECK(greedy.pairs[1] == std::pair<int, int>(2, 3));
        const auto blossom = solve_blossom(g);
        CHECK(blossom.total_weight == doctest::Approx(4.0));
        CHECK(blossom.total_weight <= greedy.total_weight);
    }
}

TEST_CASE("brute force enumerates (n-1)!! matchings") {
    std::uint64_t visited = 0;
    brute_force_matching(random_graph(4, 1), &visited);
    CHECK(visited == 3);
    brute_force_matching(random_graph(8, 2), &visited);
    CHECK(visited == 105);
    CHECK_THROWS_AS(brute_force_matching(random_graph(14, 3)), Error);
}

TEST_CASE("blossom equals brute force and dominates greedy on random graphs") {
    int instances = 0;
    for (int n : {3, 4, 5, 6, 7, 8}) {
        for (int trial = 0; trial < 25; ++trial) {
            const auto g = random_graph(n, 1000 + 100 * n + trial);
            const auto opt = brute_force_matching(g);
            const auto blossom = solve_blossom(g);
            const auto greedy = solve_greedy(g);
            CHECK(blossom.total_weight == doctest::Approx(opt.total_weight).epsilon(1e-12));
            CHECK(greedy.total_weight >= blossom.total_weight - 1e-9);
            check_partition(blossom, n);
            check_partition(greedy, n);
            if (n % 2 == 1) {
                CHECK(blossom.solos.size() == 1);
                CHECK(greedy.solos.size() == 1);
            } else {
                CHECK(blossom.solos.empty());
            }
            ++instances;
        }
    }
    CHECK(instances == 150);
}

TEST_CASE("matching scale invariance") {
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 6;
        const auto g = random_graph(n, 7000 + trial);
        const auto base = solve_blossom(g);
        const double c = 3.75;
        DegradationGraph scaled = g;
        for (auto& w : scaled.weight) w *= c;
        for (auto& t : scaled.t_alone) t *= c;
        const auto s = solve_blossom(scaled);
        CHECK(s.pairs == base.pairs);
        CHECK(s.total_weight == doctest::Approx(c * base.total_weight).epsilon(1e-9));
    }
}

TEST_CASE("blossom handles structured weights that force blossoms") {
    // integer-weight graphs with many ties exercise blossom creation paths
    for (int n : {6, 8, 10}) {
        for (int trial = 0; trial < 40; ++trial) {
            Rng rng(9000 + 100 * n + trial);
            std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    const double v = static_cast<double>(1 + rng.below(6));
                    w[static_cast<std::size_t>(i) * n + j] = v;
                    w[static_cast<std::size_t>(j) * n + i] = v;
                }
            const auto g = DegradationGraph::from_weights(std::vector<double>(n, 5.0), w);
            const auto opt = brute_force_matching(g);
            const auto blossom = solve_blossom(g);
            CHECK(blossom.total_weight == doctest::Approx(opt.total_weight).epsilon(1e-12));
            check_partition(blossom, n);
        }
    }
}

TEST_CASE("apply_threshold serializes expensive pairs") {
    SUBCASE("kept pair") {
        DegradationGraph g = DegradationGraph::from_weights({100.0, 100.0}, {0, 150, 150, 0});
        Pairing p;
        p.pairs = {{0, 1}};
        p.total_weight = 150;
        const auto s = apply_threshold(p, g);
        REQUIRE(s.entries.size() == 1);
        CHECK(s.entries[0].is_pair());
        CHECK(s.predicted_makespan_s == doctest::Approx(150.0));
    }
    SUBCASE("serialized pair") {
        DegradationGraph g = DegradationGraph::from_weights({100.0, 100.0}, {0, 230, 230, 0});
        Pairing p;
        p.pairs = {{0, 1}};
        p.total_weight = 230;
        const auto s = apply_threshold(p, g);
        REQUIRE(s.entries.size() == 2);
        CHECK_FALSE(s.entries[0].is_pair());
        CHECK(s.predicted_makespan_s == doctest::Approx(200.0));
    }
    SUBCASE("never increases predicted makespan and leaves no over-threshold pair") {
        for (int trial = 0; trial < 30; ++trial) {
            const int n = 8;
            Rng rng(500 + trial);
            std::vector<double> t(n), d(n * n, 0.0);
            for (auto& x : t) x = rng.uniform(50, 150);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) d[i * n + j] = rng.uniform(0, 250);
            const auto g = DegradationGraph::from_degradations(t, d);
            for (const Pairing& p : {solve_blossom(g), solve_greedy(g)}) {
                const auto s = apply_threshold(p, g);
                CHECK(s.predicted_makespan_s <= p.total_weight + 1e-9);
                double resum = 0;
                for (const auto& e : s.entries) {
                    resum += e.duration_s;
                    if (e.is_pair()) CHECK(e.duration_s <= g.t_alone[e.a] + g.t_alone[e.b] + 1e-12);
                }
                CHECK(resum == doctest::Approx(s.predicted_makespan_s));
                // ascending order
                for (std::size_t i = 1; i < s.entries.size(); ++i)
                    CHECK(s.entries[i - 1].duration_s <= s.entries[i].duration_s + 1e-12);
            }
        }
    }
}

TEST_CASE("di_pairing pairs extremes by miss rate") {
    auto mk = [](const std::string& id, double rate) {
        // cache_misses.mean = rate * t_alone so the DI key equals `rate`
        return make_profile(id, 100.0, rate * 100.0);
    };
    SUBCASE("even queue") {
        std::vector<ApplicationProfile> profiles{mk("a", 1), mk("b", 2), mk("c", 3), mk("d", 4)};
        JobQueue q;
        q.jobs = {"a", "b", "c", "d"};
        const auto p = di_pairing(q, profiles);
        REQUIRE(p.pairs.size() == 2);
        CHECK(p.pairs[0] == std::pair<int, int>(0, 3)); // lowest with highest
        CHECK(p.pairs[1] == std::pair<int, int>(1, 2));
    }
    SUBCASE("odd queue leaves the middle job solo") {
        std::vector<ApplicationProfile> profiles{mk("a", 1), mk("b", 2), mk("c", 3)};
        JobQueue q;
        q.jobs = {"a", "b", "c"};
        const auto p = di_pairing(q, profiles);
        REQUIRE(p.pairs.size() == 1);
        CHECK(p.pairs[0] == std::pair<int, int>(0, 2));
        REQUIRE(p.solos.size() == 1);
        CHECK(p.solos[0] == 1);
    }
    SUBCASE("ties break by app id") {
        std::vector<ApplicationProfile> profiles{mk("d", 1), mk("c", 1), mk("b", 1), mk("a", 1)};
        JobQueue q;
        q.jobs = {"d", "c", "b", "a"};
        const auto p = di_pairing(q, profiles);
        REQUIRE(p.pairs.size() == 2);
        // sorted by id: a(3), b(2), c(1), d(0); pairs (3,0) and (2,1)
        CHECK(p.pairs[0] == std::pair<int, int>(0, 3));
        CHECK(p.pairs[1] == std::pair<int, int>(1, 2));
    }
}

TEST_CASE("build_schedule strategies and dominance") {
    std::vector<ApplicationProfile> profiles;
    JobQueue queue;
    Rng rng(77);
    for (int i = 0; i < 12; ++i) {
        profiles.push_back(make_profile("app" + std::to_string(i), rng.uniform(80, 160), 1e6 * (1 + i)));
        queue.jobs.push_back(profiles[i].app_id);
    }
    PredictFn predict = [&rng](const ApplicationProfile& p, const ApplicationProfile& i) {
        // deterministic pseudo-degradation from ids
        const double a = static_cast<double>(p.app_id.back() - '0');
        const double b = static_cast<double>(i.app_id.back() - '0');
        return 10.0 * a + 17.0 * b;
    };
    const auto graph = build_degradation_graph_serial(queue, profiles, predict);
    const auto blossom = build_schedule(graph, Strategy::Blossom, queue, profiles);
    const auto greedy = build_schedule(graph, Strategy::Greedy, queue, profiles);
    CHECK(blossom.predicted_makespan_s <= greedy.predicted_makespan_s + 1e-9);

    const auto di = build_schedule(graph, Strategy::Di, queue, profiles);
    int covered = 0;
    for (const auto& e : di.entries) covered += e.is_pair() ? 2 : 1;
    CHECK(covered == queue.size());
}

TEST_CASE("schedule json round trip") {
    Schedule s;
    s.strategy = Strategy::Greedy;
    s.entries = {{0, 2, 123.5}, {1, -1, 80.0}};
    s.predicted_makespan_s = 203.5;
    TempFile f("schedule.json");
    save_schedule_json(f.path, s);
    const auto t = load_schedule_json(f.path);
    CHECK(t.strategy == Strategy::Greedy);
    REQUIRE(t.entries.size() == 2);
    CHECK(t.entries[0].a == 0);
    CHECK(t.entries[0].b == 2);
    CHECK(t.entries[0].duration_s == 123.5);
    CHECK_FALSE(t.entries[1].is_pair());
    CHECK(t.predicted_makespan_s == 203.5);
}

TEST_CASE("queue json round trip") {
    JobQueue q;
    q.jobs = {"a", "b", "a"};
    TempFile f("queue.json");
    save_queue_json(f.path, q);
    const auto t = load_queue_json(f.path);
    CHECK(t.jobs == q.jobs);
}
