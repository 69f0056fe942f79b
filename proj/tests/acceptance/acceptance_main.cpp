// Acceptance suite: end-to-end checks of the toolkit's contracts, one line
// of output per criterion. Usage: cosched_acceptance [path-to-cosched-cli].
// The CLI path is needed by the determinism criterion, which reruns the whole
// pipeline through the binary and compares output bytes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cosched/csv.hpp"
#include "cosched/dataset_io.hpp"
#include "cosched/error.hpp"
#include "cosched/model.hpp"
#include "cosched/profiles.hpp"
#include "cosched/rng.hpp"
#include "cosched/scheduler.hpp"
#include "cosched/simulator.hpp"

namespace {

using namespace cosched;
namespace fs = std::filesystem;

std::string g_cli_path;

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

#define EXPECT(cond, msg)                                                                                            \
    do {                                                                                                             \
        if (!(cond)) return {false, msg};                                                                            \
    } while (0)

// ---------------------------------------------------------------------------
// 1. degradation definition against an independent reimplementation

Outcome criterion_degradation() {
    auto reference = [](double t_alone, double t_coloc) { return (t_coloc / t_alone - 1.0) * 100.0; };
    Rng rng(101);
    for (int i = 0; i < 1000; ++i) {
        const double t_alone = rng.uniform(100.0, 500.0);
        const double t_coloc = rng.uniform(50.0, 750.0);
        const double got = compute_degradation(t_alone, t_coloc);
        const double want = reference(t_alone, t_coloc);
        EXPECT(std::fabs(got - want) <= 1e-12,
               "mismatch at t_alone=" + fmt_double(t_alone) + " t_coloc=" + fmt_double(t_coloc));
    }
    EXPECT(compute_degradation(100, 150) == 50.0, "example (100,150)");
    EXPECT(compute_degradation(100, 100) == 0.0, "example (100,100)");
    EXPECT(compute_degradation(200, 190) == -5.0, "example (200,190)");
    return {true, "1000 random pairs + 3 tagged examples"};
}

// ---------------------------------------------------------------------------
// 2. R^2 identities

Outcome criterion_r2() {
    Rng rng(202);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 3 + static_cast<int>(rng.below(40));
        std::vector<double> a(n), p(n);
        for (int i = 0; i < n; ++i) {
            a[i] = rng.uniform(0.0, 300.0);
            p[i] = rng.uniform(0.0, 300.0);
        }
        bool constant = true;
        for (int i = 1; i < n; ++i) constant = constant && a[i] == a[0];
        if (constant) continue;

        EXPECT(r2_score(a, a) == 1.0, "r2(a,a) != 1");
        double mean = 0;
        for (double v : a) mean += v;
        mean /= n;
        const std::vector<double> mean_pred(n, mean);
        EXPECT(std::fabs(r2_score(a, mean_pred)) <= 1e-9, "r2(a,mean) != 0");

        const double c = rng.uniform(-500.0, 500.0);
        std::vector<double> a2(a), p2(p);
        for (int i = 0; i < n; ++i) {
            a2[i] += c;
            p2[i] += c;
        }
        EXPECT(std::fabs(r2_score(a2, p2) - r2_score(a, p)) <= 1e-9, "shift invariance violated");
    }
    return {true, "identities + shift invariance over 500 random vectors"};
}

// ---------------------------------------------------------------------------
// 3. matching oracle equivalence

DegradationGraph random_complete_graph(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> t(n);
    for (auto& x : t) x = rng.uniform(20.0, 300.0);
    std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = rng.uniform(1.0, 400.0);
            w[static_cast<std::size_t>(i) * n + j] = v;
            w[static_cast<std::size_t>(j) * n + i] = v;
        }
    return DegradationGraph::from_weights(std::move(t), w);
}

Outcome criterion_matching() {
    int instances = 0;
    const int even_sizes[3] = {4, 6, 8};
    for (int s = 0; s < 3; ++s) {
        const int n = even_sizes[s];
        const int count = s < 2 ? 67 : 66;
        for (int trial = 0; trial < count; ++trial) {
            const auto g = random_complete_graph(n, 30000 + 1000 * n + trial);
            const auto opt = brute_force_matching(g);
            const auto blossom = solve_blossom(g);
            const auto greedy = solve_greedy(g);
            EXPECT(std::fabs(blossom.total_weight - opt.total_weight) <= 1e-9,
                   "blossom suboptimal at n=" + std::to_string(n) + " trial " + std::to_string(trial));
            EXPECT(greedy.total_weight >= blossom.total_weight - 1e-9,
                   "greedy beat blossom at n=" + std::to_string(n));
            ++instances;
        }
    }
    for (int n : {3, 5, 7}) {
        for (int trial = 0; trial < 40; ++trial) {
            const auto g = random_complete_graph(n, 40000 + 1000 * n + trial);
            const auto opt = brute_force_matching(g);
            const auto blossom = solve_blossom(g);
            const auto greedy = solve_greedy(g);
            EXPECT(std::fabs(blossom.total_weight - opt.total_weight) <= 1e-9,
                   "odd-n blossom suboptimal at n=" + std::to_string(n));
            EXPECT(blossom.solos.size() == 1, "odd n must leave one solo");
            EXPECT(greedy.total_weight >= blossom.total_weight - 1e-9, "greedy beat blossom (odd)");
            ++instances;
        }
    }
    return {true, std::to_string(instances) + " instances optimal, greedy dominated"};
}

// ---------------------------------------------------------------------------
// 4. exact-fit forest

Outcome criterion_exact_fit() {
    const FeatureSet fs{CounterGroup::GenericSubset, StatMode::MeanOnly};
    Rng rng(404);
    std::vector<ColocationSample> data;
    for (int i = 0; i < 128; ++i) {
        ColocationSample s;
        s.features.resize(fs.feature_length());
        for (auto& f : s.features) f = rng.uniform(0.0, 1.0);
        s.degradation = rng.uniform(0.0, 250.0);
        data.push_back(std::move(s));
    }
    ForestHyperparams hp;
    hp.n_estimators = 1;
    hp.bootstrap = false;
    hp.min_samples_split = 2;
    hp.max_features = MaxFeatures::all();
    hp.seed = 5;
    const auto model = train_forest(data, hp, fs);
    std::vector<double> actual, predicted;
    for (const auto& s : data) {
        actual.push_back(s.degradation);
        predicted.push_back(model.predict(s.features));
    }
    EXPECT(r2_score(actual, predicted) == 1.0, "training R2 != 1.0");
    return {true, "single unbootstrapped tree memorizes 128 distinct rows, R2 == 1.0"};
}

// ---------------------------------------------------------------------------
// 5. learnability on planted data

Outcome criterion_learnability() {
    const FeatureSet fs{CounterGroup::GenericSubset, StatMode::MeanOnly};
    auto [profiles, oracle] = synth_workload(32, 42);
    const auto dataset = build_training_dataset(profiles, oracle_to_measurements(oracle), fs);
    auto [train, test] = holdout_split(dataset, 0.3, 7);
    ForestHyperparams hp; // 'sqrt', 2, bootstrap, 22
    hp.seed = 1;
    const auto model = train_forest(train, hp, fs);
    std::vector<double> actual, predicted;
    for (const auto& s : test) {
        actual.push_back(s.degradation);
        predicted.push_back(model.predict(s.features));
    }
    const double r2 = r2_score(actual, predicted);
    EXPECT(r2 >= 0.7, "holdout R2 " + fmt_double(r2) + " below 0.7");
    return {true, "holdout R2 = " + fmt_fixed(r2, 4) + " >= 0.7 (desk-scale bound)"};
}

// ---------------------------------------------------------------------------
// 6. simulated-deployment dominance

Outcome criterion_dominance() {
    const FeatureSet fs{CounterGroup::GenericSubset, StatMode::MeanOnly};
    auto [profiles, oracle] = synth_workload(32, 42);
    std::vector<std::string> ids;
    for (const auto& p : profiles) ids.push_back(p.app_id);
    std::vector<JobQueue> queues;
    for (int i = 0; i < 20; ++i) queues.push_back(generate_random_queue(ids, 50, mix_seed(606, i)));

    const std::vector<Policy> policies{Policy::Fifo, Policy::Blossom, Policy::Greedy};
    const auto perfect = run_experiment(policies, queues, oracle, oracle_predictor(oracle), profiles, {1, 50});
    for (const auto& q : perfect.queues) {
        double fifo = 0, blossom = 0, greedy = 0;
        for (const auto& po : q.policies) {
            if (po.policy == Policy::Fifo) fifo = po.makespan_s;
            if (po.policy == Policy::Blossom) blossom = po.makespan_s;
            if (po.policy == Policy::Greedy) greedy = po.makespan_s;
        }
        EXPECT(blossom <= greedy + 1e-9,
               "queue " + std::to_string(q.queue_id) + ": blossom > greedy under perfect predictions");
        EXPECT(greedy <= fifo + 1e-9,
               "queue " + std::to_string(q.queue_id) + ": greedy > fifo under perfect predictions");
    }

    const auto dataset = build_training_dataset(profiles, oracle_to_measurements(oracle), fs);
    ForestHyperparams hp;
    hp.seed = 1;
    const auto model = train_forest(dataset, hp, fs);
    const auto learned = run_experiment(policies, queues, oracle, model_predictor(model), profiles, {1, 50});
    const double mb = learned.mean_normalized(Policy::Blossom);
    const double mg = learned.mean_normalized(Policy::Greedy);
    EXPECT(mb < 1.0, "learned blossom mean normalized " + fmt_double(mb) + " not < 1");
    EXPECT(mg < 1.0, "learned greedy mean normalized " + fmt_double(mg) + " not < 1");
    std::ostringstream d;
    d << "perfect: blossom<=greedy<=fifo on 20/20 queues; learned means blossom=" << fmt_fixed(mb, 3)
      << " greedy=" << fmt_fixed(mg, 3) << " < 1";
    return {true, d.str()};
}

// ---------------------------------------------------------------------------
// 7. stratified behavior

Outcome criterion_stratified() {
    const FeatureSet fs{CounterGroup::GenericSubset, StatMode::MeanOnly};
    auto [profiles, oracle] = synth_workload(32, 42);
    const auto dataset = build_training_dataset(profiles, oracle_to_measurements(oracle), fs);
    ForestHyperparams hp;
    hp.seed = 1;
    const auto model = train_forest(dataset, hp, fs);
    const std::vector<Policy> policies{Policy::Fifo, Policy::FifoShared, Policy::Blossom, Policy::Greedy};

    const auto high_queues = generate_stratified_queues(oracle, DegradationLevel::High, 5, 50, 707);
    const auto high = run_experiment(policies, high_queues, oracle, model_predictor(model), profiles, {1, 50});
    const double high_shared = high.mean_normalized(Policy::FifoShared);
    const double high_blossom = high.mean_normalized(Policy::Blossom);
    const double high_greedy = high.mean_normalized(Policy::Greedy);
    EXPECT(high_shared > 1.5, "high: fifo_shared " + fmt_double(high_shared) + " not > 1.5");
    EXPECT(high_blossom <= 1.0, "high: blossom " + fmt_double(high_blossom) + " not <= 1");
    EXPECT(high_greedy <= 1.0, "high: greedy " + fmt_double(high_greedy) + " not <= 1");

    const auto low_queues = generate_stratified_queues(oracle, DegradationLevel::Low, 5, 50, 808);
    const auto low = run_experiment(policies, low_queues, oracle, model_predictor(model), profiles, {1, 50});
    const double low_shared = low.mean_normalized(Policy::FifoShared);
    const double low_blossom = low.mean_normalized(Policy::Blossom);
    const double low_greedy = low.mean_normalized(Policy::Greedy);
    EXPECT(low_shared < 1.0, "low: fifo_shared " + fmt_double(low_shared) + " not < 1");
    EXPECT(low_blossom < 1.0, "low: blossom " + fmt_double(low_blossom) + " not < 1");
    EXPECT(low_greedy < 1.0, "low: greedy " + fmt_double(low_greedy) + " not < 1");

    std::ostringstream d;
    d << "high: shared=" << fmt_fixed(high_shared, 3) << ">1.5, ML<=1; low: shared=" << fmt_fixed(low_shared, 3)
      << "<1, ML<1";
    return {true, d.str()};
}

// ---------------------------------------------------------------------------
// 8. DI baseline sanity

Outcome criterion_di() {
    const FeatureSet fs{CounterGroup::GenericSubset, StatMode::MeanOnly};
    auto [profiles, oracle] = synth_workload(32, 42);
    const auto dataset = build_training_dataset(profiles, oracle_to_measurements(oracle), fs);
    ForestHyperparams hp;
    hp.seed = 1;
    const auto model = train_forest(dataset, hp, fs);
    std::vector<std::string> ids;
    for (const auto& p : profiles) ids.push_back(p.app_id);
    std::vector<JobQueue> queues;
    for (int i = 0; i < 10; ++i) queues.push_back(generate_random_queue(ids, 50, mix_seed(909, i)));

    const std::vector<Policy> policies{Policy::Fifo, Policy::Di, Policy::Blossom, Policy::Greedy};
    const auto report = run_experiment(policies, queues, oracle, model_predictor(model), profiles, {1, 50});
    const double di = report.mean_normalized(Policy::Di);
    const double blossom = report.mean_normalized(Policy::Blossom);
    const double greedy = report.mean_normalized(Policy::Greedy);
    EXPECT(blossom <= di, "blossom mean " + fmt_double(blossom) + " not <= DI mean " + fmt_double(di));
    EXPECT(greedy <= di, "greedy mean " + fmt_double(greedy) + " not <= DI mean " + fmt_double(di));
    std::ostringstream d;
    d << "means: blossom=" << fmt_fixed(blossom, 3) << " greedy=" << fmt_fixed(greedy, 3)
      << " <= di=" << fmt_fixed(di, 3) << " over 10 queues";
    return {true, d.str()};
}

// ---------------------------------------------------------------------------
// 9. overhead scaling

Outcome criterion_overhead() {
    const FeatureSet fs{CounterGroup::GenericSubset, StatMode::MeanOnly};
    auto [profiles, oracle] = synth_workload(32, 42);
    const auto dataset = build_training_dataset(profiles, oracle_to_measurements(oracle), fs);
    ForestHyperparams hp;
    hp.seed = 1;
    const auto m22 = train_forest(dataset, hp, fs);
    hp.n_estimators = 6;
    const auto m6 = train_forest(dataset, hp, fs);
    std::vector<std::string> ids;
    for (const auto& p : profiles) ids.push_back(p.app_id);

    // prediction time over all pairs grows superlinearly in queue length
    std::vector<double> times;
    const int sizes[4] = {10, 25, 50, 100};
    for (int size : sizes) {
        const auto queue = generate_random_queue(ids, size, 1000 + size);
        times.push_back(measure_scheduling_overhead(m22, profiles, queue, 5).predict_time_s);
    }
    for (std::size_t i = 1; i < times.size(); ++i)
        EXPECT(times[i] > times[i - 1], "predict time not increasing with queue length");
    const double linear_extrapolation = times[0] * (100.0 / 10.0);
    EXPECT(times[3] > 2.0 * linear_extrapolation,
           "predict time not superlinear: t(100)=" + fmt_double(times[3]) + " vs linear fit " +
               fmt_double(linear_extrapolation));

    // fewer estimators cut inference cost on the same 50-job queue
    const auto queue50 = generate_random_queue(ids, 50, 5050);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) {
            if (i == j) continue;
            rows.push_back(feature_vector(find_profile(profiles, queue50.jobs[i]),
                                          find_profile(profiles, queue50.jobs[j]), fs));
        }
    auto time_model = [&](const DegradationModel& m) {
        double best = 1e300;
        for (int rep = 0; rep < 7; ++rep) {
            const double t0 = now_s();
            const auto out = predict_batch_serial(m, rows);
            best = std::min(best, now_s() - t0);
            if (out.empty()) break;
        }
        return best;
    };
    const double t6 = time_model(m6);
    const double t22 = time_model(m22);
    EXPECT(t6 <= 0.5 * t22,
           "6-estimator predict " + fmt_double(t6) + " not <= half of 22-estimator " + fmt_double(t22));

    // greedy solves far faster than blossom at n=100
    const auto queue100 = generate_random_queue(ids, 100, 9100);
    const auto sample = measure_scheduling_overhead(m22, profiles, queue100, 5);
    EXPECT(sample.solve_greedy_s < sample.solve_blossom_s,
           "greedy " + fmt_double(sample.solve_greedy_s) + " not faster than blossom " +
               fmt_double(sample.solve_blossom_s));

    std::ostringstream d;
    d << "t(100)/t(10)=" << fmt_fixed(times[3] / times[0], 1) << "x; 6-tree/22-tree=" << fmt_fixed(t6 / t22, 2)
      << "; greedy " << fmt_double(sample.solve_greedy_s) << "s < blossom " << fmt_double(sample.solve_blossom_s)
      << "s at n=100";
    return {true, d.str()};
}

// ---------------------------------------------------------------------------
// 10. pipeline determinism through the CLI

int run_cli(const std::string& args, const fs::path& cwd) {
    const std::string cmd = "cd '" + cwd.string() + "' && '" + g_cli_path + "' " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

Outcome criterion_determinism() {
    EXPECT(!g_cli_path.empty() && fs::exists(g_cli_path),
           "cosched binary not found (pass its path as argv[1])");
    const fs::path base = fs::temp_directory_path() / "cosched_acceptance_det";
    std::error_code ec;
    fs::remove_all(base, ec);

    std::vector<std::string> model_bytes, schedule_bytes, report_bytes;
    for (int run = 0; run < 2; ++run) {
        const fs::path dir = base / ("run" + std::to_string(run));
        fs::create_directories(dir);
        write_text_file((dir / "queue.json").string(),
                        "{\"jobs\":[\"app000\",\"app003\",\"app007\",\"app012\",\"app019\",\"app025\","
                        "\"app030\",\"app031\",\"app007\",\"app001\"]}\n");
        EXPECT(run_cli("synth --apps 32 --seed 42 --out-dir .", dir) == 0, "synth failed");
        EXPECT(run_cli("dataset --profiles profiles.csv --colocations colocations.csv --out dataset.csv", dir) == 0,
               "dataset failed");
        EXPECT(run_cli("train --dataset dataset.csv --out model.json --seed 1", dir) == 0, "train failed");
        EXPECT(run_cli("schedule --queue queue.json --model model.json --profiles profiles.csv "
                       "--strategy blossom --out schedule.json",
                       dir) == 0,
               "schedule failed");
        EXPECT(run_cli("simulate --profiles profiles.csv --oracle oracle.csv --model model.json "
                       "--queues 5 --queue-size 20 --seed 3 --out-report report.csv",
                       dir) == 0,
               "simulate failed");
        model_bytes.push_back(read_text_file((dir / "model.json").string()));
        schedule_bytes.push_back(read_text_file((dir / "schedule.json").string()));
        report_bytes.push_back(read_text_file((dir / "report.csv").string()));
    }
    EXPECT(model_bytes[0] == model_bytes[1], "model.json differs between identical runs");
    EXPECT(schedule_bytes[0] == schedule_bytes[1], "schedule.json differs between identical runs");
    EXPECT(report_bytes[0] == report_bytes[1], "report.csv differs between identical runs");
    fs::remove_all(base, ec);
    return {true, "model.json, schedule.json, report.csv byte-identical across two pipeline runs"};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> fn;
};

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];

    const std::vector<Criterion> criteria{
        {1, "degradation definition vs independent oracle", 1.0, criterion_degradation},
        {2, "R^2 identities and shift invariance", 1.0, criterion_r2},
        {3, "matching oracle equivalence (blossom == brute force, greedy dominated)", 10.0, criterion_matching},
        {4, "exact-fit forest on distinct rows", 60.0, criterion_exact_fit},
        {5, "learnability on planted data (holdout R^2 >= 0.7)", 60.0, criterion_learnability},
        {6, "simulated-deployment dominance", 300.0, criterion_dominance},
        {7, "stratified degradation behavior", 180.0, criterion_stratified},
        {8, "DI baseline ordering", 300.0, criterion_di},
        {9, "scheduling overhead scaling", 120.0, criterion_overhead},
        {10, "pipeline determinism (byte-identical artifacts)", 600.0, criterion_determinism},
    };

    int passed = 0;
    for (const auto& c : criteria) {
        const double t0 = now_s();
        Outcome outcome;
        try {
            outcome = c.fn();
        } catch (const Error& e) {
            outcome = {false, std::string(e.code()) + ": " + e.what()};
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed = now_s() - t0;
        if (outcome.pass && elapsed > c.budget_s) {
            outcome.pass = false;
            outcome.detail += " [exceeded " + fmt_double(c.budget_s) + "s budget]";
        }
        std::printf("[%s] criterion %2d: %s — %s (%.2fs)\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name,
                    outcome.detail.c_str(), elapsed);
        if (outcome.pass) ++passed;
    }
    std::printf("RESULT: %d/%zu criteria passed\n", passed, criteria.size());
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
