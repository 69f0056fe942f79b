// cosched: colocation-aware scheduling toolkit.
//
// Pipeline: synth -> dataset -> train/tune/eval -> schedule -> simulate ->
// compare. Every command is a pure function of its flags, input files and
// seeds; rerunning with the same inputs reproduces output files byte for
// byte (wall-clock overhead columns are opt-in via --measure-overhead).

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cosched/csv.hpp"
#include "cosched/dataset_io.hpp"
#include "cosched/error.hpp"
#include "cosched/model.hpp"
#include "cosched/profiles.hpp"
#include "cosched/rng.hpp"
#include "cosched/scheduler.hpp"
#include "cosched/simulator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace cosched;

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::pair<int, int> parse_range(const std::string& text, const std::string& what) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) fail("bad_argument", what + " must look like lo:hi, got '" + text + "'");
    return {static_cast<int>(parse_int(text.substr(0, colon), 0, what)),
            static_cast<int>(parse_int(text.substr(colon + 1), 0, what))};
}

struct CommonOpts {
    std::uint64_t seed = 0;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "base RNG seed (dimensionless; default 0)");
    cmd->add_option("--jobs", opts.jobs, "worker thread cap, 0 = library default (count)");
}

void apply_jobs(const CommonOpts& opts) {
#ifdef _OPENMP
    if (opts.jobs > 0) omp_set_num_threads(opts.jobs);
#else
    (void)opts;
#endif
}

ForestHyperparams hp_from_flags(int estimators, const std::string& max_features, int min_split, bool no_bootstrap,
                                std::uint64_t seed) {
    ForestHyperparams hp;
    hp.n_estimators = estimators;
    hp.max_features = MaxFeatures::parse(max_features);
    hp.min_samples_split = min_split;
    hp.bootstrap = !no_bootstrap;
    hp.seed = seed;
    return hp;
}

void print_eval(const char* label, const EvaluationReport& report) {
    std::printf("%s: r2=%.6f n_train=%d n_test=%d\n", label, report.r2, report.n_train, report.n_test);
    if (!report.per_fold_r2.empty()) {
        std::printf("%s folds:", label);
        for (double v : report.per_fold_r2) std::printf(" %.6f", v);
        std::printf(" (mean %.6f)\n", report.mean_fold_r2());
    }
}

double bench_predict_s(const DegradationModel& model, const std::vector<ColocationSample>& samples) {
    std::vector<std::vector<double>> rows;
    rows.reserve(samples.size());
    for (const auto& s : samples) rows.push_back(s.features);
    double best = 1e300;
    for (int rep = 0; rep < 5; ++rep) {
        const double t0 = now_s();
        const auto out = predict_batch_serial(model, rows);
        best = std::min(best, now_s() - t0);
        if (out.empty()) break;
    }
    return best;
}

// ---------------------------------------------------------------------------

int cmd_synth(int n_apps, const CommonOpts& common, const std::string& out_dir) {
    auto [profiles, oracle] = synth_workload(n_apps, common.seed);
    std::filesystem::create_directories(out_dir);
    const std::string stamp = "generated by cosched synth; apps=" + std::to_string(n_apps) +
                              "; seed=" + std::to_string(common.seed);
    const std::string shape =
        "planted degradation: clamp((800*(m_p*m_i)^2.4 + 40*m_i*u_p) * (1+0.05*N(0,1)), 0, 450) "
        "with m = miss ratio, u = CPU usage fraction of the primary";
    write_profiles_csv(out_dir + "/profiles.csv", profiles, {stamp, shape});
    write_oracle_csv(out_dir + "/oracle.csv", oracle, {stamp, shape});
    write_colocations_csv(out_dir + "/colocations.csv", oracle_to_measurements(oracle), {stamp});
    std::printf("seed=%" PRIu64 "\n", common.seed);
    std::printf("synth: %d apps -> %s/profiles.csv, oracle.csv (%zu pairs), colocations.csv (%d rows)\n", n_apps,
                out_dir.c_str(), oracle.degradation_pct.size(), n_apps * (n_apps - 1));
    return 0;
}

int cmd_dataset(const std::string& profiles_path, const std::string& colocations_path, const std::string& features,
                const std::string& stats, const std::string& out_path) {
    const FeatureSet fs = FeatureSet::parse(features, stats);
    const auto profiles = parse_profiles(profiles_path, fs);
    const auto measurements = parse_colocations(colocations_path);

    DatasetFile ds;
    ds.feature_set = fs;
    ds.samples = build_training_dataset(profiles, measurements, fs);
    ds.profiles_hash = hash_file(profiles_path);
    ds.colocations_hash = hash_file(colocations_path);
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        const double raw = compute_degradation(find_profile(profiles, measurements[i].primary_id).t_alone_s,
                                               measurements[i].t_coloc_s);
        if (raw < 0) ++ds.clamped_rows;
    }
    write_dataset_csv(out_path, ds);
    std::printf("dataset: %zu samples, %d features (%s) -> %s\n", ds.samples.size(), fs.feature_length(),
                fs.to_string().c_str(), out_path.c_str());
    std::printf("clamped: %d of %zu measurements had negative raw degradation (set to 0)\n", ds.clamped_rows,
                measurements.size());
    return 0;
}

int cmd_train(const std::string& dataset_path, const std::string& out_path, int estimators,
              const std::string& max_features, int min_split, bool no_bootstrap, double holdout, int k,
              const CommonOpts& common) {
    const DatasetFile ds = load_dataset_csv(dataset_path);
    const ForestHyperparams hp = hp_from_flags(estimators, max_features, min_split, no_bootstrap, common.seed);
    std::printf("seed=%" PRIu64 "\n", common.seed);

    std::vector<ColocationSample> train = ds.samples;
    if (holdout > 0) {
        auto [tr, te] = holdout_split(ds.samples, holdout, common.seed);
        train = std::move(tr);
        if (k >= 2) print_eval("cv", cross_validate(train, k, hp, ds.feature_set));
        const auto model = train_forest(train, hp, ds.feature_set);
        std::vector<double> actual, predicted;
        for (const auto& s : te) {
            actual.push_back(s.degradation);
            predicted.push_back(model.predict(s.features));
        }
        std::printf("holdout: r2=%.6f n_train=%zu n_test=%zu\n", r2_score(actual, predicted), train.size(),
                    te.size());
        save_model(model, out_path);
        std::printf("predict_bench: rows=%zu estimators=%d time_s=%.6f\n", te.size(), hp.n_estimators,
                    bench_predict_s(model, te));
    } else {
        if (k >= 2) print_eval("cv", cross_validate(train, k, hp, ds.feature_set));
        const auto model = train_forest(train, hp, ds.feature_set);
        save_model(model, out_path);
        std::printf("predict_bench: rows=%zu estimators=%d time_s=%.6f\n", train.size(), hp.n_estimators,
                    bench_predict_s(model, train));
    }
    std::printf("model: %d trees (%s) -> %s\n", estimators, ds.feature_set.to_string().c_str(), out_path.c_str());
    return 0;
}

int cmd_tune(const std::string& dataset_path, const std::string& out_path, int budget, int k,
             const std::string& estimators_range, const std::string& min_split_range,
             const std::string& max_features_choices, const std::string& bootstrap_choices,
             const CommonOpts& common) {
    const DatasetFile ds = load_dataset_csv(dataset_path);
    SearchSpace space;
    space.n_estimators = parse_range(estimators_range, "--estimators-range");
    space.min_samples_split = parse_range(min_split_range, "--min-split-range");
    space.max_features.clear();
    for (const auto& t : split_csv_list(max_features_choices)) space.max_features.push_back(MaxFeatures::parse(t));
    space.bootstrap.clear();
    for (const auto& t : split_csv_list(bootstrap_choices)) {
        if (t != "true" && t != "false") fail("bad_argument", "--bootstrap-choices entries must be true|false");
        space.bootstrap.push_back(t == "true");
    }
    std::printf("seed=%" PRIu64 "\n", common.seed);
    auto [hp, report] = tune_hyperparameters(ds.samples, budget, space, common.seed, ds.feature_set, k);
    std::printf("best: estimators=%d max_features=%s min_split=%d bootstrap=%s mean_cv_r2=%.6f\n", hp.n_estimators,
                hp.max_features.to_string().c_str(), hp.min_samples_split, hp.bootstrap ? "true" : "false",
                report.mean_fold_r2());
    print_eval("cv", report);
    const auto model = train_forest(ds.samples, hp, ds.feature_set);
    save_model(model, out_path);
    std::printf("model: tuned forest -> %s\n", out_path.c_str());
    return 0;
}

int cmd_eval(const std::string& dataset_path, const std::string& model_path, double holdout, int k,
             const std::string& compare_estimators, bool baseline, const CommonOpts& common) {
    const DatasetFile ds = load_dataset_csv(dataset_path);
    const DegradationModel model = load_model(model_path);
    if (model.feature_set != ds.feature_set)
        fail("feature_mismatch", "model feature set " + model.feature_set.to_string() +
                                     " does not match dataset " + ds.feature_set.to_string());
    std::printf("seed=%" PRIu64 "\n", common.seed);

    const std::vector<ColocationSample>* eval_set = &ds.samples;
    std::vector<ColocationSample> test;
    if (holdout > 0) {
        auto [tr, te] = holdout_split(ds.samples, holdout, common.seed);
        test = std::move(te);
        eval_set = &test;
    }
    std::vector<double> actual, predicted;
    for (const auto& s : *eval_set) {
        actual.push_back(s.degradation);
        predicted.push_back(model.predict(s.features));
    }
    std::printf("eval: r2=%.6f n=%zu\n", r2_score(actual, predicted), eval_set->size());

    if (k >= 2) print_eval("cv", cross_validate(ds.samples, k, model.hyperparams, ds.feature_set));
    if (baseline) {
        auto [lin, rep] = baseline_least_squares(ds.samples, holdout > 0 ? holdout : 0.3, common.seed);
        std::printf("baseline_least_squares: r2=%.6f\n", rep.r2);
    }
    if (!compare_estimators.empty()) {
        const auto counts = split_csv_list(compare_estimators);
        if (counts.size() != 2) fail("bad_argument", "--compare-estimators expects two counts, e.g. 6,22");
        double times[2] = {0, 0};
        for (int i = 0; i < 2; ++i) {
            ForestHyperparams hp = model.hyperparams;
            hp.n_estimators = static_cast<int>(parse_int(counts[i], 0, "--compare-estimators"));
            const auto m = train_forest(ds.samples, hp, ds.feature_set);
            times[i] = bench_predict_s(m, ds.samples);
            std::printf("predict_bench: rows=%zu estimators=%d time_s=%.6f\n", ds.samples.size(), hp.n_estimators,
                        times[i]);
        }
        std::printf("predict_bench_ratio: %.3f\n", times[0] / times[1]);
    }
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& profiles_path, const std::string& primary,
                const std::string& interfering) {
    const DegradationModel model = load_model(model_path);
    const auto profiles = parse_profiles(profiles_path, model.feature_set);
    const double deg = predict_degradation(model, find_profile(profiles, primary), find_profile(profiles, interfering));
    std::printf("predicted_degradation_pct: %s\n", fmt_double(deg).c_str());
    return 0;
}

int cmd_schedule(const std::string& queue_path, const std::string& model_path, const std::string& profiles_path,
                 const std::string& strategy_name_arg, const std::string& out_path) {
    const DegradationModel model = load_model(model_path);
    const auto profiles = parse_profiles(profiles_path, model.feature_set);
    const JobQueue queue = load_queue_json(queue_path);
    const Strategy strategy = parse_strategy(strategy_name_arg);

    const auto graph = build_degradation_graph(queue, profiles, model);
    const Schedule schedule = build_schedule(graph, strategy, queue, profiles);
    save_schedule_json(out_path, schedule);

    int pairs = 0, solos = 0;
    for (const auto& e : schedule.entries) (e.is_pair() ? pairs : solos)++;
    std::printf("schedule: strategy=%s jobs=%d pairs=%d solos=%d predicted_makespan_s=%s -> %s\n",
                strategy_name(strategy).c_str(), queue.size(), pairs, solos,
                fmt_double(schedule.predicted_makespan_s).c_str(), out_path.c_str());
    return 0;
}

int cmd_simulate(const std::string& profiles_path, const std::string& oracle_path, const std::string& model_path,
                 const std::string& policies_arg, int queues, int queue_size, int servers, int jobs_per_server,
                 const std::string& stratified, bool perfect_predictor, bool measure_overhead,
                 const std::string& out_report, const std::string& out_timeline, const CommonOpts& common) {
    std::vector<Policy> policies;
    for (const auto& name : split_csv_list(policies_arg)) policies.push_back(parse_policy(name));
    if (policies.empty()) fail("bad_argument", "no policies requested");

    const bool needs_model =
        !perfect_predictor && std::any_of(policies.begin(), policies.end(), [](Policy p) {
            return p == Policy::Blossom || p == Policy::Greedy;
        });
    DegradationModel model;
    FeatureSet fs{CounterGroup::GenericSubset, StatMode::FullStats};
    if (needs_model) {
        if (model_path.empty()) fail("bad_argument", "--model is required for blossom/greedy policies");
        model = load_model(model_path);
        fs = model.feature_set;
    }
    const auto profiles = parse_profiles(profiles_path, fs);
    const auto oracle = load_oracle_csv(oracle_path, profiles);

    ClusterConfig cluster;
    cluster.n_servers = servers;
    cluster.jobs_per_server_scale = jobs_per_server;
    const int size = queue_size > 0 ? queue_size : jobs_per_server * servers;

    std::vector<JobQueue> queue_set;
    if (!stratified.empty()) {
        queue_set = generate_stratified_queues(oracle, parse_level(stratified), queues, size, common.seed);
    } else {
        std::vector<std::string> ids;
        for (const auto& p : profiles) ids.push_back(p.app_id);
        for (int i = 0; i < queues; ++i)
            queue_set.push_back(generate_random_queue(ids, size, mix_seed(common.seed, i)));
    }

    const PredictFn predict = perfect_predictor ? oracle_predictor(oracle)
                              : needs_model     ? model_predictor(model)
                                                : PredictFn{};
    ExperimentOptions options;
    options.measure_overhead = measure_overhead;
    const auto report = run_experiment(policies, queue_set, oracle, predict, profiles, cluster, options);

    std::ostringstream header;
    header << "cosched report v1; seed=" << common.seed << "; servers=" << servers << "; queues=" << queues
           << "; queue_size=" << size << "; policies=" << policies_arg
           << "; predictor=" << (perfect_predictor ? "oracle" : needs_model ? "model" : "none")
           << "; stratified=" << (stratified.empty() ? "none" : stratified)
           << "; measure_overhead=" << (measure_overhead ? 1 : 0);
    write_report_csv(out_report, report, servers, {header.str()});
    if (!out_timeline.empty()) write_timeline_json(out_timeline, report, servers);

    std::printf("seed=%" PRIu64 "\n", common.seed);
    for (Policy p : policies)
        std::printf("policy %-11s mean_normalized=%.4f\n", policy_name(p).c_str(), report.mean_normalized(p));
    std::printf("report: %zu queues x %zu policies -> %s\n", queue_set.size(), policies.size(), out_report.c_str());
    return 0;
}

int cmd_compare(const std::vector<std::string>& report_paths, const std::string& out_path) {
    if (report_paths.empty()) fail("bad_argument", "no report files given");
    struct Agg {
        int n = 0;
        double sum = 0, mn = 1e300, mx = -1e300, makespan = 0;
    };
    std::map<std::pair<std::string, int>, Agg> by_key; // (policy, servers)
    for (const auto& path : report_paths)
        for (const auto& row : read_report_csv(path)) {
            Agg& a = by_key[{row.policy, row.servers}];
            ++a.n;
            a.sum += row.normalized;
            a.mn = std::min(a.mn, row.normalized);
            a.mx = std::max(a.mx, row.normalized);
            a.makespan += row.makespan_s;
        }
    std::ostringstream out;
    out << "policy,servers,queues,mean_normalized,min_normalized,max_normalized,mean_makespan_s\n";
    std::printf("%-12s %8s %7s %10s %10s %10s %14s\n", "policy", "servers", "queues", "mean", "min", "max",
                "mean_makespan");
    for (const auto& [key, a] : by_key) {
        out << key.first << ',' << key.second << ',' << a.n << ',' << fmt_fixed(a.sum / a.n, 6) << ','
            << fmt_fixed(a.mn, 6) << ',' << fmt_fixed(a.mx, 6) << ',' << fmt_fixed(a.makespan / a.n, 6) << "\n";
        std::printf("%-12s %8d %7d %10.4f %10.4f %10.4f %14.2f\n", key.first.c_str(), key.second, a.n, a.sum / a.n,
                    a.mn, a.mx, a.makespan / a.n);
    }
    if (!out_path.empty()) write_text_file(out_path, out.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"colocation-aware HPC scheduling toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file; command-line flags override file values");
    app.get_config_formatter_base()->comment('#');

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic workload (profiles, oracle, colocations)");
    CommonOpts synth_common;
    int synth_apps = 32;
    std::string synth_out = ".";
    synth->add_option("--apps", synth_apps, "number of applications to generate (count, >= 2)");
    synth->add_option("--out-dir", synth_out, "output directory for profiles.csv/oracle.csv/colocations.csv");
    add_common(synth, synth_common);

    // dataset
    auto* dataset = app.add_subcommand("dataset", "build the training dataset from profiles and colocations");
    std::string ds_profiles = "profiles.csv", ds_coloc = "colocations.csv", ds_out = "dataset.csv";
    std::string ds_features = "generic", ds_stats = "mean";
    dataset->add_option("--profiles", ds_profiles, "profiles.csv path");
    dataset->add_option("--colocations", ds_coloc, "colocations.csv path");
    dataset->add_option("--features", ds_features, "counter group: generic|all");
    dataset->add_option("--stats", ds_stats, "per-counter statistics: mean|full");
    dataset->add_option("--out", ds_out, "output dataset path");

    // train
    auto* train = app.add_subcommand("train", "train the random-forest degradation model");
    CommonOpts train_common;
    std::string tr_dataset = "dataset.csv", tr_out = "model.json", tr_maxf = "sqrt";
    int tr_estimators = 22, tr_min_split = 2, tr_k = 5;
    bool tr_no_bootstrap = false;
    double tr_holdout = 0.3;
    train->add_option("--dataset", tr_dataset, "dataset.csv path");
    train->add_option("--out", tr_out, "output model.json path");
    train->add_option("--estimators", tr_estimators, "number of trees (count)");
    train->add_option("--max-features", tr_maxf, "features per split: all|auto|sqrt|fraction in (0,1]");
    train->add_option("--min-split", tr_min_split, "minimum samples to split a node (count, >= 2)");
    train->add_flag("--no-bootstrap", tr_no_bootstrap, "grow each tree on the full dataset instead of resamples");
    train->add_option("--holdout", tr_holdout, "holdout fraction in [0,1); 0 trains on everything");
    train->add_option("--k", tr_k, "cross-validation folds on the training side (0/1 disables)");
    add_common(train, train_common);

    // tune
    auto* tune = app.add_subcommand("tune", "random-search hyperparameters, then train on the full dataset");
    CommonOpts tune_common;
    std::string tu_dataset = "dataset.csv", tu_out = "model.json";
    std::string tu_est_range = "2:30", tu_split_range = "2:10", tu_maxf = "all,sqrt", tu_boot = "true,false";
    int tu_budget = 30, tu_k = 5;
    tune->add_option("--dataset", tu_dataset, "dataset.csv path");
    tune->add_option("--out", tu_out, "output model.json path");
    tune->add_option("--budget", tu_budget, "number of sampled configurations (count, >= 1)");
    tune->add_option("--k", tu_k, "cross-validation folds per trial");
    tune->add_option("--estimators-range", tu_est_range, "tree count range lo:hi");
    tune->add_option("--min-split-range", tu_split_range, "min_samples_split range lo:hi");
    tune->add_option("--max-features-choices", tu_maxf, "comma list of all|sqrt|fraction");
    tune->add_option("--bootstrap-choices", tu_boot, "comma list of true|false");
    add_common(tune, tune_common);

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a saved model against a dataset");
    CommonOpts eval_common;
    std::string ev_dataset = "dataset.csv", ev_model = "model.json", ev_compare;
    double ev_holdout = 0.3;
    int ev_k = 0;
    bool ev_baseline = false;
    eval->add_option("--dataset", ev_dataset, "dataset.csv path");
    eval->add_option("--model", ev_model, "model.json path");
    eval->add_option("--holdout", ev_holdout, "evaluate on this held-out fraction (0 evaluates on all rows)");
    eval->add_option("--k", ev_k, "also run k-fold CV with the model's hyperparameters");
    eval->add_option("--compare-estimators", ev_compare,
                     "two tree counts, e.g. 6,22: benchmark prediction time and report the ratio");
    eval->add_flag("--baseline", ev_baseline, "also fit and score the least-squares baseline");
    add_common(eval, eval_common);

    // predict
    auto* predict = app.add_subcommand("predict", "predict degradation for one ordered app pair");
    std::string pr_model = "model.json", pr_profiles = "profiles.csv", pr_primary, pr_interfering;
    predict->add_option("--model", pr_model, "model.json path");
    predict->add_option("--profiles", pr_profiles, "profiles.csv path");
    predict->add_option("--primary", pr_primary, "app id whose slowdown is predicted")->required();
    predict->add_option("--interfering", pr_interfering, "app id of the neighbour")->required();

    // schedule
    auto* schedule = app.add_subcommand("schedule", "pair a job queue using model predictions");
    std::string sc_queue = "queue.json", sc_model = "model.json", sc_profiles = "profiles.csv";
    std::string sc_strategy = "blossom", sc_out = "schedule.json";
    schedule->add_option("--queue", sc_queue, "queue.json path ({\"jobs\":[app_id,...]})");
    schedule->add_option("--model", sc_model, "model.json path");
    schedule->add_option("--profiles", sc_profiles, "profiles.csv path");
    schedule->add_option("--strategy", sc_strategy, "pairing strategy: blossom|greedy|di");
    schedule->add_option("--out", sc_out, "output schedule.json path");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "project makespans for scheduling policies");
    CommonOpts sim_common;
    std::string si_profiles = "profiles.csv", si_oracle = "oracle.csv", si_model, si_stratified;
    std::string si_policies = "fifo,fifo_shared,di,blossom,greedy";
    std::string si_report = "report.csv", si_timeline;
    int si_queues = 20, si_queue_size = 0, si_servers = 1, si_jobs_per_server = 50;
    bool si_perfect = false, si_overhead = false;
    simulate->add_option("--profiles", si_profiles, "profiles.csv path");
    simulate->add_option("--oracle", si_oracle, "oracle.csv path (ground-truth degradations, %)");
    simulate->add_option("--model", si_model, "model.json path (needed for blossom/greedy)");
    simulate->add_option("--policies", si_policies, "comma list of fifo|fifo_shared|di|blossom|greedy");
    simulate->add_option("--queues", si_queues, "number of queues to simulate (count)");
    simulate->add_option("--queue-size", si_queue_size,
                         "jobs per queue (count); 0 uses jobs-per-server * servers");
    simulate->add_option("--servers", si_servers, "number of servers (count, >= 1)");
    simulate->add_option("--jobs-per-server", si_jobs_per_server, "queue length contributed per server (count)");
    simulate->add_option("--stratified", si_stratified, "draw queues from a degradation band: low|medium|high");
    simulate->add_flag("--perfect-predictor", si_perfect, "schedule with oracle truth instead of the model");
    simulate->add_flag("--measure-overhead", si_overhead,
                       "fill predict/solve wall-clock columns (makes report.csv non-reproducible)");
    simulate->add_option("--out-report", si_report, "output report.csv path");
    simulate->add_option("--out-timeline", si_timeline, "optional timeline.json path");
    add_common(simulate, sim_common);

    // compare
    auto* compare = app.add_subcommand("compare", "merge report.csv files into a normalized-makespan summary");
    std::vector<std::string> co_reports;
    std::string co_out;
    compare->add_option("--reports", co_reports, "report.csv paths")->required()->delimiter(',');
    compare->add_option("--out", co_out, "optional summary.csv path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            apply_jobs(synth_common);
            return cmd_synth(synth_apps, synth_common, synth_out);
        }
        if (dataset->parsed()) return cmd_dataset(ds_profiles, ds_coloc, ds_features, ds_stats, ds_out);
        if (train->parsed()) {
            apply_jobs(train_common);
            return cmd_train(tr_dataset, tr_out, tr_estimators, tr_maxf, tr_min_split, tr_no_bootstrap, tr_holdout,
                             tr_k, train_common);
        }
        if (tune->parsed()) {
            apply_jobs(tune_common);
            return cmd_tune(tu_dataset, tu_out, tu_budget, tu_k, tu_est_range, tu_split_range, tu_maxf, tu_boot,
                            tune_common);
        }
        if (eval->parsed()) {
            apply_jobs(eval_common);
            return cmd_eval(ev_dataset, ev_model, ev_holdout, ev_k, ev_compare, ev_baseline, eval_common);
        }
        if (predict->parsed()) return cmd_predict(pr_model, pr_profiles, pr_primary, pr_interfering);
        if (schedule->parsed()) return cmd_schedule(sc_queue, sc_model, sc_profiles, sc_strategy, sc_out);
        if (simulate->parsed()) {
            apply_jobs(sim_common);
            return cmd_simulate(si_profiles, si_oracle, si_model, si_policies, si_queues, si_queue_size, si_servers,
                                si_jobs_per_server, si_stratified, si_perfect, si_overhead, si_report, si_timeline,
                                sim_common);
        }
        if (compare->parsed()) return cmd_compare(co_reports, co_out);
    } catch (const Error& e) {
        std::cerr << e.code() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal_error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
