#include "cosched/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "cosched/csv.hpp"
#include "cosched/error.hpp"
#include "cosched/rng.hpp"

namespace cosched {

double DegradationOracle::degradation(const std::string& primary, const std::string& interfering) const {
    auto it = degradation_pct.find({primary, interfering});
    if (it == degradation_pct.end())
        fail("uncovered_app", "oracle has no degradation for (" + primary + ", " + interfering + ")");
    return it->second;
}

double DegradationOracle::t_alone(const std::string& app_id) const {
    auto it = t_alone_s.find(app_id);
    if (it == t_alone_s.end()) fail("uncovered_app", "oracle has no baseline runtime for '" + app_id + "'");
    return it->second;
}

std::vector<std::string> DegradationOracle::app_ids() const {
    std::vector<std::string> out;
    out.reserve(t_alone_s.size());
    for (const auto& [id, t] : t_alone_s) out.push_back(id);
    return out;
}

DegradationOracle load_oracle_csv(const std::string& path, const std::vector<ApplicationProfile>& profiles) {
    CsvFile csv = read_csv(path);
    const int col_p = require_column(csv, "primary_id", path);
    const int col_i = require_column(csv, "interfering_id", path);
    const int col_d = require_column(csv, "degradation_pct", path);
    DegradationOracle oracle;
    for (const auto& row : csv.rows) {
        const std::string& p = row.fields[col_p];
        const std::string& i = row.fields[col_i];
        const double deg = parse_real(row.fields[col_d], row.line_no, "degradation_pct");
        if (deg < 0)
            fail("bad_argument", path + ":" + std::to_string(row.line_no) + ": negative degradation in oracle");
        oracle.degradation_pct[{p, i}] = deg;
        if (!oracle.t_alone_s.count(p)) oracle.t_alone_s[p] = find_profile(profiles, p).t_alone_s;
        if (!oracle.t_alone_s.count(i)) oracle.t_alone_s[i] = find_profile(profiles, i).t_alone_s;
    }
    for (const auto& [a, ta] : oracle.t_alone_s)
        for (const auto& [b, tb] : oracle.t_alone_s)
            if (a != b && !oracle.degradation_pct.count({a, b}))
                fail("uncovered_app", path + ": oracle is missing the ordered pair (" + a + ", " + b + ")");
    return oracle;
}

void write_oracle_csv(const std::string& path, const DegradationOracle& oracle,
                      const std::vector<std::string>& header_comments) {
    std::ostringstream out;
    for (const auto& c : header_comments) out << "# " << c << "\n";
    out << "primary_id,interfering_id,degradation_pct\n";
    for (const auto& [key, deg] : oracle.degradation_pct)
        out << key.first << ',' << key.second << ',' << fmt_double(deg) << "\n";
    write_text_file(path, out.str());
}

PredictFn oracle_predictor(const DegradationOracle& oracle) {
    return [&oracle](const ApplicationProfile& primary, const ApplicationProfile& interfering) {
        return oracle.degradation(primary.app_id, interfering.app_id);
    };
}

// ---------------------------------------------------------------------------
// Policy simulations

namespace {

void check_cluster(const ClusterConfig& cluster) {
    if (cluster.n_servers < 1) fail("bad_argument", "n_servers must be >= 1");
}

int earliest_server(const std::vector<double>& avail) {
    int best = 0;
    for (int s = 1; s < static_cast<int>(avail.size()); ++s)
        if (avail[s] < avail[best]) best = s;
    return best;
}

} // namespace

SimRun simulate_fifo(const JobQueue& queue, const DegradationOracle& oracle, const ClusterConfig& cluster) {
    check_cluster(cluster);
    SimRun run;
    std::vector<double> avail(cluster.n_servers, 0.0);
    for (const auto& app : queue.jobs) {
        const double t = oracle.t_alone(app);
        const int s = earliest_server(avail);
        run.timeline.push_back({app, avail[s], avail[s] + t, s});
        avail[s] += t;
    }
    for (double a : avail) run.makespan_s = std::max(run.makespan_s, a);
    return run;
}

SimRun simulate_fifo_shared(const JobQueue& queue, const DegradationOracle& oracle, const ClusterConfig& cluster) {
    check_cluster(cluster);
    const int n = queue.size();
    SimRun run;
    if (n == 0) return run;

    std::vector<double> t_alone(n);
    for (int i = 0; i < n; ++i) t_alone[i] = oracle.t_alone(queue.jobs[i]);

    struct Slot {
        int job = -1;
        double remaining = 0;
    };
    const int n_servers = cluster.n_servers;
    std::vector<std::array<Slot, 2>> servers(n_servers);
    std::vector<TimelineEntry> timeline(n);
    int next = 0;
    int done = 0;
    double now = 0;

    auto backfill = [&]() {
        for (int s = 0; s < n_servers && next < n; ++s)
            for (int k = 0; k < 2 && next < n; ++k)
                if (servers[s][k].job < 0) {
                    servers[s][k] = {next, t_alone[next]};
                    timeline[next] = {queue.jobs[next], now, 0, s};
                    ++next;
                }
    };

    backfill();
    while (done < n) {
        // Current progress rate per occupied slot.
        double dt = std::numeric_limits<double>::infinity();
        std::vector<std::array<double, 2>> rate(n_servers);
        for (int s = 0; s < n_servers; ++s) {
            for (int k = 0; k < 2; ++k) {
                const Slot& slot = servers[s][k];
                if (slot.job < 0) continue;
                const Slot& other = servers[s][k ^ 1];
                double r = 1.0;
                if (other.job >= 0)
                    r = 1.0 / (1.0 + oracle.degradation(queue.jobs[slot.job], queue.jobs[other.job]) / 100.0);
                rate[s][k] = r;
                dt = std::min(dt, slot.remaining / r);
            }
        }
        now += dt;
        for (int s = 0; s < n_servers; ++s)
            for (int k = 0; k < 2; ++k) {
                Slot& slot = servers[s][k];
                if (slot.job < 0) continue;
                slot.remaining = std::max(0.0, slot.remaining - dt * rate[s][k]);
            }
        // Completions in (server, slot) order, then immediate backfill.
        for (int s = 0; s < n_servers; ++s)
            for (int k = 0; k < 2; ++k) {
                Slot& slot = servers[s][k];
                if (slot.job < 0) continue;
                const double eps = 1e-10 * std::max(1.0, t_alone[slot.job]);
                if (slot.remaining <= eps) {
                    timeline[slot.job].end_s = now;
                    slot.job = -1;
                    ++done;
                }
            }
        backfill();
    }
    run.makespan_s = now;
    run.timeline = std::move(timeline);
    return run;
}

SimRun simulate_schedule(const Schedule& schedule, const JobQueue& queue, const DegradationOracle& oracle,
                         const ClusterConfig& cluster) {
    check_cluster(cluster);
    const int n = queue.size();
    std::vector<int> seen(n, 0);
    for (const auto& e : schedule.entries) {
        for (int idx : {e.a, e.b}) {
            if (idx < 0) continue;
            if (idx >= n) fail("uncovered_app", "schedule references job index " + std::to_string(idx));
            ++seen[idx];
        }
    }
    for (int i = 0; i < n; ++i)
        if (seen[i] != 1)
            fail("uncovered_app", "schedule must cover job " + std::to_string(i) + " exactly once, saw " +
                                      std::to_string(seen[i]) + " occurrences");

    SimRun run;
    std::vector<double> avail(cluster.n_servers, 0.0);
    for (const auto& e : schedule.entries) {
        const int s = earliest_server(avail);
        const double start = avail[s];
        if (e.is_pair()) {
            const std::string& app_a = queue.jobs[e.a];
            const std::string& app_b = queue.jobs[e.b];
            const double end_a = start + oracle.t_alone(app_a) * (1.0 + oracle.degradation(app_a, app_b) / 100.0);
            const double end_b = start + oracle.t_alone(app_b) * (1.0 + oracle.degradation(app_b, app_a) / 100.0);
            run.timeline.push_back({app_a, start, end_a, s});
            run.timeline.push_back({app_b, start, end_b, s});
            avail[s] = std::max(end_a, end_b);
        } else {
            const std::string& app = queue.jobs[e.a];
            const double end = start + oracle.t_alone(app);
            run.timeline.push_back({app, start, end, s});
            avail[s] = end;
        }
    }
    for (double a : avail) run.makespan_s = std::max(run.makespan_s, a);
    return run;
}

// ---------------------------------------------------------------------------
// Queue generation

JobQueue generate_random_queue(const std::vector<std::string>& app_ids, int size, std::uint64_t seed) {
    if (app_ids.empty()) fail("bad_argument", "app universe is empty");
    Rng rng(seed);
    JobQueue q;
    q.jobs.reserve(size);
    for (int i = 0; i < size; ++i) q.jobs.push_back(app_ids[rng.below(app_ids.size())]);
    return q;
}

std::string level_name(DegradationLevel level) {
    switch (level) {
    case DegradationLevel::Low: return "low";
    case DegradationLevel::Medium: return "medium";
    case DegradationLevel::High: return "high";
    }
    return "low";
}

DegradationLevel parse_level(const std::string& name) {
    if (name == "low") return DegradationLevel::Low;
    if (name == "medium") return DegradationLevel::Medium;
    if (name == "high") return DegradationLevel::High;
    fail("bad_argument", "unknown degradation level '" + name + "' (expected low|medium|high)");
}

double pair_runtime_ratio(const DegradationOracle& oracle, const std::string& a, const std::string& b) {
    const double ta = oracle.t_alone(a);
    const double tb = oracle.t_alone(b);
    const double w = std::max(ta * (1.0 + oracle.degradation(a, b) / 100.0),
                              tb * (1.0 + oracle.degradation(b, a) / 100.0));
    return w / (ta + tb);
}

std::vector<JobQueue> generate_stratified_queues(const DegradationOracle& oracle, DegradationLevel level, int count,
                                                 int size, std::uint64_t seed) {
    const std::vector<std::string> apps = oracle.app_ids();
    std::vector<std::pair<std::string, std::string>> qualifying;
    for (std::size_t i = 0; i < apps.size(); ++i)
        for (std::size_t j = i + 1; j < apps.size(); ++j) {
            const double ratio = pair_runtime_ratio(oracle, apps[i], apps[j]);
            const bool in_band = (level == DegradationLevel::Low && ratio < 0.75) ||
                                 (level == DegradationLevel::Medium && ratio >= 0.75 && ratio < 1.0) ||
                                 (level == DegradationLevel::High && ratio >= 1.0);
            if (in_band) qualifying.emplace_back(apps[i], apps[j]);
        }
    if (qualifying.empty())
        fail("insufficient_pairs", "no pair falls in the " + level_name(level) + " degradation band");

    std::vector<JobQueue> out;
    for (int q = 0; q < count; ++q) {
        Rng rng(mix_seed(seed, q));
        JobQueue queue;
        queue.jobs.reserve(size);
        while (static_cast<int>(queue.jobs.size()) + 1 < size) {
            const auto& pick = qualifying[rng.below(qualifying.size())];
            if (rng.below(2) == 0) {
                queue.jobs.push_back(pick.first);
                queue.jobs.push_back(pick.second);
            } else {
                queue.jobs.push_back(pick.second);
                queue.jobs.push_back(pick.first);
            }
        }
        if (static_cast<int>(queue.jobs.size()) < size) queue.jobs.push_back(apps[rng.below(apps.size())]);
        out.push_back(std::move(queue));
    }
    return out;
}

std::vector<ColocationMeasurement> oracle_to_measurements(const DegradationOracle& oracle) {
    std::vector<ColocationMeasurement> out;
    for (const auto& [key, deg] : oracle.degradation_pct) {
        if (key.first == key.second) continue;
        ColocationMeasurement m;
        m.primary_id = key.first;
        m.interfering_id = key.second;
        m.t_coloc_s = oracle.t_alone(key.first) * (1.0 + deg / 100.0);
        out.push_back(std::move(m));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Experiments

std::string policy_name(Policy p) {
    switch (p) {
    case Policy::Fifo: return "fifo";
    case Policy::FifoShared: return "fifo_shared";
    case Policy::Di: return "di";
    case Policy::Blossom: return "blossom";
    case Policy::Greedy: return "greedy";
    }
    return "fifo";
}

Policy parse_policy(const std::string& name) {
    if (name == "fifo") return Policy::Fifo;
    if (name == "fifo_shared") return Policy::FifoShared;
    if (name == "di") return Policy::Di;
    if (name == "blossom") return Policy::Blossom;
    if (name == "greedy") return Policy::Greedy;
    fail("bad_argument", "unknown policy '" + name + "' (expected fifo|fifo_shared|di|blossom|greedy)");
}

double SimulationReport::mean_normalized(Policy p) const {
    double sum = 0;
    int n = 0;
    for (const auto& q : queues)
        for (const auto& po : q.policies)
            if (po.policy == p) {
                sum += po.normalized;
                ++n;
            }
    return n ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

SimulationReport run_experiment(const std::vector<Policy>& policies, const std::vector<JobQueue>& queues,
                                const DegradationOracle& oracle, const PredictFn& predict,
                                const std::vector<ApplicationProfile>& profiles, const ClusterConfig& cluster,
                                const ExperimentOptions& options) {
    check_cluster(cluster);
    const bool needs_graph = std::any_of(policies.begin(), policies.end(), [](Policy p) {
        return p == Policy::Blossom || p == Policy::Greedy || p == Policy::Di;
    });

    SimulationReport report;
    int queue_id = 0;
    for (const auto& queue : queues) {
        QueueOutcome outcome;
        outcome.queue_id = queue_id++;

        const SimRun fifo = simulate_fifo(queue, oracle, cluster);

        DegradationGraph graph;
        double predict_time = 0;
        if (needs_graph && !queue.jobs.empty()) {
            if (options.measure_overhead) {
                const auto t0 = std::chrono::steady_clock::now();
                graph = build_degradation_graph_serial(queue, profiles, predict);
                predict_time = seconds_since(t0);
            } else {
                graph = build_degradation_graph(queue, profiles, predict);
            }
        }

        for (Policy policy : policies) {
            PolicyOutcome po;
            po.policy = policy;
            switch (policy) {
            case Policy::Fifo: {
                po.makespan_s = fifo.makespan_s;
                po.timeline = fifo.timeline;
                break;
            }
            case Policy::FifoShared: {
                SimRun run = simulate_fifo_shared(queue, oracle, cluster);
                po.makespan_s = run.makespan_s;
                po.timeline = std::move(run.timeline);
                break;
            }
            case Policy::Di:
            case Policy::Blossom:
            case Policy::Greedy: {
                const Strategy strategy = policy == Policy::Di      ? Strategy::Di
                                          : policy == Policy::Greedy ? Strategy::Greedy
                                                                     : Strategy::Blossom;
                const auto t0 = std::chrono::steady_clock::now();
                const Schedule schedule = build_schedule(graph, strategy, queue, profiles);
                if (options.measure_overhead) po.solve_time_s = seconds_since(t0);
                po.predict_time_s = policy == Policy::Di ? 0.0 : predict_time;
                SimRun run = simulate_schedule(schedule, queue, oracle, cluster);
                po.makespan_s = run.makespan_s;
                po.timeline = std::move(run.timeline);
                break;
            }
            }
            po.normalized = fifo.makespan_s > 0 ? po.makespan_s / fifo.makespan_s : 1.0;
            outcome.policies.push_back(std::move(po));
        }
        report.queues.push_back(std::move(outcome));
    }
    return report;
}

OverheadSample measure_scheduling_overhead(const DegradationModel& model,
                                           const std::vector<ApplicationProfile>& profiles, const JobQueue& queue,
                                           int repeats) {
    if (repeats < 1) fail("bad_argument", "repeats must be >= 1");
    OverheadSample sample;
    sample.queue_size = queue.size();
    const PredictFn predict = model_predictor(model);

    auto median = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };

    std::vector<double> predict_times, greedy_times, blossom_times;
    DegradationGraph graph;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        graph = build_degradation_graph_serial(queue, profiles, predict);
        predict_times.push_back(seconds_since(t0));
    }
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const Pairing p = solve_greedy(graph);
        greedy_times.push_back(seconds_since(t0));
        (void)p;
    }
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const Pairing p = solve_blossom(graph);
        blossom_times.push_back(seconds_since(t0));
        (void)p;
    }
    sample.predict_time_s = median(predict_times);
    sample.solve_greedy_s = median(greedy_times);
    sample.solve_blossom_s = median(blossom_times);
    return sample;
}

} // namespace cosched
