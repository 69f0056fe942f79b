#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cosched/model.hpp"
#include "cosched/profiles.hpp"
#include "cosched/scheduler.hpp"

namespace cosched {

// Ground-truth degradations used by the makespan projection. Scheduling
// consumes model predictions; simulation consumes this.
struct DegradationOracle {
    std::map<std::string, double> t_alone_s;
    std::map<std::pair<std::string, std::string>, double> degradation_pct; // ordered (primary, interfering)

    double degradation(const std::string& primary, const std::string& interfering) const;
    double t_alone(const std::string& app_id) const;
    std::vector<std::string> app_ids() const;
};

// oracle.csv: primary_id,interfering_id,degradation_pct. Baseline runtimes
// come from the profiles.
DegradationOracle load_oracle_csv(const std::string& path, const std::vector<ApplicationProfile>& profiles);
void write_oracle_csv(const std::string& path, const DegradationOracle& oracle,
                      const std::vector<std::string>& header_comments = {});

// Predictor backed by oracle truth (perfect-model experiments).
PredictFn oracle_predictor(const DegradationOracle& oracle);

struct ClusterConfig {
    int n_servers = 1;
    int jobs_per_server_scale = 50; // queue length contributed per server
};

struct TimelineEntry {
    std::string app_id;
    double start_s = 0;
    double end_s = 0;
    int server = 0;
};

struct SimRun {
    double makespan_s = 0;
    std::vector<TimelineEntry> timeline;
};

// Arrival-order dispatch, one job per server, earliest-available server
// first (ties by index).
SimRun simulate_fifo(const JobQueue& queue, const DegradationOracle& oracle, const ClusterConfig& cluster);

// Arrival-order dispatch with uncontrolled node sharing: up to two jobs per
// server; a job colocated with partner p progresses at rate 1/(1+deg/100);
// freed slots are backfilled immediately from the head of the queue.
// Event-driven with exact piecewise-linear progress.
SimRun simulate_fifo_shared(const JobQueue& queue, const DegradationOracle& oracle, const ClusterConfig& cluster);

// Dispatches schedule entries in order; a pair holds its server for the max
// of the two true degraded runtimes, a solo for t_alone. The next entry on a
// server starts only after both members finish.
SimRun simulate_schedule(const Schedule& schedule, const JobQueue& queue, const DegradationOracle& oracle,
                         const ClusterConfig& cluster);

// Uniform draws with replacement from the app universe.
JobQueue generate_random_queue(const std::vector<std::string>& app_ids, int size, std::uint64_t seed);

enum class DegradationLevel { Low, Medium, High };
std::string level_name(DegradationLevel level);
DegradationLevel parse_level(const std::string& name);

// True pair runtime relative to serial time; the stratification key.
double pair_runtime_ratio(const DegradationOracle& oracle, const std::string& a, const std::string& b);

// Queues whose consecutive positions (2k, 2k+1) hold pairs drawn from the
// band: Low < 0.75, Medium [0.75, 1.0), High >= 1.0.
std::vector<JobQueue> generate_stratified_queues(const DegradationOracle& oracle, DegradationLevel level, int count,
                                                 int size, std::uint64_t seed);

// Desk-scale stand-in for cluster measurements: seeded per-app counter
// statistics plus a planted ground-truth degradation function of the two
// apps' cache pressure and CPU usage. Memory-bound pairs degrade
// superlinearly; diverse pairs stay mild.
std::pair<std::vector<ApplicationProfile>, DegradationOracle> synth_workload(int n_apps, std::uint64_t seed);

// The planted function at the latent parameters (exposed for tests):
// zero pressure on both sides maps to exactly zero degradation.
double planted_degradation(double miss_primary, double usage_primary, double miss_interfering,
                           double noise_factor);

// Derives colocation measurements from oracle truth: t_coloc = t_alone *
// (1 + deg/100) for every ordered pair of distinct apps.
std::vector<ColocationMeasurement> oracle_to_measurements(const DegradationOracle& oracle);

enum class Policy { Fifo, FifoShared, Di, Blossom, Greedy };
std::string policy_name(Policy p);
Policy parse_policy(const std::string& name);

struct PolicyOutcome {
    Policy policy = Policy::Fifo;
    double makespan_s = 0;
    double normalized = 1.0; // vs FIFO on the same queue
    double predict_time_s = 0;
    double solve_time_s = 0;
    std::vector<TimelineEntry> timeline;
};

struct QueueOutcome {
    int queue_id = 0;
    std::vector<PolicyOutcome> policies;
};

struct SimulationReport {
    std::vector<QueueOutcome> queues;

    double mean_normalized(Policy p) const;
};

struct ExperimentOptions {
    bool measure_overhead = false; // wall-clock timings are opt-in so that
                                   // report files stay reproducible
};

// Per queue and policy: build the schedule (prediction-driven for blossom
// and greedy, counter-driven for DI, arrival-driven otherwise), simulate it
// against oracle truth, and normalize makespans to FIFO.
SimulationReport run_experiment(const std::vector<Policy>& policies, const std::vector<JobQueue>& queues,
                                const DegradationOracle& oracle, const PredictFn& predict,
                                const std::vector<ApplicationProfile>& profiles, const ClusterConfig& cluster,
                                const ExperimentOptions& options = {});

struct OverheadSample {
    int queue_size = 0;
    double predict_time_s = 0;      // all n(n-1) pair predictions, one pass
    double solve_greedy_s = 0;
    double solve_blossom_s = 0;
};

// Single-threaded wall-clock measurement; medians over `repeats` passes.
OverheadSample measure_scheduling_overhead(const DegradationModel& model,
                                           const std::vector<ApplicationProfile>& profiles, const JobQueue& queue,
                                           int repeats = 5);

// report.csv row: queue_id,policy,servers,makespan_s,normalized,
// predict_time_s,solve_time_s. Comments ('#') carry the run header.
struct ReportRow {
    int queue_id = 0;
    std::string policy;
    int servers = 1;
    double makespan_s = 0;
    double normalized = 1;
    double predict_time_s = 0;
    double solve_time_s = 0;
};

void write_report_csv(const std::string& path, const SimulationReport& report, int servers,
                      const std::vector<std::string>& header_comments);
std::vector<ReportRow> read_report_csv(const std::string& path);

// timeline.json: one object per (queue, policy) run with its per-job
// intervals, for external plotting.
void write_timeline_json(const std::string& path, const SimulationReport& report, int servers);

} // namespace cosched
