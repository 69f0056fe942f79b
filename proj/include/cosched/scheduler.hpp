#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cosched/model.hpp"
#include "cosched/profiles.hpp"

namespace cosched {

// Ready queue in arrival order; the same app may appear more than once.
struct JobQueue {
    std::vector<std::string> jobs;

    int size() const { return static_cast<int>(jobs.size()); }
};

JobQueue load_queue_json(const std::string& path);
void save_queue_json(const std::string& path, const JobQueue& queue);

// Complete weighted graph over queue positions. deg(i,j) is the predicted
// degradation of job i when colocated with job j; the edge weight of {i,j}
// is the worse of the two degraded runtimes.
struct DegradationGraph {
    int n = 0;
    std::vector<double> t_alone;  // seconds, per node
    std::vector<double> deg;      // n*n, row-major; deg[i*n+j]
    std::vector<double> weight;   // n*n, symmetric; diagonal unused

    double deg_at(int i, int j) const { return deg[static_cast<std::size_t>(i) * n + j]; }
    double weight_at(int i, int j) const { return weight[static_cast<std::size_t>(i) * n + j]; }
    int edge_count() const { return n * (n - 1) / 2; }

    void set_edge(int i, int j, double deg_ij, double deg_ji);

    // Assembles a graph from explicit per-pair degradations (tests, oracles).
    static DegradationGraph from_degradations(std::vector<double> t_alone_s,
                                              const std::vector<double>& deg_matrix);
    // Assembles a graph from explicit edge weights; degradations left zero.
    static DegradationGraph from_weights(std::vector<double> t_alone_s, const std::vector<double>& weights);
};

using PredictFn = std::function<double(const ApplicationProfile& primary, const ApplicationProfile& interfering)>;

PredictFn model_predictor(const DegradationModel& model);

// Predicts both directions for every unordered pair (n(n-1) predictions)
// and fills edge weights. The pair loop is OpenMP-parallel; the serial
// variant is the reference used by tests and the benchmark.
DegradationGraph build_degradation_graph(const JobQueue& queue, const std::vector<ApplicationProfile>& profiles,
                                         const PredictFn& predict);
DegradationGraph build_degradation_graph_serial(const JobQueue& queue,
                                                const std::vector<ApplicationProfile>& profiles,
                                                const PredictFn& predict);
DegradationGraph build_degradation_graph(const JobQueue& queue, const std::vector<ApplicationProfile>& profiles,
                                         const DegradationModel& model);

// Disjoint pairs plus unmatched nodes. total_weight sums pair edge weights
// and solo baseline runtimes.
struct Pairing {
    std::vector<std::pair<int, int>> pairs; // each (i, j) with i < j
    std::vector<int> solos;
    double total_weight = 0;
};

// Exact minimum-weight perfect matching (blossom family, O(n^2 m) met with
// an O(n^3) implementation). Odd graphs are augmented with a dummy node
// whose edge to job i costs t_alone[i]; the dummy's partner becomes a solo.
Pairing solve_blossom(const DegradationGraph& graph);

// Sorts edges ascending by (weight, i, j) and picks greedily; the leftover
// node of an odd queue goes solo.
Pairing solve_greedy(const DegradationGraph& graph);

// Exhaustive minimum over all perfect matchings (dummy-augmented when odd).
// Test oracle; refuses n > 12. `enumerated` reports how many matchings were
// inspected when non-null.
Pairing brute_force_matching(const DegradationGraph& graph, std::uint64_t* enumerated = nullptr);

// Recomputes a pairing's total weight against a graph.
double pairing_weight(const Pairing& pairing, const DegradationGraph& graph);

enum class Strategy { Blossom, Greedy, Di };
std::string strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);

// Pair entries keep the edge weight as their duration; solos run t_alone.
struct ScheduleEntry {
    int a = -1;
    int b = -1; // -1 for a solo entry
    double duration_s = 0;

    bool is_pair() const { return b >= 0; }
};

struct Schedule {
    std::vector<ScheduleEntry> entries; // ascending by duration
    double predicted_makespan_s = 0;
    Strategy strategy = Strategy::Blossom;
};

// Serializes pairs whose predicted pair runtime exceeds their serial time
// (weight > T_i + T_j); orders entries ascending by runtime contribution.
Schedule apply_threshold(const Pairing& pairing, const DegradationGraph& graph);

// Converts a pairing to a schedule verbatim (no serialization); used for the
// DI baseline, which is degradation-agnostic. Pair durations come from the
// graph when available, otherwise 0.
Schedule schedule_from_pairing(const Pairing& pairing, const DegradationGraph* graph,
                               const std::vector<double>& t_alone, Strategy strategy);

// Distributed Intensity baseline: sort jobs ascending by LLC miss rate
// (cache_misses.mean / t_alone), pair lowest with highest inward; the middle
// job of an odd queue goes solo.
Pairing di_pairing(const JobQueue& queue, const std::vector<ApplicationProfile>& profiles);

// End-to-end strategy application: graph -> pairing -> threshold/schedule.
// The blossom strategy optimizes weights capped at the serial threshold, so
// its schedule minimizes the post-threshold predicted makespan.
Schedule build_schedule(const DegradationGraph& graph, Strategy strategy, const JobQueue& queue,
                        const std::vector<ApplicationProfile>& profiles);

void save_schedule_json(const std::string& path, const Schedule& schedule);
Schedule load_schedule_json(const std::string& path);

namespace detail {

// General maximum-weight matching on integer weights; returns the matched
// partner per vertex or -1. With max_cardinality the matching has maximum
// size among all matchings, maximizing weight among those.
std::vector<int> max_weight_matching(int n, const std::vector<std::array<std::int64_t, 3>>& edges,
                                     bool max_cardinality);

} // namespace detail

} // namespace cosched
