#include "cosched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "cosched/csv.hpp"
#include "cosched/error.hpp"

namespace cosched {

using json = nlohmann::json;

JobQueue load_queue_json(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
        JobQueue q;
        for (const auto& item : j.at("jobs")) q.jobs.push_back(item.get<std::string>());
        return q;
    } catch (const json::exception& e) {
        fail("corrupt_file", path + ": " + e.what());
    }
}

void save_queue_json(const std::string& path, const JobQueue& queue) {
    json j;
    j["jobs"] = queue.jobs;
    write_text_file(path, j.dump() + "\n");
}

void DegradationGraph::set_edge(int i, int j, double deg_ij, double deg_ji) {
    deg[static_cast<std::size_t>(i) * n + j] = deg_ij;
    deg[static_cast<std::size_t>(j) * n + i] = deg_ji;
    const double w = std::max(t_alone[i] * (1.0 + deg_ij / 100.0), t_alone[j] * (1.0 + deg_ji / 100.0));
    weight[static_cast<std::size_t>(i) * n + j] = w;
    weight[static_cast<std::size_t>(j) * n + i] = w;
}

DegradationGraph DegradationGraph::from_degradations(std::vector<double> t_alone_s,
                                                     const std::vector<double>& deg_matrix) {
    DegradationGraph g;
    g.n = static_cast<int>(t_alone_s.size());
    g.t_alone = std::move(t_alone_s);
    g.deg.assign(static_cast<std::size_t>(g.n) * g.n, 0.0);
    g.weight.assign(static_cast<std::size_t>(g.n) * g.n, 0.0);
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j)
            g.set_edge(i, j, deg_matrix[static_cast<std::size_t>(i) * g.n + j],
                       deg_matrix[static_cast<std::size_t>(j) * g.n + i]);
    return g;
}

DegradationGraph DegradationGraph::from_weights(std::vector<double> t_alone_s, const std::vector<double>& weights) {
    DegradationGraph g;
    g.n = static_cast<int>(t_alone_s.size());
    g.t_alone = std::move(t_alone_s);
    g.deg.assign(static_cast<std::size_t>(g.n) * g.n, 0.0);
    g.weight = weights;
    return g;
}

PredictFn model_predictor(const DegradationModel& model) {
    return [&model](const ApplicationProfile& primary, const ApplicationProfile& interfering) {
        return predict_degradation(model, primary, interfering);
    };
}

namespace {

std::vector<const ApplicationProfile*> resolve_queue(const JobQueue& queue,
                                                     const std::vector<ApplicationProfile>& profiles) {
    std::vector<const ApplicationProfile*> out;
    out.reserve(queue.jobs.size());
    for (const auto& id : queue.jobs) out.push_back(&find_profile(profiles, id));
    return out;
}

template <bool Parallel>
DegradationGraph build_graph_impl(const JobQueue& queue, const std::vector<ApplicationProfile>& profiles,
                                  const PredictFn& predict) {
    if (queue.jobs.empty()) fail("bad_argument", "job queue is empty");
    const auto jobs = resolve_queue(queue, profiles);
    DegradationGraph g;
    g.n = static_cast<int>(jobs.size());
    g.t_alone.resize(g.n);
    for (int i = 0; i < g.n; ++i) g.t_alone[i] = jobs[i]->t_alone_s;
    g.deg.assign(static_cast<std::size_t>(g.n) * g.n, 0.0);
    g.weight.assign(static_cast<std::size_t>(g.n) * g.n, 0.0);

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(g.edge_count());
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j) pairs.emplace_back(i, j);

    const int m = static_cast<int>(pairs.size());
    if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
        for (int e = 0; e < m; ++e) {
            const auto [i, j] = pairs[e];
            g.set_edge(i, j, predict(*jobs[i], *jobs[j]), predict(*jobs[j], *jobs[i]));
        }
    } else {
        for (int e = 0; e < m; ++e) {
            const auto [i, j] = pairs[e];
            g.set_edge(i, j, predict(*jobs[i], *jobs[j]), predict(*jobs[j], *jobs[i]));
        }
    }
    return g;
}

} // namespace

DegradationGraph build_degradation_graph(const JobQueue& queue, const std::vector<ApplicationProfile>& profiles,
                                         const PredictFn& predict) {
    return build_graph_impl<true>(queue, profiles, predict);
}

DegradationGraph build_degradation_graph_serial(const JobQueue& queue,
                                                const std::vector<ApplicationProfile>& profiles,
                                                const PredictFn& predict) {
    return build_graph_impl<false>(queue, profiles, predict);
}

DegradationGraph build_degradation_graph(const JobQueue& queue, const std::vector<ApplicationProfile>& profiles,
                                         const DegradationModel& model) {
    return build_degradation_graph(queue, profiles, model_predictor(model));
}

// ---------------------------------------------------------------------------
// Matching solvers

namespace {

struct ScaledEdges {
    std::vector<std::array<std::int64_t, 3>> edges;
    int n_total = 0; // includes the dummy node when the queue is odd
    int dummy = -1;
};

// Builds the (possibly dummy-augmented) edge list with weights mapped to
// integers. Minimization is turned into maximization by w' = K - w, which
// keeps every weight positive so the max-cardinality optimum is perfect.
ScaledEdges scale_graph(const DegradationGraph& g) {
    ScaledEdges out;
    const bool odd = (g.n % 2) != 0;
    out.n_total = odd ? g.n + 1 : g.n;
    out.dummy = odd ? g.n : -1;

    std::vector<double> weights;
    weights.reserve(g.edge_count() + (odd ? g.n : 0));
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j) weights.push_back(g.weight_at(i, j));
    if (odd)
        for (int i = 0; i < g.n; ++i) weights.push_back(g.t_alone[i]);

    double max_abs = 0;
    for (double w : weights) {
        if (!std::isfinite(w)) fail("bad_argument", "graph weight is not finite");
        max_abs = std::max(max_abs, std::fabs(w));
    }
    if (max_abs >= 0x1.0p60) fail("bad_argument", "graph weights too large for exact matching");
    double scale = 1.0;
    if (max_abs > 0) {
        int exp = 0;
        std::frexp(max_abs, &exp); // max_abs < 2^exp
        scale = std::ldexp(1.0, std::clamp(48 - exp, 0, 48));
    }

    std::vector<std::int64_t> scaled(weights.size());
    std::int64_t max_scaled = 0;
    for (std::size_t e = 0; e < weights.size(); ++e) {
        scaled[e] = std::llround(weights[e] * scale);
        max_scaled = std::max(max_scaled, scaled[e]);
    }
    const std::int64_t shift = max_scaled + 1;

    out.edges.reserve(weights.size());
    std::size_t e = 0;
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j)
            out.edges.push_back({i, j, shift - scaled[e++]});
    if (odd)
        for (int i = 0; i < g.n; ++i) out.edges.push_back({i, out.dummy, shift - scaled[e++]});
    return out;
}

Pairing decode_mates(const DegradationGraph& g, const std::vector<int>& mate, int dummy) {
    Pairing p;
    for (int i = 0; i < g.n; ++i) {
        const int j = mate[i];
        if (j == -1 || j == dummy) {
            p.solos.push_back(i);
            p.total_weight += g.t_alone[i];
        } else if (i < j) {
            p.pairs.emplace_back(i, j);
            p.total_weight += g.weight_at(i, j);
        }
    }
    return p;
}

} // namespace

Pairing solve_blossom(const DegradationGraph& graph) {
    if (graph.n == 0) return {};
    if (graph.n == 1) {
        Pairing p;
        p.solos.push_back(0);
        p.total_weight = graph.t_alone[0];
        return p;
    }
    const ScaledEdges scaled = scale_graph(graph);
    const std::vector<int> mate = detail::max_weight_matching(scaled.n_total, scaled.edges, true);
    for (int v = 0; v < graph.n; ++v)
        if (mate[v] == -1) fail("internal_error", "matching on a complete graph left a node unmatched");
    return decode_mates(graph, mate, scaled.dummy);
}

Pairing solve_greedy(const DegradationGraph& graph) {
    struct E {
        double w;
        int i, j;
    };
    std::vector<E> edges;
    edges.reserve(graph.edge_count());
    for (int i = 0; i < graph.n; ++i)
        for (int j = i + 1; j < graph.n; ++j) edges.push_back({graph.weight_at(i, j), i, j});
    std::sort(edges.begin(), edges.end(), [](const E& a, const E& b) {
        if (a.w != b.w) return a.w < b.w;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    Pairing p;
    std::vector<bool> matched(graph.n, false);
    for (const E& e : edges) {
        if (matched[e.i] || matched[e.j]) continue;
        matched[e.i] = matched[e.j] = true;
        p.pairs.emplace_back(e.i, e.j);
        p.total_weight += e.w;
    }
    for (int i = 0; i < graph.n; ++i)
        if (!matched[i]) {
            p.solos.push_back(i);
            p.total_weight += graph.t_alone[i];
        }
    return p;
}

namespace {

void enumerate_matchings(const DegradationGraph& g, int dummy, std::vector<int>& mate, double acc, Pairing& best,
                         double& best_total, std::uint64_t& visited) {
    const int n_total = static_cast<int>(mate.size());
    int u = -1;
    for (int v = 0; v < n_total; ++v)
        if (mate[v] == -1) {
            u = v;
            break;
        }
    if (u == -1) {
        ++visited;
        if (acc < best_total) {
            best_total = acc;
            best = decode_mates(g, mate, dummy);
        }
        return;
    }
    for (int v = u + 1; v < n_total; ++v) {
        if (mate[v] != -1) continue;
        const double w = (v == dummy) ? g.t_alone[u] : g.weight_at(u, v);
        mate[u] = v;
        mate[v] = u;
        enumerate_matchings(g, dummy, mate, acc + w, best, best_total, visited);
        mate[u] = -1;
        mate[v] = -1;
    }
}

} // namespace

Pairing brute_force_matching(const DegradationGraph& graph, std::uint64_t* enumerated) {
    if (graph.n > 12)
        fail("graph_too_large", "brute-force matching supports at most 12 nodes, got " + std::to_string(graph.n));
    if (graph.n == 0) return {};
    const bool odd = (graph.n % 2) != 0;
    const int n_total = odd ? graph.n + 1 : graph.n;
    const int dummy = odd ? graph.n : -1;
    std::vector<int> mate(n_total, -1);
    Pairing best;
    double best_total = std::numeric_limits<double>::infinity();
    std::uint64_t visited = 0;
    enumerate_matchings(graph, dummy, mate, 0.0, best, best_total, visited);
    if (enumerated) *enumerated = visited;
    return best;
}

double pairing_weight(const Pairing& pairing, const DegradationGraph& graph) {
    double total = 0;
    for (auto [i, j] : pairing.pairs) total += graph.weight_at(i, j);
    for (int i : pairing.solos) total += graph.t_alone[i];
    return total;
}

// ---------------------------------------------------------------------------
// Schedules

std::string strategy_name(Strategy s) {
    switch (s) {
    case Strategy::Blossom: return "blossom";
    case Strategy::Greedy: return "greedy";
    case Strategy::Di: return "di";
    }
    return "blossom";
}

Strategy parse_strategy(const std::string& name) {
    if (name == "blossom") return Strategy::Blossom;
    if (name == "greedy") return Strategy::Greedy;
    if (name == "di") return Strategy::Di;
    fail("bad_argument", "unknown strategy '" + name + "' (expected blossom|greedy|di)");
}

namespace {

void sort_entries(std::vector<ScheduleEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const ScheduleEntry& a, const ScheduleEntry& b) {
        if (a.duration_s != b.duration_s) return a.duration_s < b.duration_s;
        if (a.a != b.a) return a.a < b.a;
        return a.b < b.b;
    });
}

} // namespace

Schedule apply_threshold(const Pairing& pairing, const DegradationGraph& graph) {
    Schedule s;
    s.strategy = Strategy::Blossom;
    for (auto [i, j] : pairing.pairs) {
        const double w = graph.weight_at(i, j);
        if (w > graph.t_alone[i] + graph.t_alone[j]) {
            s.entries.push_back({i, -1, graph.t_alone[i]});
            s.entries.push_back({j, -1, graph.t_alone[j]});
        } else {
            s.entries.push_back({std::min(i, j), std::max(i, j), w});
        }
    }
    for (int i : pairing.solos) s.entries.push_back({i, -1, graph.t_alone[i]});
    sort_entries(s.entries);
    s.predicted_makespan_s = 0;
    for (const auto& e : s.entries) s.predicted_makespan_s += e.duration_s;
    return s;
}

Schedule schedule_from_pairing(const Pairing& pairing, const DegradationGraph* graph,
                               const std::vector<double>& t_alone, Strategy strategy) {
    Schedule s;
    s.strategy = strategy;
    for (auto [i, j] : pairing.pairs) {
        const double w = graph ? graph->weight_at(i, j) : 0.0;
        s.entries.push_back({std::min(i, j), std::max(i, j), w});
    }
    for (int i : pairing.solos) s.entries.push_back({i, -1, t_alone[i]});
    s.predicted_makespan_s = 0;
    for (const auto& e : s.entries) s.predicted_makespan_s += e.duration_s;
    return s;
}

Pairing di_pairing(const JobQueue& queue, const std::vector<ApplicationProfile>& profiles) {
    if (queue.jobs.empty()) fail("bad_argument", "job queue is empty");
    const auto jobs = resolve_queue(queue, profiles);
    const int n = static_cast<int>(jobs.size());
    struct Ranked {
        double rate;
        const std::string* id;
        int index;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double rate = jobs[i]->counter("cache_misses").mean / jobs[i]->t_alone_s;
        ranked.push_back({rate, &jobs[i]->app_id, i});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.rate != b.rate) return a.rate < b.rate;
        if (*a.id != *b.id) return *a.id < *b.id;
        return a.index < b.index;
    });
    Pairing p;
    int lo = 0, hi = n - 1;
    while (lo < hi) {
        const int i = ranked[lo].index, j = ranked[hi].index;
        p.pairs.emplace_back(std::min(i, j), std::max(i, j));
        ++lo;
        --hi;
    }
    if (lo == hi) p.solos.push_back(ranked[lo].index);
    return p;
}

Schedule build_schedule(const DegradationGraph& graph, Strategy strategy, const JobQueue& queue,
                        const std::vector<ApplicationProfile>& profiles) {
    switch (strategy) {
    case Strategy::Blossom: {
        // Optimize against the post-threshold objective: a pair that will be
        // serialized costs exactly its serial time, so matching on capped
        // weights minimizes the predicted makespan after thresholding.
        DegradationGraph capped = graph;
        for (int i = 0; i < graph.n; ++i)
            for (int j = 0; j < graph.n; ++j)
                if (i != j) {
                    const std::size_t idx = static_cast<std::size_t>(i) * graph.n + j;
                    capped.weight[idx] = std::min(graph.weight[idx], graph.t_alone[i] + graph.t_alone[j]);
                }
        Schedule s = apply_threshold(solve_blossom(capped), graph);
        s.strategy = Strategy::Blossom;
        return s;
    }
    case Strategy::Greedy: {
        Schedule s = apply_threshold(solve_greedy(graph), graph);
        s.strategy = Strategy::Greedy;
        return s;
    }
    case Strategy::Di: {
        return schedule_from_pairing(di_pairing(queue, profiles), &graph, graph.t_alone, Strategy::Di);
    }
    }
    fail("bad_argument", "unknown strategy");
}

void save_schedule_json(const std::string& path, const Schedule& schedule) {
    json entries = json::array();
    for (const auto& e : schedule.entries) {
        if (e.is_pair())
            entries.push_back({{"pair", {e.a, e.b}}, {"weight_s", e.duration_s}});
        else
            entries.push_back({{"solo", e.a}, {"runtime_s", e.duration_s}});
    }
    json j;
    j["entries"] = std::move(entries);
    j["predicted_makespan_s"] = schedule.predicted_makespan_s;
    j["strategy"] = strategy_name(schedule.strategy);
    write_text_file(path, j.dump() + "\n");
}

Schedule load_schedule_json(const std::string& path) {
    try {
        const json j = json::parse(read_text_file(path));
        Schedule s;
        s.strategy = parse_strategy(j.at("strategy").get<std::string>());
        s.predicted_makespan_s = j.at("predicted_makespan_s").get<double>();
        for (const auto& e : j.at("entries")) {
            if (e.contains("pair"))
                s.entries.push_back({e.at("pair").at(0).get<int>(), e.at("pair").at(1).get<int>(),
                                     e.at("weight_s").get<double>()});
            else
                s.entries.push_back({e.at("solo").get<int>(), -1, e.at("runtime_s").get<double>()});
        }
        return s;
    } catch (const json::exception& e) {
        fail("corrupt_file", path + ": " + e.what());
    }
}

} // namespace cosched
