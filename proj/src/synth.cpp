// Synthetic workload generator: seeded per-app counter profiles plus a
// planted ground-truth degradation matrix, so that model quality and
// scheduling behavior are measurable without cluster data.

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cosched/error.hpp"
#include "cosched/rng.hpp"
#include "cosched/simulator.hpp"

namespace cosched {

namespace {

// Latent generator parameters. Degradation is driven by both apps' cache
// pressure (miss ratio) with a superlinear joint term, so memory-bound pairs
// hurt each other far more than diverse pairs.
constexpr double kJointScale = 800.0;   // percent at full joint pressure
constexpr double kJointExponent = 2.4;
constexpr double kCrossScale = 40.0;    // interferer pressure x victim usage
constexpr double kNoiseSd = 0.05;       // multiplicative
constexpr double kDegCap = 450.0;       // percent
constexpr double kMemBoundFraction = 0.4;

struct LatentApp {
    double t_alone = 0;
    double miss_ratio = 0;
    double usage = 0; // percent
};

CounterStat stat_around(Rng& rng, double mean) {
    CounterStat s;
    s.mean = mean;
    const double down = rng.uniform(0.01, 0.08);
    const double up = rng.uniform(0.01, 0.08);
    s.min = mean * (1.0 - down);
    s.max = mean * (1.0 + up);
    s.sd = std::fabs(mean) * rng.uniform(0.005, 0.05);
    if (mean < 0) std::swap(s.min, s.max);
    return s;
}

} // namespace

double planted_degradation(double miss_primary, double usage_primary, double miss_interfering,
                           double noise_factor) {
    const double joint = kJointScale * std::pow(miss_primary * miss_interfering, kJointExponent);
    const double cross = kCrossScale * miss_interfering * usage_primary;
    const double base = joint + cross;
    return std::clamp(base * std::max(0.0, noise_factor), 0.0, kDegCap);
}

std::pair<std::vector<ApplicationProfile>, DegradationOracle> synth_workload(int n_apps, std::uint64_t seed) {
    if (n_apps < 2) fail("bad_argument", "synth_workload needs at least 2 apps");

    std::vector<LatentApp> latent(n_apps);
    std::vector<ApplicationProfile> profiles(n_apps);
    for (int i = 0; i < n_apps; ++i) {
        Rng rng(mix_seed(seed, 1000 + i));
        LatentApp& a = latent[i];
        a.t_alone = rng.log_uniform(120.0, 360.0);
        const bool mem_bound = rng.unit() < kMemBoundFraction;
        a.miss_ratio = mem_bound ? rng.uniform(0.75, 0.92) : rng.uniform(0.02, 0.45);
        a.usage = rng.uniform(55.0, 100.0);

        const double ipc = std::clamp(2.0 - 0.9 * a.miss_ratio + 0.1 * rng.normal(), 0.2, 3.0);
        const double cycles = a.t_alone * 2.6e9 * 16.0 * (a.usage / 100.0);
        const double instructions = cycles * ipc;
        const double crpi = std::max(0.004, 0.02 * (1.0 + 0.1 * rng.normal()));
        const double cache_references = instructions * crpi;
        const double cache_misses = cache_references * a.miss_ratio;

        ApplicationProfile& p = profiles[i];
        char name[16];
        std::snprintf(name, sizeof(name), "app%03d", i);
        p.app_id = name;
        p.t_alone_s = a.t_alone;
        p.counters["cycles"] = stat_around(rng, cycles);
        p.counters["instructions"] = stat_around(rng, instructions);
        p.counters["cache_references"] = stat_around(rng, cache_references);
        p.counters["cache_misses"] = stat_around(rng, cache_misses);
        p.counters["branch_instructions"] = stat_around(rng, instructions * rng.uniform(0.12, 0.22));
        p.counters["branch_misses"] =
            stat_around(rng, p.counters["branch_instructions"].mean * rng.uniform(0.002, 0.02));
        p.counters["page_faults"] = stat_around(rng, rng.log_uniform(1e3, 1e6));
        p.counters["context_switches"] = stat_around(rng, rng.log_uniform(1e2, 1e5));
        p.counters["cpu_migrations"] = stat_around(rng, rng.log_uniform(1e1, 1e3));
        p.counters["CPU_usage"] = stat_around(rng, a.usage);
        p.derived = derive_metrics(p);
    }

    DegradationOracle oracle;
    for (int i = 0; i < n_apps; ++i) oracle.t_alone_s[profiles[i].app_id] = profiles[i].t_alone_s;
    for (int i = 0; i < n_apps; ++i)
        for (int j = 0; j < n_apps; ++j) {
            Rng rng(mix_seed(seed, 2000003ULL + static_cast<std::uint64_t>(i) * n_apps + j));
            const double noise = 1.0 + kNoiseSd * rng.normal();
            const double deg =
                planted_degradation(latent[i].miss_ratio, latent[i].usage / 100.0, latent[j].miss_ratio, noise);
            oracle.degradation_pct[{profiles[i].app_id, profiles[j].app_id}] = deg;
        }
    return {std::move(profiles), std::move(oracle)};
}

} // namespace cosched
