#include "cosched/profiles.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "cosched/csv.hpp"
#include "cosched/error.hpp"

namespace cosched {

namespace {

std::vector<std::string> sorted(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
}

// Full collection list: 34 hardware/software/cache/memory counters plus the
// CPU_usage pseudo-counter.
const std::vector<std::string>& all_counter_names() {
    static const std::vector<std::string> names = sorted({
        // hardware
        "cycles", "instructions", "resource_stalls.any", "branch_instructions",
        "stalled_cycles_frontend", "stalled_cycles_backend", "branch_misses",
        // software
        "page_faults", "context_switches", "cpu_migrations",
        // cache
        "cache_references", "cache_misses", "LLC_prefetches", "LLC_prefetch_misses",
        "l2_rqsts.demand_data_rd_hit", "l2_rqsts.pf_hit", "l2_l1d_wb_rqsts.miss",
        "l2_lines_out.pf_clean", "l2_lines_out.pf_dirty", "l2_rqsts.all_pf",
        "l1d.allocated_in_m", "l2_lines_out.demand_clean", "l1d.eviction",
        "l2_rqsts.all_demand_data_rd", "l2_lines_in.all", "L1_dcache_store_misses",
        "L1_dcache_load_misses", "L1_dcache_loads", "L1_dcache_prefetch_misses",
        "l1d.replacement",
        // memory
        "mem_uops_retired.all_stores", "mem_uops_retired.all_loads",
        "mem_load_uops_retired.llc_miss", "mem_load_uops_retired.llc_hit",
        // calculated, carried as a pseudo-counter
        "CPU_usage",
    });
    return names;
}

// Portable subset available from the generic profiling counters.
const std::vector<std::string>& generic_counter_names() {
    static const std::vector<std::string> names = sorted({
        "cycles", "instructions", "branch_instructions", "branch_misses",
        "page_faults", "context_switches", "cpu_migrations",
        "cache_references", "cache_misses",
        "CPU_usage",
    });
    return names;
}

const std::vector<std::string>& all_derived_names() {
    static const std::vector<std::string> names = sorted({
        "IPC", "cache_ref_per_instructions", "cache_misses_per_instructions", "miss_ratio",
    });
    return names;
}

const std::vector<std::string>& no_derived_names() {
    static const std::vector<std::string> names;
    return names;
}

} // namespace

const std::vector<std::string>& FeatureSet::counter_names() const {
    return counter_group == CounterGroup::AllCounters ? all_counter_names() : generic_counter_names();
}

const std::vector<std::string>& FeatureSet::derived_feature_names() const {
    return counter_group == CounterGroup::AllCounters ? all_derived_names() : no_derived_names();
}

int FeatureSet::features_per_app() const {
    return static_cast<int>(counter_names().size()) * stats_per_counter() +
           static_cast<int>(derived_feature_names().size());
}

std::vector<std::string> FeatureSet::feature_names() const {
    static const char* stat_names[4] = {"mean", "min", "max", "sd"};
    std::vector<std::string> out;
    out.reserve(feature_length());
    for (const char* side : {"primary", "interfering"}) {
        for (const auto& c : counter_names())
            for (int s = 0; s < stats_per_counter(); ++s)
                out.push_back(std::string(side) + "." + c + "." + stat_names[s]);
        for (const auto& d : derived_feature_names()) out.push_back(std::string(side) + "." + d);
    }
    return out;
}

std::string FeatureSet::group_name() const {
    return counter_group == CounterGroup::AllCounters ? "all" : "generic";
}

std::string FeatureSet::stats_name() const {
    return stat_mode == StatMode::FullStats ? "full" : "mean";
}

FeatureSet FeatureSet::parse(const std::string& group, const std::string& stats) {
    FeatureSet fs;
    if (group == "all")
        fs.counter_group = CounterGroup::AllCounters;
    else if (group == "generic")
        fs.counter_group = CounterGroup::GenericSubset;
    else
        fail("bad_argument", "unknown counter group '" + group + "' (expected generic|all)");
    if (stats == "full")
        fs.stat_mode = StatMode::FullStats;
    else if (stats == "mean")
        fs.stat_mode = StatMode::MeanOnly;
    else
        fail("bad_argument", "unknown stat mode '" + stats + "' (expected mean|full)");
    return fs;
}

const CounterStat& ApplicationProfile::counter(const std::string& name) const {
    auto it = counters.find(name);
    if (it == counters.end()) fail("missing_counter", "app '" + app_id + "' lacks counter '" + name + "'");
    return it->second;
}

double compute_degradation(double t_alone_s, double t_coloc_s) {
    if (t_alone_s <= 0) fail("bad_argument", "t_alone must be positive, got " + fmt_double(t_alone_s));
    if (t_coloc_s <= 0) fail("bad_argument", "t_coloc must be positive, got " + fmt_double(t_coloc_s));
    return 100.0 * (t_coloc_s - t_alone_s) / t_alone_s;
}

std::map<std::string, double> derive_metrics(const ApplicationProfile& profile) {
    const double instructions = profile.counter("instructions").mean;
    const double cycles = profile.counter("cycles").mean;
    const double cache_references = profile.counter("cache_references").mean;
    const double cache_misses = profile.counter("cache_misses").mean;
    if (cycles == 0) fail("division_by_zero", "app '" + profile.app_id + "': cycles mean is zero");
    if (instructions == 0) fail("division_by_zero", "app '" + profile.app_id + "': instructions mean is zero");
    if (cache_references == 0)
        fail("division_by_zero", "app '" + profile.app_id + "': cache_references mean is zero");
    std::map<std::string, double> m;
    m["IPC"] = instructions / cycles;
    m["cache_ref_per_instructions"] = cache_references / instructions;
    m["cache_misses_per_instructions"] = cache_misses / instructions;
    m["miss_ratio"] = cache_misses / cache_references;
    m["CPU_usage"] = profile.counter("CPU_usage").mean;
    return m;
}

std::vector<ApplicationProfile> parse_profiles(const std::string& path, const FeatureSet& fs) {
    CsvFile csv = read_csv(path);
    const int col_app = require_column(csv, "app_id", path);
    const int col_t = require_column(csv, "t_alone_s", path);
    const int col_counter = require_column(csv, "counter", path);
    const int col_mean = require_column(csv, "mean", path);
    const int col_min = find_column(csv, "min");
    const int col_max = find_column(csv, "max");
    const int col_sd = find_column(csv, "sd");
    if (fs.stat_mode == StatMode::FullStats && (col_min < 0 || col_max < 0 || col_sd < 0))
        fail("malformed_row", path + ": stat mode 'full' requires min,max,sd columns");

    const auto& wanted = fs.counter_names();
    auto is_wanted = [&](const std::string& name) {
        return std::binary_search(wanted.begin(), wanted.end(), name);
    };

    std::map<std::string, ApplicationProfile> by_id;
    std::vector<std::string> order; // first-appearance order
    for (const auto& row : csv.rows) {
        const std::string& app = row.fields[col_app];
        if (app.empty()) fail("malformed_row", path + ":" + std::to_string(row.line_no) + ": empty app_id");
        const double t_alone = parse_real(row.fields[col_t], row.line_no, "t_alone_s");
        if (t_alone <= 0)
            fail("bad_argument",
                 path + ":" + std::to_string(row.line_no) + ": t_alone_s must be positive for app '" + app + "'");
        auto [it, inserted] = by_id.try_emplace(app);
        ApplicationProfile& p = it->second;
        if (inserted) {
            p.app_id = app;
            p.t_alone_s = t_alone;
            order.push_back(app);
        } else if (p.t_alone_s != t_alone) {
            fail("malformed_row", path + ":" + std::to_string(row.line_no) + ": inconsistent t_alone_s for app '" +
                                      app + "'");
        }
        const std::string& counter = row.fields[col_counter];
        if (!is_wanted(counter)) continue;
        CounterStat stat;
        stat.mean = parse_real(row.fields[col_mean], row.line_no, "mean");
        // absent stat columns fall back to the mean so downstream code is
        // stat-mode-agnostic
        stat.min = col_min >= 0 ? parse_real(row.fields[col_min], row.line_no, "min") : stat.mean;
        stat.max = col_max >= 0 ? parse_real(row.fields[col_max], row.line_no, "max") : stat.mean;
        stat.sd = col_sd >= 0 ? parse_real(row.fields[col_sd], row.line_no, "sd") : stat.mean;
        if (!(stat.min <= stat.mean && stat.mean <= stat.max) || stat.sd < 0)
            fail("malformed_row", path + ":" + std::to_string(row.line_no) + ": invalid stats for counter '" +
                                      counter + "' of app '" + app + "' (need min <= mean <= max, sd >= 0)");
        if (!p.counters.emplace(counter, stat).second)
            fail("duplicate_app", path + ":" + std::to_string(row.line_no) + ": duplicate counter '" + counter +
                                      "' for app '" + app + "'");
    }

    std::vector<ApplicationProfile> out;
    out.reserve(order.size());
    for (const auto& app : order) {
        ApplicationProfile& p = by_id[app];
        for (const auto& name : wanted)
            if (!p.counters.count(name))
                fail("missing_counter", path + ": app '" + app + "' is missing counter '" + name +
                                            "' required by feature set " + fs.to_string());
        p.derived = derive_metrics(p);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<ColocationMeasurement> parse_colocations(const std::string& path) {
    CsvFile csv = read_csv(path);
    const int col_p = require_column(csv, "primary_id", path);
    const int col_i = require_column(csv, "interfering_id", path);
    const int col_t = require_column(csv, "t_coloc_s", path);
    std::vector<ColocationMeasurement> out;
    out.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        ColocationMeasurement m;
        m.primary_id = row.fields[col_p];
        m.interfering_id = row.fields[col_i];
        m.t_coloc_s = parse_real(row.fields[col_t], row.line_no, "t_coloc_s");
        if (m.primary_id.empty() || m.interfering_id.empty())
            fail("malformed_row", path + ":" + std::to_string(row.line_no) + ": empty app id");
        if (m.t_coloc_s <= 0)
            fail("bad_argument", path + ":" + std::to_string(row.line_no) + ": t_coloc_s must be positive");
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<double> app_features(const ApplicationProfile& profile, const FeatureSet& fs) {
    std::vector<double> out;
    out.reserve(fs.features_per_app());
    for (const auto& name : fs.counter_names()) {
        const CounterStat& s = profile.counter(name);
        out.push_back(s.mean);
        if (fs.stat_mode == StatMode::FullStats) {
            out.push_back(s.min);
            out.push_back(s.max);
            out.push_back(s.sd);
        }
    }
    for (const auto& name : fs.derived_feature_names()) {
        auto it = profile.derived.find(name);
        if (it == profile.derived.end())
            fail("missing_counter", "app '" + profile.app_id + "' lacks derived metric '" + name + "'");
        out.push_back(it->second);
    }
    return out;
}

std::vector<double> feature_vector(const ApplicationProfile& primary, const ApplicationProfile& interfering,
                                   const FeatureSet& fs) {
    std::vector<double> out = app_features(primary, fs);
    std::vector<double> rhs = app_features(interfering, fs);
    out.insert(out.end(), rhs.begin(), rhs.end());
    return out;
}

const ApplicationProfile& find_profile(const std::vector<ApplicationProfile>& profiles, const std::string& app_id) {
    for (const auto& p : profiles)
        if (p.app_id == app_id) return p;
    fail("unresolved_app", "no profile for app '" + app_id + "'");
}

std::vector<ColocationSample> build_training_dataset(const std::vector<ApplicationProfile>& profiles,
                                                     const std::vector<ColocationMeasurement>& measurements,
                                                     const FeatureSet& fs) {
    std::map<std::string, const ApplicationProfile*> index;
    for (const auto& p : profiles) index[p.app_id] = &p;
    std::vector<ColocationSample> out;
    out.reserve(measurements.size());
    for (const auto& m : measurements) {
        auto pi = index.find(m.primary_id);
        auto ii = index.find(m.interfering_id);
        if (pi == index.end()) fail("unresolved_app", "measurement references unknown app '" + m.primary_id + "'");
        if (ii == index.end())
            fail("unresolved_app", "measurement references unknown app '" + m.interfering_id + "'");
        ColocationSample s;
        s.primary_id = m.primary_id;
        s.interfering_id = m.interfering_id;
        s.degradation = std::max(0.0, compute_degradation(pi->second->t_alone_s, m.t_coloc_s));
        s.features = feature_vector(*pi->second, *ii->second, fs);
        out.push_back(std::move(s));
    }
    return out;
}

void write_profiles_csv(const std::string& path, const std::vector<ApplicationProfile>& profiles,
                        const std::vector<std::string>& header_comments) {
    std::ostringstream out;
    for (const auto& c : header_comments) out << "# " << c << "\n";
    out << "app_id,t_alone_s,counter,mean,min,max,sd\n";
    for (const auto& p : profiles)
        for (const auto& [name, s] : p.counters)
            out << p.app_id << ',' << fmt_double(p.t_alone_s) << ',' << name << ',' << fmt_double(s.mean) << ','
                << fmt_double(s.min) << ',' << fmt_double(s.max) << ',' << fmt_double(s.sd) << "\n";
    write_text_file(path, out.str());
}

void write_colocations_csv(const std::string& path, const std::vector<ColocationMeasurement>& measurements,
                           const std::vector<std::string>& header_comments) {
    std::ostringstream out;
    for (const auto& c : header_comments) out << "# " << c << "\n";
    out << "primary_id,interfering_id,t_coloc_s\n";
    for (const auto& m : measurements)
        out << m.primary_id << ',' << m.interfering_id << ',' << fmt_double(m.t_coloc_s) << "\n";
    write_text_file(path, out.str());
}

} // namespace cosched
