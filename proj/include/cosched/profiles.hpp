#pragma once

#include <map>
#include <string>
#include <vector>

namespace cosched {

// Per-counter statistics collected over repeated solo runs of an application.
struct CounterStat {
    double mean = 0;
    double min = 0;
    double max = 0;
    double sd = 0;
};

enum class CounterGroup { AllCounters, GenericSubset };
enum class StatMode { MeanOnly, FullStats };

// Which counters and which per-counter statistics make up the model input.
// GenericSubset is the portable ten-counter set (CPU_usage rides along as a
// pseudo-counter); AllCounters is the full collection list plus the four
// ratio metrics derived from counter means.
struct FeatureSet {
    CounterGroup counter_group = CounterGroup::GenericSubset;
    StatMode stat_mode = StatMode::MeanOnly;

    bool operator==(const FeatureSet&) const = default;

    // Lexicographically sorted counter names for the group.
    const std::vector<std::string>& counter_names() const;
    // Derived metrics that are part of the feature vector (sorted; empty for
    // GenericSubset — the only calculated entry there, CPU_usage, is already
    // a pseudo-counter).
    const std::vector<std::string>& derived_feature_names() const;

    int stats_per_counter() const { return stat_mode == StatMode::FullStats ? 4 : 1; }
    int features_per_app() const;
    int feature_length() const { return 2 * features_per_app(); }

    // Names of every slot in a sample's feature vector, in emission order
    // ("primary."/"interfering." prefix, counters before derived metrics).
    std::vector<std::string> feature_names() const;

    std::string group_name() const;  // "generic" | "all"
    std::string stats_name() const;  // "mean" | "full"
    std::string to_string() const { return group_name() + "," + stats_name(); }
    static FeatureSet parse(const std::string& group, const std::string& stats);
};

// One application's solo-run profile: baseline runtime plus counter stats.
struct ApplicationProfile {
    std::string app_id;
    double t_alone_s = 0;
    std::map<std::string, CounterStat> counters;
    std::map<std::string, double> derived;

    const CounterStat& counter(const std::string& name) const;
    bool has_counter(const std::string& name) const { return counters.count(name) != 0; }
};

// One measured colocation: runtime of `primary_id` while `interfering_id`
// ran beside it. Directional; (i,j) and (j,i) are distinct measurements.
struct ColocationMeasurement {
    std::string primary_id;
    std::string interfering_id;
    double t_coloc_s = 0;
};

// One training record: concatenated feature vectors and the (clamped)
// degradation suffered by the primary.
struct ColocationSample {
    std::vector<double> features;
    double degradation = 0; // percent, >= 0
    std::string primary_id;
    std::string interfering_id;
};

// Percentage increase of the colocated runtime over the solo runtime.
// Negative results are legal here; clamping happens when building datasets.
double compute_degradation(double t_alone_s, double t_coloc_s);

// Ratio metrics from counter means: IPC, cache_ref_per_instructions,
// cache_misses_per_instructions, miss_ratio; CPU_usage is echoed from its
// pseudo-counter. Fails on zero denominators or missing base counters.
std::map<std::string, double> derive_metrics(const ApplicationProfile& profile);

// Reads profiles.csv (header: app_id,t_alone_s,counter,mean[,min,max,sd]).
// Counters outside the feature set are dropped; every counter the set
// requires must be present for every app. Under MeanOnly the min/max/sd
// columns may be absent and default to the mean.
std::vector<ApplicationProfile> parse_profiles(const std::string& path, const FeatureSet& fs);

// Reads colocations.csv (header: primary_id,interfering_id,t_coloc_s).
std::vector<ColocationMeasurement> parse_colocations(const std::string& path);

// Feature vector for one app, in the set's deterministic order.
std::vector<double> app_features(const ApplicationProfile& profile, const FeatureSet& fs);
// Concatenated primary ++ interfering vector.
std::vector<double> feature_vector(const ApplicationProfile& primary, const ApplicationProfile& interfering,
                                   const FeatureSet& fs);

// One sample per measurement; degradation clamped below at zero.
std::vector<ColocationSample> build_training_dataset(const std::vector<ApplicationProfile>& profiles,
                                                     const std::vector<ColocationMeasurement>& measurements,
                                                     const FeatureSet& fs);

const ApplicationProfile& find_profile(const std::vector<ApplicationProfile>& profiles, const std::string& app_id);

void write_profiles_csv(const std::string& path, const std::vector<ApplicationProfile>& profiles,
                        const std::vector<std::string>& header_comments = {});
void write_colocations_csv(const std::string& path, const std::vector<ColocationMeasurement>& measurements,
                           const std::vector<std::string>& header_comments = {});

} // namespace cosched
