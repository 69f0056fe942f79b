#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cosched/profiles.hpp"

namespace cosched {

// Number of features considered at each split.
struct MaxFeatures {
    enum class Kind { All, Sqrt, Fraction };
    Kind kind = Kind::Sqrt;
    double fraction = 1.0; // only for Kind::Fraction, in (0, 1]

    static MaxFeatures all() { return {Kind::All, 1.0}; }
    static MaxFeatures sqrt() { return {Kind::Sqrt, 1.0}; }
    static MaxFeatures of_fraction(double f);

    int resolve(int n_features) const;
    std::string to_string() const;
    static MaxFeatures parse(const std::string& text); // "all" | "auto" | "sqrt" | fraction
    bool operator==(const MaxFeatures&) const = default;
};

struct ForestHyperparams {
    int n_estimators = 22;
    MaxFeatures max_features = MaxFeatures::sqrt();
    int min_samples_split = 2;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

// One regression tree in flat array form. Leaves have feature == -1 and
// carry the mean target of the training rows routed to them.
struct TreeNode {
    int feature = -1;
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    double predict(std::span<const double> features) const;
};

struct DegradationModel {
    std::vector<Tree> trees;
    ForestHyperparams hyperparams;
    FeatureSet feature_set;
    int n_features = 0;
    double target_lo = 0; // training target range
    double target_hi = 0;

    // Mean of the per-tree leaf values, clamped below at zero.
    double predict(std::span<const double> features) const;
};

struct EvaluationReport {
    double r2 = 0;                      // Eq-consistent with `predictions`
    std::vector<double> per_fold_r2;    // populated by cross-validation
    int n_train = 0;
    int n_test = 0;
    std::vector<std::pair<double, double>> predictions; // (actual, predicted)

    double mean_fold_r2() const;
};

// Trains n_estimators variance-reduction trees. Fully deterministic given
// the seed: tree t derives its own RNG stream, so the parallel and serial
// paths produce identical forests.
DegradationModel train_forest(const std::vector<ColocationSample>& dataset, const ForestHyperparams& hp,
                              const FeatureSet& fs);
// Reference implementation without OpenMP, kept for equivalence tests and
// the benchmark target.
DegradationModel train_forest_serial(const std::vector<ColocationSample>& dataset, const ForestHyperparams& hp,
                                     const FeatureSet& fs);

double predict_degradation(const DegradationModel& model, const ApplicationProfile& primary,
                           const ApplicationProfile& interfering);

// Row-parallel batch prediction plus its serial reference.
std::vector<double> predict_batch(const DegradationModel& model, const std::vector<std::vector<double>>& rows);
std::vector<double> predict_batch_serial(const DegradationModel& model, const std::vector<std::vector<double>>& rows);

// Coefficient of determination. Errors on length mismatch, empty input, or
// zero variance in `actual`.
double r2_score(const std::vector<double>& actual, const std::vector<double>& predicted);

// Seeded uniform partition; |test| = round(fraction * n).
std::pair<std::vector<ColocationSample>, std::vector<ColocationSample>>
holdout_split(const std::vector<ColocationSample>& dataset, double test_fraction, std::uint64_t seed);

// k-fold cross-validation. Folds are a seeded permutation (derived from
// hp.seed) dealt round-robin; reports per-fold R2 and the pooled
// out-of-fold R2 in `r2`.
EvaluationReport cross_validate(const std::vector<ColocationSample>& dataset, int k, const ForestHyperparams& hp,
                                const FeatureSet& fs);

struct SearchSpace {
    std::pair<int, int> n_estimators{2, 30};
    std::vector<MaxFeatures> max_features{MaxFeatures::all(), MaxFeatures::sqrt()};
    std::pair<int, int> min_samples_split{2, 10};
    std::vector<bool> bootstrap{true, false};
};

// Seeded random search over the space; scores each draw with k-fold CV and
// returns the best mean fold R2. Ties go to fewer estimators, then to the
// earlier draw. `trials`, when non-null, receives every sampled
// configuration with its score.
std::pair<ForestHyperparams, EvaluationReport> tune_hyperparameters(
    const std::vector<ColocationSample>& dataset, int budget, const SearchSpace& space, std::uint64_t seed,
    const FeatureSet& fs, int k = 5, std::vector<std::pair<ForestHyperparams, double>>* trials = nullptr);

struct LinearModel {
    std::vector<double> coef; // one per feature
    double intercept = 0;

    double predict(std::span<const double> features) const;
};

// Ordinary least squares (normal equations, ridge 1e-8) evaluated on a
// holdout split like the forest. Sanity baseline only.
std::pair<LinearModel, EvaluationReport> baseline_least_squares(const std::vector<ColocationSample>& dataset,
                                                                double test_fraction = 0.3, std::uint64_t seed = 0);

// model.json round trip; bit-exact predictions across save/load.
void save_model(const DegradationModel& model, const std::string& path);
DegradationModel load_model(const std::string& path);
std::string model_to_json(const DegradationModel& model);
DegradationModel model_from_json(const std::string& text);

} // namespace cosched
