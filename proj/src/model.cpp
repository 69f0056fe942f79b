#include "cosched/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "cosched/csv.hpp"
#include "cosched/error.hpp"
#include "cosched/rng.hpp"

namespace cosched {

using json = nlohmann::json;

MaxFeatures MaxFeatures::of_fraction(double f) {
    if (!(f > 0.0 && f <= 1.0)) fail("bad_argument", "max_features fraction must be in (0,1], got " + fmt_double(f));
    return {Kind::Fraction, f};
}

int MaxFeatures::resolve(int n_features) const {
    switch (kind) {
    case Kind::All: return n_features;
    case Kind::Sqrt: return std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_features)))));
    case Kind::Fraction: return std::clamp(static_cast<int>(std::ceil(fraction * n_features)), 1, n_features);
    }
    return n_features;
}

std::string MaxFeatures::to_string() const {
    switch (kind) {
    case Kind::All: return "all";
    case Kind::Sqrt: return "sqrt";
    case Kind::Fraction: return fmt_double(fraction);
    }
    return "all";
}

MaxFeatures MaxFeatures::parse(const std::string& text) {
    if (text == "all" || text == "auto") return all();
    if (text == "sqrt") return sqrt();
    return of_fraction(parse_real(text, 0, "max_features"));
}

double Tree::predict(std::span<const double> features) const {
    int i = 0;
    while (!nodes[i].is_leaf()) {
        const TreeNode& n = nodes[i];
        i = features[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[i].value;
}

double DegradationModel::predict(std::span<const double> features) const {
    if (static_cast<int>(features.size()) != n_features)
        fail("feature_mismatch", "expected " + std::to_string(n_features) + " features, got " +
                                     std::to_string(features.size()));
    double sum = 0;
    for (const Tree& t : trees) sum += t.predict(features);
    return std::max(0.0, sum / static_cast<double>(trees.size()));
}

double EvaluationReport::mean_fold_r2() const {
    double sum = 0;
    int n = 0;
    for (double v : per_fold_r2)
        if (!std::isnan(v)) {
            sum += v;
            ++n;
        }
    return n ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Tree growth

namespace {

struct TrainView {
    const std::vector<ColocationSample>* data = nullptr;
    int n_features = 0;

    double y(int row) const { return (*data)[row].degradation; }
    double x(int row, int f) const { return (*data)[row].features[f]; }
};

struct Split {
    double reduction = -1; // sum-of-squares decrease; valid splits have >= 0
    int feature = -1;
    double threshold = 0;
};

// Best variance-reduction split of `rows` over `feature`. Thresholds are
// midpoints between consecutive distinct values; rows with value <= threshold
// go left.
Split best_split_on_feature(const TrainView& view, const std::vector<int>& rows, int feature,
                            std::vector<std::pair<double, double>>& scratch) {
    scratch.clear();
    for (int r : rows) scratch.emplace_back(view.x(r, feature), view.y(r));
    std::sort(scratch.begin(), scratch.end());

    const int n = static_cast<int>(scratch.size());
    double total = 0;
    for (auto& [xv, yv] : scratch) total += yv;

    Split best;
    double left_sum = 0;
    for (int i = 0; i + 1 < n; ++i) {
        left_sum += scratch[i].second;
        if (scratch[i].first == scratch[i + 1].first) continue;
        const int nl = i + 1;
        const int nr = n - nl;
        const double right_sum = total - left_sum;
        // variance reduction up to a constant: sum_l^2/n_l + sum_r^2/n_r - total^2/n
        const double gain =
            left_sum * left_sum / nl + right_sum * right_sum / nr - total * total / n;
        if (gain > best.reduction) {
            double thr = (scratch[i].first + scratch[i + 1].first) / 2.0;
            if (thr >= scratch[i + 1].first) thr = scratch[i].first; // adjacent floats
            best.reduction = gain;
            best.feature = feature;
            best.threshold = thr;
        }
    }
    return best;
}

class TreeBuilder {
public:
    TreeBuilder(const TrainView& view, const ForestHyperparams& hp, Rng& rng)
        : view_(view), hp_(hp), rng_(rng), k_(hp.max_features.resolve(view.n_features)) {
        pool_.resize(view.n_features);
    }

    Tree build(std::vector<int> rows) {
        tree_.nodes.clear();
        grow(std::move(rows));
        return std::move(tree_);
    }

private:
    int grow(std::vector<int> rows) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        const int n = static_cast<int>(rows.size());
        double sum = 0, sum_sq = 0;
        for (int r : rows) {
            const double y = view_.y(r);
            sum += y;
            sum_sq += y * y;
        }
        const double mean = sum / n;
        tree_.nodes[id].value = mean;
        const double ss = sum_sq - sum * sum / n;
        if (n < hp_.min_samples_split || ss <= 0) return id;

        const Split split = pick_split(rows);
        if (split.feature < 0) return id; // every candidate feature constant

        std::vector<int> left, right;
        left.reserve(n);
        right.reserve(n);
        for (int r : rows)
            (view_.x(r, split.feature) <= split.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        tree_.nodes[id].feature = split.feature;
        tree_.nodes[id].threshold = split.threshold;
        const int l = grow(std::move(left));
        tree_.nodes[id].left = l;
        const int r = grow(std::move(right));
        tree_.nodes[id].right = r;
        return id;
    }

    Split pick_split(const std::vector<int>& rows) {
        const int d = view_.n_features;
        int* begin = pool_.data();
        int count = d;
        if (k_ < d) {
            std::iota(pool_.begin(), pool_.end(), 0);
            for (int i = 0; i < k_; ++i) {
                const int j = i + static_cast<int>(rng_.below(static_cast<std::uint64_t>(d - i)));
                std::swap(pool_[i], pool_[j]);
            }
            std::sort(pool_.begin(), pool_.begin() + k_); // ties break on lowest feature index
            count = k_;
        } else {
            std::iota(pool_.begin(), pool_.end(), 0);
        }

        Split best;
        for (int i = 0; i < count; ++i) {
            const Split s = best_split_on_feature(view_, rows, begin[i], scratch_);
            if (s.feature < 0) continue;
            if (s.reduction > best.reduction ||
                (s.reduction == best.reduction &&
                 (s.feature < best.feature || (s.feature == best.feature && s.threshold < best.threshold))))
                best = s;
        }
        return best;
    }

    const TrainView& view_;
    const ForestHyperparams& hp_;
    Rng& rng_;
    const int k_;
    Tree tree_;
    std::vector<int> pool_;
    std::vector<std::pair<double, double>> scratch_;
};

Tree grow_tree(const TrainView& view, const ForestHyperparams& hp, std::uint64_t tree_seed) {
    Rng rng(tree_seed);
    const int n = static_cast<int>(view.data->size());
    std::vector<int> rows;
    rows.reserve(n);
    if (hp.bootstrap) {
        for (int i = 0; i < n; ++i) rows.push_back(static_cast<int>(rng.below(n)));
    } else {
        rows.resize(n);
        std::iota(rows.begin(), rows.end(), 0);
    }
    TreeBuilder builder(view, hp, rng);
    return builder.build(std::move(rows));
}

void validate_training_input(const std::vector<ColocationSample>& dataset, const ForestHyperparams& hp,
                             const FeatureSet& fs) {
    if (dataset.empty()) fail("empty_dataset", "training dataset is empty");
    if (hp.n_estimators < 1) fail("bad_argument", "n_estimators must be >= 1");
    if (hp.min_samples_split < 2) fail("bad_argument", "min_samples_split must be >= 2");
    const std::size_t want = static_cast<std::size_t>(fs.feature_length());
    for (const auto& s : dataset)
        if (s.features.size() != want)
            fail("inconsistent_features", "sample (" + s.primary_id + "," + s.interfering_id + ") has " +
                                              std::to_string(s.features.size()) + " features, feature set needs " +
                                              std::to_string(want));
}

DegradationModel assemble_model(std::vector<Tree> trees, const std::vector<ColocationSample>& dataset,
                                const ForestHyperparams& hp, const FeatureSet& fs) {
    DegradationModel m;
    m.trees = std::move(trees);
    m.hyperparams = hp;
    m.feature_set = fs;
    m.n_features = fs.feature_length();
    m.target_lo = std::numeric_limits<double>::infinity();
    m.target_hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : dataset) {
        m.target_lo = std::min(m.target_lo, s.degradation);
        m.target_hi = std::max(m.target_hi, s.degradation);
    }
    return m;
}

} // namespace

DegradationModel train_forest(const std::vector<ColocationSample>& dataset, const ForestHyperparams& hp,
                              const FeatureSet& fs) {
    validate_training_input(dataset, hp, fs);
    TrainView view{&dataset, fs.feature_length()};
    std::vector<Tree> trees(hp.n_estimators);
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < hp.n_estimators; ++t) trees[t] = grow_tree(view, hp, mix_seed(hp.seed, t));
    return assemble_model(std::move(trees), dataset, hp, fs);
}

DegradationModel train_forest_serial(const std::vector<ColocationSample>& dataset, const ForestHyperparams& hp,
                                     const FeatureSet& fs) {
    validate_training_input(dataset, hp, fs);
    TrainView view{&dataset, fs.feature_length()};
    std::vector<Tree> trees(hp.n_estimators);
    for (int t = 0; t < hp.n_estimators; ++t) trees[t] = grow_tree(view, hp, mix_seed(hp.seed, t));
    return assemble_model(std::move(trees), dataset, hp, fs);
}

double predict_degradation(const DegradationModel& model, const ApplicationProfile& primary,
                           const ApplicationProfile& interfering) {
    const std::vector<double> features = feature_vector(primary, interfering, model.feature_set);
    return model.predict(features);
}

std::vector<double> predict_batch(const DegradationModel& model, const std::vector<std::vector<double>>& rows) {
    std::vector<double> out(rows.size());
    const int n = static_cast<int>(rows.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) out[i] = model.predict(rows[i]);
    return out;
}

std::vector<double> predict_batch_serial(const DegradationModel& model, const std::vector<std::vector<double>>& rows) {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = model.predict(rows[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Validation

double r2_score(const std::vector<double>& actual, const std::vector<double>& predicted) {
    if (actual.size() != predicted.size())
        fail("length_mismatch", "r2_score: " + std::to_string(actual.size()) + " actual vs " +
                                    std::to_string(predicted.size()) + " predicted");
    if (actual.empty()) fail("length_mismatch", "r2_score: empty input");
    const double n = static_cast<double>(actual.size());
    double mean = 0;
    for (double a : actual) mean += a;
    mean /= n;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
    }
    if (ss_tot == 0) fail("zero_variance", "r2_score: actual values have zero variance");
    return 1.0 - ss_res / ss_tot;
}

std::pair<std::vector<ColocationSample>, std::vector<ColocationSample>>
holdout_split(const std::vector<ColocationSample>& dataset, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        fail("bad_argument", "test_fraction must be in (0,1), got " + fmt_double(test_fraction));
    const std::size_t n = dataset.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    rng.shuffle(idx);
    const std::size_t n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    std::vector<bool> in_test(n, false);
    for (std::size_t i = 0; i < n_test && i < n; ++i) in_test[idx[i]] = true;
    std::pair<std::vector<ColocationSample>, std::vector<ColocationSample>> out;
    for (std::size_t i = 0; i < n; ++i) (in_test[i] ? out.second : out.first).push_back(dataset[i]);
    return out;
}

EvaluationReport cross_validate(const std::vector<ColocationSample>& dataset, int k, const ForestHyperparams& hp,
                                const FeatureSet& fs) {
    const int n = static_cast<int>(dataset.size());
    if (k < 2) fail("bad_argument", "cross_validate: k must be >= 2");
    if (n < k) fail("bad_argument", "cross_validate: need at least k samples (k=" + std::to_string(k) +
                                        ", n=" + std::to_string(n) + ")");

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(mix_seed(hp.seed, 0xf01d5ULL));
    rng.shuffle(idx);
    std::vector<int> fold_of(n);
    for (int i = 0; i < n; ++i) fold_of[idx[i]] = i % k;

    EvaluationReport report;
    report.per_fold_r2.resize(k);
    for (int f = 0; f < k; ++f) {
        std::vector<ColocationSample> train;
        std::vector<const ColocationSample*> held;
        for (int i = 0; i < n; ++i)
            if (fold_of[i] == f)
                held.push_back(&dataset[i]);
            else
                train.push_back(dataset[i]);
        const DegradationModel model = train_forest(train, hp, fs);
        std::vector<double> actual, predicted;
        for (const ColocationSample* s : held) {
            actual.push_back(s->degradation);
            predicted.push_back(model.predict(s->features));
            report.predictions.emplace_back(actual.back(), predicted.back());
        }
        bool defined = actual.size() >= 2;
        if (defined) {
            const double first = actual.front();
            defined = std::any_of(actual.begin(), actual.end(), [&](double a) { return a != first; });
        }
        report.per_fold_r2[f] = defined ? r2_score(actual, predicted) : std::numeric_limits<double>::quiet_NaN();
    }

    std::vector<double> all_actual, all_predicted;
    for (auto& [a, p] : report.predictions) {
        all_actual.push_back(a);
        all_predicted.push_back(p);
    }
    report.r2 = r2_score(all_actual, all_predicted);
    report.n_train = n - n / k; // size of the largest training side
    report.n_test = n;
    return report;
}

std::pair<ForestHyperparams, EvaluationReport> tune_hyperparameters(
    const std::vector<ColocationSample>& dataset, int budget, const SearchSpace& space, std::uint64_t seed,
    const FeatureSet& fs, int k, std::vector<std::pair<ForestHyperparams, double>>* trials) {
    if (budget < 1) fail("bad_argument", "tune budget must be >= 1");
    if (space.max_features.empty() || space.bootstrap.empty() || space.n_estimators.first > space.n_estimators.second ||
        space.min_samples_split.first > space.min_samples_split.second || space.n_estimators.first < 1 ||
        space.min_samples_split.first < 2)
        fail("empty_space", "hyperparameter space is empty or invalid");

    ForestHyperparams best_hp;
    EvaluationReport best_report;
    double best_score = -std::numeric_limits<double>::infinity();
    bool have_best = false;
    for (int trial = 0; trial < budget; ++trial) {
        Rng rng(mix_seed(seed, trial));
        ForestHyperparams hp;
        hp.n_estimators = space.n_estimators.first +
                          static_cast<int>(rng.below(space.n_estimators.second - space.n_estimators.first + 1));
        hp.max_features = space.max_features[rng.below(space.max_features.size())];
        hp.min_samples_split =
            space.min_samples_split.first +
            static_cast<int>(rng.below(space.min_samples_split.second - space.min_samples_split.first + 1));
        hp.bootstrap = space.bootstrap[rng.below(space.bootstrap.size())];
        hp.seed = seed;

        const EvaluationReport report = cross_validate(dataset, k, hp, fs);
        const double score = report.mean_fold_r2();
        if (trials) trials->emplace_back(hp, score);
        const bool better = !have_best || score > best_score ||
                            (score == best_score && hp.n_estimators < best_hp.n_estimators);
        if (better) {
            best_hp = hp;
            best_report = report;
            best_score = score;
            have_best = true;
        }
    }
    return {best_hp, best_report};
}

// ---------------------------------------------------------------------------
// Least-squares baseline

double LinearModel::predict(std::span<const double> features) const {
    double v = intercept;
    for (std::size_t i = 0; i < coef.size(); ++i) v += coef[i] * features[i];
    return v;
}

namespace {

// Gaussian elimination with partial pivoting on the (d+1)x(d+1) normal system.
std::vector<double> solve_normal_equations(std::vector<std::vector<double>> a, std::vector<double> b) {
    const int d = static_cast<int>(b.size());
    for (int col = 0; col < d; ++col) {
        int pivot = col;
        for (int r = col + 1; r < d; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-30) fail("rank_deficient", "normal equations are singular");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < d; ++r) {
            const double factor = a[r][col] / a[col][col];
            if (factor == 0) continue;
            for (int c = col; c < d; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(d);
    for (int r = d - 1; r >= 0; --r) {
        double v = b[r];
        for (int c = r + 1; c < d; ++c) v -= a[r][c] * x[c];
        x[r] = v / a[r][r];
    }
    return x;
}

} // namespace

std::pair<LinearModel, EvaluationReport> baseline_least_squares(const std::vector<ColocationSample>& dataset,
                                                                double test_fraction, std::uint64_t seed) {
    if (dataset.empty()) fail("empty_dataset", "training dataset is empty");
    const int d = static_cast<int>(dataset.front().features.size());
    auto [train, test] = holdout_split(dataset, test_fraction, seed);
    if (static_cast<int>(train.size()) <= d)
        fail("rank_deficient", "need more than " + std::to_string(d) + " training samples, got " +
                                   std::to_string(train.size()));

    // Normal equations over [X | 1] with ridge 1e-8 for conditioning.
    const int m = d + 1;
    std::vector<std::vector<double>> xtx(m, std::vector<double>(m, 0.0));
    std::vector<double> xty(m, 0.0);
    auto at = [&](const ColocationSample& s, int j) { return j < d ? s.features[j] : 1.0; };
    for (const auto& s : train) {
        for (int i = 0; i < m; ++i) {
            const double xi = at(s, i);
            xty[i] += xi * s.degradation;
            for (int j = i; j < m; ++j) xtx[i][j] += xi * at(s, j);
        }
    }
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < i; ++j) xtx[i][j] = xtx[j][i];
        xtx[i][i] += 1e-8;
    }
    const std::vector<double> beta = solve_normal_equations(std::move(xtx), std::move(xty));

    LinearModel model;
    model.coef.assign(beta.begin(), beta.begin() + d);
    model.intercept = beta[d];

    EvaluationReport report;
    report.n_train = static_cast<int>(train.size());
    report.n_test = static_cast<int>(test.size());
    std::vector<double> actual, predicted;
    for (const auto& s : test) {
        actual.push_back(s.degradation);
        predicted.push_back(model.predict(s.features));
        report.predictions.emplace_back(actual.back(), predicted.back());
    }
    bool defined = actual.size() >= 2;
    if (defined) {
        const double first = actual.front();
        defined = std::any_of(actual.begin(), actual.end(), [&](double a) { return a != first; });
    }
    report.r2 = defined ? r2_score(actual, predicted) : std::numeric_limits<double>::quiet_NaN();
    return {model, report};
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json tree_to_json(const Tree& tree, int node) {
    const TreeNode& n = tree.nodes[node];
    if (n.is_leaf()) return json{{"v", n.value}};
    return json{{"f", n.feature},
                {"t", n.threshold},
                {"l", tree_to_json(tree, n.left)},
                {"r", tree_to_json(tree, n.right)}};
}

int tree_from_json(const json& j, Tree& tree, int n_features) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (j.contains("v")) {
        tree.nodes[id].value = j.at("v").get<double>();
        return id;
    }
    const int feature = j.at("f").get<int>();
    if (feature < 0 || feature >= n_features)
        fail("corrupt_file", "tree references feature " + std::to_string(feature) + " outside the feature vector");
    tree.nodes[id].feature = feature;
    tree.nodes[id].threshold = j.at("t").get<double>();
    const int l = tree_from_json(j.at("l"), tree, n_features);
    tree.nodes[id].left = l;
    const int r = tree_from_json(j.at("r"), tree, n_features);
    tree.nodes[id].right = r;
    return id;
}

} // namespace

std::string model_to_json(const DegradationModel& model) {
    json j;
    j["version"] = 1;
    j["feature_set"] = {{"counters", model.feature_set.group_name()}, {"stats", model.feature_set.stats_name()}};
    j["hyperparams"] = {{"n_estimators", model.hyperparams.n_estimators},
                        {"max_features", model.hyperparams.max_features.to_string()},
                        {"min_samples_split", model.hyperparams.min_samples_split},
                        {"bootstrap", model.hyperparams.bootstrap},
                        {"seed", model.hyperparams.seed}};
    j["n_features"] = model.n_features;
    j["training_target_range"] = {model.target_lo, model.target_hi};
    json trees = json::array();
    for (const Tree& t : model.trees) trees.push_back(tree_to_json(t, 0));
    j["trees"] = std::move(trees);
    return j.dump();
}

DegradationModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail("corrupt_file", std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (!j.contains("version") || j.at("version").get<int>() != 1)
            fail("version_mismatch", "unsupported model version");
        DegradationModel m;
        m.feature_set = FeatureSet::parse(j.at("feature_set").at("counters").get<std::string>(),
                                          j.at("feature_set").at("stats").get<std::string>());
        const json& hp = j.at("hyperparams");
        m.hyperparams.n_estimators = hp.at("n_estimators").get<int>();
        m.hyperparams.max_features = MaxFeatures::parse(hp.at("max_features").get<std::string>());
        m.hyperparams.min_samples_split = hp.at("min_samples_split").get<int>();
        m.hyperparams.bootstrap = hp.at("bootstrap").get<bool>();
        m.hyperparams.seed = hp.at("seed").get<std::uint64_t>();
        m.n_features = j.at("n_features").get<int>();
        m.target_lo = j.at("training_target_range").at(0).get<double>();
        m.target_hi = j.at("training_target_range").at(1).get<double>();
        if (m.target_lo > m.target_hi) fail("corrupt_file", "invalid training target range");
        for (const json& tj : j.at("trees")) {
            Tree t;
            tree_from_json(tj, t, m.n_features);
            m.trees.push_back(std::move(t));
        }
        if (static_cast<int>(m.trees.size()) != m.hyperparams.n_estimators)
            fail("corrupt_file", "tree count does not match n_estimators");
        return m;
    } catch (const json::exception& e) {
        fail("corrupt_file", std::string("model file is malformed: ") + e.what());
    }
}

void save_model(const DegradationModel& model, const std::string& path) {
    write_text_file(path, model_to_json(model) + "\n");
}

DegradationModel load_model(const std::string& path) { return model_from_json(read_text_file(path)); }

} // namespace cosched
