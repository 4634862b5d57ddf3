#pragma once

// Scoring and supervised protocols: adjusted Rand index against reference
// labels, kNN classification under a precomputed distance matrix, and
// weight tuning by nested cross-validated grid search.
//
// Stratified folds, neighbour ordering and grid tie-breaks are all fully
// deterministic given the seed. Label reads go through a probe hook so the
// no-peeking contract of tune_weights can be audited from tests.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "relsim/clustering.hpp"
#include "relsim/dissimilarity.hpp"
#include "relsim/error.hpp"
#include "relsim/matrix.hpp"

namespace relsim {

using LabelMap = std::map<std::string, std::string>;
using WeightVector = std::array<double, 5>;

struct LabelAccess {
    // phases: "stratify" (fold construction), "train" (selection/fitting),
    // "evaluate" (test scoring after prediction); outer_fold is the fold
    // being processed, or -1 outside any fold context
    std::function<void(const std::string& id, const char* phase, int outer_fold)> probe;
    void note(const std::string& id, const char* phase, int outer_fold = -1) const {
        if (probe) probe(id, phase, outer_fold);
    }
};

struct EvaluationReport {
    std::string task;
    std::vector<double> fold_accuracy; // percent, per outer fold
    double mean_accuracy = 0.0;
    int folds_used = 0;
    std::vector<WeightVector> selected_weights;          // tuning only, per fold
    std::vector<std::vector<std::string>> fold_test_ids; // per outer fold
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;
};

// --- adjusted Rand index -----------------------------------------------------

// Pair-counting ARI of two integer labelings of the same items. The
// degenerate case where every pair agrees by construction returns 1.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) raise(errc::id_mismatch, "labelings cover different item counts");
    const std::size_t n = a.size();
    std::map<std::pair<int, int>, long> cell;
    std::map<int, long> row, col;
    for (std::size_t i = 0; i < n; ++i) {
        cell[{a[i], b[i]}]++;
        row[a[i]]++;
        col[b[i]]++;
    }
    auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
    double sab = 0.0, sa = 0.0, sb = 0.0;
    for (const auto& [k, c] : cell) sab += comb2(static_cast<double>(c));
    for (const auto& [k, c] : row) sa += comb2(static_cast<double>(c));
    for (const auto& [k, c] : col) sb += comb2(static_cast<double>(c));
    const double total = comb2(static_cast<double>(n));
    const double expected = total > 0.0 ? sa * sb / total : 0.0;
    const double maximum = (sa + sb) / 2.0;
    if (maximum == expected) return 1.0;
    return (sab - expected) / (maximum - expected);
}

// ARI between a clustering and a reference label map over the same ids.
inline double adjusted_rand_index(const ClusterAssignment& a, const LabelMap& labels) {
    if (labels.size() != a.ids.size())
        raise(errc::id_mismatch, "label map does not cover the same id set");
    std::vector<int> lhs, rhs;
    std::map<std::string, int> class_index;
    for (std::size_t i = 0; i < a.ids.size(); ++i) {
        auto it = labels.find(a.ids[i]);
        if (it == labels.end())
            raise(errc::id_mismatch, "no label for id '" + a.ids[i] + "'");
        lhs.push_back(a.cluster[i]);
        rhs.push_back(class_index.emplace(it->second, static_cast<int>(class_index.size()))
                          .first->second);
    }
    return adjusted_rand_index(lhs, rhs);
}

// --- k nearest neighbours ----------------------------------------------------

namespace detail {

// Neighbours of `item` among `train`, nearest first; distance ties fall
// back to id order, i.e. the position in the matrix ordering. The item
// itself is never its own neighbour.
inline std::vector<std::size_t> nearest_neighbours(const Matrix& dist, std::size_t item,
                                                   const std::vector<std::size_t>& train) {
    std::vector<std::size_t> order;
    order.reserve(train.size());
    for (std::size_t t : train)
        if (t != item) order.push_back(t);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (dist(item, x) != dist(item, y)) return dist(item, x) < dist(item, y);
        return x < y;
    });
    return order;
}

} // namespace detail

// Majority vote over the k nearest train neighbours; a vote tie goes to the
// tied class whose nearest member comes first.
inline std::vector<std::string> knn_predict(const Matrix& dist, const std::vector<std::size_t>& train,
                                            const std::vector<std::string>& train_labels,
                                            const std::vector<std::size_t>& test, int k) {
    if (train.empty()) raise(errc::empty_train, "no training items");
    if (k < 1) raise(errc::bad_k, "k must be >= 1");
    std::map<std::size_t, const std::string*> label_of;
    for (std::size_t i = 0; i < train.size(); ++i) label_of[train[i]] = &train_labels[i];

    std::vector<std::string> out;
    out.reserve(test.size());
    for (std::size_t item : test) {
        const std::vector<std::size_t> order = detail::nearest_neighbours(dist, item, train);
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
        if (take == 0) raise(errc::empty_train, "no neighbours available for an item");
        std::map<std::string, int> votes;
        for (std::size_t r = 0; r < take; ++r) votes[*label_of[order[r]]]++;
        int top = 0;
        for (const auto& [cls, v] : votes) top = std::max(top, v);
        // first class reached in neighbour order among the tied ones
        const std::string* winner = nullptr;
        for (std::size_t r = 0; r < take && !winner; ++r)
            if (votes[*label_of[order[r]]] == top) winner = label_of[order[r]];
        out.push_back(*winner);
    }
    return out;
}

// Id-level wrapper matching the CLI surface.
inline std::vector<std::string> knn_classify(const Matrix& dist, const std::vector<std::string>& ids,
                                             const LabelMap& train_labels,
                                             const std::vector<std::string>& test_ids, int k) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;
    auto lookup = [&](const std::string& id) {
        auto it = index.find(id);
        if (it == index.end()) raise(errc::id_mismatch, "id '" + id + "' is not in the matrix");
        return it->second;
    };
    std::vector<std::size_t> train;
    std::vector<std::string> labels;
    for (const auto& [id, cls] : train_labels) {
        train.push_back(lookup(id));
        labels.push_back(cls);
    }
    std::vector<std::size_t> test;
    for (const std::string& id : test_ids) test.push_back(lookup(id));
    return knn_predict(dist, train, labels, test, k);
}

// --- folds ---------------------------------------------------------------------

namespace detail {

inline double next_unit64(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Stratified fold assignment: per class, shuffle then deal round-robin.
// Reduces the fold count when a class has fewer members than folds.
inline std::vector<std::vector<std::size_t>> stratified_folds(
    const std::vector<std::size_t>& items, const std::vector<std::string>& item_labels, int folds,
    std::uint64_t seed, std::vector<std::string>* warnings) {
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < items.size(); ++i) by_class[item_labels[i]].push_back(items[i]);

    std::size_t smallest = items.size();
    for (const auto& [cls, members] : by_class) smallest = std::min(smallest, members.size());
    int use = folds;
    if (static_cast<std::size_t>(folds) > smallest) {
        use = static_cast<int>(std::max<std::size_t>(2, smallest));
        if (warnings)
            warnings->push_back("stratification: reduced fold count from " +
                                std::to_string(folds) + " to " + std::to_string(use));
    }

    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(use));
    std::mt19937_64 rng(seed ^ 0x5bf0f3a9d2c1e847ULL);
    for (auto& [cls, members] : by_class) {
        for (std::size_t i = members.size(); i > 1; --i) {
            std::size_t j = std::min(i - 1, static_cast<std::size_t>(next_unit64(rng) * i));
            std::swap(members[i - 1], members[j]);
        }
        for (std::size_t i = 0; i < members.size(); ++i)
            out[i % static_cast<std::size_t>(use)].push_back(members[i]);
    }
    for (auto& fold : out) std::sort(fold.begin(), fold.end());
    return out;
}

} // namespace detail

// --- cross-validation -----------------------------------------------------------

// Plain stratified F-fold kNN cross-validation under a fixed distance matrix.
inline EvaluationReport knn_cross_validate(const Matrix& dist, const std::vector<std::string>& ids,
                                           const LabelMap& labels, int folds, int k,
                                           std::uint64_t seed, const LabelAccess& access = {}) {
    const auto start = std::chrono::steady_clock::now();
    if (labels.empty()) raise(errc::missing_labels, "no labels in the dataset");
    if (folds < 2) throw std::invalid_argument("folds must be >= 2");

    std::vector<std::size_t> items;
    std::vector<std::string> item_labels;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto it = labels.find(ids[i]);
        if (it == labels.end()) continue;
        access.note(ids[i], "stratify");
        items.push_back(i);
        item_labels.push_back(it->second);
    }
    if (items.empty()) raise(errc::missing_labels, "labels do not match any target id");

    EvaluationReport rep;
    rep.task = "classification";
    const auto fold_sets =
        detail::stratified_folds(items, item_labels, folds, seed, &rep.warnings);
    rep.folds_used = static_cast<int>(fold_sets.size());

    std::map<std::size_t, std::string> label_by_index;
    for (std::size_t i = 0; i < items.size(); ++i) label_by_index[items[i]] = item_labels[i];

    for (std::size_t f = 0; f < fold_sets.size(); ++f) {
        const auto& test = fold_sets[f];
        std::vector<std::size_t> train;
        std::vector<std::string> train_labels;
        for (std::size_t item : items) {
            if (std::binary_search(test.begin(), test.end(), item)) continue;
            access.note(ids[item], "train", static_cast<int>(f));
            train.push_back(item);
            train_labels.push_back(label_by_index[item]);
        }
        const std::vector<std::string> predicted = knn_predict(dist, train, train_labels, test, k);
        int correct = 0;
        std::vector<std::string> fold_ids;
        for (std::size_t i = 0; i < test.size(); ++i) {
            access.note(ids[test[i]], "evaluate", static_cast<int>(f));
            if (predicted[i] == label_by_index[test[i]]) ++correct;
            fold_ids.push_back(ids[test[i]]);
        }
        rep.fold_accuracy.push_back(test.empty() ? 0.0
                                                 : 100.0 * correct / static_cast<double>(test.size()));
        rep.fold_test_ids.push_back(std::move(fold_ids));
    }
    double sum = 0.0;
    for (double a : rep.fold_accuracy) sum += a;
    rep.mean_accuracy = rep.fold_accuracy.empty() ? 0.0 : sum / rep.fold_accuracy.size();
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

// --- weight tuning ----------------------------------------------------------------

// All weight vectors over {0, step, 2*step, ..., 1} summing to 1, in
// descending lexicographic order, so concentrated vectors come first and
// accuracy ties resolve toward them.
inline std::vector<WeightVector> weight_grid(double step = 0.2) {
    if (!(step > 0.0) || step > 1.0) raise(errc::bad_grid, "grid step must be in (0, 1]");
    const int units = static_cast<int>(std::lround(1.0 / step));
    if (std::abs(units * step - 1.0) > 1e-9)
        raise(errc::bad_grid, "grid step must divide 1 evenly");
    std::vector<WeightVector> grid;
    for (int a = units; a >= 0; --a)
        for (int b = units - a; b >= 0; --b)
            for (int c = units - a - b; c >= 0; --c)
                for (int d = units - a - b - c; d >= 0; --d) {
                    const int e = units - a - b - c - d;
                    grid.push_back({a / static_cast<double>(units), b / static_cast<double>(units),
                                    c / static_cast<double>(units), d / static_cast<double>(units),
                                    e / static_cast<double>(units)});
                }
    return grid;
}

// Nested cross-validation over a weight grid. For each outer fold, the grid
// vector with the best mean inner-CV accuracy (first on ties) is selected on
// the outer-train split only, then scored once on the outer-test split.
// Component matrices stay fixed; only the weighted combination reruns.
inline EvaluationReport tune_weights(const ComponentMatrices& normalized, const LabelMap& labels,
                                     const std::vector<WeightVector>& grid, int folds, int k,
                                     std::uint64_t seed, const LabelAccess& access = {},
                                     int depth_for_config = 1) {
    const auto start = std::chrono::steady_clock::now();
    if (labels.empty()) raise(errc::missing_labels, "no labels in the dataset");
    if (grid.empty()) raise(errc::bad_grid, "empty weight grid");
    for (const WeightVector& w : grid) {
        double sum = 0.0;
        for (double x : w) {
            if (x < 0.0) raise(errc::bad_grid, "grid weights must be nonnegative");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-9) raise(errc::bad_grid, "grid vectors must sum to 1");
    }
    if (folds < 2) throw std::invalid_argument("folds must be >= 2");

    const std::vector<std::string>& ids = normalized.ids;
    std::vector<std::size_t> items;
    std::vector<std::string> item_labels;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto it = labels.find(ids[i]);
        if (it == labels.end()) continue;
        access.note(ids[i], "stratify");
        items.push_back(i);
        item_labels.push_back(it->second);
    }
    if (items.empty()) raise(errc::missing_labels, "labels do not match any target id");

    EvaluationReport rep;
    rep.task = "classification";
    const auto outer = detail::stratified_folds(items, item_labels, folds, seed, &rep.warnings);
    rep.folds_used = static_cast<int>(outer.size());

    std::map<std::size_t, std::string> label_by_index;
    for (std::size_t i = 0; i < items.size(); ++i) label_by_index[items[i]] = item_labels[i];

    // inner folds per outer fold, built over the outer-train items only
    std::vector<std::vector<std::vector<std::size_t>>> inner(outer.size());
    std::vector<std::vector<std::size_t>> outer_train(outer.size());
    for (std::size_t f = 0; f < outer.size(); ++f) {
        std::vector<std::size_t> train;
        std::vector<std::string> train_labels;
        for (std::size_t item : items) {
            if (std::binary_search(outer[f].begin(), outer[f].end(), item)) continue;
            access.note(ids[item], "stratify", static_cast<int>(f));
            train.push_back(item);
            train_labels.push_back(label_by_index[item]);
        }
        inner[f] = detail::stratified_folds(train, train_labels, folds, seed + 1 + f, &rep.warnings);
        outer_train[f] = std::move(train);
    }

    // mean inner accuracy per (outer fold, grid point)
    std::vector<std::vector<double>> inner_score(outer.size(),
                                                 std::vector<double>(grid.size(), 0.0));
    DissimilarityConfig cfg;
    cfg.depth = depth_for_config;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        cfg.weights = grid[g];
        const DistanceMatrix dm = combine(normalized, cfg);
        for (std::size_t f = 0; f < outer.size(); ++f) {
            double acc_sum = 0.0;
            int used = 0;
            for (const auto& val : inner[f]) {
                std::vector<std::size_t> train;
                std::vector<std::string> train_labels;
                for (std::size_t item : outer_train[f]) {
                    if (std::binary_search(val.begin(), val.end(), item)) continue;
                    access.note(ids[item], "train", static_cast<int>(f));
                    train.push_back(item);
                    train_labels.push_back(label_by_index[item]);
                }
                if (train.empty() || val.empty()) continue;
                const auto predicted = knn_predict(dm.values, train, train_labels, val, k);
                int correct = 0;
                for (std::size_t i = 0; i < val.size(); ++i) {
                    access.note(ids[val[i]], "train", static_cast<int>(f));
                    if (predicted[i] == label_by_index[val[i]]) ++correct;
                }
                acc_sum += 100.0 * correct / static_cast<double>(val.size());
                ++used;
            }
            inner_score[f][g] = used ? acc_sum / used : 0.0;
        }
    }

    for (std::size_t f = 0; f < outer.size(); ++f) {
        std::size_t best = 0;
        for (std::size_t g = 1; g < grid.size(); ++g)
            if (inner_score[f][g] > inner_score[f][best]) best = g;
        rep.selected_weights.push_back(grid[best]);

        cfg.weights = grid[best];
        const DistanceMatrix dm = combine(normalized, cfg);
        std::vector<std::string> train_labels;
        for (std::size_t item : outer_train[f]) {
            access.note(ids[item], "train", static_cast<int>(f));
            train_labels.push_back(label_by_index[item]);
        }
        const auto predicted = knn_predict(dm.values, outer_train[f], train_labels, outer[f], k);
        int correct = 0;
        std::vector<std::string> fold_ids;
        for (std::size_t i = 0; i < outer[f].size(); ++i) {
            access.note(ids[outer[f][i]], "evaluate", static_cast<int>(f));
            if (predicted[i] == label_by_index[outer[f][i]]) ++correct;
            fold_ids.push_back(ids[outer[f][i]]);
        }
        rep.fold_accuracy.push_back(
            outer[f].empty() ? 0.0 : 100.0 * correct / static_cast<double>(outer[f].size()));
        rep.fold_test_ids.push_back(std::move(fold_ids));
    }

    double sum = 0.0;
    for (double a : rep.fold_accuracy) sum += a;
    rep.mean_accuracy = rep.fold_accuracy.empty() ? 0.0 : sum / rep.fold_accuracy.size();
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

// Dataset-level wrapper: computes the component matrices once, then tunes.
inline EvaluationReport tune_weights(const Dataset& ds, const DissimilarityConfig& base,
                                     const std::vector<WeightVector>& grid, int folds, int k,
                                     std::uint64_t seed, unsigned workers = 0,
                                     const LabelAccess& access = {}) {
    if (ds.labels.empty()) raise(errc::missing_labels, "no labels in the dataset");
    const PairwiseResult pr = pairwise_matrix(ds, base, workers);
    return tune_weights(pr.normalized, ds.labels, grid, folds, k, seed, access, base.depth);
}

} // namespace relsim
