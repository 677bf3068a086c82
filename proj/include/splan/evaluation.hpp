#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "splan/decision_tree.hpp"
#include "splan/errors.hpp"

namespace splan {

struct FoldPlan {
    int k = 4;
    unsigned seed = 0;
    std::vector<std::vector<int>> folds;  // row indices, partitioning 0..n-1
};

// Seeded shuffle within each class, then round-robin assignment with a
// cursor carried across classes so fold sizes stay balanced.
inline FoldPlan stratified_kfold(const std::vector<std::string>& labels, int k, unsigned seed) {
    if (k < 2) throw ConfigError("stratified_kfold: k must be >= 2");
    std::map<std::string, std::vector<int>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_class[labels[i]].push_back(static_cast<int>(i));
    for (const auto& [cls, idx] : by_class)
        if (static_cast<int>(idx.size()) < k)
            throw ComputeError("stratified_kfold: class '" + cls + "' has fewer than k members");

    FoldPlan plan{k, seed, std::vector<std::vector<int>>(static_cast<std::size_t>(k))};
    std::mt19937 rng(seed);
    int cursor = 0;
    for (auto& [cls, idx] : by_class) {
        std::shuffle(idx.begin(), idx.end(), rng);
        for (int i : idx) {
            plan.folds[static_cast<std::size_t>(cursor)].push_back(i);
            cursor = (cursor + 1) % k;
        }
    }
    return plan;
}

// Unstratified variant: one global shuffle, round-robin.
inline FoldPlan plain_kfold(std::size_t n, int k, unsigned seed) {
    if (k < 2) throw ConfigError("plain_kfold: k must be >= 2");
    if (static_cast<int>(n) < k) throw ComputeError("plain_kfold: fewer rows than folds");
    std::vector<int> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
    std::mt19937 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    FoldPlan plan{k, seed, std::vector<std::vector<int>>(static_cast<std::size_t>(k))};
    for (std::size_t i = 0; i < idx.size(); ++i)
        plan.folds[i % static_cast<std::size_t>(k)].push_back(idx[i]);
    return plan;
}

// Confusion counts over a fixed, sorted class universe.
struct Confusion {
    std::vector<std::string> classes;
    std::vector<std::vector<long long>> counts;  // counts[truth][prediction]

    long long total() const {
        long long t = 0;
        for (const auto& row : counts)
            for (long long c : row) t += c;
        return t;
    }
};

inline Confusion confusion(const std::vector<std::string>& predictions,
                           const std::vector<std::string>& truth) {
    if (predictions.size() != truth.size())
        throw ComputeError("confusion: prediction/truth length mismatch");
    std::set<std::string> cls(truth.begin(), truth.end());
    cls.insert(predictions.begin(), predictions.end());
    Confusion cm;
    cm.classes.assign(cls.begin(), cls.end());
    cm.counts.assign(cm.classes.size(), std::vector<long long>(cm.classes.size(), 0));
    auto index = [&](const std::string& c) {
        return static_cast<std::size_t>(
            std::lower_bound(cm.classes.begin(), cm.classes.end(), c) - cm.classes.begin());
    };
    for (std::size_t i = 0; i < truth.size(); ++i)
        cm.counts[index(truth[i])][index(predictions[i])]++;
    return cm;
}

// Ratios with a zero denominator are reported as absent and skipped when
// averaging across folds.
struct Metrics {
    double accuracy = 0.0;
    std::map<std::string, std::optional<double>> precision;
    std::map<std::string, std::optional<double>> recall;
};

inline Metrics metrics(const Confusion& cm) {
    Metrics m;
    long long n = cm.total();
    if (n == 0) throw ComputeError("metrics: empty confusion matrix");
    long long diag = 0;
    for (std::size_t i = 0; i < cm.classes.size(); ++i) diag += cm.counts[i][i];
    m.accuracy = static_cast<double>(diag) / static_cast<double>(n);
    for (std::size_t c = 0; c < cm.classes.size(); ++c) {
        long long tp = cm.counts[c][c];
        long long predicted = 0, actual = 0;
        for (std::size_t i = 0; i < cm.classes.size(); ++i) {
            predicted += cm.counts[i][c];
            actual += cm.counts[c][i];
        }
        m.precision[cm.classes[c]] =
            predicted ? std::optional<double>(static_cast<double>(tp) / predicted) : std::nullopt;
        m.recall[cm.classes[c]] =
            actual ? std::optional<double>(static_cast<double>(tp) / actual) : std::nullopt;
    }
    return m;
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // population standard deviation over folds

    // "68 ± 1" style: percentages rounded to integers
    std::string percent() const {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f ± %.0f", mean * 100.0, sd * 100.0);
        return buf;
    }
};

inline MeanSd mean_sd(const std::vector<double>& xs) {
    if (xs.empty()) throw ComputeError("mean_sd: no values");
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    return {mean, std::sqrt(var)};
}

struct MetricsReport {
    std::vector<Metrics> per_fold;
    MeanSd accuracy;
    std::map<std::string, MeanSd> precision;  // per class
    std::map<std::string, MeanSd> recall;

    void render_table(std::ostream& out) const {
        out << "Accuracy: " << accuracy.percent() << '\n';
        for (const auto& [cls, ms] : precision)
            out << "Precision (" << cls << "): " << ms.percent() << '\n';
        for (const auto& [cls, ms] : recall)
            out << "Recall (" << cls << "): " << ms.percent() << '\n';
    }

    void to_csv(std::ostream& out) const {
        out << "metric,class,mean,sd\n";
        out << "accuracy,," << accuracy.mean << ',' << accuracy.sd << '\n';
        for (const auto& [cls, ms] : precision)
            out << "precision," << cls << ',' << ms.mean << ',' << ms.sd << '\n';
        for (const auto& [cls, ms] : recall)
            out << "recall," << cls << ',' << ms.mean << ',' << ms.sd << '\n';
    }
};

inline MetricsReport cross_validate(const std::vector<std::string>& columns,
                                    const std::vector<std::vector<double>>& data,
                                    const std::vector<std::string>& labels,
                                    const Hyperparams& hp, int k, unsigned seed,
                                    bool stratified = true) {
    FoldPlan plan =
        stratified ? stratified_kfold(labels, k, seed) : plain_kfold(labels.size(), k, seed);

    MetricsReport report;
    for (int fold = 0; fold < k; ++fold) {
        std::vector<std::vector<double>> train_rows, test_rows;
        std::vector<std::string> train_labels, test_labels;
        for (int f = 0; f < k; ++f)
            for (int r : plan.folds[static_cast<std::size_t>(f)]) {
                if (f == fold) {
                    test_rows.push_back(data[static_cast<std::size_t>(r)]);
                    test_labels.push_back(labels[static_cast<std::size_t>(r)]);
                } else {
                    train_rows.push_back(data[static_cast<std::size_t>(r)]);
                    train_labels.push_back(labels[static_cast<std::size_t>(r)]);
                }
            }
        auto tree = DecisionTree::fit(columns, train_rows, train_labels, hp);
        std::vector<std::string> predictions;
        predictions.reserve(test_rows.size());
        for (const auto& row : test_rows) predictions.push_back(tree.predict(row));
        report.per_fold.push_back(metrics(confusion(predictions, test_labels)));
    }

    std::vector<double> acc;
    std::set<std::string> all_classes;
    for (const auto& m : report.per_fold) {
        acc.push_back(m.accuracy);
        for (const auto& [c, _] : m.precision) all_classes.insert(c);
    }
    report.accuracy = mean_sd(acc);
    for (const auto& cls : all_classes) {
        std::vector<double> prec, rec;
        for (const auto& m : report.per_fold) {
            if (auto it = m.precision.find(cls); it != m.precision.end() && it->second)
                prec.push_back(*it->second);
            if (auto it = m.recall.find(cls); it != m.recall.end() && it->second)
                rec.push_back(*it->second);
        }
        if (!prec.empty()) report.precision[cls] = mean_sd(prec);
        if (!rec.empty()) report.recall[cls] = mean_sd(rec);
    }
    return report;
}

}  // namespace splan
