#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "splan/errors.hpp"

namespace splan {

// Stopping criteria for CART growth. Defaults: depth 5, 1 sample per leaf,
// 2 samples to split. The split criterion is the Gini index.
struct Hyperparams {
    int max_depth = 5;
    int min_samples_leaf = 1;
    int min_samples_split = 2;
};

using ClassCounts = std::map<std::string, int>;

// 1 - sum p_i^2 over class proportions.
inline double gini(const ClassCounts& counts) {
    long long total = 0;
    for (const auto& [c, n] : counts) total += n;
    if (total == 0) throw ComputeError("gini: all-zero class counts");
    double sum_sq = 0;
    for (const auto& [c, n] : counts) {
        double p = static_cast<double>(n) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

// argmax count, ties to the lexicographically smallest class.
inline std::string majority_class(const ClassCounts& counts) {
    std::string best;
    int best_n = -1;
    for (const auto& [c, n] : counts)  // map iterates classes in lex order
        if (n > best_n) {
            best = c;
            best_n = n;
        }
    return best;
}

struct TreeNode {
    // internal-node fields; unused for leaves
    int feature = -1;  // column index into the training column list
    double threshold = 0.0;
    std::unique_ptr<TreeNode> left;   // rows with value <= threshold
    std::unique_ptr<TreeNode> right;  // rows with value > threshold

    ClassCounts class_counts;
    std::string predicted_class;

    bool is_leaf() const { return !left; }
};

struct Split {
    int feature;
    double threshold;
    double weighted_gini;
};

namespace detail {

inline ClassCounts count_classes(const std::vector<int>& rows,
                                 const std::vector<std::string>& labels) {
    ClassCounts counts;
    for (int r : rows) counts[labels[static_cast<std::size_t>(r)]]++;
    return counts;
}

}  // namespace detail

// Exhaustively evaluates midpoint thresholds of every feature and returns
// the split minimizing the weighted child Gini. Deterministic tie-breaks:
// features in the given iteration order (lexicographic when called through
// fit), then the smaller threshold. Returns nullopt when no candidate
// respects min_samples_leaf or none improves on the node's impurity.
inline std::optional<Split> best_split(const std::vector<std::vector<double>>& data,
                                       const std::vector<int>& rows,
                                       const std::vector<std::string>& labels,
                                       const std::vector<int>& feature_order,
                                       const Hyperparams& hp) {
    const auto n = static_cast<double>(rows.size());
    const double parent = gini(detail::count_classes(rows, labels));
    std::optional<Split> best;

    std::vector<std::pair<double, const std::string*>> vals;
    for (int col : feature_order) {
        vals.clear();
        for (int r : rows)
            vals.emplace_back(data[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)],
                              &labels[static_cast<std::size_t>(r)]);
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        ClassCounts left_counts, right_counts;
        for (const auto& [v, lab] : vals) right_counts[*lab]++;

        std::size_t i = 0;
        while (i < vals.size()) {
            // move the block of equal values to the left side
            double v = vals[i].first;
            while (i < vals.size() && vals[i].first == v) {
                left_counts[*vals[i].second]++;
                right_counts[*vals[i].second]--;
                ++i;
            }
            if (i == vals.size()) break;  // no distinct value to the right
            const auto nl = static_cast<long long>(i);
            const auto nr = static_cast<long long>(vals.size() - i);
            if (nl < hp.min_samples_leaf || nr < hp.min_samples_leaf) continue;
            double threshold = (v + vals[i].first) / 2.0;
            double w = (static_cast<double>(nl) * gini(left_counts) +
                        static_cast<double>(nr) * gini(right_counts)) /
                       n;
            if (!best || w < best->weighted_gini - 1e-12)
                best = Split{col, threshold, w};
        }
    }
    if (best && best->weighted_gini >= parent - 1e-12) return std::nullopt;
    return best;
}

class DecisionTree {
  public:
    DecisionTree() = default;

    static DecisionTree fit(const std::vector<std::string>& columns,
                            const std::vector<std::vector<double>>& data,
                            const std::vector<std::string>& labels, const Hyperparams& hp = {}) {
        if (data.size() != labels.size())
            throw ComputeError("fit: rows and labels have different lengths");
        if (data.empty()) throw ComputeError("fit: no training rows");
        for (const auto& row : data)
            if (row.size() != columns.size())
                throw ComputeError("fit: row width does not match column count");

        DecisionTree tree;
        tree.columns_ = columns;
        tree.hp_ = hp;

        // lexicographic feature order for deterministic tie-breaking
        std::vector<int> order(columns.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return columns[static_cast<std::size_t>(a)] <
                                             columns[static_cast<std::size_t>(b)]; });

        std::vector<int> rows(data.size());
        std::iota(rows.begin(), rows.end(), 0);
        tree.root_ = grow(data, rows, labels, order, hp, 0);
        return tree;
    }

    const TreeNode& root() const { return *root_; }
    const std::vector<std::string>& columns() const { return columns_; }
    const Hyperparams& hyperparams() const { return hp_; }

    std::size_t leaf_count() const { return leaf_count(*root_); }

    // row aligned with the training columns
    const std::string& predict(const std::vector<double>& row) const {
        if (row.size() != columns_.size())
            throw ComputeError("predict: row width does not match tree columns");
        const TreeNode* node = root_.get();
        while (!node->is_leaf())
            node = row[static_cast<std::size_t>(node->feature)] <= node->threshold
                       ? node->left.get()
                       : node->right.get();
        return node->predicted_class;
    }

    const std::string& predict(const std::map<std::string, double>& row) const {
        const TreeNode* node = root_.get();
        while (!node->is_leaf()) {
            auto it = row.find(columns_[static_cast<std::size_t>(node->feature)]);
            if (it == row.end())
                throw LookupError("predict: missing feature " +
                                  columns_[static_cast<std::size_t>(node->feature)]);
            node = it->second <= node->threshold ? node->left.get() : node->right.get();
        }
        return node->predicted_class;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["columns"] = columns_;
        j["max_depth"] = hp_.max_depth;
        j["min_samples_leaf"] = hp_.min_samples_leaf;
        j["min_samples_split"] = hp_.min_samples_split;
        j["root"] = node_json(*root_);
        return j;
    }

    static DecisionTree from_json(const nlohmann::json& j) {
        DecisionTree tree;
        tree.columns_ = j.at("columns").get<std::vector<std::string>>();
        tree.hp_.max_depth = j.at("max_depth").get<int>();
        tree.hp_.min_samples_leaf = j.at("min_samples_leaf").get<int>();
        tree.hp_.min_samples_split = j.at("min_samples_split").get<int>();
        tree.root_ = tree.node_from_json(j.at("root"));
        return tree;
    }

    // Internal nodes labeled "<feature> <= <threshold>", leaves with the
    // predicted class and class counts.
    void to_dot(std::ostream& out) const {
        out << "digraph tree {\n  node [shape=box];\n";
        int id = 0;
        dot_node(*root_, out, id);
        out << "}\n";
    }

  private:
    std::unique_ptr<TreeNode> root_;
    std::vector<std::string> columns_;
    Hyperparams hp_;

    static std::unique_ptr<TreeNode> grow(const std::vector<std::vector<double>>& data,
                                          const std::vector<int>& rows,
                                          const std::vector<std::string>& labels,
                                          const std::vector<int>& feature_order,
                                          const Hyperparams& hp, int depth) {
        auto node = std::make_unique<TreeNode>();
        node->class_counts = detail::count_classes(rows, labels);
        node->predicted_class = majority_class(node->class_counts);

        bool pure = node->class_counts.size() == 1;
        if (pure || depth >= hp.max_depth ||
            static_cast<long long>(rows.size()) < hp.min_samples_split)
            return node;

        auto split = best_split(data, rows, labels, feature_order, hp);
        if (!split) return node;

        std::vector<int> left_rows, right_rows;
        for (int r : rows) {
            if (data[static_cast<std::size_t>(r)][static_cast<std::size_t>(split->feature)] <=
                split->threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        node->feature = split->feature;
        node->threshold = split->threshold;
        node->left = grow(data, left_rows, labels, feature_order, hp, depth + 1);
        node->right = grow(data, right_rows, labels, feature_order, hp, depth + 1);
        return node;
    }

    static std::size_t leaf_count(const TreeNode& n) {
        if (n.is_leaf()) return 1;
        return leaf_count(*n.left) + leaf_count(*n.right);
    }

    nlohmann::ordered_json node_json(const TreeNode& n) const {
        nlohmann::ordered_json j;
        j["counts"] = n.class_counts;
        j["predicted"] = n.predicted_class;
        if (!n.is_leaf()) {
            j["feature"] = columns_[static_cast<std::size_t>(n.feature)];
            j["threshold"] = n.threshold;
            j["left"] = node_json(*n.left);
            j["right"] = node_json(*n.right);
        }
        return j;
    }

    std::unique_ptr<TreeNode> node_from_json(const nlohmann::json& j) const {
        auto node = std::make_unique<TreeNode>();
        node->class_counts = j.at("counts").get<ClassCounts>();
        node->predicted_class = j.at("predicted").get<std::string>();
        if (j.contains("feature")) {
            const auto name = j.at("feature").get<std::string>();
            auto it = std::find(columns_.begin(), columns_.end(), name);
            if (it == columns_.end()) throw LookupError("tree references unknown column: " + name);
            node->feature = static_cast<int>(it - columns_.begin());
            node->threshold = j.at("threshold").get<double>();
            node->left = node_from_json(j.at("left"));
            node->right = node_from_json(j.at("right"));
        }
        return node;
    }

    int dot_node(const TreeNode& n, std::ostream& out, int& id) const {
        int me = id++;
        if (n.is_leaf()) {
            out << "  n" << me << " [label=\"" << n.predicted_class << "\\n";
            bool first = true;
            for (const auto& [c, cnt] : n.class_counts) {
                if (!first) out << ", ";
                out << c << ": " << cnt;
                first = false;
            }
            out << "\"];\n";
        } else {
            out << "  n" << me << " [label=\""
                << columns_[static_cast<std::size_t>(n.feature)] << " <= " << n.threshold
                << "\"];\n";
            int l = dot_node(*n.left, out, id);
            int r = dot_node(*n.right, out, id);
            out << "  n" << me << " -> n" << l << " [label=\"True\"];\n";
            out << "  n" << me << " -> n" << r << " [label=\"False\"];\n";
        }
        return me;
    }
};

}  // namespace splan
