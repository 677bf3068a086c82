#pragma once

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "splan/decision_tree.hpp"
#include "splan/errors.hpp"
#include "splan/features.hpp"

namespace splan {

struct Condition {
    std::string feature;
    bool less_equal = true;  // false: strictly greater
    double threshold = 0.0;

    bool operator==(const Condition&) const = default;

    bool satisfied(double value) const { return less_equal ? value <= threshold : value > threshold; }
};

// A root-to-leaf path of the tree, as an IF/THEN rule over its comparisons.
struct Rule {
    std::vector<Condition> conditions;  // in path order
    std::string predicted_class;
    long long support = 0;  // training rows reaching the leaf
    long long correct = 0;  // of those, rows whose label matches
    double relevancy = 0.0;

    double confidence() const { return support ? static_cast<double>(correct) / support : 0.0; }
};

struct RuleSet {
    std::vector<Rule> rules;  // sorted by relevancy desc after rank()
    long long total_rows = 0;
};

// The paper's combined score is unspecified; the product of confidence and
// relative coverage is the default, with a harmonic-mean alternative.
enum class RelevancyMeasure { Product, HarmonicMean };

inline double relevancy(double confidence, long long support, long long n,
                        RelevancyMeasure measure = RelevancyMeasure::Product) {
    if (support < 1) throw ComputeError("relevancy: support must be >= 1");
    double coverage = static_cast<double>(support) / static_cast<double>(n);
    if (measure == RelevancyMeasure::Product) return confidence * coverage;
    if (confidence + coverage == 0) return 0.0;
    return 2.0 * confidence * coverage / (confidence + coverage);
}

inline double relevancy(const Rule& r, long long n,
                        RelevancyMeasure measure = RelevancyMeasure::Product) {
    return relevancy(r.confidence(), r.support, n, measure);
}

namespace detail {

inline std::string format_number(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

inline void collect_rules(const TreeNode& node, const std::vector<std::string>& columns,
                          std::vector<Condition>& path, std::vector<Rule>& out) {
    if (node.is_leaf()) {
        Rule r;
        r.conditions = path;
        r.predicted_class = node.predicted_class;
        out.push_back(std::move(r));
        return;
    }
    const std::string& feat = columns[static_cast<std::size_t>(node.feature)];
    path.push_back({feat, true, node.threshold});
    collect_rules(*node.left, columns, path, out);
    path.back().less_equal = false;
    collect_rules(*node.right, columns, path, out);
    path.pop_back();
}

}  // namespace detail

// One rule per leaf; support and correctness recomputed by routing the
// training rows down the conditions.
inline RuleSet extract_rules(const DecisionTree& tree,
                             const std::vector<std::vector<double>>& data,
                             const std::vector<std::string>& labels,
                             RelevancyMeasure measure = RelevancyMeasure::Product) {
    if (data.size() != labels.size())
        throw ComputeError("extract_rules: rows and labels have different lengths");
    for (const auto& row : data)
        if (row.size() != tree.columns().size())
            throw ComputeError("extract_rules: row width does not match tree columns");

    RuleSet rs;
    rs.total_rows = static_cast<long long>(data.size());
    std::vector<Condition> path;
    detail::collect_rules(tree.root(), tree.columns(), path, rs.rules);

    std::map<std::string, std::size_t> col_index;
    for (std::size_t i = 0; i < tree.columns().size(); ++i) col_index[tree.columns()[i]] = i;

    for (auto& rule : rs.rules) {
        for (std::size_t r = 0; r < data.size(); ++r) {
            bool match = true;
            for (const auto& c : rule.conditions)
                if (!c.satisfied(data[r][col_index.at(c.feature)])) {
                    match = false;
                    break;
                }
            if (match) {
                rule.support++;
                if (labels[r] == rule.predicted_class) rule.correct++;
            }
        }
        rule.relevancy = rule.support ? relevancy(rule, rs.total_rows, measure) : 0.0;
    }
    return rs;
}

inline std::string render_rule(const Rule& rule) {
    std::string s = "IF ";
    if (rule.conditions.empty()) {
        s += "TRUE";
    } else {
        for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
            const auto& c = rule.conditions[i];
            if (i) s += " AND ";
            s += c.feature;
            s += c.less_equal ? " <= " : " > ";
            s += detail::format_number(c.threshold);
        }
    }
    s += " THEN ";
    s += rule.predicted_class;
    return s;
}

// Inverse of render_rule on the grammar
//   IF <feat> <cmp> <thr> [AND <feat> <cmp> <thr>]* THEN <label-expr>
// Only conditions and class are recoverable from text.
inline Rule parse_rule(std::string_view s) {
    auto expect = [&](std::string_view tok) {
        if (s.substr(0, tok.size()) != tok)
            throw LookupError("parse_rule: expected '" + std::string(tok) + "' at '" +
                              std::string(s.substr(0, 20)) + "'");
        s.remove_prefix(tok.size());
    };
    Rule r;
    expect("IF ");
    auto then_pos = s.rfind(" THEN ");
    if (then_pos == std::string_view::npos) throw LookupError("parse_rule: missing THEN");
    std::string_view body = s.substr(0, then_pos);
    r.predicted_class = std::string(s.substr(then_pos + 6));
    if (body == "TRUE") return r;
    while (!body.empty()) {
        Condition c;
        std::size_t cmp = body.find(" <= ");
        std::size_t cmp_gt = body.find(" > ");
        if (cmp != std::string_view::npos && (cmp_gt == std::string_view::npos || cmp < cmp_gt)) {
            c.feature = std::string(body.substr(0, cmp));
            c.less_equal = true;
            body.remove_prefix(cmp + 4);
        } else if (cmp_gt != std::string_view::npos) {
            c.feature = std::string(body.substr(0, cmp_gt));
            c.less_equal = false;
            body.remove_prefix(cmp_gt + 3);
        } else {
            throw LookupError("parse_rule: missing comparator in '" + std::string(body) + "'");
        }
        std::size_t end = body.find(" AND ");
        std::string_view num = end == std::string_view::npos ? body : body.substr(0, end);
        auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), c.threshold);
        if (ec != std::errc{} || p != num.data() + num.size())
            throw LookupError("parse_rule: bad threshold '" + std::string(num) + "'");
        r.conditions.push_back(std::move(c));
        if (end == std::string_view::npos) break;
        body.remove_prefix(end + 5);
    }
    return r;
}

// Relevancy descending; ties by higher support, then lexicographic rendering.
inline RuleSet rank(RuleSet rs) {
    std::stable_sort(rs.rules.begin(), rs.rules.end(), [](const Rule& a, const Rule& b) {
        if (a.relevancy != b.relevancy) return a.relevancy > b.relevancy;
        if (a.support != b.support) return a.support > b.support;
        return render_rule(a) < render_rule(b);
    });
    return rs;
}

inline std::vector<Rule> top_k(const RuleSet& rs, std::size_t k) {
    if (k == 0) throw ConfigError("top_k: k must be positive");
    std::vector<Rule> out(rs.rules.begin(),
                          rs.rules.begin() + std::min(k, rs.rules.size()));
    return out;
}

// Routes a feature vector through the rule set. Mutual exclusivity and
// exhaustiveness of tree paths guarantee exactly one match.
inline const Rule& match_rules(const RuleSet& rs, const std::map<std::string, double>& vec) {
    const Rule* found = nullptr;
    for (const auto& rule : rs.rules) {
        bool match = true;
        for (const auto& c : rule.conditions) {
            auto it = vec.find(c.feature);
            if (it == vec.end()) throw LookupError("match_rules: undefined feature " + c.feature);
            if (!c.satisfied(it->second)) {
                match = false;
                break;
            }
        }
        if (match) {
            if (found) throw ComputeError("match_rules: multiple rules match");
            found = &rule;
        }
    }
    if (!found) throw ComputeError("match_rules: no rule matches");
    return *found;
}

enum class PlanAlignment { Aligned, Deviating, Unconstrained };

inline const char* to_string(PlanAlignment a) {
    switch (a) {
        case PlanAlignment::Aligned: return "aligned";
        case PlanAlignment::Deviating: return "deviating";
        default: return "unconstrained";
    }
}

// Compares a course-semester rule against a recommended plan
// (course -> suggested semester). A "> 0.5" condition demands the placement,
// a "<= 0.5" condition forbids it.
inline std::vector<std::pair<Condition, PlanAlignment>> compare_to_plan(
    const Rule& rule, const std::map<std::string, int>& plan) {
    std::vector<std::pair<Condition, PlanAlignment>> out;
    for (const auto& c : rule.conditions) {
        FeatureName f = FeatureName::parse(c.feature);
        if (f.family != Family::CourseSemester || f.atomicity != Atomicity::Atomic)
            throw ComputeError("compare_to_plan: unsupported comparison on feature " + c.feature);
        auto it = plan.find(f.from.course_id);
        if (it == plan.end()) {
            out.emplace_back(c, PlanAlignment::Unconstrained);
            continue;
        }
        bool planned_here = it->second == f.from.index;
        bool aligned = c.less_equal ? !planned_here  // rule forbids this placement
                                    : planned_here;  // rule demands this placement
        out.emplace_back(c, aligned ? PlanAlignment::Aligned : PlanAlignment::Deviating);
    }
    return out;
}

inline nlohmann::ordered_json rule_to_json(const Rule& r) {
    nlohmann::ordered_json j;
    j["rule"] = render_rule(r);
    nlohmann::ordered_json conds = nlohmann::ordered_json::array();
    for (const auto& c : r.conditions)
        conds.push_back({{"feature", c.feature},
                         {"comparator", c.less_equal ? "<=" : ">"},
                         {"threshold", c.threshold}});
    j["conditions"] = std::move(conds);
    j["class"] = r.predicted_class;
    j["support"] = r.support;
    j["correct"] = r.correct;
    j["confidence"] = r.confidence();
    j["relevancy"] = r.relevancy;
    return j;
}

}  // namespace splan
