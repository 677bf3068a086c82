#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "splan/decision_tree.hpp"
#include "splan/errors.hpp"
#include "splan/features.hpp"
#include "splan/labels.hpp"
#include "splan/rules.hpp"

namespace splan {

// Tokens like "a-cs", "a-pl-s", "na-df"; comma-separated lists accepted.
inline FeatureSelector parse_feature_selector(const std::string& token) {
    static const std::map<std::string, FeatureSelector> table = {
        {"a-cs", {Family::CourseSemester, Atomicity::Atomic, {}}},
        {"a-co", {Family::CourseOrder, Atomicity::Atomic, {}}},
        {"a-cd", {Family::CourseDistance, Atomicity::Atomic, {}}},
        {"a-pl-s", {Family::PathLength, Atomicity::Atomic, IndexKind::Semester}},
        {"a-pl-o", {Family::PathLength, Atomicity::Atomic, IndexKind::Order}},
        {"a-pl-d", {Family::PathLength, Atomicity::Atomic, IndexKind::Distance}},
        {"a-df-s", {Family::DirectlyFollows, Atomicity::Atomic, IndexKind::Semester}},
        {"a-df-o", {Family::DirectlyFollows, Atomicity::Atomic, IndexKind::Order}},
        {"a-df-d", {Family::DirectlyFollows, Atomicity::Atomic, IndexKind::Distance}},
        {"a-ef-s", {Family::EventuallyFollows, Atomicity::Atomic, IndexKind::Semester}},
        {"a-ef-o", {Family::EventuallyFollows, Atomicity::Atomic, IndexKind::Order}},
        {"a-ef-d", {Family::EventuallyFollows, Atomicity::Atomic, IndexKind::Distance}},
        {"na-cs", {Family::CourseSemester, Atomicity::NonAtomic, {}}},
        {"na-co", {Family::CourseOrder, Atomicity::NonAtomic, {}}},
        {"na-cd", {Family::CourseDistance, Atomicity::NonAtomic, {}}},
        {"na-pl", {Family::PathLength, Atomicity::NonAtomic, {}}},
        {"na-df", {Family::DirectlyFollows, Atomicity::NonAtomic, {}}},
        {"na-ef", {Family::EventuallyFollows, Atomicity::NonAtomic, {}}},
    };
    auto it = table.find(token);
    if (it == table.end()) throw ConfigError("unknown feature selector: '" + token + "'");
    return it->second;
}

inline std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::vector<FeatureSelector> parse_feature_selection(const std::string& list) {
    std::vector<FeatureSelector> out;
    for (const auto& tok : split(list, ','))
        if (!tok.empty()) out.push_back(parse_feature_selector(tok));
    if (out.empty()) throw ConfigError("empty feature selection");
    return out;
}

// "gpa2", "gpa4", or "course:<course-id>:<semester>"
inline LabelSpec parse_label_spec(const std::string& s) {
    LabelSpec spec;
    if (s == "gpa2") {
        spec.kind = LabelSpec::Kind::OverallGPA;
        spec.binning = Binning::TwoLevel;
        return spec;
    }
    if (s == "gpa4") {
        spec.kind = LabelSpec::Kind::OverallGPA;
        spec.binning = Binning::FourLevel;
        return spec;
    }
    auto parts = split(s, ':');
    if (parts.size() == 3 && parts[0] == "course") {
        spec.kind = LabelSpec::Kind::CourseGrade;
        spec.binning = Binning::TwoLevel;
        spec.course_id = parts[1];
        int sem = 0;
        auto [p, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), sem);
        if (ec != std::errc{} || p != parts[2].data() + parts[2].size() || sem < 1)
            throw ConfigError("bad label semester: '" + parts[2] + "'");
        spec.semester = sem;
        return spec;
    }
    throw ConfigError("unknown label spec: '" + s + "' (expected gpa2, gpa4, or course:<id>:<sem>)");
}

struct RunConfig {
    std::string input;
    std::string out = ".";
    std::string features = "a-cs";
    std::string label = "gpa2";
    Hyperparams hp;
    int k = 4;
    unsigned seed = 42;
    bool stratified = true;
    std::string plan;  // optional plan CSV for rule comparison
    char delimiter = ',';
    RelevancyMeasure relevancy_measure = RelevancyMeasure::Product;
    int top = 0;  // 0: all rules

    std::vector<FeatureSelector> selection() const { return parse_feature_selection(features); }
    LabelSpec label_spec() const { return parse_label_spec(label); }
};

// key=value lines; '#' comments; unknown keys rejected.
inline RunConfig parse_run_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    auto to_int = [&](const std::string& v, const char* key) {
        int x = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc{} || p != v.data() + v.size())
            throw ConfigError(std::string("config: bad integer for ") + key + ": '" + v + "'");
        return x;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "input") cfg.input = val;
        else if (key == "out") cfg.out = val;
        else if (key == "features") cfg.features = val;
        else if (key == "label") cfg.label = val;
        else if (key == "max_depth") cfg.hp.max_depth = to_int(val, "max_depth");
        else if (key == "min_samples_leaf") cfg.hp.min_samples_leaf = to_int(val, "min_samples_leaf");
        else if (key == "min_samples_split") cfg.hp.min_samples_split = to_int(val, "min_samples_split");
        else if (key == "k") cfg.k = to_int(val, "k");
        else if (key == "seed") cfg.seed = static_cast<unsigned>(to_int(val, "seed"));
        else if (key == "stratified") cfg.stratified = val == "true" || val == "1";
        else if (key == "plan") cfg.plan = val;
        else if (key == "top") cfg.top = to_int(val, "top");
        else if (key == "delimiter") {
            if (val.size() != 1) throw ConfigError("config: delimiter must be one character");
            cfg.delimiter = val[0];
        } else if (key == "relevancy") {
            if (val == "product") cfg.relevancy_measure = RelevancyMeasure::Product;
            else if (val == "harmonic") cfg.relevancy_measure = RelevancyMeasure::HarmonicMean;
            else throw ConfigError("config: unknown relevancy measure '" + val + "'");
        } else {
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        }
    }
    // validation before any work
    if (cfg.hp.max_depth < 1 || cfg.hp.min_samples_leaf < 1 || cfg.hp.min_samples_split < 1)
        throw ConfigError("config: hyperparameters must be positive");
    if (cfg.k < 2) throw ConfigError("config: k must be >= 2");
    cfg.selection();
    cfg.label_spec();
    return cfg;
}

// Plan CSV: header "course_id,recommended_semester".
inline std::map<std::string, int> parse_plan(std::istream& in) {
    std::map<std::string, int> plan;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto parts = split(line, ',');
        if (parts.size() != 2) throw SchemaError("plan: expected course_id,recommended_semester");
        int sem = 0;
        auto [p, ec] = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), sem);
        if (ec != std::errc{} || p != parts[1].data() + parts[1].size())
            throw SchemaError("plan: bad semester '" + parts[1] + "'");
        plan[parts[0]] = sem;
    }
    return plan;
}

}  // namespace splan
