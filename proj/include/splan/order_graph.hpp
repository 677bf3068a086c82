#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "splan/errors.hpp"
#include "splan/event_log.hpp"

namespace splan {

// Index annotated onto course attempts to keep partial orders loop-free.
enum class IndexKind { Semester, Order, Distance };

inline char index_letter(IndexKind k) {
    switch (k) {
        case IndexKind::Semester: return 's';
        case IndexKind::Order: return 'o';
        case IndexKind::Distance: return 'd';
    }
    return '?';
}

enum class Lifecycle { Atomic, Start, End };

struct PONode {
    std::string course_id;
    int index = 0;  // meaningless (0) for Start/End nodes
    Lifecycle lifecycle = Lifecycle::Atomic;

    auto operator<=>(const PONode&) const = default;

    std::string label() const {
        switch (lifecycle) {
            case Lifecycle::Start: return course_id + "-start";
            case Lifecycle::End: return course_id + "-end";
            default: return course_id + "-" + std::to_string(index);
        }
    }
};

// Nodes arranged in ordered levels; same-level nodes are concurrent.
// Edges run only between consecutive occupied levels, so the graph is
// acyclic and level rank is a topological order.
struct LevelledPartialOrder {
    std::vector<std::vector<PONode>> levels;         // each sorted, non-empty
    std::vector<std::pair<PONode, PONode>> edges;

    std::optional<std::size_t> level_of(const PONode& n) const {
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (std::binary_search(levels[i].begin(), levels[i].end(), n)) return i;
        return std::nullopt;
    }

    std::vector<PONode> nodes() const {
        std::vector<PONode> out;
        for (const auto& lvl : levels) out.insert(out.end(), lvl.begin(), lvl.end());
        return out;
    }
};

// Directly-follows graph with artificial start/end activities.
struct DFG {
    static constexpr const char* kStart = "__start__";
    static constexpr const char* kEnd = "__end__";

    std::set<std::string> activities;                       // without start/end
    std::map<std::pair<std::string, std::string>, int> edges;

    int count(const std::string& from, const std::string& to) const {
        auto it = edges.find({from, to});
        return it == edges.end() ? 0 : it->second;
    }
};

inline DFG discover_dfg(const EventLog& log) {
    if (log.events.empty()) throw ComputeError("discover_dfg: empty log");
    DFG dfg;
    for (const auto& trace : build_traces(log)) {
        const auto& ev = trace.events;
        dfg.edges[{DFG::kStart, ev.front().course_id}]++;
        for (std::size_t i = 0; i + 1 < ev.size(); ++i)
            dfg.edges[{ev[i].course_id, ev[i + 1].course_id}]++;
        dfg.edges[{ev.back().course_id, DFG::kEnd}]++;
        for (const auto& e : ev) dfg.activities.insert(e.course_id);
    }
    return dfg;
}

namespace detail {

inline std::vector<int> occupied_semesters(const StudyPath& path) {
    std::vector<int> sems;
    for (const auto& [sem, _] : path.semesters) sems.push_back(sem);
    return sems;  // std::map keys are already ascending
}

}  // namespace detail

// Index of a semester under the given kind: the semester value itself, its
// 1-based rank among occupied semesters, or its distance to the first one.
inline std::map<int, int> semester_index(const StudyPath& path, IndexKind kind) {
    if (path.semesters.empty()) throw ComputeError("semester_index: empty study path");
    auto sems = detail::occupied_semesters(path);
    std::map<int, int> idx;
    for (std::size_t i = 0; i < sems.size(); ++i) {
        switch (kind) {
            case IndexKind::Semester: idx[sems[i]] = sems[i]; break;
            case IndexKind::Order: idx[sems[i]] = static_cast<int>(i) + 1; break;
            case IndexKind::Distance: idx[sems[i]] = sems[i] - sems.front(); break;
        }
    }
    return idx;
}

// Per-attempt index values, keyed by (course, semester).
inline std::map<std::pair<std::string, int>, int> annotate_index(const StudyPath& path,
                                                                 IndexKind kind) {
    auto idx = semester_index(path, kind);
    std::map<std::pair<std::string, int>, int> out;
    for (const auto& [sem, attempts] : path.semesters)
        for (const auto& a : attempts) out[{a.course_id, sem}] = idx.at(sem);
    return out;
}

namespace detail {

// Complete bipartite edges between consecutive levels: parallel nodes share
// the same predecessor and successor sets.
inline void connect_levels(LevelledPartialOrder& po) {
    for (std::size_t i = 0; i + 1 < po.levels.size(); ++i)
        for (const auto& u : po.levels[i])
            for (const auto& v : po.levels[i + 1]) po.edges.emplace_back(u, v);
}

}  // namespace detail

// One level per occupied semester; node identity is (course, index), so a
// retake in the same semester adds no node while a retake in a later
// semester appears again with a fresh index.
inline LevelledPartialOrder build_partial_order(const StudyPath& path, IndexKind kind) {
    if (path.semesters.empty()) throw ComputeError("build_partial_order: empty study path");
    auto idx = semester_index(path, kind);
    LevelledPartialOrder po;
    for (const auto& [sem, attempts] : path.semesters) {
        std::set<PONode> nodes;
        for (const auto& a : attempts) nodes.insert({a.course_id, idx.at(sem), Lifecycle::Atomic});
        po.levels.emplace_back(nodes.begin(), nodes.end());
    }
    detail::connect_levels(po);
    return po;
}

// Lifecycle-extended partial order: per course one start node at the level
// of its first attempt and one end node at its last attempt. Levels are
// keyed by semester value; no course indices are needed.
inline LevelledPartialOrder build_lifecycle_partial_order(const StudyPath& path) {
    if (path.semesters.empty())
        throw ComputeError("build_lifecycle_partial_order: empty study path");
    auto sems = detail::occupied_semesters(path);
    std::map<int, std::size_t> level_rank;
    for (std::size_t i = 0; i < sems.size(); ++i) level_rank[sems[i]] = i;

    std::map<std::string, std::pair<int, int>> span;  // course -> (first, last) semester
    for (const auto& [sem, attempts] : path.semesters)
        for (const auto& a : attempts) {
            auto it = span.find(a.course_id);
            if (it == span.end())
                span[a.course_id] = {sem, sem};
            else
                it->second.second = std::max(it->second.second, sem);
        }

    std::vector<std::set<PONode>> levels(sems.size());
    for (const auto& [course, fl] : span) {
        levels[level_rank.at(fl.first)].insert({course, 0, Lifecycle::Start});
        levels[level_rank.at(fl.second)].insert({course, 0, Lifecycle::End});
    }

    LevelledPartialOrder po;
    for (auto& lvl : levels) po.levels.emplace_back(lvl.begin(), lvl.end());
    detail::connect_levels(po);
    return po;
}

// 0 for parallel (same-level) nodes; the number of traversed edges for a
// forward path; -1 when no path exists (including the reverse direction).
inline int path_length(const LevelledPartialOrder& po, const PONode& from, const PONode& to) {
    auto lf = po.level_of(from);
    auto lt = po.level_of(to);
    if (!lf) throw LookupError("path_length: unknown node " + from.label());
    if (!lt) throw LookupError("path_length: unknown node " + to.label());
    if (*lf == *lt) return 0;
    if (*lf < *lt) return static_cast<int>(*lt - *lf);
    return -1;
}

namespace detail {

inline std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace detail

inline void to_dot(const LevelledPartialOrder& po, std::ostream& out,
                   const std::string& name = "po") {
    out << "digraph " << name << " {\n  rankdir=TB;\n  node [shape=box];\n";
    for (const auto& lvl : po.levels) {
        out << "  { rank=same;";
        for (const auto& n : lvl) out << ' ' << detail::dot_quote(n.label()) << ';';
        out << " }\n";
    }
    for (const auto& [u, v] : po.edges)
        out << "  " << detail::dot_quote(u.label()) << " -> " << detail::dot_quote(v.label())
            << ";\n";
    out << "}\n";
}

inline void to_dot(const DFG& dfg, std::ostream& out, const std::string& name = "dfg") {
    out << "digraph " << name << " {\n  rankdir=LR;\n";
    out << "  " << detail::dot_quote(DFG::kStart) << " [label=\"start\", shape=circle];\n";
    out << "  " << detail::dot_quote(DFG::kEnd) << " [label=\"end\", shape=doublecircle];\n";
    for (const auto& a : dfg.activities)
        out << "  " << detail::dot_quote(a) << " [shape=box];\n";
    for (const auto& [edge, n] : dfg.edges)
        out << "  " << detail::dot_quote(edge.first) << " -> " << detail::dot_quote(edge.second)
            << " [label=\"" << n << "\"];\n";
    out << "}\n";
}

}  // namespace splan
