#pragma once

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "splan/errors.hpp"
#include "splan/event_log.hpp"
#include "splan/order_graph.hpp"

namespace splan {

enum class Family {
    CourseSemester,
    CourseOrder,
    CourseDistance,
    PathLength,
    DirectlyFollows,
    EventuallyFollows
};

enum class Atomicity { Atomic, NonAtomic };
enum class Endpoint { Start, End };

inline const char* family_code(Family f) {
    switch (f) {
        case Family::CourseSemester: return "cs";
        case Family::CourseOrder: return "co";
        case Family::CourseDistance: return "cd";
        case Family::PathLength: return "pl";
        case Family::DirectlyFollows: return "df";
        case Family::EventuallyFollows: return "ef";
    }
    return "??";
}

inline bool pairwise_family(Family f) {
    return f == Family::PathLength || f == Family::DirectlyFollows ||
           f == Family::EventuallyFollows;
}

// Structured feature identity with an injective canonical rendering:
//   a-cs-course-1-1            (atomic unary; also co, cd)
//   na-cs-s-course-1-1         (non-atomic unary, start/end letter)
//   a-pl-s-course-1-1->course-3-2      (atomic pairwise, index-kind letter)
//   na-df-course-1-start->course-3-end (non-atomic pairwise, no index kind)
struct FeatureName {
    Family family = Family::CourseSemester;
    Atomicity atomicity = Atomicity::Atomic;
    std::optional<IndexKind> index_kind;  // atomic pairwise only
    std::optional<Endpoint> endpoint;     // non-atomic unary only
    PONode from;
    std::optional<PONode> to;  // pairwise only

    bool is_binary() const { return family != Family::PathLength; }

    std::string render() const {
        std::string s = atomicity == Atomicity::Atomic ? "a-" : "na-";
        s += family_code(family);
        s += '-';
        if (endpoint) s += *endpoint == Endpoint::Start ? "s-" : "e-";
        if (index_kind) {
            s += index_letter(*index_kind);
            s += '-';
        }
        s += from.label();
        if (to) {
            s += "->";
            s += to->label();
        }
        return s;
    }

    auto operator<=>(const FeatureName& o) const { return render() <=> o.render(); }
    bool operator==(const FeatureName& o) const {
        return family == o.family && atomicity == o.atomicity && index_kind == o.index_kind &&
               endpoint == o.endpoint && from == o.from && to == o.to;
    }

    static FeatureName parse(std::string_view s);
};

namespace detail {

inline bool consume(std::string_view& s, std::string_view prefix) {
    if (s.substr(0, prefix.size()) != prefix) return false;
    s.remove_prefix(prefix.size());
    return true;
}

// Subject of a feature: "course-1-1" (atomic, trailing integer index) or
// "course-1-start"/"course-1-end" (lifecycle node).
inline PONode parse_subject(std::string_view s) {
    PONode n;
    if (s.ends_with("-start")) {
        n.course_id = std::string(s.substr(0, s.size() - 6));
        n.lifecycle = Lifecycle::Start;
        if (n.course_id.empty()) throw LookupError("feature subject without course id");
        return n;
    }
    if (s.ends_with("-end")) {
        n.course_id = std::string(s.substr(0, s.size() - 4));
        n.lifecycle = Lifecycle::End;
        if (n.course_id.empty()) throw LookupError("feature subject without course id");
        return n;
    }
    auto dash = s.rfind('-');
    if (dash == std::string_view::npos || dash == 0 || dash + 1 == s.size())
        throw LookupError("feature subject without index: '" + std::string(s) + "'");
    auto idx = s.substr(dash + 1);
    int v = 0;
    auto [p, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), v);
    if (ec != std::errc{} || p != idx.data() + idx.size())
        throw LookupError("non-numeric feature index: '" + std::string(s) + "'");
    n.course_id = std::string(s.substr(0, dash));
    n.index = v;
    return n;
}

}  // namespace detail

inline FeatureName FeatureName::parse(std::string_view s) {
    const std::string_view orig = s;
    FeatureName f;
    if (detail::consume(s, "a-"))
        f.atomicity = Atomicity::Atomic;
    else if (detail::consume(s, "na-"))
        f.atomicity = Atomicity::NonAtomic;
    else
        throw LookupError("bad feature name: '" + std::string(orig) + "'");

    if (detail::consume(s, "cs-"))
        f.family = Family::CourseSemester;
    else if (detail::consume(s, "co-"))
        f.family = Family::CourseOrder;
    else if (detail::consume(s, "cd-"))
        f.family = Family::CourseDistance;
    else if (detail::consume(s, "pl-"))
        f.family = Family::PathLength;
    else if (detail::consume(s, "df-"))
        f.family = Family::DirectlyFollows;
    else if (detail::consume(s, "ef-"))
        f.family = Family::EventuallyFollows;
    else
        throw LookupError("bad feature family: '" + std::string(orig) + "'");

    if (!pairwise_family(f.family) && f.atomicity == Atomicity::NonAtomic) {
        if (detail::consume(s, "s-"))
            f.endpoint = Endpoint::Start;
        else if (detail::consume(s, "e-"))
            f.endpoint = Endpoint::End;
        else
            throw LookupError("non-atomic feature without endpoint: '" + std::string(orig) + "'");
    }
    if (pairwise_family(f.family) && f.atomicity == Atomicity::Atomic) {
        if (detail::consume(s, "s-"))
            f.index_kind = IndexKind::Semester;
        else if (detail::consume(s, "o-"))
            f.index_kind = IndexKind::Order;
        else if (detail::consume(s, "d-"))
            f.index_kind = IndexKind::Distance;
        else
            throw LookupError("pairwise feature without index kind: '" + std::string(orig) + "'");
    }

    if (pairwise_family(f.family)) {
        auto arrow = s.find("->");
        if (arrow == std::string_view::npos)
            throw LookupError("pairwise feature without '->': '" + std::string(orig) + "'");
        f.from = detail::parse_subject(s.substr(0, arrow));
        f.to = detail::parse_subject(s.substr(arrow + 2));
    } else {
        f.from = detail::parse_subject(s);
    }
    return f;
}

struct FeatureValue {
    FeatureName name;
    double value = 0.0;
};

using FeatureVec = std::vector<FeatureValue>;

// --- unary families -------------------------------------------------------

namespace detail {

inline FeatureVec extract_unary(const StudyPath& path, Family family, Atomicity atomicity,
                                IndexKind kind) {
    if (path.semesters.empty()) throw ComputeError("feature extraction: empty study path");
    auto idx = semester_index(path, kind);
    FeatureVec out;
    if (atomicity == Atomicity::Atomic) {
        for (const auto& [sem, attempts] : path.semesters) {
            std::set<std::string> courses;
            for (const auto& a : attempts) courses.insert(a.course_id);
            for (const auto& c : courses) {
                FeatureName f{family, Atomicity::Atomic, {}, {},
                              PONode{c, idx.at(sem), Lifecycle::Atomic}, {}};
                out.push_back({f, 1.0});
            }
        }
    } else {
        std::map<std::string, std::pair<int, int>> span;  // course -> first/last semester
        for (const auto& [sem, attempts] : path.semesters)
            for (const auto& a : attempts) {
                auto it = span.find(a.course_id);
                if (it == span.end())
                    span[a.course_id] = {sem, sem};
                else
                    it->second.second = std::max(it->second.second, sem);
            }
        for (const auto& [c, fl] : span) {
            out.push_back({FeatureName{family, Atomicity::NonAtomic, {}, Endpoint::Start,
                                       PONode{c, idx.at(fl.first), Lifecycle::Atomic}, {}},
                           1.0});
            out.push_back({FeatureName{family, Atomicity::NonAtomic, {}, Endpoint::End,
                                       PONode{c, idx.at(fl.second), Lifecycle::Atomic}, {}},
                           1.0});
        }
    }
    return out;
}

}  // namespace detail

inline FeatureVec extract_course_semester(const StudyPath& path, Atomicity atomicity) {
    return detail::extract_unary(path, Family::CourseSemester, atomicity, IndexKind::Semester);
}
inline FeatureVec extract_course_order(const StudyPath& path, Atomicity atomicity) {
    return detail::extract_unary(path, Family::CourseOrder, atomicity, IndexKind::Order);
}
inline FeatureVec extract_course_distance(const StudyPath& path, Atomicity atomicity) {
    return detail::extract_unary(path, Family::CourseDistance, atomicity, IndexKind::Distance);
}

// --- pairwise families ----------------------------------------------------

namespace detail {

inline LevelledPartialOrder po_for(const StudyPath& path, Atomicity atomicity, IndexKind kind) {
    return atomicity == Atomicity::Atomic ? build_partial_order(path, kind)
                                          : build_lifecycle_partial_order(path);
}

inline FeatureName pair_name(Family family, Atomicity atomicity, IndexKind kind, const PONode& u,
                             const PONode& v) {
    FeatureName f;
    f.family = family;
    f.atomicity = atomicity;
    if (atomicity == Atomicity::Atomic) f.index_kind = kind;
    f.from = u;
    f.to = v;
    return f;
}

}  // namespace detail

// One integer feature per ordered node pair (u,v), u != v, with u's level
// not after v's level. Same-level pairs get 0 in both directions.
inline FeatureVec extract_path_length(const StudyPath& path, Atomicity atomicity,
                                      IndexKind kind = IndexKind::Semester) {
    auto po = detail::po_for(path, atomicity, kind);
    FeatureVec out;
    for (std::size_t i = 0; i < po.levels.size(); ++i)
        for (std::size_t j = i; j < po.levels.size(); ++j)
            for (const auto& u : po.levels[i])
                for (const auto& v : po.levels[j]) {
                    if (u == v) continue;
                    out.push_back({detail::pair_name(Family::PathLength, atomicity, kind, u, v),
                                   static_cast<double>(j - i)});
                }
    return out;
}

// Binary: the edges of the partial order.
inline FeatureVec extract_directly_follows(const StudyPath& path, Atomicity atomicity,
                                           IndexKind kind = IndexKind::Semester) {
    auto po = detail::po_for(path, atomicity, kind);
    FeatureVec out;
    for (const auto& [u, v] : po.edges)
        out.push_back({detail::pair_name(Family::DirectlyFollows, atomicity, kind, u, v), 1.0});
    return out;
}

// Binary: transitive closure of the partial-order edges (forward path of
// length >= 1, i.e. strictly later level).
inline FeatureVec extract_eventually_follows(const StudyPath& path, Atomicity atomicity,
                                             IndexKind kind = IndexKind::Semester) {
    auto po = detail::po_for(path, atomicity, kind);
    FeatureVec out;
    for (std::size_t i = 0; i < po.levels.size(); ++i)
        for (std::size_t j = i + 1; j < po.levels.size(); ++j)
            for (const auto& u : po.levels[i])
                for (const auto& v : po.levels[j])
                    out.push_back(
                        {detail::pair_name(Family::EventuallyFollows, atomicity, kind, u, v), 1.0});
    return out;
}

// --- matrix assembly ------------------------------------------------------

struct FeatureSelector {
    Family family;
    Atomicity atomicity;
    std::optional<IndexKind> index_kind;  // required for atomic pairwise
};

inline FeatureVec extract(const StudyPath& path, const FeatureSelector& sel) {
    switch (sel.family) {
        case Family::CourseSemester: return extract_course_semester(path, sel.atomicity);
        case Family::CourseOrder: return extract_course_order(path, sel.atomicity);
        case Family::CourseDistance: return extract_course_distance(path, sel.atomicity);
        case Family::PathLength:
            return extract_path_length(path, sel.atomicity,
                                       sel.index_kind.value_or(IndexKind::Semester));
        case Family::DirectlyFollows:
            return extract_directly_follows(path, sel.atomicity,
                                            sel.index_kind.value_or(IndexKind::Semester));
        case Family::EventuallyFollows:
            return extract_eventually_follows(path, sel.atomicity,
                                              sel.index_kind.value_or(IndexKind::Semester));
    }
    throw ConfigError("unknown feature family");
}

// Students x features. Columns in lexicographic order of canonical names;
// binary features default to 0, path-length features to -1.
struct FeatureMatrix {
    std::vector<std::string> columns;
    std::vector<FeatureName> column_names;  // parsed, aligned with columns
    std::vector<std::string> row_ids;
    std::vector<std::vector<double>> values;  // row-major

    std::size_t column_index(const std::string& name) const {
        auto it = std::lower_bound(columns.begin(), columns.end(), name);
        if (it == columns.end() || *it != name) throw LookupError("unknown feature: " + name);
        return static_cast<std::size_t>(it - columns.begin());
    }

    void to_csv(std::ostream& out) const {
        out << "student_id";
        for (const auto& c : columns) out << ',' << c;
        out << '\n';
        for (std::size_t r = 0; r < row_ids.size(); ++r) {
            out << row_ids[r];
            for (double v : values[r]) out << ',' << static_cast<long long>(v);
            out << '\n';
        }
    }
};

inline FeatureMatrix assemble_matrix(const std::vector<StudyPath>& cohort,
                                     const std::vector<FeatureSelector>& selection) {
    if (cohort.empty()) throw ConfigError("assemble_matrix: empty cohort");
    if (selection.empty()) throw ConfigError("assemble_matrix: empty feature selection");

    std::vector<std::map<std::string, double>> per_student(cohort.size());
    std::map<std::string, FeatureName> universe;
    for (std::size_t i = 0; i < cohort.size(); ++i)
        for (const auto& sel : selection)
            for (auto& fv : extract(cohort[i], sel)) {
                std::string key = fv.name.render();
                per_student[i][key] = fv.value;
                universe.emplace(std::move(key), fv.name);
            }

    FeatureMatrix m;
    for (const auto& [key, name] : universe) {
        m.columns.push_back(key);
        m.column_names.push_back(name);
    }
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        m.row_ids.push_back(cohort[i].student_id);
        std::vector<double> row;
        row.reserve(m.columns.size());
        for (std::size_t c = 0; c < m.columns.size(); ++c) {
            auto it = per_student[i].find(m.columns[c]);
            if (it != per_student[i].end())
                row.push_back(it->second);
            else
                row.push_back(m.column_names[c].is_binary() ? 0.0 : -1.0);
        }
        m.values.push_back(std::move(row));
    }
    return m;
}

}  // namespace splan
