#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "splan/csv.hpp"
#include "splan/errors.hpp"

namespace splan {

// Calendar date, ISO-8601 (YYYY-MM-DD) on the wire.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    static std::optional<Date> parse(const std::string& s) {
        Date d;
        char dash1 = 0, dash2 = 0;
        std::istringstream in(s);
        if (!(in >> d.year >> dash1 >> d.month >> dash2 >> d.day)) return std::nullopt;
        if (dash1 != '-' || dash2 != '-') return std::nullopt;
        if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) return std::nullopt;
        std::string rest;
        if (in >> rest) return std::nullopt;
        return d;
    }

    std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
        return buf;
    }
};

enum class FinalStatus { Passed, Failed };

inline const char* to_string(FinalStatus s) {
    return s == FinalStatus::Passed ? "PASSED" : "FAILED";
}

// German step scale; 5.0 is the failing grade.
inline constexpr std::array<double, 11> kGradeScale = {1.0, 1.3, 1.7, 2.0, 2.3, 2.7,
                                                      3.0, 3.3, 3.7, 4.0, 5.0};

inline bool valid_grade(double g) {
    for (double v : kGradeScale)
        if (std::abs(g - v) < 1e-9) return true;
    return false;
}

// One exam attempt.
struct Event {
    std::string student_id;
    std::string course_id;
    int credit = 0;
    Date time_start;
    Date time_end;
    int semester = 1;
    std::optional<double> grade;
    FinalStatus final_status = FinalStatus::Passed;
    std::string gender;
    std::string nationality;
    double study_time = 0.0;

    bool operator==(const Event&) const = default;
};

// Multiset of events; duplicate rows are preserved.
struct EventLog {
    std::vector<Event> events;

    std::set<std::string> student_ids() const {
        std::set<std::string> out;
        for (const auto& e : events) out.insert(e.student_id);
        return out;
    }
    std::set<std::string> course_ids() const {
        std::set<std::string> out;
        for (const auto& e : events) out.insert(e.course_id);
        return out;
    }
    std::size_t size() const { return events.size(); }
};

// A student's chronologically ordered attempts.
struct Trace {
    std::string student_id;
    std::vector<Event> events;  // sorted by (semester, time_start, course_id)
};

struct Attempt {
    std::string course_id;
    std::optional<double> grade;
    FinalStatus final_status = FinalStatus::Passed;

    auto operator<=>(const Attempt&) const = default;
};

// Attempts grouped per semester; gap semesters are absent from the map.
struct StudyPath {
    std::string student_id;
    std::map<int, std::vector<Attempt>> semesters;
};

// Maps Event fields to input column names. Defaults follow the attribute
// table of the source data.
struct Schema {
    std::string student_id = "student-id";
    std::string course_id = "course-id";
    std::string credit = "credit";
    std::string time_start = "time-start";
    std::string time_end = "time-end";
    std::string semester = "semester";
    std::string grade = "grade";
    std::string final_status = "final-status";
    std::string gender = "gender";
    std::string nationality = "nationality";
    std::string study_time = "study-time";
    char delimiter = ',';
};

namespace detail {

inline std::size_t require_column(const std::vector<std::string>& header, const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError("missing mandatory column: " + name);
    return static_cast<std::size_t>(it - header.begin());
}

inline int parse_int(const std::string& s, std::size_t row, const char* what) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw RowError(row, std::string("malformed ") + what + ": '" + s + "'");
    return v;
}

inline double parse_double(const std::string& s, std::size_t row, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw RowError(row, std::string("malformed ") + what + ": '" + s + "'");
    }
}

}  // namespace detail

inline EventLog parse_event_log(std::istream& source, const Schema& schema = {}) {
    auto rows = csv::read_rows(source, schema.delimiter);
    if (rows.empty()) throw SchemaError("empty input: no header row");
    const auto& header = rows.front();

    const std::size_t c_student = detail::require_column(header, schema.student_id);
    const std::size_t c_course = detail::require_column(header, schema.course_id);
    const std::size_t c_credit = detail::require_column(header, schema.credit);
    const std::size_t c_start = detail::require_column(header, schema.time_start);
    const std::size_t c_end = detail::require_column(header, schema.time_end);
    const std::size_t c_sem = detail::require_column(header, schema.semester);
    const std::size_t c_grade = detail::require_column(header, schema.grade);
    const std::size_t c_status = detail::require_column(header, schema.final_status);
    const std::size_t c_gender = detail::require_column(header, schema.gender);
    const std::size_t c_nat = detail::require_column(header, schema.nationality);
    const std::size_t c_stime = detail::require_column(header, schema.study_time);

    if (rows.size() == 1) throw SchemaError("empty log: header only, no event rows");

    EventLog log;
    log.events.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& cells = rows[i];
        if (cells.size() != header.size())
            throw RowError(i, "expected " + std::to_string(header.size()) + " cells, got " +
                                  std::to_string(cells.size()));
        Event e;
        e.student_id = cells[c_student];
        e.course_id = cells[c_course];
        e.credit = detail::parse_int(cells[c_credit], i, "credit");
        if (e.credit < 0) throw RowError(i, "negative credit");

        auto start = Date::parse(cells[c_start]);
        if (!start) throw RowError(i, "malformed date: '" + cells[c_start] + "'");
        auto end = Date::parse(cells[c_end]);
        if (!end) throw RowError(i, "malformed date: '" + cells[c_end] + "'");
        e.time_start = *start;
        e.time_end = *end;
        if (e.time_end < e.time_start) throw RowError(i, "time-end before time-start");

        e.semester = detail::parse_int(cells[c_sem], i, "semester");
        if (e.semester < 1) throw RowError(i, "semester must be >= 1");

        const std::string& status = cells[c_status];
        if (status == "PASSED")
            e.final_status = FinalStatus::Passed;
        else if (status == "FAILED")
            e.final_status = FinalStatus::Failed;
        else
            throw RowError(i, "unknown final-status: '" + status + "'");

        // Unparseable grade cells (pass/fail courses) become absent grades;
        // parseable grades outside the step scale are row errors.
        const std::string& gcell = cells[c_grade];
        if (!gcell.empty()) {
            try {
                std::size_t pos = 0;
                double g = std::stod(gcell, &pos);
                if (pos != gcell.size()) throw std::invalid_argument(gcell);
                if (!valid_grade(g)) throw RowError(i, "grade outside scale: '" + gcell + "'");
                e.grade = g;
            } catch (const RowError&) {
                throw;
            } catch (const std::exception&) {
                e.grade.reset();
            }
        }
        if (e.grade) {
            if (e.final_status == FinalStatus::Passed && *e.grade > 4.0)
                throw RowError(i, "PASSED attempt with failing grade");
            if (e.final_status == FinalStatus::Failed && std::abs(*e.grade - 5.0) > 1e-9)
                throw RowError(i, "FAILED attempt with passing grade");
        }

        e.gender = cells[c_gender];
        e.nationality = cells[c_nat];
        e.study_time = detail::parse_double(cells[c_stime], i, "study-time");
        if (e.study_time < 0) throw RowError(i, "negative study-time");

        log.events.push_back(std::move(e));
    }
    return log;
}

inline void serialize_event_log(const EventLog& log, std::ostream& out, const Schema& schema = {}) {
    const char d = schema.delimiter;
    csv::write_row(out,
                   {schema.student_id, schema.course_id, schema.credit, schema.time_start,
                    schema.time_end, schema.semester, schema.grade, schema.final_status,
                    schema.gender, schema.nationality, schema.study_time},
                   d);
    for (const auto& e : log.events) {
        char grade[8] = "";
        if (e.grade) std::snprintf(grade, sizeof grade, "%.1f", *e.grade);
        char stime[32];
        std::snprintf(stime, sizeof stime, "%g", e.study_time);
        csv::write_row(out,
                       {e.student_id, e.course_id, std::to_string(e.credit), e.time_start.str(),
                        e.time_end.str(), std::to_string(e.semester), grade,
                        to_string(e.final_status), e.gender, e.nationality, stime},
                       d);
    }
}

inline EventLog filter_courses(const EventLog& log, const std::set<std::string>& allowed) {
    if (allowed.empty()) throw ConfigError("filter_courses: empty allowed set");
    EventLog out;
    for (const auto& e : log.events)
        if (allowed.contains(e.course_id)) out.events.push_back(e);
    return out;
}

// One trace per distinct student, ordered by (semester, time_start, course_id).
inline std::vector<Trace> build_traces(const EventLog& log) {
    std::map<std::string, Trace> by_student;
    for (const auto& e : log.events) {
        auto& t = by_student[e.student_id];
        t.student_id = e.student_id;
        t.events.push_back(e);
    }
    std::vector<Trace> traces;
    traces.reserve(by_student.size());
    for (auto& [id, t] : by_student) {
        std::stable_sort(t.events.begin(), t.events.end(), [](const Event& a, const Event& b) {
            return std::tie(a.semester, a.time_start, a.course_id) <
                   std::tie(b.semester, b.time_start, b.course_id);
        });
        traces.push_back(std::move(t));
    }
    return traces;
}

inline StudyPath build_study_path(const Trace& trace) {
    if (trace.events.empty()) throw ComputeError("build_study_path: empty trace");
    StudyPath path;
    path.student_id = trace.student_id;
    for (const auto& e : trace.events)
        path.semesters[e.semester].push_back({e.course_id, e.grade, e.final_status});
    return path;
}

// One row per event, sorted by (student, exam date): the data behind a
// dotted chart.
inline void dotted_chart_export(const EventLog& log, std::ostream& out) {
    out << "student_id,time_start,course_id\n";
    std::vector<const Event*> order;
    order.reserve(log.events.size());
    for (const auto& e : log.events) order.push_back(&e);
    std::stable_sort(order.begin(), order.end(), [](const Event* a, const Event* b) {
        return std::tie(a->student_id, a->time_start) < std::tie(b->student_id, b->time_start);
    });
    for (const Event* e : order)
        out << e->student_id << ',' << e->time_start.str() << ',' << e->course_id << '\n';
}

}  // namespace splan
