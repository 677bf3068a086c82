#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "splan/errors.hpp"
#include "splan/event_log.hpp"

namespace splan {

enum class Binning { TwoLevel, FourLevel };

// What to predict: the overall GPA class, or the grade class of one course
// taken in a specific semester.
struct LabelSpec {
    enum class Kind { OverallGPA, CourseGrade };
    Kind kind = Kind::OverallGPA;
    Binning binning = Binning::TwoLevel;  // CourseGrade supports TwoLevel only
    std::string course_id;                // CourseGrade only
    int semester = 0;                     // CourseGrade only
    bool include_failed_attempts = true;  // failed (5.0) attempts count as "> 2.5"
};

// Four ordered GPA classes; the two-level scheme coarsens them.
inline constexpr const char* kExcellent = "excellent";
inline constexpr const char* kGood = "good";
inline constexpr const char* kSatisfactory = "satisfactory";
inline constexpr const char* kSufficient = "sufficient";

inline std::string bin_gpa(double value, Binning binning) {
    if (value < 1.0 || value > 4.0)
        throw ComputeError("bin_gpa: value out of range [1.0, 4.0]");
    if (binning == Binning::TwoLevel) return value <= 2.5 ? kGood : kSatisfactory;
    if (value <= 1.5) return kExcellent;
    if (value <= 2.5) return kGood;
    if (value <= 3.5) return kSatisfactory;
    return kSufficient;
}

// Credit-weighted mean of the final PASSED grade per course. Pass/fail
// courses without a grade and courses never passed do not contribute.
inline std::optional<double> compute_overall_gpa(const Trace& trace) {
    struct Final {
        double grade;
        int credit;
    };
    std::map<std::string, Final> final_grade;
    for (const auto& e : trace.events)
        if (e.final_status == FinalStatus::Passed && e.grade)
            final_grade[e.course_id] = {*e.grade, e.credit};  // trace order: last passed wins
    double num = 0, den = 0;
    for (const auto& [c, f] : final_grade) {
        num += f.grade * f.credit;
        den += f.credit;
    }
    if (den == 0) return std::nullopt;
    return num / den;
}

// Two-level grade class rendered as the label expressions used in rules,
// e.g. "course-1-2 <= 2.5" / "course-1-2 > 2.5".
inline std::string grade_class_expr(const std::string& course_id, int semester, bool good) {
    return course_id + "-" + std::to_string(semester) + (good ? " <= 2.5" : " > 2.5");
}

inline std::string two_level_grade_class(const std::string& course_id, int semester,
                                         double grade) {
    return grade_class_expr(course_id, semester, grade <= 2.5);
}

// Grade of the attempt in the given semester (that sitting, not a later
// retake). nullopt means the student is excluded from the task cohort.
inline std::optional<std::pair<double, std::string>> course_grade_label(const Trace& trace,
                                                                        const LabelSpec& spec) {
    for (const auto& e : trace.events) {
        if (e.course_id != spec.course_id || e.semester != spec.semester) continue;
        if (!e.grade) continue;
        if (e.final_status == FinalStatus::Failed && !spec.include_failed_attempts) continue;
        return std::make_pair(*e.grade,
                              two_level_grade_class(spec.course_id, spec.semester, *e.grade));
    }
    return std::nullopt;
}

// Cohort rows plus raw/class label per student.
struct LabelledCohort {
    std::vector<std::string> student_ids;
    std::vector<double> raw_values;
    std::vector<std::string> classes;

    void to_csv(std::ostream& out) const {
        out << "student_id,raw_value,class\n";
        for (std::size_t i = 0; i < student_ids.size(); ++i)
            out << student_ids[i] << ',' << raw_values[i] << ',' << classes[i] << '\n';
    }
};

inline LabelledCohort select_cohort(const std::vector<Trace>& traces, const LabelSpec& spec) {
    if (spec.kind == LabelSpec::Kind::CourseGrade && spec.binning != Binning::TwoLevel)
        throw ConfigError("course-grade labels support two-level binning only");
    LabelledCohort out;
    for (const auto& t : traces) {
        if (spec.kind == LabelSpec::Kind::OverallGPA) {
            auto gpa = compute_overall_gpa(t);
            if (!gpa) continue;
            out.student_ids.push_back(t.student_id);
            out.raw_values.push_back(*gpa);
            out.classes.push_back(bin_gpa(*gpa, spec.binning));
        } else {
            auto label = course_grade_label(t, spec);
            if (!label) continue;
            out.student_ids.push_back(t.student_id);
            out.raw_values.push_back(label->first);
            out.classes.push_back(label->second);
        }
    }
    if (out.student_ids.empty()) throw ComputeError("select_cohort: no student has this label");
    return out;
}

}  // namespace splan
