#pragma once

#include <sstream>
#include <string>

#include "splan/event_log.hpp"

namespace fixtures {

// The example student: courses 1 and 2 in semester 1 (course-1 failed),
// course 3 in semester 2, course-1 retaken in semester 3, a break in
// semester 4, courses 4 and 5 in semester 5.
inline splan::StudyPath running_example_path() {
    using namespace splan;
    StudyPath p;
    p.student_id = "s1";
    p.semesters[1] = {{"course-1", 5.0, FinalStatus::Failed}, {"course-2", 2.0, FinalStatus::Passed}};
    p.semesters[2] = {{"course-3", 1.7, FinalStatus::Passed}};
    p.semesters[3] = {{"course-1", 2.3, FinalStatus::Passed}};
    p.semesters[5] = {{"course-4", 3.0, FinalStatus::Passed}, {"course-5", 1.0, FinalStatus::Passed}};
    return p;
}

inline splan::Trace running_example_trace() {
    using namespace splan;
    auto ev = [](int sem, const std::string& course, double grade, FinalStatus st, int credit = 6) {
        Event e;
        e.student_id = "s1";
        e.course_id = course;
        e.credit = credit;
        e.semester = sem;
        e.time_start = Date{2019 + (sem - 1) / 2, (sem - 1) % 2 == 0 ? 2 : 8, 10};
        e.time_end = Date{2019 + (sem - 1) / 2, (sem - 1) % 2 == 0 ? 2 : 8, 24};
        e.grade = grade;
        e.final_status = st;
        e.gender = "g1";
        e.nationality = "country-1";
        e.study_time = 3;
        return e;
    };
    Trace t;
    t.student_id = "s1";
    t.events = {
        ev(1, "course-1", 5.0, splan::FinalStatus::Failed),
        ev(1, "course-2", 2.0, splan::FinalStatus::Passed),
        ev(2, "course-3", 1.7, splan::FinalStatus::Passed),
        ev(3, "course-1", 2.3, splan::FinalStatus::Passed),
        ev(5, "course-4", 3.0, splan::FinalStatus::Passed),
        ev(5, "course-5", 1.0, splan::FinalStatus::Passed),
    };
    return t;
}

// Two order cases, both <op, pp, pa, sh>.
inline std::string order_log_csv() {
    return "student-id,course-id,credit,time-start,time-end,semester,grade,final-status,gender,nationality,study-time\n"
           "1,op,0,2023-04-01,2023-04-01,1,,PASSED,g1,country-1,0\n"
           "1,pp,0,2023-04-01,2023-04-01,1,,PASSED,g1,country-1,0\n"
           "2,op,0,2023-04-01,2023-04-01,1,,PASSED,g1,country-1,0\n"
           "1,pa,0,2023-04-02,2023-04-02,1,,PASSED,g1,country-1,0\n"
           "2,pp,0,2023-04-02,2023-04-02,1,,PASSED,g1,country-1,0\n"
           "2,pa,0,2023-04-03,2023-04-03,1,,PASSED,g1,country-1,0\n"
           "1,sh,0,2023-04-03,2023-04-03,1,,PASSED,g1,country-1,0\n"
           "2,sh,0,2023-04-04,2023-04-04,1,,PASSED,g1,country-1,0\n";
}

inline splan::EventLog order_log() {
    std::istringstream in(order_log_csv());
    return splan::parse_event_log(in);
}

}  // namespace fixtures
