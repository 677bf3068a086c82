#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "splan/errors.hpp"
#include "splan/event_log.hpp"

namespace splan {

// A dependency planted into the generated cohort: students whose study path
// contains every antecedent placement get the consequent class of the target
// course grade with probability 1 - noise_rate.
struct PlantedRule {
    std::vector<std::pair<std::string, int>> antecedent;  // (course, semester)
    bool consequent_good = true;  // good: target grade <= 2.5
    double noise_rate = 0.0;
    double placement_prob = 0.6;  // per-placement satisfaction probability
};

struct CohortSpec {
    int n_students = 100;
    int n_courses = 10;
    int semesters_span = 6;
    double fail_rate = 0.1;
    double gap_probability = 0.05;
    double courses_per_student = 0.0;  // 0: take every course
    std::vector<PlantedRule> planted;
    std::optional<std::pair<std::string, int>> target_course;  // labeled course + semester
    std::uint64_t seed = 1;
};

namespace detail {

inline constexpr std::array<double, 5> kGoodGrades = {1.0, 1.3, 1.7, 2.0, 2.3};
inline constexpr std::array<double, 5> kBadGrades = {2.7, 3.0, 3.3, 3.7, 4.0};

inline Date semester_date(int semester, int day) {
    // two exam periods per year, starting winter 2018/19
    int idx = semester - 1;
    return Date{2019 + idx / 2, idx % 2 == 0 ? 2 : 8, day};
}

inline void validate(const CohortSpec& spec) {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (spec.n_students < 1 || spec.n_courses < 1 || spec.semesters_span < 1)
        throw ConfigError("synth: sizes must be positive");
    if (!prob(spec.fail_rate) || !prob(spec.gap_probability))
        throw ConfigError("synth: probabilities must be in [0,1]");
    for (const auto& rule : spec.planted) {
        if (!prob(rule.noise_rate) || !prob(rule.placement_prob))
            throw ConfigError("synth: probabilities must be in [0,1]");
        std::map<std::string, int> seen;
        for (const auto& [course, sem] : rule.antecedent) {
            if (sem < 1 || sem > spec.semesters_span)
                throw ConfigError("synth: planted semester outside span");
            auto [it, inserted] = seen.emplace(course, sem);
            if (!inserted && it->second != sem)
                throw ConfigError("synth: unsatisfiable antecedent, course " + course +
                                  " planted in two semesters");
        }
    }
    if (spec.target_course &&
        (spec.target_course->second < 1 || spec.target_course->second > spec.semesters_span))
        throw ConfigError("synth: target semester outside span");
}

}  // namespace detail

// Deterministic for a fixed spec: one RNG stream, students generated in
// order. Every log it emits parses back through parse_event_log.
inline EventLog generate(const CohortSpec& spec) {
    detail::validate(spec);
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    std::vector<std::string> courses;
    for (int c = 1; c <= spec.n_courses; ++c) courses.push_back("course-" + std::to_string(c));
    auto credit_of = [](int course_idx) { return 4 + course_idx % 5; };

    const double take_prob =
        spec.courses_per_student <= 0.0
            ? 1.0
            : std::min(1.0, spec.courses_per_student / spec.n_courses);

    EventLog log;
    for (int s = 1; s <= spec.n_students; ++s) {
        const std::string student = "student-" + std::to_string(s);
        const std::string gender = coin(rng) < 0.5 ? "g1" : "g2";
        const std::string nationality = coin(rng) < 0.7 ? "country-1" : "other";
        const double study_time = spec.semesters_span / 2.0;

        // gap semesters; forced semesters are re-opened below
        std::set<int> gaps;
        for (int sem = 2; sem <= spec.semesters_span; ++sem)
            if (coin(rng) < spec.gap_probability) gaps.insert(sem);

        // course -> semester of the first attempt
        std::map<std::string, int> schedule;
        std::set<std::string> pinned;  // planted/target courses, kept out of the random fill
        bool satisfies_all = true;
        for (const auto& rule : spec.planted)
            for (const auto& [course, sem] : rule.antecedent) {
                pinned.insert(course);
                if (coin(rng) < rule.placement_prob) {
                    schedule[course] = sem;
                    gaps.erase(sem);
                } else {
                    satisfies_all = false;
                    // deviate: different semester or skip entirely
                    if (coin(rng) < 0.5) {
                        int other = 1 + static_cast<int>(coin(rng) * spec.semesters_span) % spec.semesters_span;
                        if (other == sem) other = other % spec.semesters_span + 1;
                        schedule[course] = other;
                        gaps.erase(other);
                    }
                }
            }
        if (spec.target_course) {
            pinned.insert(spec.target_course->first);
            schedule[spec.target_course->first] = spec.target_course->second;
            gaps.erase(spec.target_course->second);
        }

        std::vector<int> open;
        for (int sem = 1; sem <= spec.semesters_span; ++sem)
            if (!gaps.contains(sem)) open.push_back(sem);
        if (open.empty()) open.push_back(1);

        for (const auto& course : courses) {
            if (schedule.contains(course) || pinned.contains(course)) continue;
            if (coin(rng) >= take_prob) continue;
            schedule[course] = open[static_cast<std::size_t>(coin(rng) * open.size()) % open.size()];
        }

        // target grade class from planted rules (noise flips the class)
        bool target_good = coin(rng) < 0.5;
        if (!spec.planted.empty()) {
            bool intended = spec.planted.front().consequent_good ? satisfies_all : !satisfies_all;
            target_good = coin(rng) < spec.planted.front().noise_rate ? !intended : intended;
        }

        for (const auto& [course, first_sem] : schedule) {
            int course_idx = static_cast<int>(
                std::find(courses.begin(), courses.end(), course) - courses.begin());
            bool is_target = spec.target_course && course == spec.target_course->first;

            int sem = first_sem;
            int attempts = 0;
            while (true) {
                ++attempts;
                Event e;
                e.student_id = student;
                e.course_id = course;
                e.credit = credit_of(course_idx);
                e.time_start = detail::semester_date(sem, 1 + course_idx % 20);
                e.time_end = detail::semester_date(sem, 9 + course_idx % 20);
                e.semester = sem;
                e.gender = gender;
                e.nationality = nationality;
                e.study_time = study_time;

                bool fail = !is_target && attempts < 3 && coin(rng) < spec.fail_rate;
                if (fail) {
                    e.final_status = FinalStatus::Failed;
                    e.grade = 5.0;
                    log.events.push_back(std::move(e));
                    sem += 1 + static_cast<int>(coin(rng) * 2.0) % 2;  // retake 1-2 semesters later
                    continue;
                }
                e.final_status = FinalStatus::Passed;
                const auto& pool = (is_target ? target_good : coin(rng) < 0.5)
                                       ? detail::kGoodGrades
                                       : detail::kBadGrades;
                e.grade = pool[static_cast<std::size_t>(coin(rng) * pool.size()) % pool.size()];
                log.events.push_back(std::move(e));
                break;
            }
        }
    }
    return log;
}

}  // namespace splan
