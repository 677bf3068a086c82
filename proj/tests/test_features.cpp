#include <catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "splan/features.hpp"

using namespace splan;

namespace {

std::map<std::string, double> as_map(const FeatureVec& fv) {
    std::map<std::string, double> m;
    for (const auto& f : fv) m[f.name.render()] = f.value;
    return m;
}

StudyPath random_path(std::mt19937& rng) {
    StudyPath p;
    p.student_id = "r";
    int sems = 1 + static_cast<int>(rng() % 5);
    for (int s = 0; s < sems; ++s) {
        int sem = 1 + static_cast<int>(rng() % 8);
        int courses = 1 + static_cast<int>(rng() % 3);
        for (int c = 0; c < courses; ++c)
            p.semesters[sem].push_back(
                {"c" + std::to_string(rng() % 6), std::nullopt, FinalStatus::Passed});
    }
    return p;
}

}  // namespace

TEST_CASE("feature name rendering round-trips") {
    std::vector<std::string> names = {
        "a-cs-course-1-1",
        "a-co-course-12-3",
        "a-cd-course-1-0",
        "na-cs-s-course-1-1",
        "na-cs-e-course-1-3",
        "na-co-e-course-9-2",
        "a-pl-s-course-1-1->course-3-2",
        "a-df-o-course-2-1->course-3-2",
        "a-ef-d-course-1-0->course-5-4",
        "na-pl-course-1-start->course-3-end",
        "na-df-course-1-end->course-4-start",
        "na-ef-course-2-start->course-5-end",
    };
    for (const auto& n : names) CHECK(FeatureName::parse(n).render() == n);
}

TEST_CASE("malformed feature names are rejected") {
    for (const char* bad : {"x-cs-c-1", "a-zz-c-1", "a-cs-c", "a-pl-s-c-1", "na-cs-c-1",
                            "a-pl-c-1->c-2", "a-df-s-c-x->c-2"})
        CHECK_THROWS_AS(FeatureName::parse(bad), LookupError);
}

TEST_CASE("atomic course semester features of the running example") {
    auto m = as_map(extract_course_semester(fixtures::running_example_path(), Atomicity::Atomic));
    CHECK(m.size() == 6);
    for (const char* f : {"a-cs-course-1-1", "a-cs-course-2-1", "a-cs-course-3-2",
                          "a-cs-course-1-3", "a-cs-course-4-5", "a-cs-course-5-5"})
        CHECK(m.at(f) == 1.0);
}

TEST_CASE("non-atomic course semester features of the running example") {
    auto m = as_map(extract_course_semester(fixtures::running_example_path(), Atomicity::NonAtomic));
    CHECK(m.at("na-cs-s-course-1-1") == 1.0);
    CHECK(m.at("na-cs-e-course-1-3") == 1.0);
    CHECK_FALSE(m.contains("na-cs-e-course-1-1"));  // defaults to false in the matrix
}

TEST_CASE("single-attempt course: start and end coincide") {
    StudyPath p;
    p.student_id = "s";
    p.semesters[2] = {{"x", 2.0, FinalStatus::Passed}};
    auto atomic = as_map(extract_course_semester(p, Atomicity::Atomic));
    CHECK(atomic.at("a-cs-x-2") == 1.0);
    auto na = as_map(extract_course_semester(p, Atomicity::NonAtomic));
    CHECK(na.at("na-cs-s-x-2") == 1.0);
    CHECK(na.at("na-cs-e-x-2") == 1.0);
}

TEST_CASE("atomic course order features of the running example") {
    auto m = as_map(extract_course_order(fixtures::running_example_path(), Atomicity::Atomic));
    CHECK(m.size() == 6);
    for (const char* f : {"a-co-course-1-1", "a-co-course-2-1", "a-co-course-3-2",
                          "a-co-course-1-3", "a-co-course-4-4", "a-co-course-5-4"})
        CHECK(m.at(f) == 1.0);
}

TEST_CASE("order ranks skip nothing over sparse semesters") {
    StudyPath p;
    p.student_id = "s";
    p.semesters[2] = {{"a", 2.0, FinalStatus::Passed}};
    p.semesters[4] = {{"b", 2.0, FinalStatus::Passed}};
    p.semesters[7] = {{"c", 2.0, FinalStatus::Passed}};
    auto m = as_map(extract_course_order(p, Atomicity::Atomic));
    CHECK(m.at("a-co-a-1") == 1.0);
    CHECK(m.at("a-co-b-2") == 1.0);
    CHECK(m.at("a-co-c-3") == 1.0);
}

TEST_CASE("atomic course distance features of the running example") {
    auto m = as_map(extract_course_distance(fixtures::running_example_path(), Atomicity::Atomic));
    CHECK(m.size() == 6);
    for (const char* f : {"a-cd-course-1-0", "a-cd-course-2-0", "a-cd-course-3-1",
                          "a-cd-course-1-2", "a-cd-course-4-4", "a-cd-course-5-4"})
        CHECK(m.at(f) == 1.0);
}

TEST_CASE("distance is semester minus first occupied semester") {
    StudyPath p;
    p.student_id = "s";
    p.semesters[3] = {{"a", 2.0, FinalStatus::Passed}};
    p.semesters[6] = {{"b", 2.0, FinalStatus::Passed}};
    auto m = as_map(extract_course_distance(p, Atomicity::Atomic));
    CHECK(m.at("a-cd-a-0") == 1.0);
    CHECK(m.at("a-cd-b-3") == 1.0);
}

TEST_CASE("path length features of the running example") {
    auto m = as_map(extract_path_length(fixtures::running_example_path(), Atomicity::Atomic,
                                        IndexKind::Semester));
    CHECK(m.at("a-pl-s-course-1-1->course-2-1") == 0.0);
    CHECK(m.at("a-pl-s-course-2-1->course-1-1") == 0.0);
    CHECK(m.at("a-pl-s-course-1-1->course-1-3") == 2.0);
    CHECK(m.at("a-pl-s-course-1-1->course-4-5") == 3.0);
    CHECK_FALSE(m.contains("a-pl-s-course-5-5->course-1-1"));  // reverse defaults to -1
}

TEST_CASE("directly follows features of the running example") {
    auto m = as_map(extract_directly_follows(fixtures::running_example_path(), Atomicity::Atomic,
                                             IndexKind::Semester));
    CHECK(m.size() == 5);  // the five edges of the semester partial order
    CHECK(m.at("a-df-s-course-1-1->course-3-2") == 1.0);
    CHECK_FALSE(m.contains("a-df-s-course-1-1->course-2-1"));  // parallel, not an edge
}

TEST_CASE("eventually follows features of the running example") {
    auto m = as_map(extract_eventually_follows(fixtures::running_example_path(), Atomicity::Atomic,
                                               IndexKind::Semester));
    CHECK(m.at("a-ef-s-course-1-1->course-3-2") == 1.0);
    CHECK(m.at("a-ef-s-course-2-1->course-5-5") == 1.0);
    CHECK_FALSE(m.contains("a-ef-s-course-1-1->course-2-1"));  // same level
}

TEST_CASE("df implies ef implies positive path length") {
    std::mt19937 rng(99);
    for (int iter = 0; iter < 50; ++iter) {
        auto p = random_path(rng);
        auto df = as_map(extract_directly_follows(p, Atomicity::Atomic, IndexKind::Semester));
        auto ef = as_map(extract_eventually_follows(p, Atomicity::Atomic, IndexKind::Semester));
        auto pl = as_map(extract_path_length(p, Atomicity::Atomic, IndexKind::Semester));
        for (const auto& [name, v] : df) {
            auto pair = name.substr(5);  // strip "a-df-"
            CHECK(ef.at("a-ef-" + pair) == 1.0);
        }
        for (const auto& [name, v] : ef) {
            auto pair = name.substr(5);
            CHECK(pl.at("a-pl-" + pair) >= 1.0);
        }
    }
}

TEST_CASE("order/distance features invariant under uniform semester shift") {
    std::mt19937 rng(7);
    for (int iter = 0; iter < 30; ++iter) {
        auto p = random_path(rng);
        StudyPath shifted;
        shifted.student_id = p.student_id;
        for (const auto& [sem, att] : p.semesters) shifted.semesters[sem + 3] = att;
        CHECK(as_map(extract_course_order(p, Atomicity::Atomic)) ==
              as_map(extract_course_order(shifted, Atomicity::Atomic)));
        CHECK(as_map(extract_course_distance(p, Atomicity::Atomic)) ==
              as_map(extract_course_distance(shifted, Atomicity::Atomic)));
        CHECK(as_map(extract_course_semester(p, Atomicity::Atomic)) !=
              as_map(extract_course_semester(shifted, Atomicity::Atomic)));
    }
}

TEST_CASE("number of true a-cs features equals distinct (course, semester) pairs") {
    std::mt19937 rng(17);
    for (int iter = 0; iter < 30; ++iter) {
        auto p = random_path(rng);
        std::set<std::pair<std::string, int>> pairs;
        for (const auto& [sem, att] : p.semesters)
            for (const auto& a : att) pairs.insert({a.course_id, sem});
        CHECK(extract_course_semester(p, Atomicity::Atomic).size() == pairs.size());
    }
}

TEST_CASE("non-atomic start semester never exceeds end semester") {
    std::mt19937 rng(23);
    for (int iter = 0; iter < 30; ++iter) {
        auto m = as_map(extract_course_semester(random_path(rng), Atomicity::NonAtomic));
        for (const auto& [name, v] : m) {
            auto f = FeatureName::parse(name);
            if (f.endpoint == Endpoint::Start) {
                // find the matching end feature
                for (const auto& [other, v2] : m) {
                    auto g = FeatureName::parse(other);
                    if (g.endpoint == Endpoint::End && g.from.course_id == f.from.course_id)
                        CHECK(f.from.index <= g.from.index);
                }
            }
        }
    }
}

TEST_CASE("matrix assembly") {
    auto path = fixtures::running_example_path();
    SECTION("cohort of one, a-cs only") {
        auto m = assemble_matrix({path}, {{Family::CourseSemester, Atomicity::Atomic, {}}});
        CHECK(m.columns.size() == 6);
        REQUIRE(m.values.size() == 1);
        for (double v : m.values[0]) CHECK(v == 1.0);
        CHECK(std::is_sorted(m.columns.begin(), m.columns.end()));
    }
    SECTION("two identical students give identical rows") {
        auto p2 = path;
        p2.student_id = "s2";
        auto m = assemble_matrix({path, p2}, {{Family::CourseSemester, Atomicity::Atomic, {}},
                                              {Family::PathLength, Atomicity::Atomic,
                                               IndexKind::Semester}});
        REQUIRE(m.values.size() == 2);
        CHECK(m.values[0] == m.values[1]);
    }
    SECTION("empty selection is a config error") {
        CHECK_THROWS_AS(assemble_matrix({path}, {}), ConfigError);
    }
    SECTION("absent path-length pairs default to -1, binaries to 0") {
        StudyPath other;
        other.student_id = "s2";
        other.semesters[1] = {{"x", 2.0, FinalStatus::Passed}};
        auto m = assemble_matrix({path, other},
                                 {{Family::CourseSemester, Atomicity::Atomic, {}},
                                  {Family::PathLength, Atomicity::Atomic, IndexKind::Semester}});
        auto cs_col = m.column_index("a-cs-course-1-1");
        auto pl_col = m.column_index("a-pl-s-course-1-1->course-3-2");
        CHECK(m.values[1][cs_col] == 0.0);
        CHECK(m.values[1][pl_col] == -1.0);
    }
    SECTION("every cell matches independent per-student extraction") {
        std::mt19937 rng(31);
        std::vector<StudyPath> cohort;
        for (int i = 0; i < 50; ++i) {
            cohort.push_back(random_path(rng));
            cohort.back().student_id = "s" + std::to_string(i);
        }
        std::vector<FeatureSelector> sel = {
            {Family::CourseSemester, Atomicity::Atomic, {}},
            {Family::DirectlyFollows, Atomicity::Atomic, IndexKind::Order},
            {Family::PathLength, Atomicity::NonAtomic, {}},
        };
        auto m = assemble_matrix(cohort, sel);
        for (std::size_t r = 0; r < cohort.size(); ++r) {
            std::map<std::string, double> expected;
            for (const auto& s : sel)
                for (const auto& fv : extract(cohort[r], s)) expected[fv.name.render()] = fv.value;
            for (std::size_t c = 0; c < m.columns.size(); ++c) {
                auto it = expected.find(m.columns[c]);
                double want = it != expected.end()
                                  ? it->second
                                  : (m.column_names[c].is_binary() ? 0.0 : -1.0);
                CHECK(m.values[r][c] == want);
            }
        }
    }
}

TEST_CASE("matrix CSV export has student_id first and canonical headers") {
    auto m = assemble_matrix({fixtures::running_example_path()},
                             {{Family::CourseSemester, Atomicity::Atomic, {}}});
    std::ostringstream out;
    m.to_csv(out);
    CHECK(out.str().rfind("student_id,a-cs-course-1-1,", 0) == 0);
    CHECK(out.str().find("\ns1,1,1,1,1,1,1\n") != std::string::npos);
}
