// Command-line front end for the study-planning rule miner.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splan/config.hpp"
#include "splan/decision_tree.hpp"
#include "splan/errors.hpp"
#include "splan/evaluation.hpp"
#include "splan/event_log.hpp"
#include "splan/features.hpp"
#include "splan/labels.hpp"
#include "splan/order_graph.hpp"
#include "splan/rules.hpp"
#include "splan/synth.hpp"

namespace fs = std::filesystem;
using namespace splan;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitCompute = 4;

EventLog load_log(const RunConfig& cfg) {
    std::ifstream in(cfg.input);
    if (!in) throw ConfigError("cannot open input file: " + cfg.input);
    Schema schema;
    schema.delimiter = cfg.delimiter;
    return parse_event_log(in, schema);
}

std::ofstream open_out(const fs::path& path) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path.string());
    return out;
}

struct TrainingData {
    FeatureMatrix matrix;          // rows aligned with cohort
    LabelledCohort cohort;
};

TrainingData prepare(const RunConfig& cfg, const EventLog& log) {
    auto traces = build_traces(log);
    auto cohort = select_cohort(traces, cfg.label_spec());

    std::map<std::string, const Trace*> by_id;
    for (const auto& t : traces) by_id[t.student_id] = &t;
    std::vector<StudyPath> paths;
    paths.reserve(cohort.student_ids.size());
    for (const auto& id : cohort.student_ids) paths.push_back(build_study_path(*by_id.at(id)));

    return {assemble_matrix(paths, cfg.selection()), std::move(cohort)};
}

DecisionTree train_tree(const TrainingData& td, const RunConfig& cfg) {
    return DecisionTree::fit(td.matrix.columns, td.matrix.values, td.cohort.classes, cfg.hp);
}

int cmd_ingest(const RunConfig& cfg) {
    auto log = load_log(cfg);
    auto traces = build_traces(log);
    std::cout << "events: " << log.size() << '\n'
              << "students: " << log.student_ids().size() << '\n'
              << "courses: " << log.course_ids().size() << '\n'
              << "traces: " << traces.size() << '\n';
    std::size_t with_gpa = 0;
    for (const auto& t : traces)
        if (compute_overall_gpa(t)) ++with_gpa;
    std::cout << "students with defined GPA: " << with_gpa << '\n';
    return 0;
}

int cmd_features(const RunConfig& cfg) {
    auto td = prepare(cfg, load_log(cfg));
    auto out = open_out(fs::path(cfg.out) / "matrix.csv");
    td.matrix.to_csv(out);
    auto lout = open_out(fs::path(cfg.out) / "labels.csv");
    td.cohort.to_csv(lout);
    std::cout << "wrote matrix.csv (" << td.matrix.row_ids.size() << " x "
              << td.matrix.columns.size() << ") and labels.csv\n";
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    auto td = prepare(cfg, load_log(cfg));
    auto tree = train_tree(td, cfg);
    auto jout = open_out(fs::path(cfg.out) / "tree.json");
    jout << tree.to_json().dump(2) << '\n';
    auto dout = open_out(fs::path(cfg.out) / "tree.dot");
    tree.to_dot(dout);
    std::cout << "wrote tree.json and tree.dot (" << tree.leaf_count() << " leaves)\n";
    return 0;
}

int cmd_rules(const RunConfig& cfg, const std::string& tree_file) {
    auto td = prepare(cfg, load_log(cfg));
    DecisionTree tree;
    if (!tree_file.empty()) {
        std::ifstream in(tree_file);
        if (!in) throw ConfigError("cannot open tree file: " + tree_file);
        tree = DecisionTree::from_json(nlohmann::json::parse(in));
    } else {
        tree = train_tree(td, cfg);
    }
    auto rs = rank(extract_rules(tree, td.matrix.values, td.cohort.classes,
                                 cfg.relevancy_measure));
    const auto n = cfg.top > 0 ? static_cast<std::size_t>(cfg.top) : rs.rules.size();

    auto tout = open_out(fs::path(cfg.out) / "rules.txt");
    for (std::size_t i = 0; i < std::min(n, rs.rules.size()); ++i)
        tout << i + 1 << ". " << render_rule(rs.rules[i]) << '\n';
    auto jout = open_out(fs::path(cfg.out) / "rules.jsonl");
    for (const auto& r : rs.rules) jout << rule_to_json(r).dump() << '\n';

    if (!cfg.plan.empty()) {
        std::ifstream pin(cfg.plan);
        if (!pin) throw ConfigError("cannot open plan file: " + cfg.plan);
        auto plan = parse_plan(pin);
        auto cout_file = open_out(fs::path(cfg.out) / "plan_comparison.txt");
        for (std::size_t i = 0; i < std::min(n, rs.rules.size()); ++i) {
            cout_file << i + 1 << ". " << render_rule(rs.rules[i]) << '\n';
            for (const auto& [cond, align] : compare_to_plan(rs.rules[i], plan))
                cout_file << "   " << cond.feature << (cond.less_equal ? " <= " : " > ")
                          << cond.threshold << ": " << to_string(align) << '\n';
        }
    }
    std::cout << "wrote rules.txt and rules.jsonl (" << rs.rules.size() << " rules)\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    auto td = prepare(cfg, load_log(cfg));
    auto report = cross_validate(td.matrix.columns, td.matrix.values, td.cohort.classes, cfg.hp,
                                 cfg.k, cfg.seed, cfg.stratified);
    auto tout = open_out(fs::path(cfg.out) / "report.txt");
    report.render_table(tout);
    auto cout_file = open_out(fs::path(cfg.out) / "report.csv");
    report.to_csv(cout_file);
    report.render_table(std::cout);
    return 0;
}

int cmd_export(const RunConfig& cfg, const std::string& student) {
    auto log = load_log(cfg);
    auto dfg = discover_dfg(log);
    auto dfg_out = open_out(fs::path(cfg.out) / "dfg.dot");
    to_dot(dfg, dfg_out);
    auto chart = open_out(fs::path(cfg.out) / "dotted_chart.csv");
    dotted_chart_export(log, chart);

    if (!student.empty()) {
        const Trace* found = nullptr;
        auto traces = build_traces(log);
        for (const auto& t : traces)
            if (t.student_id == student) found = &t;
        if (!found) throw ComputeError("unknown student: " + student);
        auto path = build_study_path(*found);
        for (auto [kind, tag] : {std::pair{IndexKind::Semester, "s"},
                                 std::pair{IndexKind::Order, "o"},
                                 std::pair{IndexKind::Distance, "d"}}) {
            auto out = open_out(fs::path(cfg.out) / ("po-" + student + "-" + tag + ".dot"));
            to_dot(build_partial_order(path, kind), out);
        }
        auto out = open_out(fs::path(cfg.out) / ("po-" + student + "-lifecycle.dot"));
        to_dot(build_lifecycle_partial_order(path), out);
    }
    std::cout << "wrote dfg.dot and dotted_chart.csv\n";
    return 0;
}

int cmd_synth(const CohortSpec& spec, const std::string& out_file) {
    auto log = generate(spec);
    auto out = open_out(out_file);
    serialize_event_log(log, out);
    std::cout << "wrote " << out_file << " (" << log.size() << " events, "
              << log.student_ids().size() << " students)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Study-planning rule miner: event logs -> features -> decision trees -> rules"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_file, tree_file, student, synth_out = "synth.csv";
    std::string plant;  // "course-1@1,course-2@2=>good:0.1"
    CohortSpec spec;
    std::string target;  // "course-x@4"

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_file, "key=value config file");
        sub->add_option("--input", cfg.input, "event log CSV");
        sub->add_option("--out", cfg.out, "output directory");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--k", cfg.k, "number of CV folds");
        sub->add_option("--max-depth", cfg.hp.max_depth, "maximum tree depth");
        sub->add_option("--min-samples-leaf", cfg.hp.min_samples_leaf, "min samples per leaf");
        sub->add_option("--min-samples-split", cfg.hp.min_samples_split, "min samples to split");
        sub->add_option("--features", cfg.features, "feature families, e.g. a-cs,a-co,na-df");
        sub->add_option("--label", cfg.label, "gpa2 | gpa4 | course:<id>:<sem>");
        sub->add_option("--plan", cfg.plan, "recommended plan CSV for rule comparison");
        sub->add_option("--top", cfg.top, "limit ranked rules written");
    };

    auto* ingest = app.add_subcommand("ingest", "parse and validate an event log");
    auto* features = app.add_subcommand("features", "write the feature matrix and labels");
    auto* train = app.add_subcommand("train", "train a decision tree");
    auto* rules = app.add_subcommand("rules", "extract and rank study planning rules");
    auto* evaluate = app.add_subcommand("evaluate", "k-fold cross-validation report");
    auto* exp = app.add_subcommand("export", "DFG / partial-order DOT and dotted-chart CSV");
    auto* synth = app.add_subcommand("synth", "generate a synthetic event log");
    for (auto* sub : {ingest, features, train, rules, evaluate, exp})
        add_common(sub);
    rules->add_option("--tree", tree_file, "reuse a serialized tree.json");
    exp->add_option("--student", student, "also export this student's partial orders");

    synth->add_option("--out", synth_out, "output CSV path");
    synth->add_option("--students", spec.n_students, "number of students");
    synth->add_option("--courses", spec.n_courses, "number of courses");
    synth->add_option("--span", spec.semesters_span, "semesters per student");
    synth->add_option("--fail-rate", spec.fail_rate, "per-attempt failure probability");
    synth->add_option("--gap-prob", spec.gap_probability, "per-semester gap probability");
    synth->add_option("--courses-per-student", spec.courses_per_student,
                      "mean courses taken per student (0: all)");
    synth->add_option("--seed", spec.seed, "generator seed");
    synth->add_option("--target", target, "labeled course, format course-id@semester");
    synth->add_option("--plant", plant,
                      "planted rule, format c1@s1,c2@s2=>good|bad:<noise>[:<placement-prob>]");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            if (!in) throw ConfigError("cannot open config file: " + config_file);
            RunConfig from_file = parse_run_config(in);
            // CLI flags override file values
            CLI::App* sub = app.get_subcommands().front();
            auto keep = [&](const char* flag) { return sub->count(flag) > 0; };
            RunConfig merged = from_file;
            if (keep("--input")) merged.input = cfg.input;
            if (keep("--out")) merged.out = cfg.out;
            if (keep("--seed")) merged.seed = cfg.seed;
            if (keep("--k")) merged.k = cfg.k;
            if (keep("--max-depth")) merged.hp.max_depth = cfg.hp.max_depth;
            if (keep("--min-samples-leaf")) merged.hp.min_samples_leaf = cfg.hp.min_samples_leaf;
            if (keep("--min-samples-split")) merged.hp.min_samples_split = cfg.hp.min_samples_split;
            if (keep("--features")) merged.features = cfg.features;
            if (keep("--label")) merged.label = cfg.label;
            if (keep("--plan")) merged.plan = cfg.plan;
            if (keep("--top")) merged.top = cfg.top;
            cfg = merged;
        }

        if (synth->parsed()) {
            if (!target.empty()) {
                auto at = target.rfind('@');
                if (at == std::string::npos) throw ConfigError("--target: expected course@semester");
                spec.target_course = {target.substr(0, at), std::stoi(target.substr(at + 1))};
            }
            if (!plant.empty()) {
                auto arrow = plant.find("=>");
                if (arrow == std::string::npos)
                    throw ConfigError("--plant: expected antecedent=>class:noise");
                PlantedRule rule;
                for (const auto& placement : split(plant.substr(0, arrow), ',')) {
                    auto at = placement.rfind('@');
                    if (at == std::string::npos)
                        throw ConfigError("--plant: expected course@semester placements");
                    rule.antecedent.emplace_back(placement.substr(0, at),
                                                 std::stoi(placement.substr(at + 1)));
                }
                auto rest = split(plant.substr(arrow + 2), ':');
                rule.consequent_good = rest.at(0) == "good";
                if (rest.size() > 1) rule.noise_rate = std::stod(rest[1]);
                if (rest.size() > 2) rule.placement_prob = std::stod(rest[2]);
                spec.planted.push_back(std::move(rule));
            }
            return cmd_synth(spec, synth_out);
        }
        if (cfg.input.empty()) throw ConfigError("--input (or config input=) is required");
        if (ingest->parsed()) return cmd_ingest(cfg);
        if (features->parsed()) return cmd_features(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (rules->parsed()) return cmd_rules(cfg, tree_file);
        if (evaluate->parsed()) return cmd_evaluate(cfg);
        if (exp->parsed()) return cmd_export(cfg, student);
        throw ConfigError("no subcommand");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SchemaError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const RowError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCompute;
    }
}
