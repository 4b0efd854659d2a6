#include "uavplan/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace uavplan {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kRunSchema = "uavplan.run.v1";
constexpr const char* kTimingsSchema = "uavplan.timings.v1";
constexpr const char* kStudySchema = "uavplan.study.v1";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void RunConfig::validate() const {
    if (repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
    if (waypoints_per_leg < 1) throw std::invalid_argument("config: need at least one waypoint per leg");
    if (snapshot_stride < 1) throw std::invalid_argument("config: snapshot stride must be >= 1");
    if (validate_step <= 0.0) throw std::invalid_argument("config: validation step must be positive");
    moea.validate();
    pso.validate();
}

std::string strategy_name(Strategy s) {
    return s == Strategy::CoverageMax ? "cwms" : "tems";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "cwms") return Strategy::CoverageMax;
    if (name == "tems") return Strategy::TimeEfficiencyMax;
    throw std::invalid_argument("unknown strategy: " + name + " (expected cwms or tems)");
}

namespace {

template <typename Fn>
auto timed_stage(RunResult& result, const std::string& stage, Fn&& fn) {
    const auto start = Clock::now();
    try {
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            result.timings.push_back({stage, seconds_since(start)});
        } else {
            auto value = fn();
            result.timings.push_back({stage, seconds_since(start)});
            return value;
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

}  // namespace

RunResult run_pipeline(const RunConfig& config) {
    config.validate();
    const auto total_start = Clock::now();
    RunResult result;
    result.seed = config.seed;
    result.strategy = config.strategy;
    result.waypoints_per_leg = config.waypoints_per_leg;
    result.moea = config.moea;
    result.moea.seed = config.seed;
    result.pso = config.pso;
    result.pso.seed = config.seed;
    result.validate_step = config.validate_step;

    result.scenario = timed_stage(result, "scenario", [&] {
        if (config.scenario_path) return load_scenario(*config.scenario_path);
        return generate_scenario(config.generation);
    });

    EvolveResult evolved = timed_stage(result, "upaop", [&] { return evolve(result.scenario, result.moea); });
    result.upaop_best_f1_trace = std::move(evolved.best_f1_trace);
    result.upaop_best_f2_trace = std::move(evolved.best_f2_trace);
    for (std::size_t g = 0; g < evolved.front_snapshots.size(); ++g) {
        const bool last = g + 1 == evolved.front_snapshots.size();
        if (g % static_cast<std::size_t>(config.snapshot_stride) == 0 || last)
            result.front_snapshots.push_back(evolved.front_snapshots[g]);
    }

    timed_stage(result, "select", [&] {
        const Individual& pick = select_solution(evolved.front, config.strategy);
        result.plan = pick.genome;
        const PlanEvaluation pe = evaluate_plan(result.plan, result.scenario, result.moea.objective);
        result.plan_eval = pe.eval;
        result.plan_objectives = pe.objectives;
        result.final_front.reserve(evolved.front.size());
        for (const Individual& ind : evolved.front) result.final_front.push_back({ind.f1(), ind.f2()});
    });

    PsoResult traj = timed_stage(result, "uttop", [&] {
        return run_psongdp(result.plan.points, result.scenario, result.pso, config.waypoints_per_leg);
    });
    result.trajectory = std::move(traj.best);
    result.f3 = traj.f3;
    result.uttop_trace = std::move(traj.trace);

    timed_stage(result, "validate", [&] {
        const TrajectoryValidation v = validate_trajectory(result.trajectory, result.plan.points,
                                                           result.scenario.obstacles, config.validate_step);
        if (!v.ok) throw std::runtime_error("trajectory failed validation: " + v.report);
        const FeasibilityResult feas = feasibility(result.plan, result.scenario);
        if (!feas.feasible)
            throw std::runtime_error("selected plan infeasible (violation " +
                                     std::to_string(feas.violation) + ")");
    });

    timed_stage(result, "energy", [&] {
        result.cruise_speed = result.scenario.physics.uav.cruise_speed;
        const std::vector<Vec3> tour = closed_tour(result.plan.points, result.trajectory.waypoints);
        result.flight_energy_j = flight_energy(tour, result.scenario.physics.uav);
    });

    result.total_seconds = seconds_since(total_start);
    return result;
}

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json plan_to_json(const HoverPlan& plan) {
    json points = json::array();
    for (const Vec3& q : plan.points) points.push_back(vec3_to_json(q));
    return json{{"points", points},
                {"charge_powers_w", plan.charge_powers},
                {"device_powers_w", plan.device_powers}};
}

HoverPlan plan_from_json(const json& j) {
    HoverPlan plan;
    for (const json& q : j.at("points")) plan.points.push_back(vec3_from_json(q));
    plan.charge_powers = j.at("charge_powers_w").get<std::vector<double>>();
    plan.device_powers = j.at("device_powers_w").get<std::vector<double>>();
    return plan;
}

json genome_to_json(const TrajectoryGenome& g) {
    json waypoints = json::array();
    for (const auto& leg : g.waypoints) {
        json row = json::array();
        for (const Vec3& w : leg) row.push_back(vec3_to_json(w));
        waypoints.push_back(row);
    }
    json velocities = json::array();
    for (const auto& leg : g.velocities) {
        json row = json::array();
        for (const Vec3& v : leg) row.push_back(vec3_to_json(v));
        velocities.push_back(row);
    }
    return json{{"waypoints", waypoints}, {"velocities", velocities}};
}

TrajectoryGenome genome_from_json(const json& j) {
    TrajectoryGenome g;
    for (const json& leg : j.at("waypoints")) {
        std::vector<Vec3> row;
        for (const json& w : leg) row.push_back(vec3_from_json(w));
        g.waypoints.push_back(std::move(row));
    }
    for (const json& leg : j.at("velocities")) {
        std::vector<Vec3> row;
        for (const json& v : leg) row.push_back(vec3_from_json(v));
        g.velocities.push_back(std::move(row));
    }
    return g;
}

json eval_to_json(const HoverEvaluation& ev) {
    json sets = json::array();
    for (const auto& s : ev.covered_sets) sets.push_back(s);
    return json{{"f1", ev.covered_count},
                {"f2", ev.f2},
                {"feasible", ev.feasible},
                {"violation", ev.violation},
                {"empty_point_count", ev.empty_point_count},
                {"charge_times_s", ev.charge_times},
                {"collect_times_s", ev.collect_times},
                {"hover_times_s", ev.hover_times},
                {"time_diffs_s", ev.time_diffs},
                {"covered_sets", sets}};
}

HoverEvaluation eval_from_json(const json& j) {
    HoverEvaluation ev;
    ev.covered_count = j.at("f1").get<int>();
    ev.f2 = j.at("f2").get<double>();
    ev.feasible = j.at("feasible").get<bool>();
    ev.violation = j.at("violation").get<double>();
    ev.empty_point_count = j.at("empty_point_count").get<int>();
    ev.charge_times = j.at("charge_times_s").get<std::vector<double>>();
    ev.collect_times = j.at("collect_times_s").get<std::vector<double>>();
    ev.hover_times = j.at("hover_times_s").get<std::vector<double>>();
    ev.time_diffs = j.at("time_diffs_s").get<std::vector<double>>();
    for (const json& s : j.at("covered_sets")) ev.covered_sets.push_back(s.get<std::vector<int>>());
    return ev;
}

json moea_to_json(const MoeaConfig& c) {
    return json{{"population_size", c.population_size},
                {"max_generations", c.max_generations},
                {"hover_count", c.hover_count},
                {"crossover_prob", c.crossover_prob},
                {"crossover_eta", c.crossover_eta},
                {"mutation_prob", c.mutation_prob},
                {"mutation_eta", c.mutation_eta},
                {"penalty_time_s", c.objective.penalty_time},
                {"hover_weight", c.objective.hover_weight},
                {"diff_weight", c.objective.diff_weight},
                {"altitude_margin_m", c.altitude_margin},
                {"kmeans_max_iters", c.kmeans_max_iters},
                {"kmeans_init", c.kmeans_init},
                {"seed", c.seed}};
}

MoeaConfig moea_from_json(const json& j) {
    MoeaConfig c;
    c.population_size = j.at("population_size").get<int>();
    c.max_generations = j.at("max_generations").get<int>();
    c.hover_count = j.at("hover_count").get<int>();
    c.crossover_prob = j.at("crossover_prob").get<double>();
    c.crossover_eta = j.at("crossover_eta").get<double>();
    c.mutation_prob = j.at("mutation_prob").get<double>();
    c.mutation_eta = j.at("mutation_eta").get<double>();
    c.objective.penalty_time = j.at("penalty_time_s").get<double>();
    c.objective.hover_weight = j.at("hover_weight").get<double>();
    c.objective.diff_weight = j.at("diff_weight").get<double>();
    c.altitude_margin = j.at("altitude_margin_m").get<double>();
    c.kmeans_max_iters = j.at("kmeans_max_iters").get<int>();
    c.kmeans_init = j.at("kmeans_init").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

json pso_to_json(const PsoConfig& c) {
    return json{{"population_size", c.population_size},
                {"max_iterations", c.max_iterations},
                {"inertia", c.inertia},
                {"cognitive", c.cognitive},
                {"social", c.social},
                {"crossover_prob", c.crossover_prob},
                {"differential_weight", c.differential_weight},
                {"init_spread_divisor", c.init_spread_divisor},
                {"altitude_step_m", c.altitude_step},
                {"velocity_start_m", c.velocity_start},
                {"velocity_end_m", c.velocity_end},
                {"clearance_ratio", c.clearance_ratio},
                {"seed", c.seed}};
}

PsoConfig pso_from_json(const json& j) {
    PsoConfig c;
    c.population_size = j.at("population_size").get<int>();
    c.max_iterations = j.at("max_iterations").get<int>();
    c.inertia = j.at("inertia").get<double>();
    c.cognitive = j.at("cognitive").get<double>();
    c.social = j.at("social").get<double>();
    c.crossover_prob = j.at("crossover_prob").get<double>();
    c.differential_weight = j.at("differential_weight").get<double>();
    c.init_spread_divisor = j.at("init_spread_divisor").get<double>();
    c.altitude_step = j.at("altitude_step_m").get<double>();
    c.velocity_start = j.at("velocity_start_m").get<double>();
    c.velocity_end = j.at("velocity_end_m").get<double>();
    c.clearance_ratio = j.at("clearance_ratio").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

// Inline copy of the scenario schema so a run file is self-contained.
json scenario_to_json_blob(const Scenario& s) { return json::parse(scenario_to_string(s)); }

Scenario scenario_from_json_blob(const json& j) { return scenario_from_string(j.dump(2), "run file"); }

}  // namespace

std::filesystem::path save_run_result(const RunResult& result, const std::filesystem::path& directory,
                                      const std::string& stem) {
    std::filesystem::create_directories(directory);
    json j;
    j["schema_version"] = kRunSchema;
    j["seed"] = result.seed;
    j["strategy"] = strategy_name(result.strategy);
    j["waypoints_per_leg"] = result.waypoints_per_leg;
    j["validate_step_m"] = result.validate_step;
    j["moea"] = moea_to_json(result.moea);
    j["pso"] = pso_to_json(result.pso);
    j["scenario"] = scenario_to_json_blob(result.scenario);
    j["plan"] = plan_to_json(result.plan);
    j["plan_evaluation"] = eval_to_json(result.plan_eval);
    json front = json::array();
    for (const auto& row : result.final_front) front.push_back(json::array({row[0], row[1]}));
    j["final_front"] = front;
    json snapshots = json::array();
    for (const auto& snap : result.front_snapshots) {
        json rows = json::array();
        for (const auto& row : snap) rows.push_back(json::array({row[0], row[1]}));
        snapshots.push_back(rows);
    }
    j["front_snapshots"] = snapshots;
    j["upaop_best_f1_trace"] = result.upaop_best_f1_trace;
    j["upaop_best_f2_trace"] = result.upaop_best_f2_trace;
    j["trajectory"] = genome_to_json(result.trajectory);
    j["f3_m"] = result.f3;
    j["uttop_trace_m"] = result.uttop_trace;
    j["flight_energy_j"] = result.flight_energy_j;
    j["cruise_speed_ms"] = result.cruise_speed;
    json comparisons = json::array();
    for (const SolverRecord& rec : result.comparisons) {
        json row{{"solver", rec.solver}};
        if (rec.f1) row["f1"] = *rec.f1;
        if (rec.f2) row["f2"] = *rec.f2;
        if (rec.f3) row["f3"] = *rec.f3;
        comparisons.push_back(row);
    }
    j["comparisons"] = comparisons;

    const std::filesystem::path main_path = directory / (stem + ".json");
    {
        std::ofstream out(main_path);
        if (!out) throw std::runtime_error("save_run_result: cannot open " + main_path.string());
        out << j.dump(2) << '\n';
    }

    // Wall-clock data lives beside the deterministic payload.
    json t;
    t["schema_version"] = kTimingsSchema;
    json stages = json::array();
    for (const StageTiming& st : result.timings)
        stages.push_back(json{{"stage", st.stage}, {"seconds", st.seconds}});
    t["stages"] = stages;
    t["total_seconds"] = result.total_seconds;
    {
        std::ofstream out(directory / (stem + ".timings.json"));
        out << t.dump(2) << '\n';
    }
    return main_path;
}

RunResult load_run_result(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_run_result: cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("load_run_result: parse error in " + path.string() + ": " + e.what());
    }
    try {
        const std::string schema = j.at("schema_version").get<std::string>();
        if (schema != kRunSchema)
            throw std::runtime_error("schema mismatch: expected " + std::string(kRunSchema) + ", found " +
                                     schema);
        RunResult r;
        r.seed = j.at("seed").get<std::uint64_t>();
        r.strategy = strategy_from_name(j.at("strategy").get<std::string>());
        r.waypoints_per_leg = j.at("waypoints_per_leg").get<int>();
        r.validate_step = j.at("validate_step_m").get<double>();
        r.moea = moea_from_json(j.at("moea"));
        r.pso = pso_from_json(j.at("pso"));
        r.scenario = scenario_from_json_blob(j.at("scenario"));
        r.plan = plan_from_json(j.at("plan"));
        r.plan_eval = eval_from_json(j.at("plan_evaluation"));
        for (const json& row : j.at("final_front"))
            r.final_front.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
        for (const json& snap : j.at("front_snapshots")) {
            std::vector<std::array<double, 2>> rows;
            for (const json& row : snap) rows.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
            r.front_snapshots.push_back(std::move(rows));
        }
        r.upaop_best_f1_trace = j.at("upaop_best_f1_trace").get<std::vector<double>>();
        r.upaop_best_f2_trace = j.at("upaop_best_f2_trace").get<std::vector<double>>();
        r.trajectory = genome_from_json(j.at("trajectory"));
        r.f3 = j.at("f3_m").get<double>();
        r.uttop_trace = j.at("uttop_trace_m").get<std::vector<double>>();
        r.flight_energy_j = j.at("flight_energy_j").get<double>();
        r.cruise_speed = j.at("cruise_speed_ms").get<double>();
        for (const json& row : j.at("comparisons")) {
            SolverRecord rec;
            rec.solver = row.at("solver").get<std::string>();
            if (row.contains("f1")) rec.f1 = row.at("f1").get<double>();
            if (row.contains("f2")) rec.f2 = row.at("f2").get<double>();
            if (row.contains("f3")) rec.f3 = row.at("f3").get<double>();
            r.comparisons.push_back(std::move(rec));
        }
        const PlanEvaluation pe = evaluate_plan(r.plan, r.scenario, r.moea.objective);
        r.plan_objectives = pe.objectives;
        return r;
    } catch (const json::exception& e) {
        throw std::runtime_error("load_run_result: malformed field in " + path.string() + ": " + e.what());
    }
}

void save_hover_plan(const HoverPlan& plan, const std::filesystem::path& path) {
    json j;
    j["schema_version"] = "uavplan.plan.v1";
    j["plan"] = plan_to_json(plan);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_hover_plan: cannot open " + path.string());
    out << j.dump(2) << '\n';
}

HoverPlan load_hover_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_hover_plan: cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("load_hover_plan: parse error in " + path.string() + ": " + e.what());
    }
    try {
        if (j.at("schema_version").get<std::string>() != "uavplan.plan.v1")
            throw std::runtime_error("load_hover_plan: schema mismatch in " + path.string());
        return plan_from_json(j.at("plan"));
    } catch (const json::exception& e) {
        throw std::runtime_error("load_hover_plan: malformed field in " + path.string() + ": " + e.what());
    }
}

void revalidate_run_result(const RunResult& result) {
    const FeasibilityResult feas = feasibility(result.plan, result.scenario);
    if (!feas.feasible)
        throw std::runtime_error("revalidate: plan infeasible (violation " +
                                 std::to_string(feas.violation) + ")");
    const TrajectoryValidation v = validate_trajectory(result.trajectory, result.plan.points,
                                                       result.scenario.obstacles, result.validate_step);
    if (!v.ok) throw std::runtime_error("revalidate: trajectory collision: " + v.report);
}

namespace {

void accumulate_stats(std::vector<StatRow>& rows, const std::string& solver, const std::string& metric,
                      const std::vector<double>& values) {
    if (values.empty()) return;
    StatRow row;
    row.solver = solver;
    row.metric = metric;
    double sum = 0.0;
    row.min = values.front();
    row.max = values.front();
    for (double v : values) {
        sum += v;
        row.min = std::min(row.min, v);
        row.max = std::max(row.max, v);
    }
    row.mean = sum / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - row.mean) * (v - row.mean);
    row.stddev = std::sqrt(var / static_cast<double>(values.size()));
    rows.push_back(row);
}

std::vector<StatRow> stats_from_records(const std::vector<std::vector<SolverRecord>>& per_run) {
    // Fixed solver and metric order keeps output diffable.
    const std::vector<std::string> solvers = {"nsga2kv", "nsga2",      "us",         "rs",
                                              "kmeans",  "pso_ngdp",   "vanilla_pso"};
    const std::vector<std::string> metrics = {"f1", "f2", "f3"};
    std::vector<StatRow> rows;
    for (const std::string& solver : solvers) {
        for (const std::string& metric : metrics) {
            std::vector<double> values;
            for (const auto& records : per_run) {
                for (const SolverRecord& rec : records) {
                    if (rec.solver != solver) continue;
                    const std::optional<double>& v =
                        metric == "f1" ? rec.f1 : (metric == "f2" ? rec.f2 : rec.f3);
                    if (v) values.push_back(*v);
                }
            }
            accumulate_stats(rows, solver, metric, values);
        }
    }
    return rows;
}

}  // namespace

StudyResult run_study(const RunConfig& config) {
    config.validate();
    StudyResult study;
    study.repetitions = config.repetitions;
    study.base_seed = config.seed;

    for (int rep = 0; rep < config.repetitions; ++rep) {
        RunConfig rep_config = config;
        rep_config.seed = config.seed + static_cast<std::uint64_t>(rep);
        RunResult result = run_pipeline(rep_config);

        std::vector<SolverRecord> records;
        records.push_back({"nsga2kv", result.plan_eval.covered_count * 1.0, result.plan_eval.f2, std::nullopt});
        records.push_back({"pso_ngdp", std::nullopt, std::nullopt, result.f3});

        // Plain NSGA-II toggle: identical budget, random initialization.
        MoeaConfig plain = rep_config.moea;
        plain.kmeans_init = false;
        const EvolveResult plain_front = evolve(result.scenario, plain);
        const Individual& plain_pick = select_solution(plain_front.front, config.strategy);
        records.push_back({"nsga2", plain_pick.f1(), plain_pick.f2(), std::nullopt});

        const ObjectiveParams& params = rep_config.moea.objective;
        auto record_plan = [&](const std::string& name, const HoverPlan& plan) {
            const PlanEvaluation pe = evaluate_plan(plan, result.scenario, params);
            records.push_back({name, pe.eval.covered_count * 1.0, pe.eval.f2, std::nullopt});
        };
        record_plan("us", baseline_us(result.scenario, rep_config.moea.hover_count));
        record_plan("rs", baseline_rs(result.scenario, rep_config.moea.hover_count, rep_config.seed));
        record_plan("kmeans", baseline_kmeans(result.scenario, rep_config.moea.hover_count, rep_config.seed));

        const PsoResult vanilla =
            run_vanilla_pso(result.plan.points, result.scenario, result.pso, config.waypoints_per_leg);
        records.push_back({"vanilla_pso", std::nullopt, std::nullopt, vanilla.f3});

        result.comparisons = records;
        study.runs.push_back(std::move(result));
    }

    std::vector<std::vector<SolverRecord>> per_run;
    for (const RunResult& r : study.runs) per_run.push_back(r.comparisons);
    study.stats = stats_from_records(per_run);
    return study;
}

std::filesystem::path save_study(const StudyResult& study, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    std::vector<std::filesystem::path> run_files;
    for (std::size_t i = 0; i < study.runs.size(); ++i) {
        char stem[32];
        std::snprintf(stem, sizeof(stem), "run_%03zu", i);
        run_files.push_back(save_run_result(study.runs[i], directory, stem));
    }

    json j;
    j["schema_version"] = kStudySchema;
    j["repetitions"] = study.repetitions;
    j["base_seed"] = study.base_seed;
    json stats = json::array();
    for (const StatRow& row : study.stats) {
        stats.push_back(json{{"solver", row.solver},
                             {"metric", row.metric},
                             {"mean", row.mean},
                             {"std", row.stddev},
                             {"min", row.min},
                             {"max", row.max}});
    }
    j["stats"] = stats;
    json files = json::array();
    for (const auto& f : run_files) files.push_back(f.filename().string());
    j["run_files"] = files;
    const std::filesystem::path path = directory / "study.json";
    {
        std::ofstream out(path);
        out << j.dump(2) << '\n';
    }

    // Fixed-column CSV mirror of the stats table.
    std::ofstream csv(directory / "study.csv");
    csv << "solver,metric,mean,std,min,max\n";
    char line[256];
    for (const StatRow& row : study.stats) {
        std::snprintf(line, sizeof(line), "%s,%s,%.17g,%.17g,%.17g,%.17g\n", row.solver.c_str(),
                      row.metric.c_str(), row.mean, row.stddev, row.min, row.max);
        csv << line;
    }
    return path;
}

std::vector<StatRow> stats_from_run_files(const std::vector<std::filesystem::path>& files) {
    std::vector<std::vector<SolverRecord>> per_run;
    for (const auto& f : files) per_run.push_back(load_run_result(f).comparisons);
    return stats_from_records(per_run);
}

namespace {

// All plot emission goes through snprintf with %.17g so re-emission is
// byte-identical for identical inputs.
class TableWriter {
  public:
    TableWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("emit_plots: cannot open " + path.string());
        out_ << "# uavplan.plot.v1\n" << header << '\n';
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            if (!first) out_ << '\t';
            out_ << buf;
            first = false;
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

}  // namespace

std::vector<std::filesystem::path> emit_plots(const RunResult& result, const std::filesystem::path& directory,
                                              bool render_svg) {
    std::filesystem::create_directories(directory);
    std::vector<std::filesystem::path> written;
    auto add = [&](const std::filesystem::path& p) {
        written.push_back(p);
        return p;
    };

    {
        TableWriter t(add(directory / "front.tsv"), "f1\tf2");
        for (const auto& row : result.final_front) t.row({row[0], row[1]});
    }
    {
        TableWriter t(add(directory / "front_by_generation.tsv"), "generation\tf1\tf2");
        for (std::size_t g = 0; g < result.front_snapshots.size(); ++g) {
            for (const auto& row : result.front_snapshots[g])
                t.row({static_cast<double>(g), row[0], row[1]});
        }
    }
    {
        TableWriter t(add(directory / "convergence_upaop.tsv"), "generation\tbest_f1\tbest_f2");
        for (std::size_t g = 0; g < result.upaop_best_f1_trace.size(); ++g)
            t.row({static_cast<double>(g), result.upaop_best_f1_trace[g], result.upaop_best_f2_trace[g]});
    }
    {
        TableWriter t(add(directory / "convergence_uttop.tsv"), "iteration\tbest_f3");
        for (std::size_t i = 0; i < result.uttop_trace.size(); ++i)
            t.row({static_cast<double>(i), result.uttop_trace[i]});
    }
    {
        // Device coverage map: flag + assigned hover point per device.
        std::vector<int> assigned(result.scenario.devices.size(), -1);
        for (std::size_t j = 0; j < result.plan_eval.covered_sets.size(); ++j)
            for (int idx : result.plan_eval.covered_sets[j]) assigned[static_cast<std::size_t>(idx)] = static_cast<int>(j);
        TableWriter t(add(directory / "coverage_map.tsv"), "x\ty\tcovered\thover_index");
        for (std::size_t i = 0; i < result.scenario.devices.size(); ++i) {
            const WirelessDevice& d = result.scenario.devices[i];
            t.row({d.x, d.y, assigned[i] >= 0 ? 1.0 : 0.0, static_cast<double>(assigned[i])});
        }
    }
    {
        TableWriter t(add(directory / "hover_points.tsv"), "index\tx\ty\tz\tcharge_power_w");
        for (std::size_t j = 0; j < result.plan.points.size(); ++j) {
            const Vec3& q = result.plan.points[j];
            t.row({static_cast<double>(j), q.x, q.y, q.z, result.plan.charge_powers[j]});
        }
    }
    {
        // Terrain sample grid for contour plots.
        constexpr int kGrid = 101;
        const WorldBounds& b = result.scenario.bounds;
        TableWriter t(add(directory / "obstacle_grid.tsv"), "x\ty\theight");
        for (int i = 0; i < kGrid; ++i) {
            const double x = b.x_min + b.width() * i / (kGrid - 1);
            for (int jj = 0; jj < kGrid; ++jj) {
                const double y = b.y_min + b.depth() * jj / (kGrid - 1);
                t.row({x, y, obstacle_height(result.scenario.obstacles, x, y)});
            }
        }
    }
    {
        const std::vector<Vec3> tour = closed_tour(result.plan.points, result.trajectory.waypoints);
        TableWriter t(add(directory / "trajectory.tsv"), "index\tx\ty\tz");
        for (std::size_t i = 0; i < tour.size(); ++i)
            t.row({static_cast<double>(i), tour[i].x, tour[i].y, tour[i].z});
    }

    if (render_svg) {
        const WorldBounds& b = result.scenario.bounds;
        const double scale = 600.0 / std::max(b.width(), b.depth());
        auto sx = [&](double x) { return (x - b.x_min) * scale; };
        auto sy = [&](double y) { return (b.y_max - y) * scale; };  // y up

        std::ofstream svg(add(directory / "overview.svg"));
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "<svg xmlns='http://www.w3.org/2000/svg' width='%d' height='%d' "
                      "viewBox='0 0 %.1f %.1f'>\n",
                      600, 600, b.width() * scale, b.depth() * scale);
        svg << buf;
        for (const Obstacle& ob : result.scenario.obstacles) {
            std::snprintf(buf, sizeof(buf),
                          "<ellipse cx='%.1f' cy='%.1f' rx='%.1f' ry='%.1f' fill='#bbbbbb' "
                          "fill-opacity='0.6'/>\n",
                          sx(ob.center_x), sy(ob.center_y), ob.slope_x * scale, ob.slope_y * scale);
            svg << buf;
        }
        for (const WirelessDevice& d : result.scenario.devices) {
            std::snprintf(buf, sizeof(buf), "<circle cx='%.1f' cy='%.1f' r='1.2' fill='#2060c0'/>\n",
                          sx(d.x), sy(d.y));
            svg << buf;
        }
        for (const Vec3& q : result.plan.points) {
            std::snprintf(buf, sizeof(buf),
                          "<circle cx='%.1f' cy='%.1f' r='%.1f' fill='none' stroke='#c03020'/>\n",
                          sx(q.x), sy(q.y), b.d_max * scale);
            svg << buf;
        }
        const std::vector<Vec3> tour = closed_tour(result.plan.points, result.trajectory.waypoints);
        svg << "<polyline fill='none' stroke='#108040' stroke-width='1.5' points='";
        for (const Vec3& p : tour) {
            std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", sx(p.x), sy(p.y));
            svg << buf;
        }
        svg << "'/>\n</svg>\n";
    }
    return written;
}

}  // namespace uavplan
