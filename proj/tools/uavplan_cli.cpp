#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uavplan/harness.hpp"

namespace {

using namespace uavplan;

struct CliOptions {
    RunConfig run;
    std::string scenario_path;
    std::string plan_path;
    std::string run_path;
    std::string out_path;
    std::string strategy = "cwms";
    std::vector<std::string> obstacle_specs;
    int device_count = 500;
    bool no_obstacles = false;
    bool plain_init = false;
    bool svg = false;
};

void add_common_solver_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--np", opt.run.moea.population_size, "Solver population size (both stages)");
    cmd->add_option("--generations", opt.run.moea.max_generations, "Iteration budget (both stages)");
    cmd->add_option("--hover-points,-M", opt.run.moea.hover_count, "Number of hover points");
    cmd->add_option("--waypoints,-K", opt.run.waypoints_per_leg, "Waypoints per tour leg");
    cmd->add_option("--seed", opt.run.seed, "Base RNG seed");
    cmd->add_option("--strategy", opt.strategy, "Front pick rule: cwms or tems");
    cmd->add_option("--penalty", opt.run.moea.objective.penalty_time, "Empty hover point penalty (s)");
    cmd->add_option("--crossover-prob", opt.run.moea.crossover_prob, "Genetic crossover probability");
    cmd->add_option("--mutation-prob", opt.run.moea.mutation_prob,
                    "Mutation probability (negative -> 1/genome length)");
    cmd->add_flag("--plain-init", opt.plain_init,
                  "Disable clustering initialization (plain random start)");
    cmd->add_option("--inertia", opt.run.pso.inertia, "Swarm inertia weight");
    cmd->add_option("--c1", opt.run.pso.cognitive, "Cognitive learning factor");
    cmd->add_option("--c2", opt.run.pso.social, "Social learning factor");
    cmd->add_option("--r-cro", opt.run.pso.crossover_prob, "Waypoint exchange probability");
    cmd->add_option("--f0", opt.run.pso.differential_weight, "Differential weight");
    cmd->add_option("--c3", opt.run.pso.init_spread_divisor, "Init spread divisor");
    cmd->add_option("--c4", opt.run.pso.altitude_step, "Escape altitude step (m)");
    cmd->add_option("--v1", opt.run.pso.velocity_start, "Initial velocity bound (m)");
    cmd->add_option("--v2", opt.run.pso.velocity_end, "Final velocity bound (m)");
    cmd->add_option("--clearance-ratio", opt.run.pso.clearance_ratio,
                    "Relative waypoint clearance over terrain");
    cmd->add_option("--validate-step", opt.run.validate_step, "Collision sampling spacing (m)");
    cmd->add_option("--out,-o", opt.out_path, "Output directory");
}

void finalize_config(CliOptions& opt) {
    opt.run.strategy = strategy_from_name(opt.strategy);
    if (opt.plain_init) opt.run.moea.kmeans_init = false;
    opt.run.pso.population_size = opt.run.moea.population_size;
    opt.run.pso.max_iterations = opt.run.moea.max_generations;
    if (!opt.scenario_path.empty()) opt.run.scenario_path = opt.scenario_path;
    if (!opt.out_path.empty()) opt.run.output_dir = opt.out_path;
    if (const char* env = std::getenv("UAVPLAN_OUTPUT_DIR")) opt.run.output_dir = env;

    opt.run.generation.device_count = opt.device_count;
    if (opt.no_obstacles) opt.run.generation.obstacles.clear();
    if (!opt.obstacle_specs.empty()) {
        opt.run.generation.obstacles.clear();
        for (const std::string& spec : opt.obstacle_specs) {
            Obstacle ob;
            if (std::sscanf(spec.c_str(), "%lf,%lf,%lf,%lf,%lf", &ob.center_x, &ob.center_y, &ob.height,
                            &ob.slope_x, &ob.slope_y) != 5)
                throw CLI::ValidationError("--obstacle needs cx,cy,height,slope_x,slope_y");
            opt.run.generation.obstacles.push_back(ob);
        }
    }
    opt.run.generation.seed = opt.run.seed;
}

Scenario resolve_scenario(const CliOptions& opt) {
    if (opt.run.scenario_path) return load_scenario(*opt.run.scenario_path);
    return generate_scenario(opt.run.generation);
}

int run_generate(CliOptions& opt) {
    const Scenario s = generate_scenario(opt.run.generation);
    const std::filesystem::path path =
        opt.out_path.empty() ? std::filesystem::path("scenario.json") : std::filesystem::path(opt.out_path);
    save_scenario(s, path);
    std::printf("wrote %s (%zu devices, %zu obstacles, seed %llu)\n", path.c_str(), s.devices.size(),
                s.obstacles.size(), static_cast<unsigned long long>(s.rng_seed));
    return 0;
}

int run_upaop_cmd(CliOptions& opt) {
    const Scenario scenario = resolve_scenario(opt);
    MoeaConfig moea = opt.run.moea;
    moea.seed = opt.run.seed;
    const EvolveResult evolved = evolve(scenario, moea);
    const Individual& pick = select_solution(evolved.front, opt.run.strategy);

    std::filesystem::create_directories(opt.run.output_dir);
    const std::filesystem::path front_path = opt.run.output_dir / "upaop_front.tsv";
    {
        std::ofstream out(front_path);
        out << "# uavplan.plot.v1\nf1\tf2\n";
        char buf[80];
        for (const Individual& ind : evolved.front) {
            std::snprintf(buf, sizeof(buf), "%.17g\t%.17g\n", ind.f1(), ind.f2());
            out << buf;
        }
    }
    const std::filesystem::path plan_path = opt.run.output_dir / "plan.json";
    save_hover_plan(pick.genome, plan_path);
    std::printf("upaop: front size %zu, picked f1=%.0f f2=%.3f -> %s\n", evolved.front.size(), pick.f1(),
                pick.f2(), plan_path.c_str());
    return 0;
}

int run_uttop_cmd(CliOptions& opt) {
    const Scenario scenario = resolve_scenario(opt);
    if (opt.plan_path.empty()) throw CLI::ValidationError("uttop needs --plan from a upaop run");
    const HoverPlan plan = load_hover_plan(opt.plan_path);
    PsoConfig pso = opt.run.pso;
    pso.seed = opt.run.seed;
    const PsoResult res = run_psongdp(plan.points, scenario, pso, opt.run.waypoints_per_leg);
    const TrajectoryValidation v =
        validate_trajectory(res.best, plan.points, scenario.obstacles, opt.run.validate_step);
    if (!v.ok) {
        std::fprintf(stderr, "error [stage:validate] %s\n", v.report.c_str());
        return 1;
    }
    std::filesystem::create_directories(opt.run.output_dir);
    const std::vector<Vec3> tour = closed_tour(plan.points, res.best.waypoints);
    const std::filesystem::path traj_path = opt.run.output_dir / "trajectory.tsv";
    {
        std::ofstream out(traj_path);
        out << "# uavplan.plot.v1\nindex\tx\ty\tz\n";
        char buf[120];
        for (std::size_t i = 0; i < tour.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%zu\t%.17g\t%.17g\t%.17g\n", i, tour[i].x, tour[i].y, tour[i].z);
            out << buf;
        }
    }
    std::printf("uttop: f3=%.3f m, energy=%.1f J -> %s\n", res.f3,
                flight_energy(tour, scenario.physics.uav), traj_path.c_str());
    return 0;
}

int run_pipeline_cmd(CliOptions& opt) {
    const RunResult result = run_pipeline(opt.run);
    const std::filesystem::path path = save_run_result(result, opt.run.output_dir);
    std::printf("pipeline: f1=%d f2=%.3f f3=%.3f energy=%.1f J (%.2fs) -> %s\n",
                result.plan_eval.covered_count, result.plan_eval.f2, result.f3, result.flight_energy_j,
                result.total_seconds, path.c_str());
    return 0;
}

int run_study_cmd(CliOptions& opt) {
    const StudyResult study = run_study(opt.run);
    const std::filesystem::path path = save_study(study, opt.run.output_dir);
    std::printf("study: %d repetitions -> %s\n", study.repetitions, path.c_str());
    for (const StatRow& row : study.stats) {
        std::printf("  %-12s %-3s mean=%-12.3f std=%-10.3f min=%-12.3f max=%-12.3f\n", row.solver.c_str(),
                    row.metric.c_str(), row.mean, row.stddev, row.min, row.max);
    }
    return 0;
}

int run_plot_cmd(CliOptions& opt) {
    if (opt.run_path.empty()) throw CLI::ValidationError("plot needs --run <run.json>");
    const RunResult result = load_run_result(opt.run_path);
    const auto files = emit_plots(result, opt.run.output_dir, opt.svg);
    std::printf("plot: wrote %zu files under %s\n", files.size(), opt.run.output_dir.c_str());
    return 0;
}

int run_validate_cmd(CliOptions& opt) {
    if (!opt.run_path.empty()) {
        const RunResult result = load_run_result(opt.run_path);
        revalidate_run_result(result);
        std::printf("validate: %s ok (plan feasible, trajectory collision-free)\n", opt.run_path.c_str());
        return 0;
    }
    if (!opt.scenario_path.empty()) {
        const Scenario s = load_scenario(opt.scenario_path);
        std::printf("validate: %s ok (%zu devices, %zu obstacles)\n", opt.scenario_path.c_str(),
                    s.devices.size(), s.obstacles.size());
        return 0;
    }
    throw CLI::ValidationError("validate needs --run or --scenario");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV wireless-powered network planner: hover placement, power allocation and "
                 "obstacle-aware 3D touring"};
    app.require_subcommand(1);
    CliOptions opt;

    CLI::App* generate = app.add_subcommand("generate", "Generate and save a scenario file");
    generate->add_option("--devices,-N", opt.device_count, "Number of ground devices");
    generate->add_option("--seed", opt.run.seed, "Generation seed");
    generate->add_option("--obstacle", opt.obstacle_specs,
                         "Obstacle as cx,cy,height,slope_x,slope_y (repeatable)");
    generate->add_flag("--no-obstacles", opt.no_obstacles, "Generate a flat scenario");
    generate->add_option("--out,-o", opt.out_path, "Scenario file path");

    CLI::App* upaop = app.add_subcommand("upaop", "Run the placement/power stage only");
    upaop->add_option("--scenario,-s", opt.scenario_path, "Scenario file (default: bundled)");
    add_common_solver_flags(upaop, opt);

    CLI::App* uttop = app.add_subcommand("uttop", "Run the trajectory stage on a saved plan");
    uttop->add_option("--scenario,-s", opt.scenario_path, "Scenario file (default: bundled)");
    uttop->add_option("--plan", opt.plan_path, "Hover plan from a upaop run");
    add_common_solver_flags(uttop, opt);

    CLI::App* pipeline = app.add_subcommand("pipeline", "Run both stages end to end");
    pipeline->add_option("--scenario,-s", opt.scenario_path, "Scenario file (default: bundled)");
    pipeline->add_option("--devices,-N", opt.device_count, "Device count when generating");
    add_common_solver_flags(pipeline, opt);

    CLI::App* study = app.add_subcommand("study", "Repeated seeded runs with statistics");
    study->add_option("--scenario,-s", opt.scenario_path, "Scenario file (default: bundled)");
    study->add_option("--repetitions,-R", opt.run.repetitions, "Number of independent runs");
    add_common_solver_flags(study, opt);

    CLI::App* plot = app.add_subcommand("plot", "Emit plot data files from a run result");
    plot->add_option("--run", opt.run_path, "run.json produced by pipeline/study");
    plot->add_flag("--svg", opt.svg, "Also render an SVG overview");
    plot->add_option("--out,-o", opt.out_path, "Output directory");

    CLI::App* validate = app.add_subcommand("validate", "Re-validate a run result or scenario file");
    validate->add_option("--run", opt.run_path, "run.json to re-check");
    validate->add_option("--scenario,-s", opt.scenario_path, "Scenario file to re-check");

    CLI11_PARSE(app, argc, argv);

    try {
        finalize_config(opt);
        if (generate->parsed()) return run_generate(opt);
        if (upaop->parsed()) return run_upaop_cmd(opt);
        if (uttop->parsed()) return run_uttop_cmd(opt);
        if (pipeline->parsed()) return run_pipeline_cmd(opt);
        if (study->parsed()) return run_study_cmd(opt);
        if (plot->parsed()) return run_plot_cmd(opt);
        if (validate->parsed()) return run_validate_cmd(opt);
    } catch (const uavplan::StageError& e) {
        std::fprintf(stderr, "error %s\n", e.what());
        return 1;
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error [stage:cli] %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error [stage:cli] %s\n", e.what());
        return 1;
    }
    return 0;
}
