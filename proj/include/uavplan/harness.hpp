#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavplan/upaop.hpp"
#include "uavplan/uttop.hpp"

namespace uavplan {

// Error carrying the pipeline stage it came from.
struct StageError : std::runtime_error {
    std::string stage;
    StageError(std::string stage_name, const std::string& message)
        : std::runtime_error("[stage:" + stage_name + "] " + message), stage(std::move(stage_name)) {}
};

struct RunConfig {
    std::optional<std::filesystem::path> scenario_path;  // generated when absent
    GenerationParams generation = bundled_scenario_params();
    MoeaConfig moea;
    PsoConfig pso;
    int waypoints_per_leg = 10;  // K
    Strategy strategy = Strategy::CoverageMax;
    int repetitions = 1;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "runs";
    int snapshot_stride = 1;      // keep every n-th per-generation front
    double validate_step = 0.5;   // m, trajectory sampling spacing

    void validate() const;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

// Objective values recorded for one solver within a repetition. Unused
// metrics stay unset.
struct SolverRecord {
    std::string solver;
    std::optional<double> f1;
    std::optional<double> f2;
    std::optional<double> f3;
};

struct RunResult {
    std::uint64_t seed = 0;
    Scenario scenario;

    HoverPlan plan;
    HoverEvaluation plan_eval;
    ObjectiveVector plan_objectives;
    std::vector<std::array<double, 2>> final_front;  // (f1, f2) rows
    std::vector<std::vector<std::array<double, 2>>> front_snapshots;
    std::vector<double> upaop_best_f1_trace;
    std::vector<double> upaop_best_f2_trace;

    TrajectoryGenome trajectory;
    double f3 = 0.0;
    std::vector<double> uttop_trace;

    double flight_energy_j = 0.0;
    double cruise_speed = 0.0;

    std::vector<SolverRecord> comparisons;  // filled by studies

    // Wall-clock bookkeeping; persisted in a sidecar file so the main result
    // file stays byte-reproducible.
    std::vector<StageTiming> timings;
    double total_seconds = 0.0;

    // Config echo.
    Strategy strategy = Strategy::CoverageMax;
    int waypoints_per_leg = 10;
    MoeaConfig moea;
    PsoConfig pso;
    double validate_step = 0.5;
};

// Executes generate/load -> UPAOP -> select -> UTTOP -> validate -> energy.
// Refuses to return a trajectory failing validation.
RunResult run_pipeline(const RunConfig& config);

// Persists `run.json` (deterministic content) plus `run.timings.json` beside
// it; returns the main file path.
std::filesystem::path save_run_result(const RunResult& result, const std::filesystem::path& directory,
                                      const std::string& stem = "run");
RunResult load_run_result(const std::filesystem::path& path);

// Re-checks feasibility of the embedded plan and collision-freedom of the
// embedded trajectory.
void revalidate_run_result(const RunResult& result);

// Hover-plan file, the handoff between the two CLI stages.
void save_hover_plan(const HoverPlan& plan, const std::filesystem::path& path);
HoverPlan load_hover_plan(const std::filesystem::path& path);

struct StatRow {
    std::string solver;
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;  // population form: zero for a single repetition
    double min = 0.0;
    double max = 0.0;
};

struct StudyResult {
    int repetitions = 0;
    std::uint64_t base_seed = 0;
    std::vector<RunResult> runs;
    std::vector<StatRow> stats;
    std::vector<std::filesystem::path> run_files;
};

// Repeated seeded runs of the full pipeline plus the comparison solvers
// (plain NSGA-II toggle, US/RS/K-means placements, vanilla swarm), with
// mean/std/min/max statistics per solver and metric.
StudyResult run_study(const RunConfig& config);

std::filesystem::path save_study(const StudyResult& study, const std::filesystem::path& directory);

// Recomputes the statistics table from persisted per-run files.
std::vector<StatRow> stats_from_run_files(const std::vector<std::filesystem::path>& files);

// Tabular series for fronts, coverage maps, trajectories and convergence
// traces; optionally renders simple SVG views.
std::vector<std::filesystem::path> emit_plots(const RunResult& result, const std::filesystem::path& directory,
                                              bool render_svg = false);

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

}  // namespace uavplan
