#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "uavplan/objectives.hpp"
#include "uavplan/rng.hpp"

namespace uavplan {

struct Individual {
    HoverPlan genome;
    ObjectiveVector objectives;
    int rank = 0;            // 1-based non-domination front index
    double crowding = 0.0;

    double f1() const { return -objectives.values[0]; }
    double f2() const { return objectives.values[1]; }
};

struct MoeaConfig {
    int population_size = 50;   // NP, must be even
    int max_generations = 300;  // G_max
    int hover_count = 10;       // M
    double crossover_prob = 0.9;
    double crossover_eta = 20.0;
    double mutation_prob = -1.0;  // < 0 selects 1/(4M+N)
    double mutation_eta = 20.0;
    ObjectiveParams objective;    // carries the penalty Pe
    double altitude_margin = 0.5;  // m of clearance used by the z repair
    int kmeans_max_iters = 100;
    bool kmeans_init = true;      // false restores plain random initialization
    std::uint64_t seed = 1;

    void validate() const;
};

// Flat-genome layout: [x1 y1 z1 ... xM yM zM | Pc1..PcM | Pt1..PtN].
struct GenomeLayout {
    std::size_t hover_count = 0;   // M
    std::size_t device_count = 0;  // N
    std::vector<double> lower;     // per-gene box bounds, size 4M+N
    std::vector<double> upper;

    std::size_t size() const { return lower.size(); }
};

GenomeLayout make_layout(const Scenario& scenario, int hover_count);
std::vector<double> flatten(const HoverPlan& plan);
HoverPlan unflatten(std::span<const double> genes, const GenomeLayout& layout);

// Lifts hover altitudes that sit within `margin` of the terrain, capping at
// the hover ceiling (which leaves the point infeasible when the hill is too
// tall to clear).
void repair_altitude(HoverPlan& plan, const Scenario& scenario, double margin);

// Lloyd's iterations over the device (x, y) positions. Empty clusters are
// reseeded at a random device.
std::vector<Vec3> kmeans_centers(const Scenario& scenario, int cluster_count, Rng& rng, int max_iters = 100);

// Cluster centers with altitudes drawn uniformly from [z_min, d_max] and
// repaired clear of the terrain.
std::vector<Vec3> kmeans_seed(const Scenario& scenario, int hover_count, Rng& rng, const MoeaConfig& config);

struct Population {
    std::vector<Individual> individuals;
    int generation = 0;
};

Population initialize_population(const Scenario& scenario, const MoeaConfig& config);

// Non-dominated fronts (indices), best front first.
std::vector<std::vector<int>> fast_nondominated_sort(std::span<const ObjectiveVector> objectives);

// Crowding distances for one front; boundary members get +infinity.
std::vector<double> crowding_distance(std::span<const int> front, std::span<const ObjectiveVector> objectives);

// Simulated-binary crossover + polynomial mutation over the flat genome,
// followed by box clipping and altitude repair. Parents are picked by binary
// tournament on (rank, crowding).
std::vector<HoverPlan> vary(const Population& parents, const Scenario& scenario,
                            const GenomeLayout& layout, const MoeaConfig& config, Rng& rng);

struct EvolveResult {
    std::vector<Individual> front;                          // final first front
    std::vector<double> best_f1_trace;                      // per generation
    std::vector<double> best_f2_trace;
    std::vector<std::vector<std::array<double, 2>>> front_snapshots;  // (f1, f2) rows
};

// Elitist generational loop: evaluate, vary, merge, sort, truncate.
// Deterministic per seed.
EvolveResult evolve(const Scenario& scenario, const MoeaConfig& config);

// Reference placements, all at maximum transmit powers.
HoverPlan baseline_us(const Scenario& scenario, int hover_count);
HoverPlan baseline_rs(const Scenario& scenario, int hover_count, std::uint64_t seed);
HoverPlan baseline_kmeans(const Scenario& scenario, int hover_count, std::uint64_t seed);

enum class Strategy {
    CoverageMax,       // CWMS: max f1, ties by lower f2
    TimeEfficiencyMax  // TEMS: min f2, ties by higher f1
};

const Individual& select_solution(std::span<const Individual> front, Strategy strategy);

}  // namespace uavplan
