#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavplan/objectives.hpp"
#include "uavplan/rng.hpp"

namespace uavplan {

// UTTOP decision vector: M legs of K waypoints each, with matching
// per-coordinate velocities. Leg j connects hover point j to point j+1
// (cyclically back to the first).
struct TrajectoryGenome {
    std::vector<std::vector<Vec3>> waypoints;   // [M][K]
    std::vector<std::vector<Vec3>> velocities;  // same shape

    std::size_t leg_count() const { return waypoints.size(); }
    std::size_t waypoints_per_leg() const { return waypoints.empty() ? 0 : waypoints[0].size(); }
    bool operator==(const TrajectoryGenome&) const = default;
};

struct PsoConfig {
    int population_size = 50;      // NP
    int max_iterations = 300;      // G_max
    double inertia = 0.7;          // w
    double cognitive = 1.5;        // C1
    double social = 1.5;           // C2
    double crossover_prob = 0.5;   // r_cro
    double differential_weight = 0.5;  // F0
    double init_spread_divisor = 250.0;  // C3
    double altitude_step = 2.0;    // C4, meters per lift event
    double velocity_start = 20.0;  // v1
    double velocity_end = 0.5;     // v2
    double clearance_ratio = 0.1;  // waypoint height margin relative to terrain
    std::uint64_t seed = 1;

    void validate() const;
};

// Height a waypoint must reach at (x, y): the terrain plus a relative margin,
// capped so it never exceeds the flight ceiling.
double required_clearance_height(std::span<const Obstacle> field, double x, double y,
                                 const WorldBounds& bounds, double clearance_ratio);

// Gaussian-perturbed initialization around a mod-weighted blend of each leg's
// endpoints, clamped to the waypoint box.
TrajectoryGenome normal_init(std::span<const Vec3> hover_points, int waypoints_per_leg,
                             const PsoConfig& config, const WorldBounds& bounds, Rng& rng);

// Slab decomposition of one leg: ceil(K/2) equal slabs along the leg axis,
// waypoints assigned in index order (earlier slabs take the extra when K is
// odd); a waypoint outside its slab is projected onto the nearer boundary
// plane, changing only its along-axis coordinate. Idempotent.
void pretreatment_leg(const Vec3& leg_start, const Vec3& leg_end, std::span<Vec3> waypoints);
void pretreatment(TrajectoryGenome& genome, std::span<const Vec3> hover_points);

// Velocity bound at the given iteration: v1 at 0 shrinking linearly to v2 at
// max_iterations.
double velocity_bound(const PsoConfig& config, int iteration);

// One inertia + cognitive + social velocity/position update with velocity and
// box clamping.
void pso_step(TrajectoryGenome& genome, const TrajectoryGenome& personal_best,
              const TrajectoryGenome& global_best, const PsoConfig& config,
              const WorldBounds& bounds, double v_max, Rng& rng);

// Exchanges same-index waypoints (and their velocities) between two particles
// with probability r_cro per index.
void genetic_crossover(TrajectoryGenome& a, TrajectoryGenome& b, double crossover_prob, Rng& rng);

// Differential mutation using same-k waypoints of two other legs, accepted
// only when the candidate tour is no longer than the incumbent. Identity when
// fewer than three legs.
void differential_step(TrajectoryGenome& genome, std::span<const Vec3> hover_points,
                       double differential_weight, double v_max, const WorldBounds& bounds, Rng& rng);

// Pursuit relocation toward the global best, stepping each axis by at most
// the personal/global best gap (and at most r5 * v_max). Runs once per
// iteration after the slab pass; the step shrinks to zero as the bests
// agree.
void pursuit_step(TrajectoryGenome& genome, const TrajectoryGenome& personal_best,
                  const TrajectoryGenome& global_best, const WorldBounds& bounds, double v_max, Rng& rng);

// Pursuit relocation of waypoints stuck at or below the terrain clearance,
// with periodic altitude lifts; terminates with every waypoint clear.
void escape_obstacles(TrajectoryGenome& genome, const TrajectoryGenome& personal_best,
                      const TrajectoryGenome& global_best, std::span<const Obstacle> field,
                      const PsoConfig& config, const WorldBounds& bounds, double v_max, Rng& rng);

struct TrajectoryValidation {
    bool ok = true;
    std::string report;  // first violation, empty when ok
};

// Samples every tour segment at most `step` apart and requires the sampled
// altitude to stay above the terrain.
TrajectoryValidation validate_trajectory(const TrajectoryGenome& genome,
                                         std::span<const Vec3> hover_points,
                                         std::span<const Obstacle> field, double step);

struct PsoResult {
    TrajectoryGenome best;
    double f3 = 0.0;
    std::vector<double> trace;  // best tour length per iteration, nonincreasing
};

// Full swarm loop with crossover, differential selection, velocity update,
// slab pretreatment and obstacle escape per particle per iteration.
PsoResult run_psongdp(std::span<const Vec3> hover_points, const Scenario& scenario,
                      const PsoConfig& config, int waypoints_per_leg);

// Ablation baseline: plain inertia-weight swarm with uniform initialization
// and altitude lifts as the only obstacle handling.
PsoResult run_vanilla_pso(std::span<const Vec3> hover_points, const Scenario& scenario,
                          const PsoConfig& config, int waypoints_per_leg);

}  // namespace uavplan
