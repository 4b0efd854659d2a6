#include "uavplan/uttop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavplan {

void PsoConfig::validate() const {
    if (population_size < 2) throw std::invalid_argument("pso: population size must be >= 2");
    if (max_iterations < 0) throw std::invalid_argument("pso: negative iteration count");
    if (crossover_prob < 0.0 || crossover_prob > 1.0)
        throw std::invalid_argument("pso: crossover probability outside [0, 1]");
    if (init_spread_divisor <= 0.0) throw std::invalid_argument("pso: init spread divisor must be positive");
    if (altitude_step <= 0.0) throw std::invalid_argument("pso: altitude step must be positive");
    if (velocity_start <= velocity_end || velocity_end <= 0.0)
        throw std::invalid_argument("pso: need velocity_start > velocity_end > 0");
    if (clearance_ratio < 0.0) throw std::invalid_argument("pso: negative clearance ratio");
}

double required_clearance_height(std::span<const Obstacle> field, double x, double y,
                                 const WorldBounds& bounds, double clearance_ratio) {
    const double terrain = obstacle_height(field, x, y);
    const double margin = std::min(clearance_ratio * terrain, std::max(bounds.z_max - terrain, 0.0));
    return terrain + margin;
}

namespace {

void clamp_point(Vec3& p, const WorldBounds& b) {
    p.x = clamp(p.x, b.x_min, b.x_max);
    p.y = clamp(p.y, b.y_min, b.y_max);
    p.z = clamp(p.z, b.z_min, b.z_max);
}

void clamp_velocity(Vec3& v, double v_max) {
    v.x = clamp(v.x, -v_max, v_max);
    v.y = clamp(v.y, -v_max, v_max);
    v.z = clamp(v.z, -v_max, v_max);
}

// Raises every waypoint straight up to its clearance height. Used at
// initialization, before any best positions exist for the pursuit operator.
void lift_to_clearance(TrajectoryGenome& genome, std::span<const Obstacle> field,
                       const WorldBounds& bounds, double clearance_ratio) {
    for (auto& leg : genome.waypoints) {
        for (Vec3& w : leg) {
            const double need = required_clearance_height(field, w.x, w.y, bounds, clearance_ratio);
            if (w.z < need) w.z = std::min(need, bounds.z_max);
        }
    }
}

double tour_length(std::span<const Vec3> hover_points, const TrajectoryGenome& genome) {
    return f3(hover_points, genome.waypoints);
}

}  // namespace

TrajectoryGenome normal_init(std::span<const Vec3> hover_points, int waypoints_per_leg,
                             const PsoConfig& config, const WorldBounds& bounds, Rng& rng) {
    if (hover_points.empty()) throw std::invalid_argument("normal_init: no hover points");
    if (waypoints_per_leg < 1) throw std::invalid_argument("normal_init: need at least one waypoint per leg");
    const std::size_t legs = hover_points.size();
    const auto k_count = static_cast<std::size_t>(waypoints_per_leg);
    const double wrap = 3.0 * static_cast<double>(waypoints_per_leg);

    std::normal_distribution<double> gauss_x(0.0, bounds.x_max / 100.0);
    std::normal_distribution<double> gauss_y(0.0, bounds.y_max / 100.0);
    std::normal_distribution<double> gauss_z(0.0, bounds.z_max / 100.0);

    TrajectoryGenome genome;
    genome.waypoints.assign(legs, std::vector<Vec3>(k_count));
    genome.velocities.assign(legs, std::vector<Vec3>(k_count, Vec3{}));
    for (std::size_t j = 0; j < legs; ++j) {
        const Vec3& a = hover_points[j];
        const Vec3& b = hover_points[(j + 1) % legs];
        for (std::size_t k = 0; k < k_count; ++k) {
            // Blend weights walk the coordinate index through 1..3K and wrap,
            // which sends the last waypoint's z weight back to the leg start.
            const double ind = 3.0 * static_cast<double>(k);
            const double wx = std::fmod(ind + 1.0, wrap);
            const double wy = std::fmod(ind + 2.0, wrap);
            const double wz = std::fmod(ind + 3.0, wrap);
            Vec3 w;
            w.x = gauss_x(rng) * bounds.x_max / config.init_spread_divisor +
                  (wrap - wx) / wrap * a.x + wx / wrap * b.x;
            w.y = gauss_y(rng) * bounds.y_max / config.init_spread_divisor +
                  (wrap - wy) / wrap * a.y + wy / wrap * b.y;
            w.z = gauss_z(rng) * bounds.z_max / config.init_spread_divisor +
                  (wrap - wz) / wrap * a.z + wz / wrap * b.z;
            clamp_point(w, bounds);
            genome.waypoints[j][k] = w;
        }
    }
    return genome;
}

void pretreatment_leg(const Vec3& leg_start, const Vec3& leg_end, std::span<Vec3> waypoints) {
    const std::size_t k_count = waypoints.size();
    if (k_count == 0) return;
    const Vec3 span_vec = leg_end - leg_start;
    const double length = norm(span_vec);
    if (length <= 1e-12) return;  // degenerate leg, nothing to order along
    const Vec3 axis = (1.0 / length) * span_vec;

    const std::size_t slabs = (k_count + 1) / 2;  // ceil(K/2)
    const double slab_width = length / static_cast<double>(slabs);

    // Index-ordered uniform split; earlier slabs take the extra waypoint.
    const std::size_t base = k_count / slabs;
    const std::size_t extra = k_count % slabs;
    std::size_t k = 0;
    for (std::size_t s = 0; s < slabs; ++s) {
        const std::size_t take = base + (s < extra ? 1 : 0);
        const double lo = static_cast<double>(s) * slab_width;
        const double hi = static_cast<double>(s + 1) * slab_width;
        for (std::size_t i = 0; i < take; ++i, ++k) {
            Vec3& w = waypoints[k];
            const double t = dot(w - leg_start, axis);
            const double projected = clamp(t, lo, hi);
            if (projected != t) w = w + (projected - t) * axis;
        }
    }
}

void pretreatment(TrajectoryGenome& genome, std::span<const Vec3> hover_points) {
    const std::size_t legs = genome.waypoints.size();
    for (std::size_t j = 0; j < legs; ++j) {
        pretreatment_leg(hover_points[j], hover_points[(j + 1) % legs],
                         std::span<Vec3>(genome.waypoints[j]));
    }
}

double velocity_bound(const PsoConfig& config, int iteration) {
    const double progress =
        config.max_iterations > 0 ? static_cast<double>(iteration) / config.max_iterations : 0.0;
    return config.velocity_start - (config.velocity_start - config.velocity_end) * progress;
}

void pso_step(TrajectoryGenome& genome, const TrajectoryGenome& personal_best,
              const TrajectoryGenome& global_best, const PsoConfig& config,
              const WorldBounds& bounds, double v_max, Rng& rng) {
    for (std::size_t j = 0; j < genome.waypoints.size(); ++j) {
        for (std::size_t k = 0; k < genome.waypoints[j].size(); ++k) {
            Vec3& x = genome.waypoints[j][k];
            Vec3& v = genome.velocities[j][k];
            const Vec3& pb = personal_best.waypoints[j][k];
            const Vec3& gb = global_best.waypoints[j][k];
            v.x = config.inertia * v.x + config.cognitive * unit_uniform(rng) * (pb.x - x.x) +
                  config.social * unit_uniform(rng) * (gb.x - x.x);
            v.y = config.inertia * v.y + config.cognitive * unit_uniform(rng) * (pb.y - x.y) +
                  config.social * unit_uniform(rng) * (gb.y - x.y);
            v.z = config.inertia * v.z + config.cognitive * unit_uniform(rng) * (pb.z - x.z) +
                  config.social * unit_uniform(rng) * (gb.z - x.z);
            clamp_velocity(v, v_max);
            x = x + v;
            clamp_point(x, bounds);
        }
    }
}

void genetic_crossover(TrajectoryGenome& a, TrajectoryGenome& b, double crossover_prob, Rng& rng) {
    if (a.waypoints.size() != b.waypoints.size() || a.waypoints_per_leg() != b.waypoints_per_leg())
        throw std::invalid_argument("genetic_crossover: shape mismatch");
    for (std::size_t j = 0; j < a.waypoints.size(); ++j) {
        for (std::size_t k = 0; k < a.waypoints[j].size(); ++k) {
            if (unit_uniform(rng) <= crossover_prob && crossover_prob > 0.0) {
                std::swap(a.waypoints[j][k], b.waypoints[j][k]);
                std::swap(a.velocities[j][k], b.velocities[j][k]);
            }
        }
    }
}

void differential_step(TrajectoryGenome& genome, std::span<const Vec3> hover_points,
                       double differential_weight, double v_max, const WorldBounds& bounds, Rng& rng) {
    const std::size_t legs = genome.waypoints.size();
    if (legs < 3) return;  // needs two donor legs distinct from the target

    TrajectoryGenome candidate = genome;
    for (std::size_t j = 0; j < legs; ++j) {
        // Two distinct donor legs, both different from j.
        std::size_t j1 = uniform_index(rng, legs - 1);
        if (j1 >= j) ++j1;
        std::size_t j2 = uniform_index(rng, legs - 2);
        if (j2 >= std::min(j, j1)) ++j2;
        if (j2 >= std::max(j, j1)) ++j2;
        for (std::size_t k = 0; k < genome.waypoints[j].size(); ++k) {
            const Vec3 delta = genome.waypoints[j1][k] - genome.waypoints[j2][k];
            Vec3 w = genome.waypoints[j][k] + differential_weight * delta;
            clamp_point(w, bounds);
            candidate.waypoints[j][k] = w;
            const Vec3 vdelta = genome.velocities[j1][k] - genome.velocities[j2][k];
            Vec3 v = genome.velocities[j][k] + differential_weight * vdelta;
            clamp_velocity(v, v_max);
            candidate.velocities[j][k] = v;
        }
    }
    // Greedy selection: keep the candidate only when the tour is no longer.
    if (tour_length(hover_points, candidate) <= tour_length(hover_points, genome)) {
        genome = std::move(candidate);
    }
}

void escape_obstacles(TrajectoryGenome& genome, const TrajectoryGenome& personal_best,
                      const TrajectoryGenome& global_best, std::span<const Obstacle> field,
                      const PsoConfig& config, const WorldBounds& bounds, double v_max, Rng& rng) {
    if (field.empty()) return;
    constexpr int kIterationCap = 100000;
    for (std::size_t j = 0; j < genome.waypoints.size(); ++j) {
        for (std::size_t k = 0; k < genome.waypoints[j].size(); ++k) {
            Vec3& w = genome.waypoints[j][k];
            int failures = 0;
            while (w.z < required_clearance_height(field, w.x, w.y, bounds, config.clearance_ratio)) {
                const Vec3& pb = personal_best.waypoints[j][k];
                const Vec3& gb = global_best.waypoints[j][k];
                const double r4 = unit_uniform(rng);
                const double r5 = unit_uniform(rng);
                // Pursuit toward the global best, stepping at most the gap
                // between the two bests (and at most r5 * v_max) per axis.
                auto pursue = [&](double current, double best_p, double best_g) {
                    const double magnitude = r4 * std::min(std::abs(best_g - best_p), r5 * v_max);
                    if (best_g > current) return current + magnitude;
                    if (best_g < current) return current - magnitude;
                    return current;
                };
                w.x = pursue(w.x, pb.x, gb.x);
                w.y = pursue(w.y, pb.y, gb.y);
                w.z = pursue(w.z, pb.z, gb.z);
                clamp_point(w, bounds);
                ++failures;
                if (failures % 10 == 0) {
                    w.z = std::min(w.z + config.altitude_step * (failures / 10), bounds.z_max);
                }
                if (failures > kIterationCap)
                    throw std::runtime_error("escape_obstacles: stuck; terrain reaches the ceiling");
            }
        }
    }
}

TrajectoryValidation validate_trajectory(const TrajectoryGenome& genome,
                                         std::span<const Vec3> hover_points,
                                         std::span<const Obstacle> field, double step) {
    if (step <= 0.0) throw std::invalid_argument("validate_trajectory: step must be positive");
    const std::vector<Vec3> tour = closed_tour(hover_points, genome.waypoints);
    for (std::size_t i = 1; i < tour.size(); ++i) {
        const Vec3& a = tour[i - 1];
        const Vec3& b = tour[i];
        const double length = dist(a, b);
        const int samples = std::max(1, static_cast<int>(std::ceil(length / step)));
        for (int s = 0; s <= samples; ++s) {
            const double t = static_cast<double>(s) / samples;
            const Vec3 p = a + t * (b - a);
            const double terrain = obstacle_height(field, p.x, p.y);
            if (p.z <= terrain) {
                TrajectoryValidation bad;
                bad.ok = false;
                bad.report = "segment " + std::to_string(i - 1) + " at t=" + std::to_string(t) +
                             " (x=" + std::to_string(p.x) + ", y=" + std::to_string(p.y) +
                             "): altitude " + std::to_string(p.z) + " <= terrain " +
                             std::to_string(terrain);
                return bad;
            }
        }
    }
    return {};
}

namespace {

struct ParticleState {
    TrajectoryGenome genome;
    TrajectoryGenome best_genome;
    double best_score = std::numeric_limits<double>::infinity();
    Rng rng;
};

struct SwarmState {
    std::vector<ParticleState> particles;
    const TrajectoryGenome* best_genome = nullptr;
    double best_score = std::numeric_limits<double>::infinity();

    // Single reduction point per iteration: ties keep the lowest index.
    void reduce_global_best() {
        for (const ParticleState& p : particles) {
            if (p.best_score < best_score) {
                best_score = p.best_score;
                best_genome = &p.best_genome;
            }
        }
    }
};

}  // namespace

PsoResult run_psongdp(std::span<const Vec3> hover_points, const Scenario& scenario,
                      const PsoConfig& config, int waypoints_per_leg) {
    config.validate();
    if (hover_points.empty()) throw std::invalid_argument("run_psongdp: no hover points");
    const WorldBounds& bounds = scenario.bounds;
    const std::span<const Obstacle> field(scenario.obstacles);

    SwarmState swarm;
    swarm.particles.resize(static_cast<std::size_t>(config.population_size));
    for (std::size_t b = 0; b < swarm.particles.size(); ++b) {
        ParticleState& p = swarm.particles[b];
        p.rng.seed(sub_seed(config.seed, b));
        p.genome = normal_init(hover_points, waypoints_per_leg, config, bounds, p.rng);
        pretreatment(p.genome, hover_points);
        for (auto& leg : p.genome.waypoints)
            for (Vec3& w : leg) clamp_point(w, bounds);
        lift_to_clearance(p.genome, field, bounds, config.clearance_ratio);
        p.best_genome = p.genome;
        p.best_score = tour_length(hover_points, p.genome);
    }
    swarm.reduce_global_best();

    PsoResult result;
    result.trace.reserve(static_cast<std::size_t>(config.max_iterations) + 1);
    result.trace.push_back(swarm.best_score);

    for (int it = 1; it <= config.max_iterations; ++it) {
        const double v_max = velocity_bound(config, it);
        // Particles read the global best reduced at the end of the previous
        // iteration; a copy keeps it stable while particles mutate.
        const TrajectoryGenome global_best = *swarm.best_genome;
        for (std::size_t b = 0; b < swarm.particles.size(); ++b) {
            ParticleState& p = swarm.particles[b];

            std::size_t partner = uniform_index(p.rng, swarm.particles.size() - 1);
            if (partner >= b) ++partner;
            genetic_crossover(p.genome, swarm.particles[partner].genome, config.crossover_prob, p.rng);

            differential_step(p.genome, hover_points, config.differential_weight, v_max, bounds, p.rng);
            pso_step(p.genome, p.best_genome, global_best, config, bounds, v_max, p.rng);
            pretreatment(p.genome, hover_points);
            for (auto& leg : p.genome.waypoints)
                for (Vec3& w : leg) clamp_point(w, bounds);
            escape_obstacles(p.genome, p.best_genome, global_best, field, config, bounds, v_max, p.rng);

            const double score = tour_length(hover_points, p.genome);
            if (score < p.best_score) {
                p.best_score = score;
                p.best_genome = p.genome;
            }
        }
        swarm.reduce_global_best();
        result.trace.push_back(swarm.best_score);
    }

    result.best = *swarm.best_genome;
    result.f3 = swarm.best_score;
    return result;
}

PsoResult run_vanilla_pso(std::span<const Vec3> hover_points, const Scenario& scenario,
                          const PsoConfig& config, int waypoints_per_leg) {
    config.validate();
    if (hover_points.empty()) throw std::invalid_argument("run_vanilla_pso: no hover points");
    if (waypoints_per_leg < 1) throw std::invalid_argument("run_vanilla_pso: need waypoints");
    const WorldBounds& bounds = scenario.bounds;
    const std::span<const Obstacle> field(scenario.obstacles);
    const std::size_t legs = hover_points.size();
    const auto k_count = static_cast<std::size_t>(waypoints_per_leg);

    auto fully_clear = [&](const TrajectoryGenome& genome) {
        for (const auto& leg : genome.waypoints)
            for (const Vec3& w : leg)
                if (w.z < required_clearance_height(field, w.x, w.y, bounds, config.clearance_ratio))
                    return false;
        return true;
    };

    SwarmState swarm;
    swarm.particles.resize(static_cast<std::size_t>(config.population_size));
    for (std::size_t b = 0; b < swarm.particles.size(); ++b) {
        ParticleState& p = swarm.particles[b];
        p.rng.seed(sub_seed(config.seed, b));
        p.genome.waypoints.assign(legs, std::vector<Vec3>(k_count));
        p.genome.velocities.assign(legs, std::vector<Vec3>(k_count, Vec3{}));
        for (auto& leg : p.genome.waypoints) {
            for (Vec3& w : leg) {
                w = {uniform(p.rng, bounds.x_min, bounds.x_max), uniform(p.rng, bounds.y_min, bounds.y_max),
                     uniform(p.rng, bounds.z_min, bounds.z_max)};
            }
        }
        lift_to_clearance(p.genome, field, bounds, config.clearance_ratio);
        p.best_genome = p.genome;
        p.best_score = tour_length(hover_points, p.genome);
    }
    swarm.reduce_global_best();

    PsoResult result;
    result.trace.reserve(static_cast<std::size_t>(config.max_iterations) + 1);
    result.trace.push_back(swarm.best_score);

    for (int it = 1; it <= config.max_iterations; ++it) {
        const double v_max = velocity_bound(config, it);
        const TrajectoryGenome global_best = *swarm.best_genome;
        for (ParticleState& p : swarm.particles) {
            pso_step(p.genome, p.best_genome, global_best, config, bounds, v_max, p.rng);
            // Obstacle handling: one altitude increment per stuck waypoint
            // per iteration.
            for (auto& leg : p.genome.waypoints) {
                for (Vec3& w : leg) {
                    if (w.z < required_clearance_height(field, w.x, w.y, bounds, config.clearance_ratio))
                        w.z = std::min(w.z + config.altitude_step, bounds.z_max);
                }
            }
            // Bests only record collision-free states so the result is a
            // valid tour.
            if (!fully_clear(p.genome)) continue;
            const double score = tour_length(hover_points, p.genome);
            if (score < p.best_score) {
                p.best_score = score;
                p.best_genome = p.genome;
            }
        }
        swarm.reduce_global_best();
        result.trace.push_back(swarm.best_score);
    }

    result.best = *swarm.best_genome;
    result.f3 = swarm.best_score;
    return result;
}

}  // namespace uavplan
