#include "uavplan/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavplan {

CoverageSets coverage(const HoverPlan& plan, const Scenario& scenario) {
    const std::size_t point_count = plan.points.size();
    CoverageSets sets(point_count);
    const double r2 = scenario.bounds.d_max * scenario.bounds.d_max;
    for (std::size_t i = 0; i < scenario.devices.size(); ++i) {
        const WirelessDevice& dev = scenario.devices[i];
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < point_count; ++j) {
            const Vec3& q = plan.points[j];
            const double dx = dev.x - q.x;
            const double dy = dev.y - q.y;
            const double d2 = dx * dx + dy * dy + q.z * q.z;
            if (d2 <= r2 && d2 < best_d2) {  // strict < keeps ties at the lowest index
                best = static_cast<int>(j);
                best_d2 = d2;
            }
        }
        if (best >= 0) sets[static_cast<std::size_t>(best)].push_back(static_cast<int>(i));
    }
    return sets;
}

HoverEvaluation hover_timing(const HoverPlan& plan, const CoverageSets& sets, const Scenario& scenario) {
    HoverEvaluation ev;
    ev.covered_sets = sets;
    const std::size_t point_count = plan.points.size();
    ev.charge_times.assign(point_count, 0.0);
    ev.collect_times.assign(point_count, 0.0);
    ev.hover_times.assign(point_count, 0.0);
    ev.time_diffs.assign(point_count, 0.0);

    const ChargingConstants& charging = scenario.physics.charging;
    const CommConstants& comm = scenario.physics.comm;
    for (std::size_t j = 0; j < point_count; ++j) {
        const auto& assigned = sets[j];
        if (assigned.empty()) {
            ++ev.empty_point_count;
            continue;
        }
        ev.covered_count += static_cast<int>(assigned.size());
        // Out-of-box powers are clamped for the timing math; the box violation
        // itself is recorded by feasibility(), never thrown from here.
        const double pc = clamp(plan.charge_powers[j], charging.pc_min, charging.pc_max);
        double tc = 0.0;
        double tdc = 0.0;
        for (int idx : assigned) {
            const WirelessDevice& dev = scenario.devices[static_cast<std::size_t>(idx)];
            const double d = distance(dev, plan.points[j]);
            const double pr = received_power(pc, d, charging);
            tc = std::max(tc, dev.required_energy / pr);
            const double pt = clamp(plan.device_powers[static_cast<std::size_t>(idx)], comm.pt_min, comm.pt_max);
            const double rate = achievable_rate(pt, dev, plan.points[j], comm);
            if (rate < comm.rate_threshold) ev.feasible = false;
            tdc += dev.data_size / rate;
        }
        ev.charge_times[j] = tc;
        ev.collect_times[j] = tdc;
        ev.hover_times[j] = std::max(tc, tdc);
        ev.time_diffs[j] = std::abs(tc - tdc);
    }
    return ev;
}

double f2(const HoverEvaluation& timing, const ObjectiveParams& params) {
    double hover_sum = 0.0;
    double diff_sum = 0.0;
    for (double t : timing.hover_times) hover_sum += t;
    for (double t : timing.time_diffs) diff_sum += t;
    return params.hover_weight * hover_sum + params.diff_weight * diff_sum +
           timing.empty_point_count * params.penalty_time;
}

std::vector<Vec3> closed_tour(std::span<const Vec3> hover_points,
                              const std::vector<std::vector<Vec3>>& leg_waypoints) {
    if (hover_points.empty()) throw std::invalid_argument("closed_tour: no hover points");
    if (leg_waypoints.size() != hover_points.size())
        throw std::invalid_argument("closed_tour: one waypoint leg per hover point expected");
    std::vector<Vec3> tour;
    tour.reserve(hover_points.size() * (leg_waypoints[0].size() + 1) + 1);
    for (std::size_t j = 0; j < hover_points.size(); ++j) {
        tour.push_back(hover_points[j]);
        tour.insert(tour.end(), leg_waypoints[j].begin(), leg_waypoints[j].end());
    }
    tour.push_back(hover_points[0]);
    return tour;
}

double f3(std::span<const Vec3> hover_points, const std::vector<std::vector<Vec3>>& leg_waypoints) {
    const std::vector<Vec3> tour = closed_tour(hover_points, leg_waypoints);
    return polyline_length(tour);
}

namespace {

// Normalized excess of v against [lo, hi].
double box_excess(double v, double lo, double hi) {
    const double range = hi > lo ? hi - lo : 1.0;
    if (v < lo) return (lo - v) / range;
    if (v > hi) return (v - hi) / range;
    return 0.0;
}

}  // namespace

namespace {

FeasibilityResult feasibility_with_sets(const HoverPlan& plan, const Scenario& scenario,
                                        const CoverageSets& sets);

}  // namespace

FeasibilityResult feasibility(const HoverPlan& plan, const Scenario& scenario) {
    return feasibility_with_sets(plan, scenario, coverage(plan, scenario));
}

namespace {

FeasibilityResult feasibility_with_sets(const HoverPlan& plan, const Scenario& scenario,
                                        const CoverageSets& sets) {
    FeasibilityResult result;
    const WorldBounds& b = scenario.bounds;
    const ChargingConstants& charging = scenario.physics.charging;
    const CommConstants& comm = scenario.physics.comm;

    auto add = [&result](double excess) {
        if (excess > 0.0) {
            result.feasible = false;
            result.violation += excess;
        }
    };

    for (const Vec3& q : plan.points) {
        add(box_excess(q.x, b.x_min, b.x_max));
        add(box_excess(q.y, b.y_min, b.y_max));
        add(box_excess(q.z, b.z_min, b.d_max));
        const double terrain = obstacle_height(scenario.obstacles, q.x, q.y);
        if (q.z <= terrain) {
            result.feasible = false;
            result.violation += (terrain - q.z) / b.z_max;
        }
    }
    for (double pc : plan.charge_powers) add(box_excess(pc, charging.pc_min, charging.pc_max));
    for (double pt : plan.device_powers) add(box_excess(pt, comm.pt_min, comm.pt_max));

    // Rate floor applies to the devices actually served.
    for (std::size_t j = 0; j < sets.size(); ++j) {
        for (int idx : sets[j]) {
            const WirelessDevice& dev = scenario.devices[static_cast<std::size_t>(idx)];
            const double pt = clamp(plan.device_powers[static_cast<std::size_t>(idx)], comm.pt_min, comm.pt_max);
            const double rate = achievable_rate(pt, dev, plan.points[j], comm);
            if (rate < comm.rate_threshold) {
                result.feasible = false;
                result.violation += (comm.rate_threshold - rate) / comm.rate_threshold;
            }
        }
    }
    return result;
}

}  // namespace

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("dominates: objective dimension mismatch");
    if (a.feasible != b.feasible) return a.feasible;
    if (!a.feasible) return a.violation < b.violation;
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (a.values[i] > b.values[i]) return false;
        if (a.values[i] < b.values[i]) strictly_better = true;
    }
    return strictly_better;
}

PlanEvaluation evaluate_plan(const HoverPlan& plan, const Scenario& scenario, const ObjectiveParams& params) {
    PlanEvaluation out;
    const CoverageSets sets = coverage(plan, scenario);
    out.eval = hover_timing(plan, sets, scenario);
    out.eval.f2 = f2(out.eval, params);

    const FeasibilityResult feas = feasibility_with_sets(plan, scenario, sets);
    out.eval.feasible = out.eval.feasible && feas.feasible;
    out.eval.violation = feas.violation;

    out.objectives.values = {-static_cast<double>(out.eval.covered_count), out.eval.f2};
    out.objectives.feasible = out.eval.feasible;
    out.objectives.violation = out.eval.violation;
    return out;
}

}  // namespace uavplan
