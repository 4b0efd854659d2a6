#pragma once

#include <vector>

#include "uavplan/scenario.hpp"

namespace uavplan {

// UPAOP decision vector: M hover points with per-point charge powers plus a
// transmit-power entry for every device. Entries of uncovered devices are
// carried through variation but excluded from objective math.
struct HoverPlan {
    std::vector<Vec3> points;             // Q, length M
    std::vector<double> charge_powers;    // Pc, length M
    std::vector<double> device_powers;    // Pt, length N (indexed by device)

    std::size_t point_count() const { return points.size(); }
    bool operator==(const HoverPlan&) const = default;
};

// Per-device assignment produced by coverage(): device i belongs to
// assignment[j] iff hover point j is its nearest covering point.
using CoverageSets = std::vector<std::vector<int>>;

struct HoverEvaluation {
    int covered_count = 0;                 // f1, distinct devices
    CoverageSets covered_sets;             // per-point device indices
    std::vector<double> charge_times;      // Tc_j
    std::vector<double> collect_times;     // Tdc_j
    std::vector<double> hover_times;       // Th_j = max(Tc_j, Tdc_j)
    std::vector<double> time_diffs;        // Td_j = |Tc_j - Tdc_j|
    int empty_point_count = 0;             // n
    double f2 = 0.0;
    bool feasible = true;
    double violation = 0.0;

    bool operator==(const HoverEvaluation&) const = default;
};

struct ObjectiveVector {
    std::vector<double> values;  // minimization orientation: (-f1, f2)
    bool feasible = true;
    double violation = 0.0;

    bool operator==(const ObjectiveVector&) const = default;
};

struct ObjectiveParams {
    double penalty_time = 1000.0;  // Pe, hover charge for an empty point
    double hover_weight = 1.0;
    double diff_weight = 1.0;

    bool operator==(const ObjectiveParams&) const = default;
};

struct FeasibilityResult {
    bool feasible = true;
    double violation = 0.0;
};

// Assigns every device to its nearest covering hover point (ties to the
// lowest point index); devices beyond d_max of all points stay unassigned.
CoverageSets coverage(const HoverPlan& plan, const Scenario& scenario);

// Charging/collection timing per hover point. Infeasibility (a covered
// device below the rate floor) is recorded, not thrown.
HoverEvaluation hover_timing(const HoverPlan& plan, const CoverageSets& sets, const Scenario& scenario);

// Total hover time + total timing mismatch + empty-point penalty.
double f2(const HoverEvaluation& timing, const ObjectiveParams& params);

// Closed-tour length through hover points with K waypoints threaded into
// each leg (leg j runs from point j to point j+1, cyclically).
double f3(std::span<const Vec3> hover_points, const std::vector<std::vector<Vec3>>& leg_waypoints);

// Assembles the closed tour polyline q1, w1..wK, q2, ..., qM, wM1..wMK, q1.
std::vector<Vec3> closed_tour(std::span<const Vec3> hover_points,
                              const std::vector<std::vector<Vec3>>& leg_waypoints);

// Box constraints, obstacle clearance at hover points, and the per-device
// rate floor. violation sums normalized constraint excesses.
FeasibilityResult feasibility(const HoverPlan& plan, const Scenario& scenario);

// Constrained Pareto domination: feasible beats infeasible, lower violation
// wins among infeasible, componentwise rule among feasible.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

// Full UPAOP evaluation of one plan.
struct PlanEvaluation {
    HoverEvaluation eval;
    ObjectiveVector objectives;  // (-f1, f2) with feasibility annotations
};
PlanEvaluation evaluate_plan(const HoverPlan& plan, const Scenario& scenario, const ObjectiveParams& params);

}  // namespace uavplan
