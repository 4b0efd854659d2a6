#pragma once

#include <span>

#include "uavplan/geometry.hpp"

namespace uavplan {

// Rotary-wing propulsion constants. Defaults are the reference constant set
// for a small rotary-wing platform; its power curve has the characteristic
// minimum near 10.2 m/s.
struct UavConstants {
    double blade_power = 79.8563;       // W, profile power in hover
    double induced_power = 88.6279;     // W, induced power in hover
    double tip_speed = 120.0;           // m/s, rotor blade tip speed
    double hover_induced_speed = 4.03;  // m/s, mean rotor induced speed in hover
    double drag_ratio = 0.6;            // fuselage drag ratio
    double air_density = 1.225;         // kg/m^3
    double rotor_solidity = 0.05;
    double rotor_disk_area = 0.503;     // m^2
    double mass = 2.0;                  // kg
    double gravity = 9.8;               // m/s^2
    double cruise_speed = 0.0;          // m/s; <= 0 requests the min-power speed

    bool operator==(const UavConstants&) const = default;
    void validate() const;
};

// Level-flight propulsion power at speed v.
double propulsion_power(double v, const UavConstants& k);

// Energy to fly a polyline at constant cruise speed: propulsion power times
// flight time plus the net potential-energy change. The kinetic term vanishes
// because start and end speeds are equal.
double flight_energy(std::span<const Vec3> path, const UavConstants& k);

// Speed minimizing propulsion_power on [0, v_search_max], located by
// golden-section search to 1e-3 m/s.
double min_power_speed(const UavConstants& k, double v_search_max = 30.0);

// Returns k with cruise_speed replaced by min_power_speed when unset.
UavConstants with_resolved_cruise(UavConstants k);

}  // namespace uavplan
