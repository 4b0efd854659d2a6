#include "uavplan/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace uavplan {

void UavConstants::validate() const {
    auto positive = [](double v, const char* name) {
        if (v <= 0.0) throw std::invalid_argument(std::string("uav: ") + name + " must be positive");
    };
    positive(blade_power, "blade_power");
    positive(induced_power, "induced_power");
    positive(tip_speed, "tip_speed");
    positive(hover_induced_speed, "hover_induced_speed");
    positive(drag_ratio, "drag_ratio");
    positive(air_density, "air_density");
    positive(rotor_solidity, "rotor_solidity");
    positive(rotor_disk_area, "rotor_disk_area");
    positive(mass, "mass");
    positive(gravity, "gravity");
    positive(cruise_speed, "cruise_speed");
}

double propulsion_power(double v, const UavConstants& k) {
    if (v < 0.0) throw std::invalid_argument("propulsion_power: negative speed");
    const double v2 = v * v;
    const double tip2 = k.tip_speed * k.tip_speed;
    const double blade = k.blade_power * (1.0 + 3.0 * v2 / tip2);

    const double v0_2 = k.hover_induced_speed * k.hover_induced_speed;
    const double v0_4 = v0_2 * v0_2;
    const double bracket = std::sqrt(1.0 + v2 * v2 / (4.0 * v0_4)) - v2 / (2.0 * v0_2);
    const double induced = k.induced_power * std::sqrt(std::max(bracket, 0.0));

    const double parasite = 0.5 * k.drag_ratio * k.air_density * k.rotor_solidity *
                            k.rotor_disk_area * v2 * v;
    return blade + induced + parasite;
}

double flight_energy(std::span<const Vec3> path, const UavConstants& k) {
    if (path.size() < 2) throw std::invalid_argument("flight_energy: path needs at least two points");
    if (k.cruise_speed <= 0.0) throw std::invalid_argument("flight_energy: cruise speed not set");
    const double length = polyline_length(path);
    const double level = propulsion_power(k.cruise_speed, k) * length / k.cruise_speed;
    const double potential = k.mass * k.gravity * (path.back().z - path.front().z);
    return level + potential;
}

double min_power_speed(const UavConstants& k, double v_search_max) {
    if (v_search_max <= 0.0) throw std::invalid_argument("min_power_speed: bad search bound");
    constexpr double inv_phi = 0.6180339887498949;
    double lo = 0.0;
    double hi = v_search_max;
    double a = hi - inv_phi * (hi - lo);
    double b = lo + inv_phi * (hi - lo);
    double fa = propulsion_power(a, k);
    double fb = propulsion_power(b, k);
    while (hi - lo > 1e-3) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = propulsion_power(a, k);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = propulsion_power(b, k);
        }
    }
    return 0.5 * (lo + hi);
}

UavConstants with_resolved_cruise(UavConstants k) {
    if (k.cruise_speed <= 0.0) k.cruise_speed = min_power_speed(k);
    return k;
}

}  // namespace uavplan
