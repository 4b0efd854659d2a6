#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "uavplan/energy.hpp"
#include "uavplan/geometry.hpp"
#include "uavplan/linkmodels.hpp"

namespace uavplan {

// Flight envelope and service region. d_max is the coverage/charging radius
// and doubles as the hover-altitude ceiling.
struct WorldBounds {
    double x_min = 0.0;
    double x_max = 500.0;
    double y_min = 0.0;
    double y_max = 500.0;
    double z_min = 5.0;
    double z_max = 30.0;
    double d_max = 20.0;

    double width() const { return x_max - x_min; }
    double depth() const { return y_max - y_min; }

    bool operator==(const WorldBounds&) const = default;
    void validate() const;
};

// One Gaussian hill of the terrain field.
struct Obstacle {
    double center_x = 0.0;
    double center_y = 0.0;
    double height = 0.0;
    double slope_x = 1.0;
    double slope_y = 1.0;

    bool operator==(const Obstacle&) const = default;
    void validate() const;
};

// Ground device at altitude zero.
struct WirelessDevice {
    double x = 0.0;
    double y = 0.0;
    double required_energy = 10.0;  // J
    double data_size = 1e8;         // bits

    bool operator==(const WirelessDevice&) const = default;
};

struct PhysicsConstants {
    ChargingConstants charging;
    CommConstants comm;
    UavConstants uav;

    bool operator==(const PhysicsConstants&) const = default;
    void validate() const;
};

// Immutable problem instance. Safe to share across concurrent evaluators.
struct Scenario {
    WorldBounds bounds;
    std::vector<WirelessDevice> devices;
    std::vector<Obstacle> obstacles;
    PhysicsConstants physics;
    double ground_epsilon = 0.5;  // m, device placement clearance
    std::uint64_t rng_seed = 0;

    bool operator==(const Scenario&) const = default;
    void validate() const;
};

// Total terrain height at (x, y): sum of Gaussian hills. Nonnegative and
// continuous everywhere.
double obstacle_height(std::span<const Obstacle> field, double x, double y);

inline bool is_ground_clear(std::span<const Obstacle> field, double x, double y, double epsilon) {
    return obstacle_height(field, x, y) < epsilon;
}

struct GenerationParams {
    WorldBounds bounds;
    PhysicsConstants physics;
    std::vector<Obstacle> obstacles;
    int device_count = 500;
    double device_energy = 10.0;   // J per device
    double device_data = 1e8;      // bits per device
    double ground_epsilon = 0.5;   // m
    int max_rejections_per_device = 10000;
    std::uint64_t seed = 0;
};

// Places devices uniformly at random over obstacle-free ground. Deterministic
// for a fixed seed. Throws if a device cannot be placed within the rejection
// budget.
Scenario generate_scenario(const GenerationParams& params);

void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

// Same schema as the file format; `context` names the source in error
// messages.
std::string scenario_to_string(const Scenario& scenario);
Scenario scenario_from_string(const std::string& text, const std::string& context);

// Desk-scale default instance: 500 devices among three hills in a
// 500 m x 500 m x 30 m region.
GenerationParams bundled_scenario_params();
Scenario bundled_scenario();

}  // namespace uavplan
