#include "uavplan/scenario.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "uavplan/rng.hpp"

namespace uavplan {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kScenarioSchema = "uavplan.scenario.v1";

// Margin kept between the tallest terrain sample and the flight ceiling so
// the obstacle-escape loop can always exit below z_max.
constexpr double kCeilingMargin = 0.5;
constexpr int kTerrainGridSamples = 201;

}  // namespace

void WorldBounds::validate() const {
    if (!(x_min < x_max)) throw std::invalid_argument("bounds: need x_min < x_max");
    if (!(y_min < y_max)) throw std::invalid_argument("bounds: need y_min < y_max");
    if (!(0.0 < z_min && z_min <= d_max && d_max <= z_max))
        throw std::invalid_argument("bounds: need 0 < z_min <= d_max <= z_max");
}

void Obstacle::validate() const {
    if (height <= 0.0) throw std::invalid_argument("obstacle: height must be positive");
    if (slope_x <= 0.0 || slope_y <= 0.0) throw std::invalid_argument("obstacle: slopes must be positive");
}

void PhysicsConstants::validate() const {
    charging.validate();
    comm.validate();
    uav.validate();
}

double obstacle_height(std::span<const Obstacle> field, double x, double y) {
    double total = 0.0;
    for (const Obstacle& ob : field) {
        const double u = (x - ob.center_x) / ob.slope_x;
        const double v = (y - ob.center_y) / ob.slope_y;
        total += ob.height * std::exp(-(u * u + v * v));
    }
    return total;
}

namespace {

double max_terrain_sample(const Scenario& s) {
    double worst = 0.0;
    for (int i = 0; i < kTerrainGridSamples; ++i) {
        const double x = s.bounds.x_min + s.bounds.width() * i / (kTerrainGridSamples - 1);
        for (int j = 0; j < kTerrainGridSamples; ++j) {
            const double y = s.bounds.y_min + s.bounds.depth() * j / (kTerrainGridSamples - 1);
            worst = std::max(worst, obstacle_height(s.obstacles, x, y));
        }
    }
    return worst;
}

}  // namespace

void Scenario::validate() const {
    bounds.validate();
    physics.validate();
    if (physics.charging.d_max != bounds.d_max)
        throw std::invalid_argument("scenario: charging d_max and bounds d_max disagree");
    if (devices.empty()) throw std::invalid_argument("scenario: needs at least one device");
    if (ground_epsilon <= 0.0) throw std::invalid_argument("scenario: ground epsilon must be positive");
    for (const Obstacle& ob : obstacles) {
        ob.validate();
        if (ob.height >= bounds.z_max)
            throw std::invalid_argument("scenario: obstacle taller than the flight ceiling");
    }
    if (!obstacles.empty() && max_terrain_sample(*this) > bounds.z_max - kCeilingMargin)
        throw std::invalid_argument("scenario: terrain reaches the flight ceiling");
    for (std::size_t i = 0; i < devices.size(); ++i) {
        const WirelessDevice& d = devices[i];
        const std::string at = "device " + std::to_string(i);
        if (d.x < bounds.x_min || d.x > bounds.x_max || d.y < bounds.y_min || d.y > bounds.y_max)
            throw std::invalid_argument("scenario: " + at + " outside the service area");
        if (d.required_energy <= 0.0) throw std::invalid_argument("scenario: " + at + " needs positive energy");
        if (d.data_size <= 0.0) throw std::invalid_argument("scenario: " + at + " needs positive data size");
        if (!is_ground_clear(obstacles, d.x, d.y, ground_epsilon))
            throw std::invalid_argument("scenario: " + at + " placed on an obstacle");
    }
}

Scenario generate_scenario(const GenerationParams& params) {
    if (params.device_count < 1) throw std::invalid_argument("generate: need at least one device");
    Scenario s;
    s.bounds = params.bounds;
    s.obstacles = params.obstacles;
    s.physics = params.physics;
    s.physics.uav = with_resolved_cruise(s.physics.uav);
    s.ground_epsilon = params.ground_epsilon;
    s.rng_seed = params.seed;

    Rng rng(params.seed);
    s.devices.reserve(static_cast<std::size_t>(params.device_count));
    for (int i = 0; i < params.device_count; ++i) {
        int rejections = 0;
        for (;;) {
            const double x = uniform(rng, s.bounds.x_min, s.bounds.x_max);
            const double y = uniform(rng, s.bounds.y_min, s.bounds.y_max);
            if (is_ground_clear(s.obstacles, x, y, s.ground_epsilon)) {
                s.devices.push_back({x, y, params.device_energy, params.device_data});
                break;
            }
            if (++rejections >= params.max_rejections_per_device)
                throw std::runtime_error("generate: placement budget exhausted, clear ground too small");
        }
    }
    s.validate();
    return s;
}

namespace {

json bounds_to_json(const WorldBounds& b) {
    return json{{"x_min", b.x_min}, {"x_max", b.x_max}, {"y_min", b.y_min},
                {"y_max", b.y_max}, {"z_min", b.z_min}, {"z_max", b.z_max}, {"d_max", b.d_max}};
}

WorldBounds bounds_from_json(const json& j) {
    WorldBounds b;
    b.x_min = j.at("x_min").get<double>();
    b.x_max = j.at("x_max").get<double>();
    b.y_min = j.at("y_min").get<double>();
    b.y_max = j.at("y_max").get<double>();
    b.z_min = j.at("z_min").get<double>();
    b.z_max = j.at("z_max").get<double>();
    b.d_max = j.at("d_max").get<double>();
    return b;
}

json physics_to_json(const PhysicsConstants& p) {
    // dB-valued fields carry an explicit unit suffix in the file format.
    json charging{{"gamma", p.charging.gamma},
                  {"tau_m", p.charging.tau},
                  {"d_max_m", p.charging.d_max},
                  {"pc_min_w", p.charging.pc_min},
                  {"pc_max_w", p.charging.pc_max}};
    json comm{{"beta0_db", linear_to_db(p.comm.beta0)},
              {"path_loss_exponent", p.comm.alpha},
              {"kappa", p.comm.kappa},
              {"los_c", p.comm.los_c},
              {"los_d", p.comm.los_d},
              {"bandwidth_hz", p.comm.bandwidth},
              {"noise_power_dbm", watts_to_dbm(p.comm.noise_power)},
              {"rate_threshold_bps", p.comm.rate_threshold},
              {"pt_min_w", p.comm.pt_min},
              {"pt_max_w", p.comm.pt_max}};
    json uav{{"blade_power_w", p.uav.blade_power},
             {"induced_power_w", p.uav.induced_power},
             {"tip_speed_ms", p.uav.tip_speed},
             {"hover_induced_speed_ms", p.uav.hover_induced_speed},
             {"drag_ratio", p.uav.drag_ratio},
             {"air_density_kgm3", p.uav.air_density},
             {"rotor_solidity", p.uav.rotor_solidity},
             {"rotor_disk_area_m2", p.uav.rotor_disk_area},
             {"mass_kg", p.uav.mass},
             {"gravity_ms2", p.uav.gravity},
             {"cruise_speed_ms", p.uav.cruise_speed}};
    return json{{"charging", charging}, {"comm", comm}, {"uav", uav}};
}

PhysicsConstants physics_from_json(const json& j) {
    PhysicsConstants p;
    const json& c = j.at("charging");
    p.charging.gamma = c.at("gamma").get<double>();
    p.charging.tau = c.at("tau_m").get<double>();
    p.charging.d_max = c.at("d_max_m").get<double>();
    p.charging.pc_min = c.at("pc_min_w").get<double>();
    p.charging.pc_max = c.at("pc_max_w").get<double>();
    const json& m = j.at("comm");
    p.comm.beta0 = db_to_linear(m.at("beta0_db").get<double>());
    p.comm.alpha = m.at("path_loss_exponent").get<double>();
    p.comm.kappa = m.at("kappa").get<double>();
    p.comm.los_c = m.at("los_c").get<double>();
    p.comm.los_d = m.at("los_d").get<double>();
    p.comm.bandwidth = m.at("bandwidth_hz").get<double>();
    p.comm.noise_power = dbm_to_watts(m.at("noise_power_dbm").get<double>());
    p.comm.rate_threshold = m.at("rate_threshold_bps").get<double>();
    p.comm.pt_min = m.at("pt_min_w").get<double>();
    p.comm.pt_max = m.at("pt_max_w").get<double>();
    const json& u = j.at("uav");
    p.uav.blade_power = u.at("blade_power_w").get<double>();
    p.uav.induced_power = u.at("induced_power_w").get<double>();
    p.uav.tip_speed = u.at("tip_speed_ms").get<double>();
    p.uav.hover_induced_speed = u.at("hover_induced_speed_ms").get<double>();
    p.uav.drag_ratio = u.at("drag_ratio").get<double>();
    p.uav.air_density = u.at("air_density_kgm3").get<double>();
    p.uav.rotor_solidity = u.at("rotor_solidity").get<double>();
    p.uav.rotor_disk_area = u.at("rotor_disk_area_m2").get<double>();
    p.uav.mass = u.at("mass_kg").get<double>();
    p.uav.gravity = u.at("gravity_ms2").get<double>();
    p.uav.cruise_speed = u.at("cruise_speed_ms").get<double>();
    return p;
}

}  // namespace

std::string scenario_to_string(const Scenario& scenario) {
    json j;
    j["schema_version"] = kScenarioSchema;
    j["rng_seed"] = scenario.rng_seed;
    j["ground_epsilon_m"] = scenario.ground_epsilon;
    j["bounds"] = bounds_to_json(scenario.bounds);
    j["physics"] = physics_to_json(scenario.physics);
    json obstacles = json::array();
    for (const Obstacle& ob : scenario.obstacles) {
        obstacles.push_back(json{{"center_x", ob.center_x},
                                 {"center_y", ob.center_y},
                                 {"height", ob.height},
                                 {"slope_x", ob.slope_x},
                                 {"slope_y", ob.slope_y}});
    }
    j["obstacles"] = obstacles;
    json devices = json::array();
    for (const WirelessDevice& d : scenario.devices) {
        devices.push_back(json{{"x", d.x},
                               {"y", d.y},
                               {"required_energy_j", d.required_energy},
                               {"data_size_bits", d.data_size}});
    }
    j["devices"] = devices;
    return j.dump(2) + '\n';
}

Scenario scenario_from_string(const std::string& text, const std::string& context) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("scenario: parse error in " + context + ": " + e.what());
    }
    try {
        const std::string schema = j.at("schema_version").get<std::string>();
        if (schema != kScenarioSchema)
            throw std::runtime_error("scenario: schema mismatch in " + context + ": expected " +
                                     std::string(kScenarioSchema) + ", found " + schema);
        Scenario s;
        s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        s.ground_epsilon = j.at("ground_epsilon_m").get<double>();
        s.bounds = bounds_from_json(j.at("bounds"));
        s.physics = physics_from_json(j.at("physics"));
        for (const json& ob : j.at("obstacles")) {
            s.obstacles.push_back({ob.at("center_x").get<double>(), ob.at("center_y").get<double>(),
                                   ob.at("height").get<double>(), ob.at("slope_x").get<double>(),
                                   ob.at("slope_y").get<double>()});
        }
        for (const json& d : j.at("devices")) {
            s.devices.push_back({d.at("x").get<double>(), d.at("y").get<double>(),
                                 d.at("required_energy_j").get<double>(),
                                 d.at("data_size_bits").get<double>()});
        }
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw std::runtime_error("scenario: malformed field in " + context + ": " + e.what());
    }
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_scenario: cannot open " + path.string());
    out << scenario_to_string(scenario);
    if (!out) throw std::runtime_error("save_scenario: write failed for " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_scenario: cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return scenario_from_string(text, path.string());
}

GenerationParams bundled_scenario_params() {
    GenerationParams params;
    params.bounds = WorldBounds{};  // 500 x 500 m, altitudes 5..30 m, d_max 20 m
    params.obstacles = {
        {150.0, 150.0, 22.0, 60.0, 45.0},
        {350.0, 230.0, 25.0, 50.0, 70.0},
        {240.0, 380.0, 19.0, 70.0, 55.0},
    };
    params.device_count = 500;
    params.seed = 424242;
    return params;
}

Scenario bundled_scenario() { return generate_scenario(bundled_scenario_params()); }

}  // namespace uavplan
