#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "uavplan/rng.hpp"
#include "uavplan/scenario.hpp"

using namespace uavplan;

namespace {

GenerationParams small_params(std::uint64_t seed, int devices = 40) {
    GenerationParams p = bundled_scenario_params();
    p.device_count = devices;
    p.seed = seed;
    return p;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("obstacle height at the hill center is the height parameter") {
    const std::vector<Obstacle> field = {{100.0, 200.0, 20.0, 50.0, 50.0}};
    CHECK(obstacle_height(field, 100.0, 200.0) == doctest::Approx(20.0).epsilon(1e-14));
}

TEST_CASE("empty field is flat") {
    CHECK(obstacle_height({}, 123.4, -56.7) == 0.0);
    CHECK(is_ground_clear({}, 0.0, 0.0, 0.5));
}

TEST_CASE("single hill falls to h/e one slope length from the center") {
    // Closed form: 20 * exp(-((50/50)^2 + 0)) evaluated by hand before build.
    const double expected = 7.357588823428847;
    const std::vector<Obstacle> field = {{0.0, 0.0, 20.0, 50.0, 50.0}};
    CHECK(obstacle_height(field, 50.0, 0.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_FALSE(is_ground_clear(field, 50.0, 0.0, 0.5));
    CHECK_FALSE(is_ground_clear(field, 0.0, 0.0, 0.5));
}

TEST_CASE("single hill decreases along any ray from its center") {
    const std::vector<Obstacle> field = {{50.0, 80.0, 25.0, 40.0, 60.0}};
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const double angle = uniform(rng, 0.0, 6.283185307179586);
        double prev = obstacle_height(field, 50.0, 80.0);
        for (double r = 5.0; r <= 200.0; r += 5.0) {
            const double h = obstacle_height(field, 50.0 + r * std::cos(angle), 80.0 + r * std::sin(angle));
            CHECK(h <= prev);
            CHECK(h >= 0.0);
            prev = h;
        }
    }
}

TEST_CASE("generation is deterministic per seed") {
    const Scenario a = generate_scenario(small_params(42));
    const Scenario b = generate_scenario(small_params(42));
    CHECK(a == b);
    CHECK(scenario_to_string(a) == scenario_to_string(b));
    const Scenario c = generate_scenario(small_params(43));
    CHECK_FALSE(a == c);
}

TEST_CASE("flat field accepts every device on the first sample") {
    GenerationParams p = small_params(11, 500);
    p.obstacles.clear();
    p.max_rejections_per_device = 0;  // any rejection would throw
    const Scenario s = generate_scenario(p);
    CHECK(s.devices.size() == 500);
}

TEST_CASE("generation fails when no clear ground exists") {
    GenerationParams p = small_params(1, 5);
    // One extremely wide hill keeps the whole area above the epsilon.
    p.obstacles = {{250.0, 250.0, 25.0, 1e6, 1e6}};
    p.max_rejections_per_device = 200;
    CHECK_THROWS_WITH_AS(generate_scenario(p), doctest::Contains("placement budget"), std::runtime_error);
}

TEST_CASE("every generated device sits on clear ground") {
    for (std::uint64_t seed : {3u, 4u, 5u}) {
        const Scenario s = generate_scenario(small_params(seed, 200));
        for (const WirelessDevice& d : s.devices) {
            CHECK(is_ground_clear(s.obstacles, d.x, d.y, s.ground_epsilon));
        }
    }
}

TEST_CASE("save/load round-trips field for field") {
    const Scenario s = generate_scenario(small_params(99));
    const auto path = temp_file("uavplan_roundtrip.json");
    save_scenario(s, path);
    const Scenario loaded = load_scenario(path);
    CHECK(loaded == s);
    std::filesystem::remove(path);
}

TEST_CASE("generate-save-load-compare holds over 100 seeds") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Scenario s = generate_scenario(small_params(seed, 12));
        const Scenario back = scenario_from_string(scenario_to_string(s), "test");
        CHECK(back == s);
    }
}

TEST_CASE("truncated file is a parse error") {
    const Scenario s = generate_scenario(small_params(7, 10));
    const auto path = temp_file("uavplan_truncated.json");
    const std::string text = scenario_to_string(s);
    {
        std::ofstream out(path);
        out << text.substr(0, text.size() / 2);
    }
    CHECK_THROWS_WITH_AS(load_scenario(path), doctest::Contains("parse error"), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("schema version mismatch is rejected") {
    const Scenario s = generate_scenario(small_params(7, 10));
    std::string text = scenario_to_string(s);
    const auto pos = text.find("uavplan.scenario.v1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 19, "uavplan.scenario.v9");
    CHECK_THROWS_WITH_AS(scenario_from_string(text, "test"), doctest::Contains("schema mismatch"),
                         std::runtime_error);
}

TEST_CASE("a scenario without devices is invalid") {
    Scenario s = generate_scenario(small_params(7, 10));
    s.devices.clear();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("obstacles reaching the ceiling are rejected") {
    Scenario s = generate_scenario(small_params(7, 10));
    s.obstacles.push_back({250.0, 250.0, 29.9, 50.0, 50.0});
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("ceiling"), std::invalid_argument);
}

TEST_CASE("bundled scenario matches its advertised shape") {
    const Scenario s = bundled_scenario();
    CHECK(s.devices.size() == 500);
    CHECK(s.obstacles.size() == 3);
    CHECK(s.bounds.d_max == 20.0);
    CHECK(s.physics.uav.cruise_speed > 0.0);  // resolved at generation
    s.validate();
}

}
