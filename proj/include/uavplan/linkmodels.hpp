#pragma once

#include "uavplan/geometry.hpp"

namespace uavplan {

struct WirelessDevice;  // scenario.hpp

// Downlink wireless-power-transfer constants. tau and d_max in meters,
// powers in watts.
struct ChargingConstants {
    double gamma = 36.0;
    double tau = 30.0;
    double d_max = 20.0;
    double pc_min = 1.0;
    double pc_max = 3.0;

    bool operator==(const ChargingConstants&) const = default;
    void validate() const;
};

// Uplink air-to-ground channel constants. All fields are linear units; dB
// conversion happens once when a scenario file is loaded.
struct CommConstants {
    double beta0 = 1e-6;          // gain at reference distance (-60 dB)
    double alpha = 2.0;           // path-loss exponent
    double kappa = 0.2;           // extra NLoS attenuation
    double los_c = 10.0;          // logistic parameters of the LoS probability
    double los_d = 0.6;
    double bandwidth = 1e6;       // Hz
    double noise_power = 1e-13;   // W (-100 dBm)
    double rate_threshold = 5e5;  // bit/s
    double pt_min = 0.1;
    double pt_max = 1.0;

    bool operator==(const CommConstants&) const = default;
    void validate() const;
};

// 3D distance between a ground device (z = 0) and a point in the air.
double distance(const WirelessDevice& device, const Vec3& point);

// Power conversion efficiency of the charging link; zero beyond d_max.
double charging_efficiency(double d, const ChargingConstants& k);

// Power received by a device at distance d when the charger transmits pc watts.
double received_power(double pc, double d, const ChargingConstants& k);

// Elevation angle in degrees seen from the device; undefined for coincident
// points (throws).
double elevation_angle(const WirelessDevice& device, const Vec3& point);

// Logistic line-of-sight probability as a function of the elevation angle.
double los_probability(double theta_deg, const CommConstants& k);

// Channel power gain averaged over the LoS/NLoS mixture.
double expected_channel_gain(const WirelessDevice& device, const Vec3& point, const CommConstants& k);

// Uplink rate in bit/s for a device transmitting pt watts to the given point.
double achievable_rate(double pt, const WirelessDevice& device, const Vec3& point, const CommConstants& k);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

}  // namespace uavplan
