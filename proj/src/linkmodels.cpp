#include "uavplan/linkmodels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uavplan/scenario.hpp"

namespace uavplan {

void ChargingConstants::validate() const {
    if (gamma <= 0.0) throw std::invalid_argument("charging: gamma must be positive");
    if (tau <= 0.0) throw std::invalid_argument("charging: tau must be positive");
    if (d_max <= 0.0) throw std::invalid_argument("charging: d_max must be positive");
    if (pc_min <= 0.0 || pc_min > pc_max) throw std::invalid_argument("charging: need 0 < pc_min <= pc_max");
}

void CommConstants::validate() const {
    if (beta0 <= 0.0) throw std::invalid_argument("comm: beta0 must be positive");
    if (alpha <= 0.0) throw std::invalid_argument("comm: alpha must be positive");
    if (kappa <= 0.0 || kappa > 1.0) throw std::invalid_argument("comm: kappa must be in (0, 1]");
    if (bandwidth <= 0.0) throw std::invalid_argument("comm: bandwidth must be positive");
    if (noise_power <= 0.0) throw std::invalid_argument("comm: noise power must be positive");
    if (pt_min <= 0.0 || pt_min > pt_max) throw std::invalid_argument("comm: need 0 < pt_min <= pt_max");
}

double distance(const WirelessDevice& device, const Vec3& point) {
    const double dx = device.x - point.x;
    const double dy = device.y - point.y;
    return std::sqrt(dx * dx + dy * dy + point.z * point.z);
}

double charging_efficiency(double d, const ChargingConstants& k) {
    if (d < 0.0) throw std::invalid_argument("charging_efficiency: negative distance");
    if (d > k.d_max) return 0.0;
    const double denom = d + k.tau;
    return k.gamma / (denom * denom);
}

double received_power(double pc, double d, const ChargingConstants& k) {
    if (pc < k.pc_min || pc > k.pc_max) throw std::out_of_range("received_power: pc outside [pc_min, pc_max]");
    return charging_efficiency(d, k) * pc;
}

double elevation_angle(const WirelessDevice& device, const Vec3& point) {
    const double d = distance(device, point);
    if (d <= 0.0) throw std::invalid_argument("elevation_angle: coincident device and point");
    const double ratio = clamp(point.z / d, -1.0, 1.0);
    return 180.0 / std::numbers::pi * std::asin(ratio);
}

double los_probability(double theta_deg, const CommConstants& k) {
    return 1.0 / (1.0 + k.los_c * std::exp(-k.los_d * (theta_deg - k.los_c)));
}

namespace {

double path_gain(double d, const CommConstants& k) {
    if (k.alpha == 2.0) return k.beta0 / (d * d);  // free-space fast path
    return k.beta0 * std::pow(d, -k.alpha);
}

}  // namespace

double expected_channel_gain(const WirelessDevice& device, const Vec3& point, const CommConstants& k) {
    const double d = distance(device, point);
    if (d <= 0.0) throw std::invalid_argument("expected_channel_gain: coincident device and point");
    const double p_los = los_probability(elevation_angle(device, point), k);
    return (p_los + (1.0 - p_los) * k.kappa) * path_gain(d, k);
}

double achievable_rate(double pt, const WirelessDevice& device, const Vec3& point, const CommConstants& k) {
    if (pt < k.pt_min || pt > k.pt_max) throw std::out_of_range("achievable_rate: pt outside [pt_min, pt_max]");
    const double gain = expected_channel_gain(device, point, k);
    return k.bandwidth * std::log2(1.0 + pt * gain / k.noise_power);
}

}  // namespace uavplan
