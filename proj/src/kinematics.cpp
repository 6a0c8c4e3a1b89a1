#include "crsn/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crsn {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

double distance_from_rssi(const RadioParams& p) {
    if (!(p.loss_exponent > 0.0) || !(p.wavelength_m > 0.0) || !(p.ref_distance_m > 0.0)) {
        throw std::invalid_argument("distance_from_rssi: invalid radio parameters");
    }
    const double reference_loss =
        20.0 * std::log10(4.0 * std::numbers::pi * p.ref_distance_m / p.wavelength_m);
    const double exponent = (p.path_loss_db - reference_loss) / (10.0 * p.loss_exponent);
    const double d = std::pow(10.0, exponent) * p.ref_distance_m;
    if (!finite(d) || d <= 0.0) {
        throw std::domain_error("distance_from_rssi: out-of-model RSSI");
    }
    return d;
}

double path_loss_at_distance(double distance_m, const RadioParams& p) {
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("path_loss_at_distance: distance must be positive");
    }
    const double reference_loss =
        20.0 * std::log10(4.0 * std::numbers::pi * p.ref_distance_m / p.wavelength_m);
    return reference_loss + 10.0 * p.loss_exponent * std::log10(distance_m / p.ref_distance_m);
}

double direction_angle(const MobilitySample& s) {
    const double ax = s.send_pos.x - s.recv_pos.x;
    const double ay = s.send_pos.y - s.recv_pos.y;
    const double bx = s.dest_send_pos.x - s.dest_recv_pos.x;
    const double by = s.dest_send_pos.y - s.dest_recv_pos.y;
    const double na = std::hypot(ax, ay);
    const double nb = std::hypot(bx, by);
    if (na == 0.0 || nb == 0.0) {
        throw std::domain_error("direction_angle: stationary endpoint");
    }
    double cosine = (ax * bx + ay * by) / (na * nb);
    if (cosine > 1.0) cosine = 1.0;
    if (cosine < -1.0) cosine = -1.0;
    return std::acos(cosine);
}

double direction_angle_or_zero(const MobilitySample& s) {
    try {
        return direction_angle(s);
    } catch (const std::domain_error&) {
        return 0.0;
    }
}

double displacement(double distance_m, double theta_rad) {
    if (distance_m < 0.0) {
        throw std::invalid_argument("displacement: negative distance");
    }
    if (theta_rad < 0.0 || theta_rad > std::numbers::pi + 1e-12) {
        throw std::invalid_argument("displacement: angle outside [0, pi]");
    }
    return distance_m * theta_rad;
}

double speed(const MobilitySample& s) {
    const double interval = (s.t_send + s.tx_time_s) - s.t_recv;
    if (!(interval > 0.0)) {
        throw std::domain_error("speed: non-positive interval");
    }
    return distance(s.recv_pos, s.send_pos) / interval;
}

double transmit_weight(const TransmitWeightInputs& in, double floor) {
    if (!finite(in.tx_range_m) || !finite(in.displacement) ||
        !finite(in.probe_link_delay_s) || !finite(in.speed_mps)) {
        throw std::invalid_argument("transmit_weight: non-finite input");
    }
    if (in.tx_range_m <= 0.0) {
        throw std::invalid_argument("transmit_weight: invalid transmission range");
    }
    const double tau = std::max(in.displacement, floor);
    const double probe = std::max(in.probe_link_delay_s, floor);
    const double spd = std::max(in.speed_mps, floor);
    return in.tx_range_m / (tau * probe * spd);
}

}  // namespace crsn
