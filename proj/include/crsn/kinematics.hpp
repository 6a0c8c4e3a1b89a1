// Mobility-derived link quantities: RSSI-based distance, motion direction
// angle, displacement, node speed, and the transmit weight that feeds the
// routing metric. All functions are pure and reentrant.
#pragma once

#include "crsn/types.hpp"

namespace crsn {

// Log-distance path loss parameters for the RSSI distance estimate.
struct RadioParams {
    double path_loss_db = 0.0;   // measured path loss (kappa)
    double loss_exponent = 2.0;  // environment loss exponent
    double wavelength_m = 0.125;
    double ref_distance_m = 1.0;
};

// Two stamped positions of the sending node plus two stamped positions of
// the flow destination, as carried in a route request.
struct MobilitySample {
    Position recv_pos;       // sender position at the earlier sample
    Position send_pos;       // sender position at transmission
    Position dest_recv_pos;  // destination position at the earlier sample
    Position dest_send_pos;  // destination position at transmission
    Timestamp t_recv = 0.0;  // earlier sample time
    Timestamp t_send = 0.0;  // transmission time
    double tx_time_s = 0.0;  // transmission duration
};

struct TransmitWeightInputs {
    double tx_range_m = 0.0;        // transmission range
    double displacement = 0.0;      // meters * radian
    double probe_link_delay_s = 0.0;  // one-hop round-trip probe delay
    double speed_mps = 0.0;
};

// Floor applied to each denominator factor of the transmit weight; keeps the
// weight finite for stationary nodes and zero displacement while preserving
// ordering (a stationary neighbor is the most stable link).
inline constexpr double kDenominatorFloor = 1e-6;

// Distance from a measured path loss: d = 10^((k - 20*log10(4*pi*l0/v)) / (10*w)) * l0.
// Logs are base 10 (dB convention). Throws std::domain_error on a non-finite
// result (out-of-model RSSI) or invalid parameters.
double distance_from_rssi(const RadioParams& params);

// Inverse of distance_from_rssi: path loss in dB observed at true distance d.
// The simulator uses this to synthesize RSSI for receivers.
double path_loss_at_distance(double distance_m, const RadioParams& params);

// Angle in [0, pi] between the sender motion vector and the destination
// motion vector. Throws std::domain_error("stationary endpoint") when either
// vector has zero length.
double direction_angle(const MobilitySample& sample);

// direction_angle with the stationary case mapped to 0 (no direction change
// is the most favorable case).
double direction_angle_or_zero(const MobilitySample& sample);

// Displacement tau = d * theta. Requires d >= 0 and theta in [0, pi].
double displacement(double distance_m, double theta_rad);

// Sender speed: |recv_pos - send_pos| / ((t_send + tx_time) - t_recv).
// Throws std::domain_error("non-positive interval") when the denominator
// is not positive.
double speed(const MobilitySample& sample);

// Transmit weight: tx_range / (displacement * probe_delay * speed), with each
// denominator factor clamped below at `floor`. Throws std::invalid_argument
// on tx_range <= 0 or non-finite inputs.
double transmit_weight(const TransmitWeightInputs& in, double floor = kDenominatorFloor);

}  // namespace crsn
