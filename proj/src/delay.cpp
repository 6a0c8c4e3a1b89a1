#include "crsn/delay.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace crsn {

double queuing_delay(const QueueInputs& in) {
    if (in.data_rate_bps == 0.0) {
        throw std::domain_error("queuing_delay: zero data rate");
    }
    if (in.data_rate_bps < 0.0 || in.data_size_bits < 0.0 || in.neighbor_count < 0) {
        throw std::invalid_argument("queuing_delay: negative input");
    }
    return in.data_size_bits * static_cast<double>(in.neighbor_count) / in.data_rate_bps;
}

double backoff_delay(const BackoffInputs& in) {
    if (in.collision_prob >= 1.0) {
        throw std::domain_error("backoff_delay: certain collision");
    }
    if (in.collision_prob < 0.0 || !(in.window_s > 0.0) || in.neighbor_count < 1) {
        throw std::invalid_argument("backoff_delay: invalid input");
    }
    if (in.neighbor_count == 1) {
        return in.window_s;  // contention-free floor
    }
    const double p = in.collision_prob;
    const double denom =
        (1.0 - p) * (1.0 - std::pow(1.0 - p, static_cast<double>(in.neighbor_count - 1)));
    return in.window_s / denom;
}

double switching_delay(const SwitchInputs& in) {
    if (!(in.per_step_delay_s > 0.0)) {
        throw std::invalid_argument("switching_delay: per-step delay must be positive");
    }
    return in.per_step_delay_s *
           static_cast<double>(std::abs(in.from_channel.index - in.to_channel.index));
}

double link_delay(double switching_s, double queuing_s, double backoff_s) {
    if (switching_s < 0.0 || queuing_s < 0.0 || backoff_s < 0.0) {
        throw std::invalid_argument("link_delay: negative component");
    }
    return switching_s + queuing_s + backoff_s;
}

}  // namespace crsn
