// Per-link delay model: queuing, contention back-off, and channel switching
// components summed into the link delay used by the routing metric.
#pragma once

#include "crsn/types.hpp"

namespace crsn {

struct QueueInputs {
    double data_size_bits = 0.0;
    int neighbor_count = 0;
    double data_rate_bps = 0.0;
};

struct BackoffInputs {
    double collision_prob = 0.0;     // in [0, 1)
    int neighbor_count = 1;          // >= 1
    double window_s = 0.0;           // one contention-window duration
};

struct SwitchInputs {
    ChannelId from_channel;
    ChannelId to_channel;
    double per_step_delay_s = 0.010;  // tuning delay of two adjacent channels
};

// Queuing delay: data_size * neighbor_count / data_rate.
// Throws std::domain_error("zero data rate") when data_rate is 0.
double queuing_delay(const QueueInputs& in);

// Expected contention back-off: window / ((1-p)(1 - (1-p)^(n-1))) for n >= 2.
// A node with no contending neighbors (n == 1) waits at most one window, so
// the n == 1 case returns the window itself rather than diverging.
// Throws std::domain_error("certain collision") when collision_prob >= 1.
double backoff_delay(const BackoffInputs& in);

// Channel switching delay: per_step_delay * |from - to| on grid indices.
double switching_delay(const SwitchInputs& in);

// Link delay: sum of the switching, queuing, and back-off components.
double link_delay(double switching_s, double queuing_s, double backoff_s);

}  // namespace crsn
