#include "crsn/kinematics.hpp"

#include "crsn/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace crsn;

namespace {

MobilitySample sample_from(Position a0, Position a1, Position b0, Position b1,
                           double t_recv = 0.0, double t_send = 0.9, double tx = 0.1) {
    MobilitySample s;
    s.recv_pos = a0;
    s.send_pos = a1;
    s.dest_recv_pos = b0;
    s.dest_send_pos = b1;
    s.t_recv = t_recv;
    s.t_send = t_send;
    s.tx_time_s = tx;
    return s;
}

}  // namespace

TEST_CASE("distance_from_rssi frozen values") {
    // independent route: loss at the reference distance computed from the
    // log-distance model itself
    const double baseline = 20.0 * std::log10(4.0 * std::numbers::pi / 0.125);
    CHECK(distance_from_rssi({baseline, 2.0, 0.125, 1.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(distance_from_rssi({baseline + 20.0, 2.0, 0.125, 1.0}) ==
          doctest::Approx(10.0).epsilon(1e-12));
    CHECK(distance_from_rssi({60.0, 2.0, 0.125, 1.0}) ==
          doctest::Approx(9.947183943243454).epsilon(1e-12));
}

TEST_CASE("distance_from_rssi round-trips through the loss model") {
    DetRng rng(42);
    for (int i = 0; i < 200; ++i) {
        RadioParams p;
        p.loss_exponent = rng.uniform(1.5, 4.0);
        p.wavelength_m = rng.uniform(0.05, 0.5);
        p.ref_distance_m = rng.uniform(0.5, 2.0);
        const double d_true = rng.uniform(1.0, 400.0);
        p.path_loss_db = path_loss_at_distance(d_true, p);
        CHECK(distance_from_rssi(p) == doctest::Approx(d_true).epsilon(1e-9));
    }
}

TEST_CASE("distance_from_rssi is monotone in loss and exponent") {
    DetRng rng(7);
    for (int i = 0; i < 200; ++i) {
        RadioParams p;
        p.loss_exponent = rng.uniform(1.5, 4.0);
        p.wavelength_m = rng.uniform(0.05, 0.5);
        p.ref_distance_m = 1.0;
        const double baseline =
            20.0 * std::log10(4.0 * std::numbers::pi * p.ref_distance_m / p.wavelength_m);
        p.path_loss_db = baseline + rng.uniform(1.0, 60.0);

        RadioParams higher_loss = p;
        higher_loss.path_loss_db += rng.uniform(0.1, 10.0);
        CHECK(distance_from_rssi(higher_loss) > distance_from_rssi(p));

        RadioParams higher_exponent = p;
        higher_exponent.loss_exponent += rng.uniform(0.1, 1.0);
        CHECK(distance_from_rssi(higher_exponent) < distance_from_rssi(p));
    }
}

TEST_CASE("distance_from_rssi rejects bad parameters") {
    CHECK_THROWS_AS(distance_from_rssi({60.0, 0.0, 0.125, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(distance_from_rssi({60.0, 2.0, -1.0, 1.0}), std::invalid_argument);
    // overflowing exponent signals an out-of-model reading
    CHECK_THROWS_AS(distance_from_rssi({1e7, 0.001, 0.125, 1.0}), std::domain_error);
}

TEST_CASE("direction_angle corners") {
    CHECK(direction_angle(sample_from({0, 0}, {1, 0}, {2, 2}, {3, 2})) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(direction_angle(sample_from({0, 0}, {1, 0}, {0, 0}, {0, 1})) ==
          doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
    CHECK(direction_angle(sample_from({0, 0}, {1, 0}, {0, 0}, {-1, 0})) ==
          doctest::Approx(std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("direction_angle symmetry and scale invariance") {
    DetRng rng(11);
    for (int i = 0; i < 200; ++i) {
        const Position a1{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const Position b1{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        if (std::hypot(a1.x, a1.y) < 1e-6 || std::hypot(b1.x, b1.y) < 1e-6) continue;
        const double fwd = direction_angle(sample_from({0, 0}, a1, {0, 0}, b1));
        const double swapped = direction_angle(sample_from({0, 0}, b1, {0, 0}, a1));
        CHECK(fwd == doctest::Approx(swapped).epsilon(1e-9));

        const double k = rng.uniform(0.1, 20.0);
        const double scaled =
            direction_angle(sample_from({0, 0}, {a1.x * k, a1.y * k}, {0, 0}, b1));
        CHECK(fwd == doctest::Approx(scaled).epsilon(1e-9));
    }
}

TEST_CASE("direction_angle stationary endpoint") {
    const auto s = sample_from({1, 1}, {1, 1}, {0, 0}, {1, 0});
    CHECK_THROWS_AS(direction_angle(s), std::domain_error);
    CHECK(direction_angle_or_zero(s) == 0.0);
}

TEST_CASE("displacement") {
    CHECK(displacement(123.0, 0.0) == 0.0);
    CHECK(displacement(10.0, 1.0) == doctest::Approx(10.0));
    CHECK(displacement(2.0, std::numbers::pi) ==
          doctest::Approx(6.283185307179586).epsilon(1e-12));
    CHECK_THROWS_AS(displacement(-1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(displacement(1.0, 4.0), std::invalid_argument);
}

TEST_CASE("speed") {
    CHECK(speed(sample_from({3, 3}, {3, 3}, {0, 0}, {1, 1})) == 0.0);
    CHECK(speed(sample_from({0, 0}, {3, 4}, {0, 0}, {1, 1})) == doctest::Approx(5.0));
    // interval (t_send + tx) - t_recv must be positive
    CHECK_THROWS_AS(speed(sample_from({0, 0}, {1, 0}, {0, 0}, {1, 1}, 2.0, 0.9, 0.1)),
                    std::domain_error);
}

TEST_CASE("speed is translation invariant") {
    DetRng rng(13);
    for (int i = 0; i < 100; ++i) {
        const Position a{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        const Position b{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        const double dx = rng.uniform(-100, 100);
        const double dy = rng.uniform(-100, 100);
        const double base = speed(sample_from(a, b, {0, 0}, {1, 1}));
        const double shifted =
            speed(sample_from({a.x + dx, a.y + dy}, {b.x + dx, b.y + dy}, {0, 0}, {1, 1}));
        CHECK(base == doctest::Approx(shifted).epsilon(1e-9));
    }
}

TEST_CASE("transmit_weight frozen values") {
    CHECK(transmit_weight({500.0, 1.0, 1.0, 1.0}) == doctest::Approx(500.0));
    CHECK(transmit_weight({500.0, 2.0, 0.05, 5.0}) == doctest::Approx(1000.0));
    CHECK(transmit_weight({500.0, 0.0, 1.0, 1.0}) == doctest::Approx(5e8));
}

TEST_CASE("transmit_weight errors") {
    CHECK_THROWS_AS(transmit_weight({0.0, 1.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(transmit_weight({-5.0, 1.0, 1.0, 1.0}), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(transmit_weight({500.0, inf, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("transmit_weight monotonicity above the clamp floor") {
    DetRng rng(17);
    for (int i = 0; i < 200; ++i) {
        TransmitWeightInputs in;
        in.tx_range_m = rng.uniform(10.0, 1000.0);
        in.displacement = rng.uniform(0.01, 50.0);
        in.probe_link_delay_s = rng.uniform(0.001, 1.0);
        in.speed_mps = rng.uniform(0.01, 30.0);
        const double base = transmit_weight(in);

        auto bumped = in;
        bumped.displacement *= 1.5;
        CHECK(transmit_weight(bumped) < base);
        bumped = in;
        bumped.probe_link_delay_s *= 1.5;
        CHECK(transmit_weight(bumped) < base);
        bumped = in;
        bumped.speed_mps *= 1.5;
        CHECK(transmit_weight(bumped) < base);
        // linear in the range
        bumped = in;
        bumped.tx_range_m *= 3.0;
        CHECK(transmit_weight(bumped) == doctest::Approx(3.0 * base).epsilon(1e-9));
    }
}
