#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "rcms/dynamics.hpp"

using namespace rcms;

namespace {

BicycleParams params() {
    BicycleParams p;
    p.wheelbase = 2.7;
    p.sample_time = 0.1;
    p.speed_cap = 60.0;
    return p;
}

}  // namespace

TEST_CASE("step_bicycle matches the explicit Euler update") {
    const BicycleParams p = params();

    SUBCASE("straight coasting") {
        const VehicleState next = step_bicycle({0, 0, 0, 10}, {0, 0}, p);
        CHECK(next.x == doctest::Approx(1.0));
        CHECK(next.y == doctest::Approx(0.0));
        CHECK(next.heading == doctest::Approx(0.0));
        CHECK(next.speed == doctest::Approx(10.0));
    }
    SUBCASE("pure acceleration") {
        const VehicleState next = step_bicycle({0, 0, 0, 10}, {1, 0}, p);
        CHECK(next.x == doctest::Approx(1.0));
        CHECK(next.speed == doctest::Approx(10.1));
    }
    SUBCASE("steering turns the heading by Ts*(v/L)*tan(delta)") {
        const VehicleState next = step_bicycle({0, 0, 0, 10}, {0, 0.1}, p);
        CHECK(next.heading == doctest::Approx(0.1 * (10.0 / 2.7) * std::tan(0.1)));
    }
    SUBCASE("zero steer keeps heading, zero accel keeps speed") {
        const VehicleState next = step_bicycle({1, 2, 0.7, 12}, {1.5, 0.0}, p);
        CHECK(next.heading == doctest::Approx(0.7));
        const VehicleState next2 = step_bicycle({1, 2, 0.7, 12}, {0.0, 0.3}, p);
        CHECK(next2.speed == doctest::Approx(12.0));
    }
    SUBCASE("displacement magnitude is Ts*v") {
        const VehicleState s{3, -4, 2.1, 17};
        const VehicleState next = step_bicycle(s, {2, -0.2}, p);
        CHECK(std::hypot(next.x - s.x, next.y - s.y) == doctest::Approx(0.1 * 17.0));
    }
    SUBCASE("speed clamps at zero and at the cap") {
        CHECK(step_bicycle({0, 0, 0, 0.2}, {-5, 0}, p).speed == 0.0);
        CHECK(step_bicycle({0, 0, 0, 59.9}, {3.5, 0}, p).speed == doctest::Approx(60.0));
    }
    SUBCASE("heading wraps to [0, 2pi)") {
        const VehicleState next = step_bicycle({0, 0, 6.2, 30}, {0, 0.5}, p);
        CHECK(next.heading >= 0.0);
        CHECK(next.heading < 2.0 * M_PI);
    }
    SUBCASE("rejects non-finite input") {
        CHECK_THROWS_AS(step_bicycle({std::numeric_limits<double>::quiet_NaN(), 0, 0, 1}, {0, 0}, p),
                        std::invalid_argument);
        CHECK_THROWS_AS(step_bicycle({0, 0, 0, 1}, {std::numeric_limits<double>::infinity(), 0}, p),
                        std::invalid_argument);
    }
}

TEST_CASE("rollout") {
    const BicycleParams p = params();
    const VehicleState init{0, 0, 0, 15};

    SUBCASE("empty horizon yields just the initial state") {
        const auto states = rollout(init, {}, p);
        REQUIRE(states.size() == 1);
        CHECK(states[0].x == init.x);
    }
    SUBCASE("zero controls advance x by j*Ts*v") {
        const auto states = rollout(init, std::vector<ControlInput>(10), p);
        for (int j = 0; j <= 10; ++j) CHECK(states[j].x == doctest::Approx(j * 0.1 * 15.0));
    }
    SUBCASE("matches independent re-iteration of step_bicycle") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> ua(-5.0, 3.5), ud(-0.5, 0.5);
        std::vector<ControlInput> controls;
        for (int j = 0; j < 25; ++j) controls.push_back({ua(rng), ud(rng)});
        const auto states = rollout(init, controls, p);
        VehicleState s = init;
        for (int j = 0; j < 25; ++j) s = step_bicycle(s, controls[j], p);
        CHECK(states.back().x == doctest::Approx(s.x));
        CHECK(states.back().y == doctest::Approx(s.y));
        CHECK(states.back().heading == doctest::Approx(s.heading));
        CHECK(states.back().speed == doctest::Approx(s.speed));
    }
}

TEST_CASE("predict_agent constant-acceleration forecast") {
    SUBCASE("one Euler step") {
        AgentObservation obs;
        obs.position = {0, 0};
        obs.speed = 10;
        obs.accel = 2;
        obs.heading = 0;
        const auto track = predict_agent(obs, 5, 0.1);
        REQUIRE(track.positions.size() == 6);
        CHECK(track.positions[1].x() == doctest::Approx(1.0));
        CHECK(track.speeds[1] == doctest::Approx(10.2));
    }
    SUBCASE("hard braking clamps speed at zero and freezes position") {
        AgentObservation obs;
        obs.speed = 10;
        obs.accel = -200;
        const auto track = predict_agent(obs, 4, 0.1);
        CHECK(track.speeds[1] == 0.0);
        // First step still moves with the pre-brake speed, per explicit Euler.
        CHECK(track.positions[1].x() == doctest::Approx(1.0));
        CHECK(track.positions[2].x() == doctest::Approx(track.positions[1].x()));
        CHECK(track.positions[4].x() == doctest::Approx(track.positions[1].x()));
    }
    SUBCASE("lateral heading moves y only") {
        AgentObservation obs;
        obs.heading = M_PI / 2.0;
        obs.speed = 10;
        const auto track = predict_agent(obs, 1, 0.1);
        CHECK(track.positions[1].y() == doctest::Approx(1.0));
        CHECK(track.positions[1].x() == doctest::Approx(0.0));
    }
    SUBCASE("step 0 equals the observation") {
        AgentObservation obs;
        obs.position = {4, 7};
        obs.speed = 9;
        const auto track = predict_agent(obs, 3, 0.1);
        CHECK(track.positions[0] == obs.position);
        CHECK(track.speeds[0] == obs.speed);
    }
    SUBCASE("translation equivariance") {
        AgentObservation a;
        a.position = {1, 2};
        a.speed = 8;
        a.accel = 1;
        a.heading = 0.3;
        AgentObservation b = a;
        b.position += Vec2{10, -5};
        const auto ta = predict_agent(a, 10, 0.1);
        const auto tb = predict_agent(b, 10, 0.1);
        for (int j = 0; j <= 10; ++j) {
            CHECK((tb.positions[j] - ta.positions[j] - Vec2{10, -5}).norm() < 1e-12);
        }
    }
    SUBCASE("speeds non-negative and affine in j before the clamp") {
        AgentObservation obs;
        obs.speed = 6;
        obs.accel = -2;
        const auto track = predict_agent(obs, 10, 0.1);
        for (int j = 0; j <= 10; ++j) {
            CHECK(track.speeds[j] >= 0.0);
            const double affine = 6.0 - 2.0 * 0.1 * j;
            if (affine >= 0.0) CHECK(track.speeds[j] == doctest::Approx(affine));
        }
    }
}
