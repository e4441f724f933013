#pragma once

#include <vector>

#include "rcms/world.hpp"

namespace rcms {

struct BicycleParams {
    double wheelbase = 2.7;    // m
    double sample_time = 0.1;  // s
    double speed_cap = 60.0;   // m/s, twice the speed limit
    ControlInput u_min{-5.0, -0.5};
    ControlInput u_max{3.5, 0.5};
};

/// Constant-acceleration forecast of one agent over the planning horizon.
/// Heading and acceleration are frozen at observation time; speed is
/// clamped at zero so braking agents come to rest instead of reversing.
struct PredictedTrack {
    int id = 0;
    double heading = 0.0;
    std::vector<Vec2> positions;  // H+1 entries, [0] = observation
    std::vector<double> speeds;   // H+1 entries, >= 0

    Vec2 velocity_at(int j) const {
        return speeds[j] * Vec2(std::cos(heading), std::sin(heading));
    }
};

/// One explicit-Euler step of the kinematic bicycle model. Speed is clamped
/// to [0, speed_cap] and heading wrapped to [0, 2pi).
/// Throws std::invalid_argument on non-finite state or control.
VehicleState step_bicycle(const VehicleState& state, const ControlInput& u,
                          const BicycleParams& params);

/// Iterates step_bicycle; result[0] is `initial`, result has controls.size()+1 entries.
std::vector<VehicleState> rollout(const VehicleState& initial,
                                  const std::vector<ControlInput>& controls,
                                  const BicycleParams& params);

PredictedTrack predict_agent(const AgentObservation& obs, int horizon, double sample_time);

}  // namespace rcms
