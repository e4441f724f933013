#include "rcms/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcms {

VehicleState step_bicycle(const VehicleState& state, const ControlInput& u,
                          const BicycleParams& params) {
    if (!std::isfinite(state.x) || !std::isfinite(state.y) || !std::isfinite(state.heading) ||
        !std::isfinite(state.speed) || !std::isfinite(u.accel) || !std::isfinite(u.steer)) {
        throw std::invalid_argument("step_bicycle: non-finite state or control");
    }
    const double ts = params.sample_time;
    VehicleState next;
    next.x = state.x + ts * state.speed * std::cos(state.heading);
    next.y = state.y + ts * state.speed * std::sin(state.heading);
    next.heading =
        wrap_angle(state.heading + ts * (state.speed / params.wheelbase) * std::tan(u.steer));
    next.speed = std::clamp(state.speed + ts * u.accel, 0.0, params.speed_cap);
    return next;
}

std::vector<VehicleState> rollout(const VehicleState& initial,
                                  const std::vector<ControlInput>& controls,
                                  const BicycleParams& params) {
    std::vector<VehicleState> states;
    states.reserve(controls.size() + 1);
    states.push_back(initial);
    for (const auto& u : controls) states.push_back(step_bicycle(states.back(), u, params));
    return states;
}

PredictedTrack predict_agent(const AgentObservation& obs, int horizon, double sample_time) {
    PredictedTrack track;
    track.id = obs.id;
    track.heading = obs.heading;
    track.positions.reserve(horizon + 1);
    track.speeds.reserve(horizon + 1);
    const Vec2 dir{std::cos(obs.heading), std::sin(obs.heading)};
    Vec2 p = obs.position;
    double v = std::max(0.0, obs.speed);
    track.positions.push_back(p);
    track.speeds.push_back(v);
    for (int j = 0; j < horizon; ++j) {
        p += sample_time * v * dir;
        v = std::max(0.0, v + sample_time * obs.accel);
        track.positions.push_back(p);
        track.speeds.push_back(v);
    }
    return track;
}

}  // namespace rcms
