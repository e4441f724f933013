#include "rcms/baseline_mp.hpp"

#include <algorithm>
#include <cmath>

namespace rcms {

namespace {

// Wraps into (-pi, pi].
double signed_angle(double theta) {
    double w = wrap_angle(theta);
    if (w > M_PI) w -= 2.0 * M_PI;
    return w;
}

ControlInput lane_keep_control(const VehicleState& s, const RoadModel& road,
                               const BaselineConfig& cfg, const BicycleParams& bike) {
    const double d = to_road_frame(s.position(), road).y();
    const double lateral_error = d - road.lane_center(cfg.target_lane);
    const double heading_error = signed_angle(s.heading - road.road_heading);
    ControlInput u;
    u.steer = std::clamp(-cfg.lateral_gain * lateral_error - cfg.heading_gain * heading_error,
                         bike.u_min.steer, bike.u_max.steer);
    u.accel = std::clamp(cfg.speed_gain * (cfg.cruise_speed - s.speed), bike.u_min.accel,
                         bike.u_max.accel);
    return u;
}

}  // namespace

PlannedTrajectory mp_plan(const VehicleState& ego, const std::vector<AgentObservation>&,
                          const RoadModel& road, const BaselineConfig& cfg,
                          const BicycleParams& bike, int horizon) {
    PlannedTrajectory traj;
    traj.states.push_back(ego);
    for (int j = 0; j < horizon; ++j) {
        const ControlInput u = lane_keep_control(traj.states.back(), road, cfg, bike);
        traj.controls.push_back(u);
        traj.states.push_back(step_bicycle(traj.states.back(), u, bike));
    }
    return traj;
}

PlannedTrajectory mp_emergency_brake(const VehicleState& ego,
                                     const std::vector<AgentObservation>&,
                                     const BaselineConfig& cfg, const BicycleParams& bike,
                                     int horizon) {
    PlannedTrajectory traj;
    traj.states.push_back(ego);
    const double accel = std::max(bike.u_min.accel, -cfg.brake_decel);
    for (int j = 0; j < horizon; ++j) {
        const ControlInput u{accel, 0.0};
        traj.controls.push_back(u);
        traj.states.push_back(step_bicycle(traj.states.back(), u, bike));
    }
    return traj;
}

}  // namespace rcms
