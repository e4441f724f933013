#pragma once

#include "rcms/dynamics.hpp"
#include "rcms/rcms_planner.hpp"
#include "rcms/world.hpp"

namespace rcms {

struct BaselineConfig {
    int target_lane = 1;
    double cruise_speed = 20.0;     // m/s
    double lateral_gain = 0.05;     // steer per meter of lateral error
    double heading_gain = 0.8;      // steer per radian of heading error
    double speed_gain = 1.0;        // accel per m/s of speed error
    double brake_decel = 5.0;       // m/s^2, magnitude used by the emergency fallback
    double ttc_brake_trigger = 1.5; // s
};

/// Lane-center tracking at cruise speed: proportional steering on lateral
/// error and heading, proportional acceleration on speed error. The rollout
/// applies the feedback law closed-loop so the trajectory is horizon-shaped
/// like the RCMS output.
PlannedTrajectory mp_plan(const VehicleState& ego, const std::vector<AgentObservation>& observations,
                          const RoadModel& road, const BaselineConfig& cfg,
                          const BicycleParams& bike, int horizon);

/// Maximum braking with zero steering until rest.
PlannedTrajectory mp_emergency_brake(const VehicleState& ego,
                                     const std::vector<AgentObservation>& observations,
                                     const BaselineConfig& cfg, const BicycleParams& bike,
                                     int horizon);

}  // namespace rcms
