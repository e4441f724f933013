#pragma once

#include <Eigen/Core>
#include <vector>

namespace rcms {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Straight multi-lane highway segment. Lateral coordinate is measured in
/// the road frame with the right lane boundary at 0 and increasing to the
/// left, so lane i (counted from the right) is centered at (i + 0.5) * lane_width.
struct RoadModel {
    int lane_count = 3;
    double lane_width = 3.5;         // m
    double shoulder_left = 2.0;      // m
    double shoulder_right = 2.0;     // m
    double speed_limit = 30.0;       // m/s
    double road_heading = 0.0;       // rad, fixed per scenario
    Vec2 origin = Vec2::Zero();

    double corridor_min() const { return -shoulder_right; }
    double corridor_max() const { return lane_count * lane_width + shoulder_left; }
    double lane_center(int lane) const { return (lane + 0.5) * lane_width; }

    Vec2 tangent() const { return {std::cos(road_heading), std::sin(road_heading)}; }
    Vec2 normal() const { return {-std::sin(road_heading), std::cos(road_heading)}; }
};

/// Circular sensing range around the ego vehicle.
struct FieldOfView {
    double range = 100.0;  // m
};

struct AgentObservation {
    int id = 0;
    Vec2 position = Vec2::Zero();
    double heading = 0.0;      // rad
    double speed = 0.0;        // m/s, scalar along heading
    double accel = 0.0;        // m/s^2
    double length = 4.5;       // m
    double width = 2.0;        // m
    double class_scale = 1.0;  // dimensionless risk scale

    Vec2 velocity() const { return speed * Vec2(std::cos(heading), std::sin(heading)); }
};

struct VehicleState {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // rad, wrapped to [0, 2pi)
    double speed = 0.0;    // m/s, >= 0

    Vec2 position() const { return {x, y}; }
    Vec2 velocity() const { return speed * Vec2(std::cos(heading), std::sin(heading)); }
};

struct ControlInput {
    double accel = 0.0;  // m/s^2
    double steer = 0.0;  // rad
};

/// Rectangular vehicle footprint, axis-aligned with the vehicle heading.
struct VehicleFootprint {
    double length = 4.5;  // m
    double width = 2.0;   // m
};

/// Wraps an angle into [0, 2pi).
double wrap_angle(double theta);

/// Agents whose center lies within the sensing range, ordered by id.
std::vector<AgentObservation> visible_agents(const VehicleState& ego,
                                             const std::vector<AgentObservation>& all,
                                             const FieldOfView& fov);

/// Global point -> (longitudinal s, lateral d) in the road frame.
Vec2 to_road_frame(const Vec2& p, const RoadModel& road);

/// Inverse of to_road_frame.
Vec2 from_road_frame(const Vec2& sd, const RoadModel& road);

/// True iff the lateral coordinate lies inside the drivable corridor
/// including shoulders. Closed set: boundary points are in bounds.
bool in_bounds(const Vec2& p, const RoadModel& road);

}  // namespace rcms
