#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcms/activation.hpp"
#include "rcms/baseline_mp.hpp"
#include "rcms/rcms_planner.hpp"
#include "rcms/world.hpp"

namespace rcms {

/// One timed behavior directive. Longitudinal directives (hold, brake_to)
/// and lateral directives (swerve_to) compose; lateral_crossing puts the
/// agent into constant-world-velocity mode (Scenario I crossing object).
struct Directive {
    enum class Kind { Hold, BrakeTo, SwerveTo, LateralCrossing };
    Kind kind = Kind::Hold;
    double at_time = 0.0;        // s from sim start
    double speed = 0.0;          // hold / brake_to target, m/s
    double decel = 0.0;          // brake_to, m/s^2 magnitude
    double lateral_offset = 0.0; // swerve_to target, road-frame d
    double rate = 0.0;           // swerve_to lateral speed, m/s
    Vec2 velocity = Vec2::Zero(); // lateral_crossing world velocity
};

struct BehaviorScript {
    std::vector<Directive> directives;  // at_time non-decreasing
};

struct ScriptedAgent {
    AgentObservation init;
    BehaviorScript script;
};

enum class PlannerSelection { Switched, BaselineOnly, BrakeOnly, RcmsOnly };

struct ScenarioSpec {
    std::string name;
    RoadModel road;
    VehicleState ego_init;
    VehicleFootprint ego_footprint;
    FieldOfView fov;
    BicycleParams bicycle;
    RiskParams risk;
    FieldParams field;
    HysteresisConfig hysteresis;
    PlannerConfig planner;
    BaselineConfig baseline;
    std::vector<ScriptedAgent> agents;
    double duration = 10.0;  // s
    double pre_roll = 0.0;   // s subtracted from logged time, so t=0 lands at activation
};

struct TickRecord {
    double t = 0.0;  // logged time (sim time minus pre_roll)
    VehicleState ego;
    PlannerMode mode = PlannerMode::MP;
    double kappa = 0.0;
    double tau_risk = 0.0;
    ControlInput applied;
    double solve_ms = 0.0;
    int solver_iterations = 0;
    double objective = 0.0;
    bool saturated_accel = false;
    bool saturated_steer = false;
    std::vector<AgentObservation> agents;  // all scripted agents, scenario order
};

struct RunSummary {
    bool collision = false;
    int collision_id_a = -1;  // 0 denotes the ego vehicle
    int collision_id_b = -1;
    double collision_time = 0.0;
    double min_clearance = 0.0;
    double min_clearance_time = 0.0;
    std::vector<double> activation_times;
    std::vector<double> deactivation_times;
    double solve_ms_mean = 0.0;
    double solve_ms_max = 0.0;
};

struct RunRecord {
    std::vector<TickRecord> ticks;
    RunSummary summary;
};

struct OrientedBox {
    Vec2 center = Vec2::Zero();
    double heading = 0.0;
    double length = 4.5;
    double width = 2.0;
};

/// Separating-axis overlap over all pairs; rectangles are closed so an
/// exact edge-to-edge touch counts as a collision. Returns the first
/// colliding pair in input order.
std::optional<std::pair<int, int>> detect_collision(
    const std::vector<std::pair<int, OrientedBox>>& boxes);

/// Euclidean clearance between two boxes, 0 when they overlap.
double box_clearance(const OrientedBox& a, const OrientedBox& b);

/// Scenario validation; returns human-readable problems, empty when valid.
std::vector<std::string> validate_scenario(const ScenarioSpec& spec);

/// Deterministic fixed-step closed-loop run.
/// Throws std::invalid_argument when validation fails.
RunRecord run(const ScenarioSpec& spec, PlannerSelection selection);

PlannerSetup planner_setup_from(const ScenarioSpec& spec);

}  // namespace rcms
