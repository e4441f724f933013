#include "rcms/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace rcms {

namespace {

std::array<Vec2, 4> box_corners(const OrientedBox& b) {
    const Vec2 t{std::cos(b.heading), std::sin(b.heading)};
    const Vec2 n{-t.y(), t.x()};
    const Vec2 half_l = 0.5 * b.length * t;
    const Vec2 half_w = 0.5 * b.width * n;
    return {b.center + half_l + half_w, b.center + half_l - half_w, b.center - half_l - half_w,
            b.center - half_l + half_w};
}

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
    const auto ca = box_corners(a);
    const auto cb = box_corners(b);
    const std::array<Vec2, 4> axes = {
        Vec2{std::cos(a.heading), std::sin(a.heading)},
        Vec2{-std::sin(a.heading), std::cos(a.heading)},
        Vec2{std::cos(b.heading), std::sin(b.heading)},
        Vec2{-std::sin(b.heading), std::cos(b.heading)},
    };
    for (const auto& axis : axes) {
        double min_a = 1e300, max_a = -1e300, min_b = 1e300, max_b = -1e300;
        for (const auto& p : ca) {
            const double v = axis.dot(p);
            min_a = std::min(min_a, v);
            max_a = std::max(max_a, v);
        }
        for (const auto& p : cb) {
            const double v = axis.dot(p);
            min_b = std::min(min_b, v);
            max_b = std::max(max_b, v);
        }
        if (max_a < min_b || max_b < min_a) return false;  // strict gap separates
    }
    return true;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
}

double segment_segment_distance(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
    return std::min(std::min(point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1)),
                    std::min(point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)));
}

// Runtime state of one scripted agent. Road-following agents live in the
// road frame; lateral_crossing switches to constant world velocity.
struct AgentRuntime {
    const ScriptedAgent* src = nullptr;
    double s = 0.0, d = 0.0;
    double v = 0.0;       // longitudinal speed along the road
    double accel = 0.0;   // longitudinal accel
    double brake_target = 0.0;
    double d_rate = 0.0;  // lateral speed from the active swerve
    double target_d = 0.0;
    bool swerving = false;
    bool crossing = false;
    Vec2 cross_pos = Vec2::Zero();
    Vec2 cross_vel = Vec2::Zero();
    std::size_t next_directive = 0;
};

AgentRuntime make_runtime(const ScriptedAgent& agent, const RoadModel& road) {
    AgentRuntime rt;
    rt.src = &agent;
    const Vec2 sd = to_road_frame(agent.init.position, road);
    rt.s = sd.x();
    rt.d = sd.y();
    rt.v = agent.init.speed;
    rt.accel = agent.init.accel;
    rt.target_d = rt.d;
    rt.cross_pos = agent.init.position;
    return rt;
}

void apply_due_directives(AgentRuntime& rt, double t) {
    const auto& dirs = rt.src->script.directives;
    while (rt.next_directive < dirs.size() && dirs[rt.next_directive].at_time <= t) {
        const Directive& dir = dirs[rt.next_directive++];
        switch (dir.kind) {
            case Directive::Kind::Hold:
                rt.v = dir.speed;
                rt.accel = 0.0;
                break;
            case Directive::Kind::BrakeTo:
                rt.brake_target = dir.speed;
                rt.accel = (rt.v > dir.speed) ? -std::abs(dir.decel) : 0.0;
                break;
            case Directive::Kind::SwerveTo:
                rt.target_d = dir.lateral_offset;
                rt.d_rate = dir.rate;
                rt.swerving = true;
                break;
            case Directive::Kind::LateralCrossing:
                rt.crossing = true;
                rt.cross_vel = dir.velocity;
                break;
        }
    }
}

AgentObservation observe(const AgentRuntime& rt, const RoadModel& road) {
    AgentObservation obs = rt.src->init;
    if (rt.crossing) {
        obs.position = rt.cross_pos;
        const double n = rt.cross_vel.norm();
        obs.heading = n > 0.0 ? wrap_angle(std::atan2(rt.cross_vel.y(), rt.cross_vel.x()))
                              : rt.src->init.heading;
        obs.speed = n;
        obs.accel = 0.0;
        return obs;
    }
    obs.position = from_road_frame({rt.s, rt.d}, road);
    double lateral = 0.0;
    if (rt.swerving) {
        lateral = std::copysign(rt.d_rate, rt.target_d - rt.d);
    }
    if (rt.v == 0.0 && lateral == 0.0) {
        obs.heading = wrap_angle(road.road_heading);
        obs.speed = 0.0;
    } else {
        obs.heading = wrap_angle(road.road_heading + std::atan2(lateral, rt.v));
        obs.speed = std::hypot(rt.v, lateral);
    }
    obs.accel = rt.accel;
    return obs;
}

void integrate_agent(AgentRuntime& rt, double dt) {
    if (rt.crossing) {
        rt.cross_pos += dt * rt.cross_vel;
        return;
    }
    rt.s += dt * rt.v;
    if (rt.accel != 0.0) {
        double nv = rt.v + dt * rt.accel;
        if (rt.accel < 0.0 && nv <= rt.brake_target) {
            nv = rt.brake_target;
            rt.accel = 0.0;
        }
        rt.v = std::max(0.0, nv);
    }
    if (rt.swerving) {
        const double step = std::clamp(rt.target_d - rt.d, -rt.d_rate * dt, rt.d_rate * dt);
        rt.d += step;
        if (rt.d == rt.target_d) {
            rt.swerving = false;
            rt.d_rate = 0.0;
        }
    }
}

OrientedBox ego_box(const VehicleState& s, const VehicleFootprint& fp) {
    return {s.position(), s.heading, fp.length, fp.width};
}

OrientedBox agent_box(const AgentObservation& a) {
    return {a.position, a.heading, a.length, a.width};
}

}  // namespace

std::optional<std::pair<int, int>> detect_collision(
    const std::vector<std::pair<int, OrientedBox>>& boxes) {
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            if (boxes_overlap(boxes[i].second, boxes[j].second)) {
                return std::make_pair(boxes[i].first, boxes[j].first);
            }
        }
    }
    return std::nullopt;
}

double box_clearance(const OrientedBox& a, const OrientedBox& b) {
    if (boxes_overlap(a, b)) return 0.0;
    const auto ca = box_corners(a);
    const auto cb = box_corners(b);
    double best = 1e300;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            best = std::min(best, segment_segment_distance(ca[i], ca[(i + 1) % 4], cb[j],
                                                           cb[(j + 1) % 4]));
        }
    }
    return best;
}

std::vector<std::string> validate_scenario(const ScenarioSpec& spec) {
    std::vector<std::string> problems;
    if (spec.duration <= 0.0) problems.push_back("duration must be positive");
    if (spec.road.lane_count < 1) problems.push_back("road.lane_count must be >= 1");
    if (spec.road.lane_width <= 0.0) problems.push_back("road.lane_width must be positive");
    if (spec.road.speed_limit <= 0.0) problems.push_back("road.speed_limit must be positive");
    if (spec.road.shoulder_left < 0.0 || spec.road.shoulder_right < 0.0) {
        problems.push_back("road shoulders must be non-negative");
    }
    if (spec.bicycle.sample_time <= 0.0) problems.push_back("bicycle.sample_time must be positive");
    if (spec.bicycle.wheelbase <= 0.0) problems.push_back("bicycle.wheelbase must be positive");
    if (spec.planner.horizon < 1) problems.push_back("planner.horizon must be >= 1");
    if (spec.hysteresis.kappa_a <= spec.hysteresis.kappa_d || spec.hysteresis.kappa_d <= 0.0) {
        problems.push_back("hysteresis requires kappa_a > kappa_d > 0");
    }
    if (spec.hysteresis.tau_a <= spec.hysteresis.tau_d || spec.hysteresis.tau_d <= 0.0) {
        problems.push_back("hysteresis requires tau_a > tau_d > 0");
    }
    if (!in_bounds(spec.ego_init.position(), spec.road)) {
        problems.push_back("ego initial position is off the road");
    }
    std::vector<int> seen_ids;
    for (const auto& agent : spec.agents) {
        if (agent.init.id <= 0) {
            problems.push_back("agent id " + std::to_string(agent.init.id) +
                               " must be positive (0 is reserved for the ego)");
        }
        if (std::find(seen_ids.begin(), seen_ids.end(), agent.init.id) != seen_ids.end()) {
            problems.push_back("duplicate agent id " + std::to_string(agent.init.id));
        }
        seen_ids.push_back(agent.init.id);
        if (agent.init.length <= 0.0 || agent.init.width <= 0.0) {
            problems.push_back("agent " + std::to_string(agent.init.id) +
                               " has non-positive dimensions");
        }
        if (!in_bounds(agent.init.position, spec.road)) {
            problems.push_back("agent " + std::to_string(agent.init.id) +
                               " initial position is off the road");
        }
        double prev_at = -1e300;
        for (const auto& dir : agent.script.directives) {
            if (dir.at_time < prev_at) {
                problems.push_back("agent " + std::to_string(agent.init.id) +
                                   " directive times must be non-decreasing");
                break;
            }
            prev_at = dir.at_time;
        }
    }
    return problems;
}

PlannerSetup planner_setup_from(const ScenarioSpec& spec) {
    return {spec.planner, spec.bicycle, spec.field, spec.risk,
            spec.hysteresis, spec.ego_footprint};
}

RunRecord run(const ScenarioSpec& spec, PlannerSelection selection) {
    {
        const auto problems = validate_scenario(spec);
        if (!problems.empty()) {
            std::string msg = "invalid scenario:";
            for (const auto& p : problems) msg += "\n  " + p;
            throw std::invalid_argument(msg);
        }
    }

    const double ts = spec.bicycle.sample_time;
    const long n_ticks = std::lround(spec.duration / ts);

    RcmsPlanner rcms(planner_setup_from(spec));
    ActivationMachine machine(spec.hysteresis);

    std::vector<AgentRuntime> runtimes;
    runtimes.reserve(spec.agents.size());
    for (const auto& agent : spec.agents) runtimes.push_back(make_runtime(agent, spec.road));

    VehicleState ego = spec.ego_init;
    std::optional<PlannedTrajectory> prev_rcms;

    RunRecord record;
    record.ticks.reserve(n_ticks + 1);
    auto& summary = record.summary;
    summary.min_clearance = 1e300;

    double solve_sum = 0.0;
    long solve_count = 0;

    for (long k = 0; k <= n_ticks; ++k) {
        const double sim_t = k * ts;
        const double logged_t = sim_t - spec.pre_roll;

        for (auto& rt : runtimes) apply_due_directives(rt, sim_t);

        std::vector<AgentObservation> all_agents;
        all_agents.reserve(runtimes.size());
        for (const auto& rt : runtimes) all_agents.push_back(observe(rt, spec.road));

        const auto visible = visible_agents(ego, all_agents, spec.fov);
        const RiskAssessment assessment =
            assess_risk(ego, spec.ego_footprint, visible, spec.risk);

        PlannerMode mode = PlannerMode::MP;
        switch (selection) {
            case PlannerSelection::Switched:
            case PlannerSelection::BrakeOnly: {
                const PlannerMode before = machine.mode();
                mode = machine.update(assessment, k);
                if (mode != before) {
                    (mode == PlannerMode::RCMS ? summary.activation_times
                                               : summary.deactivation_times)
                        .push_back(logged_t);
                }
                break;
            }
            case PlannerSelection::BaselineOnly:
                mode = PlannerMode::MP;
                break;
            case PlannerSelection::RcmsOnly:
                mode = PlannerMode::RCMS;
                break;
        }

        const bool use_rcms =
            mode == PlannerMode::RCMS &&
            (selection == PlannerSelection::Switched || selection == PlannerSelection::RcmsOnly);
        const bool use_brake = mode == PlannerMode::RCMS && selection == PlannerSelection::BrakeOnly;

        PlannedTrajectory plan;
        if (use_rcms) {
            std::optional<std::vector<ControlInput>> warm;
            if (prev_rcms) warm = shift_warm_start(*prev_rcms);
            plan = rcms.plan(ego, visible, spec.road, warm);
            prev_rcms = plan;
            solve_sum += plan.solve_time_ms;
            summary.solve_ms_max = std::max(summary.solve_ms_max, plan.solve_time_ms);
            ++solve_count;
        } else {
            prev_rcms.reset();
            if (use_brake) {
                plan = mp_emergency_brake(ego, visible, spec.baseline, spec.bicycle,
                                          spec.planner.horizon);
            } else {
                plan = mp_plan(ego, visible, spec.road, spec.baseline, spec.bicycle,
                               spec.planner.horizon);
            }
        }
        const ControlInput applied = plan.controls.front();

        TickRecord tick;
        tick.t = logged_t;
        tick.ego = ego;
        tick.mode = mode;
        tick.kappa = assessment.kappa;
        tick.tau_risk = assessment.tau_risk;
        tick.applied = applied;
        tick.solve_ms = use_rcms ? plan.solve_time_ms : 0.0;
        tick.solver_iterations = use_rcms ? plan.iterations : 0;
        tick.objective = use_rcms ? plan.objective : 0.0;
        tick.saturated_accel = applied.accel == spec.bicycle.u_max.accel;
        tick.saturated_steer = std::abs(applied.steer) == spec.bicycle.u_max.steer;
        tick.agents = all_agents;
        record.ticks.push_back(std::move(tick));

        // Collision and clearance bookkeeping at the current poses.
        std::vector<std::pair<int, OrientedBox>> boxes;
        boxes.reserve(all_agents.size() + 1);
        boxes.emplace_back(0, ego_box(ego, spec.ego_footprint));
        for (const auto& a : all_agents) boxes.emplace_back(a.id, agent_box(a));
        if (!summary.collision) {
            if (const auto pair = detect_collision(boxes)) {
                summary.collision = true;
                summary.collision_id_a = pair->first;
                summary.collision_id_b = pair->second;
                summary.collision_time = logged_t;
            }
        }
        for (const auto& a : all_agents) {
            const double c = box_clearance(boxes.front().second, agent_box(a));
            if (c < summary.min_clearance) {
                summary.min_clearance = c;
                summary.min_clearance_time = logged_t;
            }
        }

        if (k == n_ticks) break;
        ego = step_bicycle(ego, applied, spec.bicycle);
        for (auto& rt : runtimes) integrate_agent(rt, ts);
    }

    summary.solve_ms_mean = solve_count > 0 ? solve_sum / solve_count : 0.0;
    if (runtimes.empty()) summary.min_clearance = 0.0;
    return record;
}

}  // namespace rcms
