#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <random>

#include "rcms/rcms_planner.hpp"

using namespace rcms;

namespace {

// Recomputes the single-shooting objective from its published pieces:
// rollout, risk field, hinge penalties, and the control penalty.
double objective_oracle(const std::vector<ControlInput>& controls, const ObjectiveContext& ctx) {
    const auto states = rollout(ctx.initial, controls, ctx.bicycle);
    double total = 0.0;
    for (std::size_t j = 1; j < states.size(); ++j) {
        std::vector<FieldAgent> agents;
        for (std::size_t n = 0; n < ctx.tracks.size(); ++n) {
            agents.push_back({ctx.tracks[n].positions[j], ctx.tracks[n].velocity_at(j),
                              ctx.cov_inv[n], ctx.scale[n]});
        }
        total += total_risk(states[j].position(), agents, ctx.road, ctx.field);
        const double d = to_road_frame(states[j].position(), ctx.road).y();
        const double over = std::max(0.0, d - ctx.road.corridor_max());
        const double under = std::max(0.0, ctx.road.corridor_min() - d);
        total += ctx.corridor_penalty_weight * (over * over + under * under);
        const double v_over = std::max(0.0, states[j].speed - ctx.bicycle.speed_cap);
        total += ctx.speed_penalty_weight * v_over * v_over;
        const Eigen::Vector2d u(controls[j - 1].accel, controls[j - 1].steer);
        total += u.dot(ctx.control_weight * u);
    }
    return total;
}

ObjectiveContext random_context(std::mt19937& rng, int horizon) {
    std::uniform_real_distribution<double> ux(5.0, 60.0), ud(0.0, 10.5), uv(5.0, 25.0),
        uh(-0.1, 0.1), uw(0.001, 0.2);
    ObjectiveContext ctx;
    ctx.initial = {0.0, 5.25, wrap_angle(uh(rng)), uv(rng)};
    ctx.control_weight = Mat2::Zero();
    ctx.control_weight(0, 0) = uw(rng);
    ctx.control_weight(1, 1) = uw(rng);
    const int n_agents = 1 + static_cast<int>(rng() % 3);
    for (int n = 0; n < n_agents; ++n) {
        AgentObservation obs;
        obs.id = n + 1;
        obs.position = {ux(rng), ud(rng)};
        obs.heading = wrap_angle(uh(rng));
        obs.speed = uv(rng);
        obs.accel = 0.0;
        ctx.tracks.push_back(predict_agent(obs, horizon, ctx.bicycle.sample_time));
        ctx.cov_inv.push_back(field_covariance(obs.heading, obs.length, obs.width, ctx.field).inverse());
        ctx.scale.push_back(ctx.field.eta_tilde * obs.class_scale);
    }
    return ctx;
}

// Smooth interior controls: well inside the box and keeping the pre-clamp
// speed away from both 0 and the cap, so the objective is differentiable.
std::vector<ControlInput> random_interior_controls(std::mt19937& rng, int horizon) {
    std::uniform_real_distribution<double> ua(-0.8, 0.8), us(-0.15, 0.15);
    std::vector<ControlInput> controls(horizon);
    for (auto& u : controls) u = {ua(rng), us(rng)};
    return controls;
}

PlannerSetup default_setup(int horizon) {
    PlannerSetup setup;
    setup.planner.horizon = horizon;
    return setup;
}

bool states_identical(const std::vector<VehicleState>& a, const std::vector<VehicleState>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::memcmp(&a[i], &b[i], sizeof(VehicleState)) != 0) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("control_penalty") {
    PlannerConfig cfg;
    HysteresisConfig hys;

    SUBCASE("zero risk keeps the base weight") {
        const Mat2 r = control_penalty({}, cfg, hys);
        CHECK(r(0, 0) == doctest::Approx(cfg.r_accel));
        CHECK(r(1, 1) == doctest::Approx(cfg.r_steer));
        CHECK(r(0, 1) == 0.0);
    }
    SUBCASE("below q = 1 there is no relaxation") {
        RiskAssessment a;
        a.kappa = 0.2 * (hys.kappa_a + hys.kappa_d);  // q = 0.4
        const Mat2 r = control_penalty(a, cfg, hys);
        CHECK(r(0, 0) == doctest::Approx(cfg.r_accel));
    }
    SUBCASE("scales as R_base / q once q exceeds 1") {
        RiskAssessment a;
        a.kappa = hys.kappa_a + hys.kappa_d;          // contributes 2
        a.tau_risk = hys.tau_a + hys.tau_d;           // contributes 2
        const Mat2 r = control_penalty(a, cfg, hys);
        CHECK(r(0, 0) == doctest::Approx(cfg.r_accel / 4.0));
        CHECK(r(1, 1) == doctest::Approx(cfg.r_steer / 4.0));
    }
}

TEST_CASE("objective matches an independent recomputation") {
    std::mt19937 rng(21);
    const int horizon = 12;
    for (int trial = 0; trial < 50; ++trial) {
        const ObjectiveContext ctx = random_context(rng, horizon);
        const auto controls = random_interior_controls(rng, horizon);
        const double j = objective(controls, ctx);
        const double oracle = objective_oracle(controls, ctx);
        CHECK(std::abs(j - oracle) <= 1e-10 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("objective_gradient matches central finite differences") {
    std::mt19937 rng(34);
    const int horizon = 8;
    const double h = 1e-6;
    for (int trial = 0; trial < 40; ++trial) {
        const ObjectiveContext ctx = random_context(rng, horizon);
        auto controls = random_interior_controls(rng, horizon);
        const auto grad = objective_gradient(controls, ctx);
        REQUIRE(grad.size() == controls.size());

        Eigen::VectorXd fd(2 * horizon), an(2 * horizon);
        for (int k = 0; k < horizon; ++k) {
            an(2 * k) = grad[k].accel;
            an(2 * k + 1) = grad[k].steer;
            for (int c = 0; c < 2; ++c) {
                auto bump = [&](double eps) {
                    auto u = controls;
                    (c == 0 ? u[k].accel : u[k].steer) += eps;
                    return objective(u, ctx);
                };
                fd(2 * k + c) = (bump(h) - bump(-h)) / (2 * h);
            }
        }
        const double denom = std::max(1e-8, fd.norm());
        CHECK((an - fd).norm() / denom < 1e-4);
    }
}

TEST_CASE("speed clamp kills the acceleration sensitivity") {
    ObjectiveContext ctx;
    ctx.initial = {0.0, 5.25, 0.0, 0.0};  // at rest: braking cannot act
    ctx.control_weight = Mat2::Zero();
    const std::vector<ControlInput> controls(5, {-2.0, 0.0});
    const auto grad = objective_gradient(controls, ctx);
    for (const auto& g : grad) CHECK(g.accel == 0.0);
}

TEST_CASE("shift_warm_start drops the head and repeats the tail") {
    PlannedTrajectory prev;
    prev.controls = {{1.0, 0.1}, {2.0, 0.2}, {3.0, 0.3}};
    const auto shifted = shift_warm_start(prev);
    REQUIRE(shifted.size() == 3);
    CHECK(shifted[0].accel == 2.0);
    CHECK(shifted[1].steer == 0.3);
    CHECK(shifted[2].accel == 3.0);
    CHECK(shifted[2].steer == 0.3);
}

TEST_CASE("plan on an empty road holds nearly zero control") {
    RcmsPlanner planner(default_setup(30));
    RoadModel road;
    const VehicleState ego{0.0, 0.5 * (road.corridor_min() + road.corridor_max()), 0.0, 15.0};
    const auto traj = planner.plan(ego, {}, road);
    REQUIRE(traj.controls.size() == 30);
    for (const auto& u : traj.controls) {
        CHECK(std::abs(u.accel) < 1e-3);
        CHECK(std::abs(u.steer) < 1e-3);
    }
}

TEST_CASE("plan respects control bounds and is dynamics-consistent") {
    RcmsPlanner planner(default_setup(30));
    RoadModel road;
    const BicycleParams& bike = planner.setup().bicycle;

    AgentObservation threat;
    threat.id = 1;
    threat.position = {8.0, 5.25};  // directly ahead, nearly stopped
    threat.heading = 0.0;
    threat.speed = 1.0;
    const VehicleState ego{0.0, 5.25, 0.0, 20.0};

    const auto traj = planner.plan(ego, {threat}, road);
    REQUIRE(traj.controls.size() == 30);
    REQUIRE(traj.states.size() == 31);
    for (const auto& u : traj.controls) {
        CHECK(u.accel >= bike.u_min.accel);
        CHECK(u.accel <= bike.u_max.accel);
        CHECK(u.steer >= bike.u_min.steer);
        CHECK(u.steer <= bike.u_max.steer);
    }
    CHECK(states_identical(traj.states, rollout(ego, traj.controls, bike)));
}

TEST_CASE("plan never loses to the zero-control rollout") {
    std::mt19937 rng(55);
    RcmsPlanner planner(default_setup(20));
    RoadModel road;
    std::uniform_real_distribution<double> ux(5.0, 50.0), ud(-1.0, 11.0), uv(0.0, 28.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<AgentObservation> obs;
        const int n = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < n; ++i) {
            AgentObservation a;
            a.id = i + 1;
            a.position = {ux(rng), ud(rng)};
            a.speed = uv(rng);
            obs.push_back(a);
        }
        const VehicleState ego{0.0, ud(rng), 0.0, uv(rng)};
        const auto traj = planner.plan(ego, obs, road);
        const ObjectiveContext ctx = planner.make_context(ego, obs, road);
        const double f_zero = objective(std::vector<ControlInput>(20), ctx);
        CHECK(traj.objective <= f_zero + 1e-12);
        CHECK(std::abs(traj.objective - objective(traj.controls, ctx)) < 1e-9);
    }
}

TEST_CASE("plan is deterministic") {
    RcmsPlanner planner(default_setup(30));
    RoadModel road;
    AgentObservation a;
    a.id = 1;
    a.position = {25.0, 5.25};
    a.speed = 8.0;
    const VehicleState ego{0.0, 5.25, 0.0, 22.0};
    const auto t1 = planner.plan(ego, {a}, road);
    const auto t2 = planner.plan(ego, {a}, road);
    REQUIRE(t1.controls.size() == t2.controls.size());
    for (std::size_t i = 0; i < t1.controls.size(); ++i) {
        CHECK(t1.controls[i].accel == t2.controls[i].accel);
        CHECK(t1.controls[i].steer == t2.controls[i].steer);
    }
    CHECK(t1.objective == t2.objective);
}

TEST_CASE("plan beats a constant-control grid search around a static obstacle") {
    PlannerSetup setup = default_setup(15);
    setup.planner.max_iterations = 120;
    setup.planner.budget_s = 5.0;
    RcmsPlanner planner(setup);
    RoadModel road;

    AgentObservation block;
    block.id = 1;
    block.position = {20.0, 5.25};
    block.speed = 0.0;
    const VehicleState ego{0.0, 5.25, 0.0, 15.0};

    const auto traj = planner.plan(ego, {block}, road);
    const ObjectiveContext ctx = planner.make_context(ego, {block}, road);
    const BicycleParams& bike = planner.setup().bicycle;

    double best_constant = std::numeric_limits<double>::infinity();
    for (int ia = 0; ia <= 20; ++ia) {
        for (int is = 0; is <= 20; ++is) {
            const double a = bike.u_min.accel + ia * (bike.u_max.accel - bike.u_min.accel) / 20.0;
            const double s = bike.u_min.steer + is * (bike.u_max.steer - bike.u_min.steer) / 20.0;
            best_constant =
                std::min(best_constant, objective(std::vector<ControlInput>(15, {a, s}), ctx));
        }
    }
    CHECK(traj.objective <= best_constant + 1e-9);
}

TEST_CASE("warm start does not degrade the solution") {
    RcmsPlanner planner(default_setup(30));
    RoadModel road;
    AgentObservation a;
    a.id = 1;
    a.position = {15.0, 5.25};
    a.speed = 5.0;
    const VehicleState ego{0.0, 5.25, 0.0, 20.0};
    const auto cold = planner.plan(ego, {a}, road);
    const auto next_ego = cold.states[1];
    const auto warm = planner.plan(next_ego, {a}, road, shift_warm_start(cold));
    const auto cold2 = planner.plan(next_ego, {a}, road);
    // Both solves must be valid; the warm start may only help.
    const ObjectiveContext ctx = planner.make_context(next_ego, {a}, road);
    CHECK(warm.objective <= objective(std::vector<ControlInput>(30), ctx) + 1e-12);
    CHECK(warm.objective == doctest::Approx(objective(warm.controls, ctx)));
    CHECK(cold2.objective <= objective(std::vector<ControlInput>(30), ctx) + 1e-12);
}
