#include "rcms/rcms_planner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

namespace rcms {

namespace {

using Vec4 = Eigen::Vector4d;
using VecX = Eigen::VectorXd;

std::vector<FieldAgent> agents_at_step(const ObjectiveContext& ctx, int j) {
    std::vector<FieldAgent> out;
    out.reserve(ctx.tracks.size());
    for (std::size_t n = 0; n < ctx.tracks.size(); ++n) {
        out.push_back({ctx.tracks[n].positions[j], ctx.tracks[n].velocity_at(j), ctx.cov_inv[n],
                       ctx.scale[n]});
    }
    return out;
}

// Stage cost at a rolled-out state: risk field plus hinge penalties.
double stage_cost(const VehicleState& s, const std::vector<FieldAgent>& agents,
                  const ObjectiveContext& ctx) {
    double cost = total_risk(s.position(), agents, ctx.road, ctx.field);
    const double d = to_road_frame(s.position(), ctx.road).y();
    const double over = std::max(0.0, d - ctx.road.corridor_max());
    const double under = std::max(0.0, ctx.road.corridor_min() - d);
    cost += ctx.corridor_penalty_weight * (over * over + under * under);
    const double v_over = std::max(0.0, s.speed - ctx.bicycle.speed_cap);
    cost += ctx.speed_penalty_weight * v_over * v_over;
    return cost;
}

// d(stage cost)/d(state) as (x, y, theta, v).
Vec4 stage_cost_gradient(const VehicleState& s, const std::vector<FieldAgent>& agents,
                         const ObjectiveContext& ctx) {
    Vec4 g = Vec4::Zero();
    const Vec2 gp = total_risk_gradient(s.position(), agents, ctx.road, ctx.field);
    g(0) = gp.x();
    g(1) = gp.y();
    const Vec2 n = ctx.road.normal();
    const double d = to_road_frame(s.position(), ctx.road).y();
    const double over = std::max(0.0, d - ctx.road.corridor_max());
    const double under = std::max(0.0, ctx.road.corridor_min() - d);
    const double dcost_dd = 2.0 * ctx.corridor_penalty_weight * (over - under);
    g(0) += dcost_dd * n.x();
    g(1) += dcost_dd * n.y();
    const double v_over = std::max(0.0, s.speed - ctx.bicycle.speed_cap);
    g(3) += 2.0 * ctx.speed_penalty_weight * v_over;
    return g;
}

struct Evaluation {
    double value = 0.0;
    VecX gradient;  // empty unless requested
};

Evaluation evaluate(const std::vector<ControlInput>& controls, const ObjectiveContext& ctx,
                    bool with_gradient) {
    const int h = static_cast<int>(controls.size());
    const double ts = ctx.bicycle.sample_time;
    const double wheelbase = ctx.bicycle.wheelbase;

    std::vector<VehicleState> states = rollout(ctx.initial, controls, ctx.bicycle);

    Evaluation ev;
    for (int j = 1; j <= h; ++j) {
        const auto agents = agents_at_step(ctx, j);
        ev.value += stage_cost(states[j], agents, ctx);
        const Eigen::Vector2d u(controls[j - 1].accel, controls[j - 1].steer);
        ev.value += u.dot(ctx.control_weight * u);
    }
    if (!with_gradient) return ev;

    ev.gradient = VecX::Zero(2 * h);
    Vec4 lambda = Vec4::Zero();  // dJ/d(state_j), accumulated backwards
    for (int j = h; j >= 1; --j) {
        const auto agents = agents_at_step(ctx, j);
        lambda += stage_cost_gradient(states[j], agents, ctx);

        const VehicleState& prev = states[j - 1];
        const ControlInput& u = controls[j - 1];
        const double c = std::cos(prev.heading);
        const double s = std::sin(prev.heading);
        const double tan_d = std::tan(u.steer);
        const double cos_d = std::cos(u.steer);
        // Speed clamp: zero sensitivity once the pre-clamp value leaves [0, cap].
        const double pre_v = prev.speed + ts * u.accel;
        const double cv = (pre_v > 0.0 && pre_v < ctx.bicycle.speed_cap) ? 1.0 : 0.0;

        // Control sensitivities through this step.
        ev.gradient(2 * (j - 1) + 0) = lambda(3) * ts * cv + 2.0 * ctx.control_weight(0, 0) * u.accel;
        ev.gradient(2 * (j - 1) + 1) =
            lambda(2) * ts * prev.speed / (wheelbase * cos_d * cos_d) +
            2.0 * ctx.control_weight(1, 1) * u.steer;

        // lambda_{j-1} = A^T lambda_j for the step Jacobian A.
        Vec4 prev_lambda;
        prev_lambda(0) = lambda(0);
        prev_lambda(1) = lambda(1);
        prev_lambda(2) = lambda(2) - lambda(0) * ts * prev.speed * s + lambda(1) * ts * prev.speed * c;
        prev_lambda(3) = lambda(0) * ts * c + lambda(1) * ts * s +
                         lambda(2) * ts * tan_d / wheelbase + lambda(3) * cv;
        lambda = prev_lambda;
    }
    return ev;
}

VecX flatten(const std::vector<ControlInput>& controls) {
    VecX x(2 * controls.size());
    for (std::size_t i = 0; i < controls.size(); ++i) {
        x(2 * i) = controls[i].accel;
        x(2 * i + 1) = controls[i].steer;
    }
    return x;
}

std::vector<ControlInput> unflatten(const VecX& x) {
    std::vector<ControlInput> controls(x.size() / 2);
    for (std::size_t i = 0; i < controls.size(); ++i) {
        controls[i] = {x(2 * i), x(2 * i + 1)};
    }
    return controls;
}

VecX project(VecX x, const BicycleParams& b) {
    for (Eigen::Index i = 0; i < x.size(); i += 2) {
        x(i) = std::clamp(x(i), b.u_min.accel, b.u_max.accel);
        x(i + 1) = std::clamp(x(i + 1), b.u_min.steer, b.u_max.steer);
    }
    return x;
}

// Two-loop recursion over stored (s, y) pairs.
VecX lbfgs_direction(const VecX& grad, const std::deque<std::pair<VecX, VecX>>& history) {
    VecX q = -grad;
    if (history.empty()) return q;
    std::vector<double> alpha(history.size());
    for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
        const auto& [s, y] = history[i];
        alpha[i] = s.dot(q) / y.dot(s);
        q -= alpha[i] * y;
    }
    const auto& [s_last, y_last] = history.back();
    q *= s_last.dot(y_last) / y_last.dot(y_last);
    for (std::size_t i = 0; i < history.size(); ++i) {
        const auto& [s, y] = history[i];
        const double beta = y.dot(q) / y.dot(s);
        q += (alpha[i] - beta) * s;
    }
    return q;
}

}  // namespace

Mat2 control_penalty(const RiskAssessment& assessment, const PlannerConfig& cfg,
                     const HysteresisConfig& hys) {
    const double q = 2.0 * assessment.kappa / (hys.kappa_a + hys.kappa_d) +
                     2.0 * assessment.tau_risk / (hys.tau_a + hys.tau_d);
    return cfg.r_base() / std::max(1.0, q);
}

double objective(const std::vector<ControlInput>& controls, const ObjectiveContext& ctx) {
    return evaluate(controls, ctx, false).value;
}

std::vector<ControlInput> objective_gradient(const std::vector<ControlInput>& controls,
                                             const ObjectiveContext& ctx) {
    return unflatten(evaluate(controls, ctx, true).gradient);
}

std::vector<ControlInput> shift_warm_start(const PlannedTrajectory& prev) {
    std::vector<ControlInput> shifted(prev.controls.begin() + 1, prev.controls.end());
    shifted.push_back(prev.controls.back());
    return shifted;
}

ObjectiveContext RcmsPlanner::make_context(const VehicleState& initial,
                                           const std::vector<AgentObservation>& observations,
                                           const RoadModel& road) const {
    ObjectiveContext ctx;
    ctx.initial = initial;
    ctx.road = road;
    ctx.field = setup_.field;
    ctx.bicycle = setup_.bicycle;
    ctx.corridor_penalty_weight = setup_.planner.corridor_penalty_weight;
    ctx.speed_penalty_weight = setup_.planner.speed_penalty_weight;
    for (const auto& obs : observations) {
        ctx.tracks.push_back(predict_agent(obs, setup_.planner.horizon, setup_.bicycle.sample_time));
        ctx.cov_inv.push_back(
            field_covariance(obs.heading, obs.length, obs.width, setup_.field).inverse());
        ctx.scale.push_back(setup_.field.eta_tilde * obs.class_scale);
    }
    const RiskAssessment assessment =
        assess_risk(initial, setup_.ego_footprint, observations, setup_.risk);
    ctx.control_weight = control_penalty(assessment, setup_.planner, setup_.hysteresis);
    return ctx;
}

PlannedTrajectory RcmsPlanner::plan(const VehicleState& initial,
                                    const std::vector<AgentObservation>& observations,
                                    const RoadModel& road,
                                    const std::optional<std::vector<ControlInput>>& warm_start) const {
    const auto t0 = std::chrono::steady_clock::now();
    const ObjectiveContext ctx = make_context(initial, observations, road);
    const int h = setup_.planner.horizon;
    const auto& bike = setup_.bicycle;

    const VecX zero = VecX::Zero(2 * h);

    // Seed candidates: zero, the warm start, and a coarse grid of constant
    // controls. The grid breaks the symmetry of head-on scenes, where the
    // steering gradient vanishes identically and a pure descent method
    // could never leave the axis.
    VecX best_x = zero;
    double best_f = evaluate(unflatten(zero), ctx, false).value;
    auto consider_seed = [&](const VecX& cand) {
        const double f = evaluate(unflatten(cand), ctx, false).value;
        if (f < best_f) {
            best_f = f;
            best_x = cand;
        }
    };
    if (warm_start && static_cast<int>(warm_start->size()) == h) {
        consider_seed(project(flatten(*warm_start), bike));
    }
    constexpr int kSeedGrid = 20;
    for (int ia = 0; ia <= kSeedGrid; ++ia) {
        for (int is = 0; is <= kSeedGrid; ++is) {
            VecX cand(2 * h);
            for (int j = 0; j < h; ++j) {
                cand(2 * j) = bike.u_min.accel +
                              ia * (bike.u_max.accel - bike.u_min.accel) / kSeedGrid;
                cand(2 * j + 1) = bike.u_min.steer +
                                  is * (bike.u_max.steer - bike.u_min.steer) / kSeedGrid;
            }
            consider_seed(cand);
        }
    }

    VecX x = best_x;
    Evaluation ev = evaluate(unflatten(x), ctx, true);

    std::deque<std::pair<VecX, VecX>> history;
    constexpr int kMemory = 8;
    int iters = 0;
    bool budget_exhausted = false;

    auto elapsed_s = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    for (; iters < setup_.planner.max_iterations; ++iters) {
        if (elapsed_s() > setup_.planner.budget_s) {
            budget_exhausted = true;
            break;
        }
        const VecX pg = x - project(x - ev.gradient, bike);
        if (pg.lpNorm<Eigen::Infinity>() < setup_.planner.grad_tol) break;

        VecX dir = lbfgs_direction(ev.gradient, history);
        if (dir.dot(ev.gradient) >= 0.0) {
            history.clear();
            dir = -ev.gradient;
        }

        double step = 1.0;
        bool accepted = false;
        VecX x_new;
        double f_new = 0.0;
        for (int ls = 0; ls < 40; ++ls) {
            x_new = project(x + step * dir, bike);
            if ((x_new - x).lpNorm<Eigen::Infinity>() < 1e-14) break;
            f_new = evaluate(unflatten(x_new), ctx, false).value;
            const double decrease = ev.gradient.dot(x_new - x);
            if (f_new <= ev.value + 1e-4 * decrease) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        Evaluation ev_new = evaluate(unflatten(x_new), ctx, true);
        const VecX s = x_new - x;
        const VecX y = ev_new.gradient - ev.gradient;
        if (s.dot(y) > 1e-12) {
            history.emplace_back(s, y);
            if (history.size() > kMemory) history.pop_front();
        }
        x = x_new;
        ev = ev_new;
        ev.value = f_new;
        if (f_new < best_f) {
            best_f = f_new;
            best_x = x;
        }
    }

    PlannedTrajectory out;
    out.controls = unflatten(best_x);
    out.states = rollout(initial, out.controls, bike);
    out.objective = best_f;
    out.iterations = iters;
    out.budget_exhausted = budget_exhausted;
    out.solve_time_ms = elapsed_s() * 1e3;
    return out;
}

}  // namespace rcms
