#pragma once

#include <optional>
#include <vector>

#include "rcms/activation.hpp"
#include "rcms/dynamics.hpp"
#include "rcms/risk_field.hpp"
#include "rcms/risk_metrics.hpp"
#include "rcms/world.hpp"

namespace rcms {

struct PlannerConfig {
    int horizon = 30;
    double r_accel = 0.01;   // R_base diagonal, acceleration channel
    double r_steer = 0.1;    // R_base diagonal, steering channel
    double corridor_penalty_weight = 5.0;  // quadratic hinge on corridor violation
    double speed_penalty_weight = 1.0;     // quadratic hinge above the speed cap
    int max_iterations = 60;
    double grad_tol = 1e-6;       // projected-gradient infinity norm
    double budget_s = 0.08;       // wall-clock cap per solve

    Mat2 r_base() const {
        Mat2 r = Mat2::Zero();
        r(0, 0) = r_accel;
        r(1, 1) = r_steer;
        return r;
    }
};

struct PlannedTrajectory {
    std::vector<VehicleState> states;    // horizon + 1
    std::vector<ControlInput> controls;  // horizon
    double objective = 0.0;
    int iterations = 0;
    double solve_time_ms = 0.0;
    bool budget_exhausted = false;
};

/// Everything the objective needs besides the decision variables.
struct ObjectiveContext {
    VehicleState initial;
    std::vector<PredictedTrack> tracks;
    std::vector<Mat2> cov_inv;   // field footprint covariance inverse, per track
    std::vector<double> scale;   // field scale, per track
    RoadModel road;
    FieldParams field;
    BicycleParams bicycle;
    Mat2 control_weight = Mat2::Zero();
    double corridor_penalty_weight = 5.0;
    double speed_penalty_weight = 1.0;
};

/// Time-varying control penalty: R(k) = R_base / max(1, q) with
/// q = 2*kappa/(kappa_a + kappa_d) + 2*tau_risk/(tau_a + tau_d).
Mat2 control_penalty(const RiskAssessment& assessment, const PlannerConfig& cfg,
                     const HysteresisConfig& hys);

/// J = sum_{j=1..H} rho(state_j) + u_{j-1}^T R u_{j-1} plus corridor and
/// speed-cap hinge penalties, through a single-shooting rollout.
double objective(const std::vector<ControlInput>& controls, const ObjectiveContext& ctx);

/// Exact reverse-accumulation gradient of `objective` w.r.t. every control.
std::vector<ControlInput> objective_gradient(const std::vector<ControlInput>& controls,
                                             const ObjectiveContext& ctx);

/// Receding-horizon warm start: drop the first control, repeat the last.
std::vector<ControlInput> shift_warm_start(const PlannedTrajectory& prev);

struct PlannerSetup {
    PlannerConfig planner;
    BicycleParams bicycle;
    FieldParams field;
    RiskParams risk;
    HysteresisConfig hysteresis;
    VehicleFootprint ego_footprint;
};

/// Box-projected limited-memory quasi-Newton solver over the control
/// sequence. Always returns a dynamics-consistent, control-feasible
/// trajectory no worse than the zero-control rollout.
class RcmsPlanner {
public:
    explicit RcmsPlanner(PlannerSetup setup) : setup_(std::move(setup)) {}

    PlannedTrajectory plan(const VehicleState& initial,
                           const std::vector<AgentObservation>& observations,
                           const RoadModel& road,
                           const std::optional<std::vector<ControlInput>>& warm_start = {}) const;

    ObjectiveContext make_context(const VehicleState& initial,
                                  const std::vector<AgentObservation>& observations,
                                  const RoadModel& road) const;

    const PlannerSetup& setup() const { return setup_; }

private:
    PlannerSetup setup_;
};

}  // namespace rcms
