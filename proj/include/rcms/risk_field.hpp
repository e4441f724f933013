#pragma once

#include <vector>

#include "rcms/world.hpp"

namespace rcms {

struct FieldParams {
    double alpha_g = 0.1;      // gradient shape of the agent term
    double alpha_s = 0.05;     // s/m^2, skew sharpness
    double eta_tilde = 1.0;    // agent term scale
    double beta_l_field = 1.0; // covariance scales for the field footprint
    double beta_w_field = 1.0;
    double gamma_r = 2.0;      // road term scale
    double alpha_r = 0.5;      // 1/m^2, road term gradient
};

/// One obstacle as the field sees it: predicted position/velocity at the
/// evaluated step plus the precomputed inverse footprint covariance.
struct FieldAgent {
    Vec2 position = Vec2::Zero();
    Vec2 velocity = Vec2::Zero();
    Mat2 cov_inv = Mat2::Identity();
    double scale = 1.0;  // eta_tilde times the agent class scale
};

/// Footprint covariance with the field's own beta scales.
Mat2 field_covariance(double heading, double length, double width, const FieldParams& params);

/// Skewed reciprocal-quadratic agent risk:
///   rho_i = scale / (alpha_g + pbar^T S^-1 pbar) * sigmoid(alpha_s * pbar . v)
/// with pbar = agent position - ego position. Finite everywhere, peaked at
/// the agent and inflated on the side it moves toward.
double agent_risk(const Vec2& pbar, const Vec2& velocity, const Mat2& cov_inv, double scale,
                  const FieldParams& params);

/// Lateral-only Gaussian risk, one term per corridor boundary.
double road_risk(const Vec2& ego_pos, const RoadModel& road, const FieldParams& params);

/// Sum of agent terms plus road term.
double total_risk(const Vec2& ego_pos, const std::vector<FieldAgent>& agents,
                  const RoadModel& road, const FieldParams& params);

/// Analytic d(total_risk)/d(ego position).
Vec2 total_risk_gradient(const Vec2& ego_pos, const std::vector<FieldAgent>& agents,
                         const RoadModel& road, const FieldParams& params);

struct FieldSample {
    double x, y, rho;
};

/// Evaluates the field on a regular grid for contour export.
std::vector<FieldSample> evaluate_field_grid(const std::vector<FieldAgent>& agents,
                                             const RoadModel& road, const FieldParams& params,
                                             double x_min, double x_max, double y_min, double y_max,
                                             int nx, int ny);

}  // namespace rcms
