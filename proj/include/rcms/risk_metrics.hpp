#pragma once

#include <limits>
#include <vector>

#include "rcms/world.hpp"

namespace rcms {

struct RiskParams {
    double beta_l = 1.0;        // longitudinal covariance scale
    double beta_w = 1.0;        // lateral covariance scale
    double epsilon_prox = 1.0;  // m, proximity slack in the TTCE gate
};

struct AgentRisk {
    int id = 0;
    double kappa_i = 0.0;
    double tau_i = std::numeric_limits<double>::infinity();  // s, closest-encounter time
};

/// Per-tick risk picture. kappa is the max pairwise Gaussian-overlap risk,
/// tau_risk the max reciprocal time-to-closest-encounter (0 when every
/// encounter is receding or out of reach), so larger always means riskier.
struct RiskAssessment {
    double kappa = 0.0;
    double tau_risk = 0.0;  // 1/s
    std::vector<AgentRisk> breakdown;
};

/// Heading-aligned footprint covariance with eigenvalues {beta_l*L, beta_w*W}.
Mat2 footprint_covariance(double heading, double length, double width, const RiskParams& params);

/// Gaussian overlap risk, normalized so full overlap gives the class scale.
/// kappa_i = eta * exp(-1/2 * pbar^T (S0 + Si)^-1 pbar), pbar = pi - p0.
/// Throws std::invalid_argument on non-positive-definite covariance.
double pairwise_overlap_risk(const Vec2& p0, const Mat2& sigma0, const Vec2& pi,
                             const Mat2& sigma_i, double eta);

/// Max pairwise overlap risk over agents; fills kappa_i in `breakdown` when given.
double instantaneous_risk(const VehicleState& ego, const VehicleFootprint& ego_fp,
                          const std::vector<AgentObservation>& agents, const RiskParams& params,
                          std::vector<AgentRisk>* breakdown = nullptr);

/// True iff the pair is closing (vbar . pbar < 0) and the lateral miss
/// distance at closest encounter is below L0 + Li + epsilon.
bool ttce_gate(const VehicleState& ego, const VehicleFootprint& ego_fp,
               const AgentObservation& agent, double epsilon);

/// Time to closest encounter, or +inf when the gate fails.
double ttce(const VehicleState& ego, const VehicleFootprint& ego_fp,
            const AgentObservation& agent, const RiskParams& params);

/// Max reciprocal TTCE over agents; fills tau_i in `breakdown` when given.
double predictive_risk(const VehicleState& ego, const VehicleFootprint& ego_fp,
                       const std::vector<AgentObservation>& agents, const RiskParams& params,
                       std::vector<AgentRisk>* breakdown = nullptr);

/// Full per-tick assessment (kappa, tau_risk, per-agent breakdown).
RiskAssessment assess_risk(const VehicleState& ego, const VehicleFootprint& ego_fp,
                           const std::vector<AgentObservation>& agents, const RiskParams& params);

}  // namespace rcms
