#include "rcms/risk_metrics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace rcms {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

void require_pd(const Mat2& m, const char* what) {
    if (std::abs(m(0, 1) - m(1, 0)) > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff()) || m(0, 0) <= 0.0 ||
        m.determinant() <= 0.0) {
        throw std::invalid_argument(std::string(what) + ": covariance not symmetric positive definite");
    }
}

}  // namespace

Mat2 footprint_covariance(double heading, double length, double width, const RiskParams& params) {
    const double c = std::cos(heading);
    const double s = std::sin(heading);
    Mat2 rot;
    rot << c, -s, s, c;
    Mat2 diag = Mat2::Zero();
    diag(0, 0) = params.beta_l * length;
    diag(1, 1) = params.beta_w * width;
    return rot * diag * rot.transpose();
}

double pairwise_overlap_risk(const Vec2& p0, const Mat2& sigma0, const Vec2& pi,
                             const Mat2& sigma_i, double eta) {
    require_pd(sigma0, "pairwise_overlap_risk");
    require_pd(sigma_i, "pairwise_overlap_risk");
    const Vec2 pbar = pi - p0;
    const Mat2 sum = sigma0 + sigma_i;
    const double quad = pbar.dot(sum.inverse() * pbar);
    return eta * std::exp(-0.5 * quad);
}

double instantaneous_risk(const VehicleState& ego, const VehicleFootprint& ego_fp,
                          const std::vector<AgentObservation>& agents, const RiskParams& params,
                          std::vector<AgentRisk>* breakdown) {
    const Mat2 sigma0 = footprint_covariance(ego.heading, ego_fp.length, ego_fp.width, params);
    double kappa = 0.0;
    for (std::size_t n = 0; n < agents.size(); ++n) {
        const auto& a = agents[n];
        const Mat2 sigma_i = footprint_covariance(a.heading, a.length, a.width, params);
        const double k_i =
            pairwise_overlap_risk(ego.position(), sigma0, a.position, sigma_i, a.class_scale);
        if (breakdown) {
            (*breakdown)[n].id = a.id;
            (*breakdown)[n].kappa_i = k_i;
        }
        kappa = std::max(kappa, k_i);
    }
    return kappa;
}

bool ttce_gate(const VehicleState& ego, const VehicleFootprint& ego_fp,
               const AgentObservation& agent, double epsilon) {
    const Vec2 pbar = agent.position - ego.position();
    const Vec2 vbar = agent.velocity() - ego.velocity();
    const double vnorm = vbar.norm();
    if (vnorm == 0.0) return false;
    if (pbar.dot(vbar) >= 0.0) return false;
    const double miss = std::abs(cross2(pbar, vbar)) / vnorm;
    return miss < ego_fp.length + agent.length + epsilon;
}

double ttce(const VehicleState& ego, const VehicleFootprint& ego_fp,
            const AgentObservation& agent, const RiskParams& params) {
    if (!ttce_gate(ego, ego_fp, agent, params.epsilon_prox)) {
        return std::numeric_limits<double>::infinity();
    }
    const Vec2 pbar = agent.position - ego.position();
    const Vec2 vbar = agent.velocity() - ego.velocity();
    // Closing pairs have pbar . vbar < 0; negate so the encounter time is positive.
    return -pbar.dot(vbar) / vbar.squaredNorm();
}

double predictive_risk(const VehicleState& ego, const VehicleFootprint& ego_fp,
                       const std::vector<AgentObservation>& agents, const RiskParams& params,
                       std::vector<AgentRisk>* breakdown) {
    double tau_risk = 0.0;
    for (std::size_t n = 0; n < agents.size(); ++n) {
        const double tau_i = ttce(ego, ego_fp, agents[n], params);
        if (breakdown) {
            (*breakdown)[n].id = agents[n].id;
            (*breakdown)[n].tau_i = tau_i;
        }
        if (std::isfinite(tau_i) && tau_i > 0.0) tau_risk = std::max(tau_risk, 1.0 / tau_i);
    }
    return tau_risk;
}

RiskAssessment assess_risk(const VehicleState& ego, const VehicleFootprint& ego_fp,
                           const std::vector<AgentObservation>& agents, const RiskParams& params) {
    RiskAssessment out;
    out.breakdown.resize(agents.size());
    out.kappa = instantaneous_risk(ego, ego_fp, agents, params, &out.breakdown);
    out.tau_risk = predictive_risk(ego, ego_fp, agents, params, &out.breakdown);
    return out;
}

}  // namespace rcms
