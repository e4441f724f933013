#include "rcms/risk_field.hpp"

#include <cmath>

namespace rcms {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

Mat2 field_covariance(double heading, double length, double width, const FieldParams& params) {
    const double c = std::cos(heading);
    const double s = std::sin(heading);
    Mat2 rot;
    rot << c, -s, s, c;
    Mat2 diag = Mat2::Zero();
    diag(0, 0) = params.beta_l_field * length;
    diag(1, 1) = params.beta_w_field * width;
    return rot * diag * rot.transpose();
}

double agent_risk(const Vec2& pbar, const Vec2& velocity, const Mat2& cov_inv, double scale,
                  const FieldParams& params) {
    const double quad = pbar.dot(cov_inv * pbar);
    const double psi = scale / (params.alpha_g + quad);
    return psi * sigmoid(params.alpha_s * pbar.dot(velocity));
}

double road_risk(const Vec2& ego_pos, const RoadModel& road, const FieldParams& params) {
    const double d0 = to_road_frame(ego_pos, road).y();
    double rho = 0.0;
    for (double boundary : {road.corridor_min(), road.corridor_max()}) {
        const double gap = boundary - d0;
        rho += params.gamma_r * std::exp(-params.alpha_r * gap * gap);
    }
    return rho;
}

double total_risk(const Vec2& ego_pos, const std::vector<FieldAgent>& agents,
                  const RoadModel& road, const FieldParams& params) {
    double rho = road_risk(ego_pos, road, params);
    for (const auto& a : agents) {
        rho += agent_risk(a.position - ego_pos, a.velocity, a.cov_inv, a.scale, params);
    }
    return rho;
}

Vec2 total_risk_gradient(const Vec2& ego_pos, const std::vector<FieldAgent>& agents,
                         const RoadModel& road, const FieldParams& params) {
    Vec2 grad = Vec2::Zero();

    // Road terms: only the lateral coordinate matters, so the gradient acts
    // along the road normal.
    const Vec2 n = road.normal();
    const double d0 = to_road_frame(ego_pos, road).y();
    for (double boundary : {road.corridor_min(), road.corridor_max()}) {
        const double gap = boundary - d0;
        const double term = params.gamma_r * std::exp(-params.alpha_r * gap * gap);
        grad += 2.0 * params.alpha_r * gap * term * n;
    }

    for (const auto& a : agents) {
        const Vec2 pbar = a.position - ego_pos;
        const double quad = pbar.dot(a.cov_inv * pbar);
        const double denom = params.alpha_g + quad;
        const double psi = a.scale / denom;
        const double sig = sigmoid(params.alpha_s * pbar.dot(a.velocity));
        const Vec2 dpsi_dpbar = -(psi / denom) * 2.0 * (a.cov_inv * pbar);
        const Vec2 dsig_dpbar = sig * (1.0 - sig) * params.alpha_s * a.velocity;
        // d pbar / d ego position = -I.
        grad -= dpsi_dpbar * sig + psi * dsig_dpbar;
    }
    return grad;
}

std::vector<FieldSample> evaluate_field_grid(const std::vector<FieldAgent>& agents,
                                             const RoadModel& road, const FieldParams& params,
                                             double x_min, double x_max, double y_min, double y_max,
                                             int nx, int ny) {
    std::vector<FieldSample> samples;
    samples.reserve(static_cast<std::size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const double x = nx > 1 ? x_min + (x_max - x_min) * ix / (nx - 1) : x_min;
            const double y = ny > 1 ? y_min + (y_max - y_min) * iy / (ny - 1) : y_min;
            samples.push_back({x, y, total_risk({x, y}, agents, road, params)});
        }
    }
    return samples;
}

}  // namespace rcms
