#pragma once

#include "rcms/risk_metrics.hpp"

namespace rcms {

/// Separated activation/deactivation thresholds. Activation thresholds sit
/// above deactivation thresholds so risk traces inside the band hold the
/// current mode instead of chattering.
struct HysteresisConfig {
    double kappa_a = 0.15;
    double kappa_d = 0.05;
    double tau_a = 0.5;   // 1/s
    double tau_d = 0.25;  // 1/s
};

enum class PlannerMode { MP, RCMS };

/// Pure transition function: activate on either metric above its activation
/// threshold, deactivate only when both fall below their deactivation
/// thresholds, hold otherwise. Equality at a threshold holds the mode.
inline PlannerMode activation_step(PlannerMode mode, const RiskAssessment& assessment,
                                   const HysteresisConfig& cfg) {
    if (assessment.kappa > cfg.kappa_a || assessment.tau_risk > cfg.tau_a) {
        return PlannerMode::RCMS;
    }
    if (assessment.kappa < cfg.kappa_d && assessment.tau_risk < cfg.tau_d) {
        return PlannerMode::MP;
    }
    return mode;
}

/// Mode holder for one simulated ego; tracks the last transition tick.
class ActivationMachine {
public:
    explicit ActivationMachine(HysteresisConfig cfg, PlannerMode initial = PlannerMode::MP)
        : cfg_(cfg), mode_(initial) {}

    PlannerMode update(const RiskAssessment& assessment, long tick) {
        const PlannerMode next = activation_step(mode_, assessment, cfg_);
        if (next != mode_) last_transition_tick_ = tick;
        mode_ = next;
        return mode_;
    }

    PlannerMode mode() const { return mode_; }
    long last_transition_tick() const { return last_transition_tick_; }

private:
    HysteresisConfig cfg_;
    PlannerMode mode_;
    long last_transition_tick_ = -1;
};

}  // namespace rcms
