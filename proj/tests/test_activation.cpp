#include <doctest.h>

#include <random>

#include "rcms/activation.hpp"

using namespace rcms;

namespace {

RiskAssessment risks(double kappa, double tau_risk) {
    RiskAssessment a;
    a.kappa = kappa;
    a.tau_risk = tau_risk;
    return a;
}

}  // namespace

TEST_CASE("activation_step follows the hysteresis band") {
    HysteresisConfig cfg{0.8, 0.3, 0.5, 0.25};

    SUBCASE("either metric above activation switches on") {
        CHECK(activation_step(PlannerMode::MP, risks(0.9, 0.0), cfg) == PlannerMode::RCMS);
        CHECK(activation_step(PlannerMode::MP, risks(0.0, 0.6), cfg) == PlannerMode::RCMS);
    }
    SUBCASE("inside the band holds the mode") {
        CHECK(activation_step(PlannerMode::RCMS, risks(0.5, 0.0), cfg) == PlannerMode::RCMS);
        CHECK(activation_step(PlannerMode::MP, risks(0.5, 0.0), cfg) == PlannerMode::MP);
    }
    SUBCASE("deactivation needs both metrics below their thresholds") {
        CHECK(activation_step(PlannerMode::RCMS, risks(0.2, 0.01), cfg) == PlannerMode::MP);
        CHECK(activation_step(PlannerMode::RCMS, risks(0.2, 0.3), cfg) == PlannerMode::RCMS);
        CHECK(activation_step(PlannerMode::RCMS, risks(0.4, 0.01), cfg) == PlannerMode::RCMS);
    }
    SUBCASE("equality at a threshold holds the mode") {
        CHECK(activation_step(PlannerMode::MP, risks(cfg.kappa_a, 0.0), cfg) == PlannerMode::MP);
        CHECK(activation_step(PlannerMode::RCMS, risks(cfg.kappa_d, 0.0), cfg) ==
              PlannerMode::RCMS);
    }
}

TEST_CASE("traces confined to the open band never transition") {
    HysteresisConfig cfg{0.8, 0.3, 0.5, 0.25};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> uk(cfg.kappa_d + 1e-9, cfg.kappa_a - 1e-9);
    std::uniform_real_distribution<double> ut(cfg.tau_d + 1e-9, cfg.tau_a - 1e-9);
    for (int trial = 0; trial < 100; ++trial) {
        const PlannerMode start = trial % 2 == 0 ? PlannerMode::MP : PlannerMode::RCMS;
        PlannerMode mode = start;
        for (int i = 0; i < 200; ++i) {
            mode = activation_step(mode, risks(uk(rng), ut(rng)), cfg);
            CHECK(mode == start);
        }
    }
}

TEST_CASE("one up-down sweep yields exactly one activation and one deactivation") {
    HysteresisConfig cfg{0.8, 0.3, 0.5, 0.25};
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> peak(0.85, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        ActivationMachine machine(cfg);
        const double top = peak(rng);
        int transitions = 0;
        PlannerMode prev = machine.mode();
        long tick = 0;
        for (double k = 0.0; k <= top; k += 0.01) {
            const PlannerMode m = machine.update(risks(k, 0.0), tick++);
            if (m != prev) ++transitions;
            prev = m;
        }
        for (double k = top; k >= 0.0; k -= 0.01) {
            const PlannerMode m = machine.update(risks(k, 0.0), tick++);
            if (m != prev) ++transitions;
            prev = m;
        }
        CHECK(transitions == 2);
        CHECK(machine.mode() == PlannerMode::MP);
    }
}

TEST_CASE("activation machine records the last transition tick") {
    HysteresisConfig cfg{0.8, 0.3, 0.5, 0.25};
    ActivationMachine machine(cfg);
    machine.update(risks(0.1, 0.0), 0);
    CHECK(machine.last_transition_tick() == -1);
    machine.update(risks(0.9, 0.0), 1);
    CHECK(machine.last_transition_tick() == 1);
    machine.update(risks(0.9, 0.0), 2);
    CHECK(machine.last_transition_tick() == 1);
    machine.update(risks(0.0, 0.0), 3);
    CHECK(machine.last_transition_tick() == 3);
}
