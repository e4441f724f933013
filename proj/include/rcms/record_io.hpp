#pragma once

#include <string>

#include "rcms/sim.hpp"

namespace rcms {

/// Fixed-header CSV: t,x,y,theta,v,mode,kappa,tau_risk,a_cmd,delta_cmd,solve_ms
/// followed by one (id,x,y,theta,v) block per agent in scenario order.
std::string trace_csv(const RunRecord& record);

/// Run summary as JSON.
std::string summary_json(const RunRecord& record, const std::string& scenario_name,
                         const std::string& planner_selection);

}  // namespace rcms
