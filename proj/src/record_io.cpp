#include "rcms/record_io.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace rcms {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

std::string trace_csv(const RunRecord& record) {
    std::ostringstream out;
    out << "t,x,y,theta,v,mode,kappa,tau_risk,a_cmd,delta_cmd,solve_ms";
    const std::size_t n_agents = record.ticks.empty() ? 0 : record.ticks.front().agents.size();
    for (std::size_t i = 0; i < n_agents; ++i) {
        out << ",agent" << i << "_id,agent" << i << "_x,agent" << i << "_y,agent" << i
            << "_theta,agent" << i << "_v";
    }
    out << "\n";
    for (const auto& tick : record.ticks) {
        out << fmt(tick.t) << ',' << fmt(tick.ego.x) << ',' << fmt(tick.ego.y) << ','
            << fmt(tick.ego.heading) << ',' << fmt(tick.ego.speed) << ','
            << (tick.mode == PlannerMode::RCMS ? "RCMS" : "MP") << ',' << fmt(tick.kappa) << ','
            << fmt(tick.tau_risk) << ',' << fmt(tick.applied.accel) << ','
            << fmt(tick.applied.steer) << ','
            // Traces must replay byte-identically; wall time is reported in
            // summary.json and the bench report instead.
            << '0';
        for (const auto& a : tick.agents) {
            out << ',' << a.id << ',' << fmt(a.position.x()) << ',' << fmt(a.position.y()) << ','
                << fmt(a.heading) << ',' << fmt(a.speed);
        }
        out << "\n";
    }
    return out.str();
}

std::string summary_json(const RunRecord& record, const std::string& scenario_name,
                         const std::string& planner_selection) {
    const auto& s = record.summary;
    nlohmann::json j;
    j["scenario"] = scenario_name;
    j["planner"] = planner_selection;
    j["collision"] = s.collision;
    if (s.collision) {
        j["collision_pair"] = {s.collision_id_a, s.collision_id_b};
        j["collision_time"] = s.collision_time;
    }
    j["min_clearance"] = s.min_clearance;
    j["min_clearance_time"] = s.min_clearance_time;
    j["activation_times"] = s.activation_times;
    j["deactivation_times"] = s.deactivation_times;
    j["solve_ms_mean"] = s.solve_ms_mean;
    j["solve_ms_max"] = s.solve_ms_max;
    j["ticks"] = record.ticks.size();
    return j.dump(2) + "\n";
}

}  // namespace rcms
