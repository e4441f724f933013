#include "rcms/scenario_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rcms {

using nlohmann::json;

namespace {

// Pulls one value out of a section, recording where it came from.
class Resolver {
public:
    Resolver(const json& root, std::map<std::string, std::string>& sources)
        : root_(root), sources_(sources) {}

    template <typename T>
    T get(const std::string& section, const std::string& key, T fallback,
          const char* fallback_source = "default") const {
        const std::string dotted = section.empty() ? key : section + "." + key;
        const json* sec = &root_;
        if (!section.empty()) {
            if (!root_.contains(section)) {
                sources_[dotted] = fallback_source;
                return fallback;
            }
            sec = &root_.at(section);
        }
        if (!sec->contains(key)) {
            sources_[dotted] = fallback_source;
            return fallback;
        }
        sources_[dotted] = "scenario";
        try {
            return sec->at(key).get<T>();
        } catch (const json::exception& e) {
            throw std::runtime_error("scenario field '" + dotted + "': " + e.what());
        }
    }

    Vec2 get_vec2(const std::string& section, const std::string& key, Vec2 fallback,
                  const char* fallback_source = "default") const {
        const auto v = get<std::vector<double>>(section, key,
                                                {fallback.x(), fallback.y()}, fallback_source);
        if (v.size() != 2) {
            throw std::runtime_error("scenario field '" + section + "." + key +
                                     "': expected 2 numbers");
        }
        return {v[0], v[1]};
    }

private:
    const json& root_;
    std::map<std::string, std::string>& sources_;
};

Directive parse_directive(const json& j, int agent_id) {
    const auto field = [&](const char* key) -> double {
        if (!j.contains(key)) {
            throw std::runtime_error("agent " + std::to_string(agent_id) + " directive '" +
                                     j.value("type", std::string("?")) + "' missing field '" + key +
                                     "'");
        }
        return j.at(key).get<double>();
    };
    Directive d;
    d.at_time = j.value("at", 0.0);
    const std::string type = j.value("type", "");
    if (type == "hold") {
        d.kind = Directive::Kind::Hold;
        d.speed = field("speed");
    } else if (type == "brake_to") {
        d.kind = Directive::Kind::BrakeTo;
        d.speed = field("speed");
        d.decel = field("decel");
    } else if (type == "swerve_to") {
        d.kind = Directive::Kind::SwerveTo;
        d.lateral_offset = field("offset");
        d.rate = field("rate");
    } else if (type == "lateral_crossing") {
        d.kind = Directive::Kind::LateralCrossing;
        d.velocity = {field("vx"), field("vy")};
    } else {
        throw std::runtime_error("agent " + std::to_string(agent_id) +
                                 ": unknown directive type '" + type + "'");
    }
    return d;
}

json directive_to_json(const Directive& d) {
    json j;
    j["at"] = d.at_time;
    switch (d.kind) {
        case Directive::Kind::Hold:
            j["type"] = "hold";
            j["speed"] = d.speed;
            break;
        case Directive::Kind::BrakeTo:
            j["type"] = "brake_to";
            j["speed"] = d.speed;
            j["decel"] = d.decel;
            break;
        case Directive::Kind::SwerveTo:
            j["type"] = "swerve_to";
            j["offset"] = d.lateral_offset;
            j["rate"] = d.rate;
            break;
        case Directive::Kind::LateralCrossing:
            j["type"] = "lateral_crossing";
            j["vx"] = d.velocity.x();
            j["vy"] = d.velocity.y();
            break;
    }
    return j;
}

void apply_json_override(json& root, const std::string& key, const std::string& value) {
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::exception&) {
        parsed = value;  // bare strings are allowed
    }
    json* node = &root;
    std::stringstream path(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(path, part, '.')) parts.push_back(part);
    if (parts.empty()) throw std::runtime_error("empty override key");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
    (*node)[parts.back()] = parsed;
}

}  // namespace

LoadedScenario parse_scenario(const std::string& json_text, const std::vector<Override>& overrides) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("scenario is not valid JSON: ") + e.what());
    }
    for (const auto& [key, value] : overrides) apply_json_override(root, key, value);

    LoadedScenario out;
    Resolver r(root, out.sources);
    ScenarioSpec& spec = out.spec;

    spec.name = r.get<std::string>("", "name", "unnamed");
    spec.duration = r.get("", "duration", 10.0);
    spec.pre_roll = r.get("", "pre_roll", 0.0);

    spec.road.lane_count = r.get("road", "lane_count", 3);
    spec.road.lane_width = r.get("road", "lane_width", 3.5);
    spec.road.shoulder_left = r.get("road", "shoulder_left", 2.0);
    spec.road.shoulder_right = r.get("road", "shoulder_right", 2.0);
    spec.road.speed_limit = r.get("road", "speed_limit", 30.0);
    spec.road.road_heading = r.get("road", "heading", 0.0);
    spec.road.origin = r.get_vec2("road", "origin", Vec2::Zero());

    spec.ego_init.x = r.get("ego", "x", 0.0);
    spec.ego_init.y = r.get("ego", "y", spec.road.lane_center(spec.road.lane_count / 2));
    spec.ego_init.heading = wrap_angle(r.get("ego", "heading", spec.road.road_heading));
    spec.ego_init.speed = r.get("ego", "speed", 20.0);
    spec.ego_footprint.length = r.get("ego", "length", 4.5);
    spec.ego_footprint.width = r.get("ego", "width", 2.0);

    spec.fov.range = r.get("fov", "range", 100.0);

    spec.bicycle.wheelbase = r.get("bicycle", "wheelbase", 2.7);
    spec.bicycle.sample_time = r.get("bicycle", "sample_time", 0.1, "paper");
    spec.bicycle.speed_cap = r.get("bicycle", "speed_cap", 2.0 * spec.road.speed_limit, "paper");
    {
        const Vec2 umin = r.get_vec2("bicycle", "u_min", {-5.0, -0.5}, "paper");
        const Vec2 umax = r.get_vec2("bicycle", "u_max", {3.5, 0.5}, "paper");
        spec.bicycle.u_min = {umin.x(), umin.y()};
        spec.bicycle.u_max = {umax.x(), umax.y()};
    }

    spec.risk.beta_l = r.get("risk", "beta_l", 1.0);
    spec.risk.beta_w = r.get("risk", "beta_w", 1.0);
    spec.risk.epsilon_prox = r.get("risk", "epsilon_prox", 1.0);

    spec.field.alpha_g = r.get("field", "alpha_g", 0.1);
    spec.field.alpha_s = r.get("field", "alpha_s", 0.05);
    spec.field.eta_tilde = r.get("field", "eta_tilde", 1.0);
    spec.field.beta_l_field = r.get("field", "beta_l", 1.0);
    spec.field.beta_w_field = r.get("field", "beta_w", 1.0);
    spec.field.gamma_r = r.get("field", "gamma_r", 2.0);
    spec.field.alpha_r = r.get("field", "alpha_r", 0.5);

    spec.hysteresis.kappa_a = r.get("hysteresis", "kappa_a", 0.15);
    spec.hysteresis.kappa_d = r.get("hysteresis", "kappa_d", 0.05);
    spec.hysteresis.tau_a = r.get("hysteresis", "tau_a", 0.5);
    spec.hysteresis.tau_d = r.get("hysteresis", "tau_d", 0.25);

    spec.planner.horizon = r.get("planner", "horizon", 30, "paper");
    spec.planner.r_accel = r.get("planner", "r_accel", 0.01);
    spec.planner.r_steer = r.get("planner", "r_steer", 0.1);
    spec.planner.corridor_penalty_weight = r.get("planner", "corridor_penalty_weight", 5.0);
    spec.planner.speed_penalty_weight = r.get("planner", "speed_penalty_weight", 1.0);
    spec.planner.max_iterations = r.get("planner", "max_iterations", 60);
    spec.planner.grad_tol = r.get("planner", "grad_tol", 1e-6);
    spec.planner.budget_s = r.get("planner", "budget_s", 0.08);

    spec.baseline.target_lane = r.get("baseline", "target_lane", spec.road.lane_count / 2);
    spec.baseline.cruise_speed = r.get("baseline", "cruise_speed", spec.ego_init.speed);
    spec.baseline.lateral_gain = r.get("baseline", "lateral_gain", 0.05);
    spec.baseline.heading_gain = r.get("baseline", "heading_gain", 0.8);
    spec.baseline.speed_gain = r.get("baseline", "speed_gain", 1.0);
    spec.baseline.brake_decel = r.get("baseline", "brake_decel", -spec.bicycle.u_min.accel);
    spec.baseline.ttc_brake_trigger = r.get("baseline", "ttc_brake_trigger", 1.5);

    if (root.contains("agents")) {
        for (const auto& ja : root.at("agents")) {
            ScriptedAgent agent;
            agent.init.id = ja.value("id", 0);
            agent.init.position = {ja.value("x", 0.0), ja.value("y", 0.0)};
            agent.init.heading = wrap_angle(ja.value("heading", spec.road.road_heading));
            agent.init.speed = ja.value("speed", 0.0);
            agent.init.accel = ja.value("accel", 0.0);
            agent.init.length = ja.value("length", 4.5);
            agent.init.width = ja.value("width", 2.0);
            agent.init.class_scale = ja.value("class_scale", 1.0);
            if (ja.contains("script")) {
                for (const auto& jd : ja.at("script")) {
                    agent.script.directives.push_back(parse_directive(jd, agent.init.id));
                }
            }
            spec.agents.push_back(std::move(agent));
        }
    }
    return out;
}

LoadedScenario load_scenario(const std::string& path, const std::vector<Override>& overrides) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), overrides);
}

std::string resolved_config_json(const LoadedScenario& scenario,
                                 const std::string& planner_selection) {
    const ScenarioSpec& s = scenario.spec;
    json j;
    j["name"] = s.name;
    j["duration"] = s.duration;
    j["pre_roll"] = s.pre_roll;
    j["road"] = {{"lane_count", s.road.lane_count},
                 {"lane_width", s.road.lane_width},
                 {"shoulder_left", s.road.shoulder_left},
                 {"shoulder_right", s.road.shoulder_right},
                 {"speed_limit", s.road.speed_limit},
                 {"heading", s.road.road_heading},
                 {"origin", {s.road.origin.x(), s.road.origin.y()}}};
    j["ego"] = {{"x", s.ego_init.x},         {"y", s.ego_init.y},
                {"heading", s.ego_init.heading}, {"speed", s.ego_init.speed},
                {"length", s.ego_footprint.length}, {"width", s.ego_footprint.width}};
    j["fov"] = {{"range", s.fov.range}};
    j["bicycle"] = {{"wheelbase", s.bicycle.wheelbase},
                    {"sample_time", s.bicycle.sample_time},
                    {"speed_cap", s.bicycle.speed_cap},
                    {"u_min", {s.bicycle.u_min.accel, s.bicycle.u_min.steer}},
                    {"u_max", {s.bicycle.u_max.accel, s.bicycle.u_max.steer}}};
    j["risk"] = {{"beta_l", s.risk.beta_l},
                 {"beta_w", s.risk.beta_w},
                 {"epsilon_prox", s.risk.epsilon_prox}};
    j["field"] = {{"alpha_g", s.field.alpha_g},   {"alpha_s", s.field.alpha_s},
                  {"eta_tilde", s.field.eta_tilde}, {"beta_l", s.field.beta_l_field},
                  {"beta_w", s.field.beta_w_field}, {"gamma_r", s.field.gamma_r},
                  {"alpha_r", s.field.alpha_r}};
    j["hysteresis"] = {{"kappa_a", s.hysteresis.kappa_a},
                       {"kappa_d", s.hysteresis.kappa_d},
                       {"tau_a", s.hysteresis.tau_a},
                       {"tau_d", s.hysteresis.tau_d}};
    j["planner"] = {{"horizon", s.planner.horizon},
                    {"r_accel", s.planner.r_accel},
                    {"r_steer", s.planner.r_steer},
                    {"corridor_penalty_weight", s.planner.corridor_penalty_weight},
                    {"speed_penalty_weight", s.planner.speed_penalty_weight},
                    {"max_iterations", s.planner.max_iterations},
                    {"grad_tol", s.planner.grad_tol},
                    {"budget_s", s.planner.budget_s}};
    j["baseline"] = {{"target_lane", s.baseline.target_lane},
                     {"cruise_speed", s.baseline.cruise_speed},
                     {"lateral_gain", s.baseline.lateral_gain},
                     {"heading_gain", s.baseline.heading_gain},
                     {"speed_gain", s.baseline.speed_gain},
                     {"brake_decel", s.baseline.brake_decel},
                     {"ttc_brake_trigger", s.baseline.ttc_brake_trigger}};
    j["agents"] = json::array();
    for (const auto& a : s.agents) {
        json ja = {{"id", a.init.id},           {"x", a.init.position.x()},
                   {"y", a.init.position.y()},  {"heading", a.init.heading},
                   {"speed", a.init.speed},     {"accel", a.init.accel},
                   {"length", a.init.length},   {"width", a.init.width},
                   {"class_scale", a.init.class_scale}};
        ja["script"] = json::array();
        for (const auto& d : a.script.directives) ja["script"].push_back(directive_to_json(d));
        j["agents"].push_back(std::move(ja));
    }
    j["planner_selection"] = planner_selection;
    j["sources"] = scenario.sources;
    return j.dump(2) + "\n";
}

std::string planner_selection_name(PlannerSelection sel) {
    switch (sel) {
        case PlannerSelection::Switched: return "switched";
        case PlannerSelection::BaselineOnly: return "baseline_only";
        case PlannerSelection::BrakeOnly: return "brake_only";
        case PlannerSelection::RcmsOnly: return "rcms_only";
    }
    return "switched";
}

PlannerSelection parse_planner_selection(const std::string& name) {
    if (name == "switched") return PlannerSelection::Switched;
    if (name == "baseline_only") return PlannerSelection::BaselineOnly;
    if (name == "brake_only") return PlannerSelection::BrakeOnly;
    if (name == "rcms_only") return PlannerSelection::RcmsOnly;
    throw std::runtime_error("unknown planner selection: " + name);
}

}  // namespace rcms
