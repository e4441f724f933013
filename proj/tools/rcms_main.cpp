#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <sstream>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcms/record_io.hpp"
#include "rcms/scenario_io.hpp"
#include "rcms/sim.hpp"

namespace fs = std::filesystem;
using namespace rcms;

namespace {

std::vector<Override> parse_overrides(const std::vector<std::string>& sets) {
    std::vector<Override> overrides;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("--set expects KEY=VALUE, got: " + s);
        }
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return overrides;
}

std::string default_out_dir() {
    if (const char* env = std::getenv("RCMS_OUT_DIR")) return env;
    return ".";
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

int run_one(const std::string& scenario_path, const fs::path& out_dir,
            const std::string& planner_name, const std::vector<Override>& overrides,
            bool fail_on_collision) {
    const LoadedScenario scenario = load_scenario(scenario_path, overrides);
    const PlannerSelection selection = parse_planner_selection(planner_name);
    const RunRecord record = run(scenario.spec, selection);

    fs::create_directories(out_dir);
    write_file(out_dir / "trace.csv", trace_csv(record));
    write_file(out_dir / "summary.json", summary_json(record, scenario.spec.name, planner_name));
    write_file(out_dir / "resolved-config.json", resolved_config_json(scenario, planner_name));

    const auto& s = record.summary;
    std::cout << scenario.spec.name << " [" << planner_name << "]: "
              << (s.collision ? "COLLISION" : "no collision");
    if (s.collision) {
        std::cout << " (ids " << s.collision_id_a << "," << s.collision_id_b << " at t="
                  << s.collision_time << "s)";
    }
    std::cout << ", min clearance " << s.min_clearance << " m";
    if (!s.activation_times.empty()) std::cout << ", activation t=" << s.activation_times.front();
    if (!s.deactivation_times.empty()) {
        std::cout << ", handback t=" << s.deactivation_times.front();
    }
    std::cout << "\n";
    return (fail_on_collision && s.collision) ? 1 : 0;
}

int bench(const std::string& scenario_path, const std::vector<Override>& overrides, int repeat) {
    const LoadedScenario scenario = load_scenario(scenario_path, overrides);
    const ScenarioSpec& spec = scenario.spec;
    const RunRecord record = run(spec, PlannerSelection::Switched);

    std::vector<std::size_t> activated;
    for (std::size_t i = 0; i < record.ticks.size(); ++i) {
        if (record.ticks[i].mode == PlannerMode::RCMS) activated.push_back(i);
    }
    std::cout << "bench: " << spec.name << "  H=" << spec.planner.horizon
              << "  T_s=" << spec.bicycle.sample_time << "  activated ticks=" << activated.size()
              << "  repeats=" << repeat << "\n";
    if (activated.empty()) {
        std::cout << "no activated ticks; nothing to benchmark\n";
        return 0;
    }

    RcmsPlanner planner(planner_setup_from(spec));
    std::vector<double> times_ms;
    times_ms.reserve(activated.size() * repeat);
    for (int r = 0; r < repeat; ++r) {
        for (const auto i : activated) {
            const auto& tick = record.ticks[i];
            const auto visible = visible_agents(tick.ego, tick.agents, spec.fov);
            const auto t0 = std::chrono::steady_clock::now();
            const auto plan = planner.plan(tick.ego, visible, spec.road);
            const auto t1 = std::chrono::steady_clock::now();
            (void)plan;
            times_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
    }
    std::sort(times_ms.begin(), times_ms.end());
    const double mean =
        std::accumulate(times_ms.begin(), times_ms.end(), 0.0) / times_ms.size();
    const auto pct = [&](double q) {
        return times_ms[std::min(times_ms.size() - 1,
                                 static_cast<std::size_t>(q * times_ms.size()))];
    };
    std::cout << "solve wall time per call [ms]:  mean=" << mean << "  median=" << pct(0.5)
              << "  p99=" << pct(0.99) << "  max=" << times_ms.back() << "\n";
    return 0;
}

int export_field(const std::string& scenario_path, const fs::path& out_dir,
                 const std::vector<Override>& overrides, double at_time) {
    const LoadedScenario scenario = load_scenario(scenario_path, overrides);
    const ScenarioSpec& spec = scenario.spec;
    const RunRecord record = run(spec, PlannerSelection::Switched);

    const auto it = std::min_element(record.ticks.begin(), record.ticks.end(),
                                     [at_time](const TickRecord& a, const TickRecord& b) {
                                         return std::abs(a.t - at_time) < std::abs(b.t - at_time);
                                     });
    const TickRecord& tick = *it;

    std::vector<FieldAgent> agents;
    for (const auto& a : tick.agents) {
        agents.push_back({a.position, a.velocity(),
                          field_covariance(a.heading, a.length, a.width, spec.field).inverse(),
                          spec.field.eta_tilde * a.class_scale});
    }
    const double x_min = tick.ego.x - 30.0, x_max = tick.ego.x + 90.0;
    const double y_min = spec.road.corridor_min() - 4.0, y_max = spec.road.corridor_max() + 4.0;
    const auto samples =
        evaluate_field_grid(agents, spec.road, spec.field, x_min, x_max, y_min, y_max, 241, 81);

    std::ostringstream csv;
    csv << "x,y,rho\n";
    for (const auto& s : samples) csv << s.x << ',' << s.y << ',' << s.rho << "\n";
    fs::create_directories(out_dir);
    write_file(out_dir / "field.csv", csv.str());
    std::cout << "field grid at t=" << tick.t << " written to " << (out_dir / "field.csv")
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Risk-aware crash mitigation scenario runner"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::vector<std::string> scenario_paths;
    std::string out_dir = default_out_dir();
    std::string planner_name = "switched";
    std::vector<std::string> sets;
    bool fail_on_collision = false;
    int repeat = 20;
    double at_time = 0.0;

    auto add_common = [&](CLI::App* cmd, bool multi_scenario = false) {
        if (multi_scenario) {
            cmd->add_option("--scenario", scenario_paths, "scenario JSON file(s)")
                ->required()
                ->check(CLI::ExistingFile);
        } else {
            cmd->add_option("--scenario", scenario_path, "scenario JSON file")
                ->required()
                ->check(CLI::ExistingFile);
        }
        cmd->add_option("--set", sets, "config override KEY=VALUE (repeatable)");
    };

    auto* cmd_run = app.add_subcommand("run", "run one scenario and write logs");
    add_common(cmd_run);
    cmd_run->add_option("--out", out_dir, "output directory");
    cmd_run->add_option("--planner", planner_name, "switched|baseline_only|brake_only|rcms_only");
    cmd_run->add_flag("--fail-on-collision", fail_on_collision,
                      "exit nonzero if the run ends in a collision");

    auto* cmd_batch = app.add_subcommand("batch", "run several scenarios");
    add_common(cmd_batch, true);
    cmd_batch->add_option("--out", out_dir, "output directory (one subdir per scenario)");
    cmd_batch->add_option("--planner", planner_name, "planner selection for every run");
    cmd_batch->add_flag("--fail-on-collision", fail_on_collision,
                        "exit nonzero if any run ends in a collision");

    auto* cmd_bench = app.add_subcommand("bench", "benchmark the RCMS solver on activated ticks");
    add_common(cmd_bench);
    cmd_bench->add_option("--repeat", repeat, "passes over the activated ticks");

    auto* cmd_export = app.add_subcommand("export-field", "write a risk-field contour grid");
    add_common(cmd_export);
    cmd_export->add_option("--out", out_dir, "output directory");
    cmd_export->add_option("--time", at_time, "logged time at which to sample the field");

    auto* cmd_validate = app.add_subcommand("validate", "check a scenario file");
    add_common(cmd_validate);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto overrides = parse_overrides(sets);
        if (cmd_run->parsed()) {
            return run_one(scenario_path, out_dir, planner_name, overrides, fail_on_collision);
        }
        if (cmd_batch->parsed()) {
            int status = 0;
            for (const auto& path : scenario_paths) {
                const fs::path sub = fs::path(out_dir) / fs::path(path).stem();
                status = std::max(status,
                                  run_one(path, sub, planner_name, overrides, fail_on_collision));
            }
            return status;
        }
        if (cmd_bench->parsed()) return bench(scenario_path, overrides, repeat);
        if (cmd_export->parsed()) return export_field(scenario_path, out_dir, overrides, at_time);
        if (cmd_validate->parsed()) {
            const LoadedScenario scenario = load_scenario(scenario_path, overrides);
            const auto problems = validate_scenario(scenario.spec);
            if (problems.empty()) {
                std::cout << "ok: " << scenario.spec.name << "\n";
                return 0;
            }
            for (const auto& p : problems) std::cerr << "invalid: " << p << "\n";
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
