// clockplan: DVFS planning toolkit for per-kernel clock assignment.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "clockplan/json_io.hpp"

namespace {

using namespace clockplan;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << content;
}

MeasurementTable load_table(const std::string& in_path, const std::string& sidecar_path) {
  MeasurementTable table = parse_table(read_file(in_path));
  if (!sidecar_path.empty()) apply_sidecar(table, json::parse(read_file(sidecar_path)));
  for (const auto& w : table.warnings) std::cerr << "warning: " << w << "\n";
  return table;
}

// Provenance block: every output carries the flags that produced it.
using RunConfig = std::vector<std::pair<std::string, std::string>>;

json run_config_json(const RunConfig& rc) {
  json j = json::object();
  for (const auto& [k, v] : rc) j[k] = v;
  return j;
}

std::string run_config_comments(const RunConfig& rc) {
  std::string out;
  for (const auto& [k, v] : rc) out += "# " + k + " = " + v + "\n";
  return out;
}

Strategy parse_strategy(const std::string& s) {
  if (s == "local") return Strategy::Local;
  if (s == "global") return Strategy::Global;
  if (s == "coarse") return Strategy::Coarse;
  fail(ErrorCode::InvalidArgument, "unknown strategy '" + s + "'");
}

std::optional<ClockConfig> parse_entry(const std::string& s) {
  if (s == "none") return std::nullopt;
  size_t comma = s.find(',');
  if (comma == std::string::npos)
    fail(ErrorCode::InvalidArgument, "entry config must be 'mem,core' or 'none'");
  auto one = [](const std::string& t) {
    return t == "auto" ? ClockSetting::auto_clock() : ClockSetting::at(std::stoi(t));
  };
  return ClockConfig{one(s.substr(0, comma)), one(s.substr(comma + 1))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DVFS clock planning from per-kernel time/energy measurements"};
  app.require_subcommand(1);

  std::string in_path, sidecar_path, out_path = "-", plan_path, scenario_path;
  std::string goal = "waste", strategy = "global", reference = "auto", format = "json";
  std::string strategies_arg = "local,global", thresholds_arg = "0", entry_arg = "auto,auto";
  double threshold = 0.0, epsilon = 0.0, latency_s = 0.0, sigma_time = 0.0, sigma_power = 0.0;
  int reps = 10;
  uint64_t seed = 0;
  bool prune = false;

  auto* ingest = app.add_subcommand("ingest", "validate and normalize a measurement CSV");
  ingest->add_option("--in", in_path)->required();
  ingest->add_option("--sidecar", sidecar_path);
  ingest->add_option("--out", out_path);

  auto* optimize = app.add_subcommand("optimize", "compute a per-kernel clock assignment");
  optimize->add_option("--in", in_path)->required();
  optimize->add_option("--sidecar", sidecar_path);
  optimize->add_option("--goal", goal)->check(CLI::IsMember({"waste", "edp"}));
  optimize->add_option("--threshold", threshold)->check(CLI::NonNegativeNumber);
  optimize->add_option("--strategy", strategy)->check(CLI::IsMember({"local", "global", "coarse"}));
  optimize->add_option("--epsilon", epsilon)->check(CLI::NonNegativeNumber);
  optimize->add_option("--reference", reference)->check(CLI::IsMember({"auto", "optimum"}));
  optimize->add_option("--out", out_path);

  auto* sweep = app.add_subcommand("sweep", "energy savings vs. tolerated time loss");
  sweep->add_option("--in", in_path)->required();
  sweep->add_option("--sidecar", sidecar_path);
  sweep->add_option("--strategies", strategies_arg);
  sweep->add_option("--thresholds", thresholds_arg);
  sweep->add_option("--epsilon", epsilon)->check(CLI::NonNegativeNumber);
  sweep->add_option("--out", out_path);

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic measurement table");
  simulate->add_option("--scenario", scenario_path)->required();
  simulate->add_option("--out", out_path);

  auto* schedule = app.add_subcommand("schedule", "turn a plan into a frequency schedule");
  schedule->add_option("--in", in_path)->required();
  schedule->add_option("--sidecar", sidecar_path);
  schedule->add_option("--plan", plan_path)->required();
  schedule->add_option("--latency-s", latency_s)->check(CLI::NonNegativeNumber);
  schedule->add_option("--entry", entry_arg, "'mem,core' (auto allowed) or 'none'");
  schedule->add_flag("--prune", prune, "merge switches that cost more than they save");
  schedule->add_option("--out", out_path);

  auto* validate = app.add_subcommand("validate", "re-measure a plan under synthetic noise");
  validate->add_option("--in", in_path)->required();
  validate->add_option("--sidecar", sidecar_path);
  validate->add_option("--plan", plan_path)->required();
  validate->add_option("--reps", reps)->check(CLI::PositiveNumber);
  validate->add_option("--sigma-time", sigma_time)->check(CLI::NonNegativeNumber);
  validate->add_option("--sigma-power", sigma_power)->check(CLI::NonNegativeNumber);
  validate->add_option("--seed", seed);
  validate->add_option("--out", out_path);

  auto* report = app.add_subcommand("report", "render a plan as a kernel-by-kernel table");
  report->add_option("--plan", plan_path)->required();
  report->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "markdown-table"}));
  report->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      MeasurementTable table = load_table(in_path, sidecar_path);
      RunConfig rc{{"subcommand", "ingest"}, {"in", in_path}, {"sidecar", sidecar_path}};
      write_file(out_path, run_config_comments(rc) + serialize_table(table));
    } else if (*optimize) {
      MeasurementTable table = expand_repeats(load_table(in_path, sidecar_path));
      Objective obj = goal == "edp" ? Objective::edp() : Objective::waste(threshold);
      Strategy strat = parse_strategy(strategy);
      std::optional<Totals> ref;
      if (reference == "optimum") {
        if (strat != Strategy::Global)
          fail(ErrorCode::InvalidArgument, "--reference optimum requires --strategy global");
        ref = optimize_global(table, Objective::waste(0.0), epsilon).totals;
      }
      Assignment a;
      switch (strat) {
        case Strategy::Local: a = optimize_local(table, obj); break;
        case Strategy::Coarse: a = optimize_coarse(table, obj); break;
        case Strategy::Global:
          a = optimize_global(table, obj, epsilon, front_point_cap(), ref);
          break;
      }
      json out = assignment_to_json(a);
      out["run_config"] = run_config_json({{"subcommand", "optimize"},
                                           {"in", in_path},
                                           {"sidecar", sidecar_path},
                                           {"goal", goal},
                                           {"threshold", detail::format_double(threshold)},
                                           {"strategy", strategy},
                                           {"epsilon", detail::format_double(epsilon)},
                                           {"reference", reference},
                                           {"seed", std::to_string(seed)}});
      write_file(out_path, out.dump(2) + "\n");
    } else if (*sweep) {
      MeasurementTable table = expand_repeats(load_table(in_path, sidecar_path));
      std::vector<Strategy> strategies;
      for (auto& tok : CLI::detail::split(strategies_arg, ','))
        strategies.push_back(parse_strategy(tok));
      std::vector<double> thresholds;
      for (auto& tok : CLI::detail::split(thresholds_arg, ','))
        thresholds.push_back(std::stod(tok));
      SweepCurve curve = threshold_sweep(table, strategies, thresholds, epsilon);
      RunConfig rc{{"subcommand", "sweep"},
                   {"in", in_path},
                   {"sidecar", sidecar_path},
                   {"strategies", strategies_arg},
                   {"thresholds", thresholds_arg},
                   {"epsilon", detail::format_double(epsilon)}};
      write_file(out_path, run_config_comments(rc) + sweep_to_csv(curve));
    } else if (*simulate) {
      Scenario sc = scenario_from_json(json::parse(read_file(scenario_path)));
      MeasurementTable table = generate_table(sc.specs, sc.grid, sc.curve, sc.noise, sc.seed);
      RunConfig rc{{"subcommand", "simulate"},
                   {"scenario", scenario_path},
                   {"seed", std::to_string(sc.seed)}};
      write_file(out_path, run_config_comments(rc) + serialize_table(table));
    } else if (*schedule) {
      MeasurementTable table = expand_repeats(load_table(in_path, sidecar_path));
      Assignment a = assignment_from_json(json::parse(read_file(plan_path)));
      std::vector<int> order;
      for (const auto& c : a.choices) order.push_back(c.kernel.index);
      LatencyModel latency(latency_s);
      FrequencySchedule sched = build_schedule(a, order, parse_entry(entry_arg));
      if (prune) sched = prune_switches(sched, latency, table, a.objective);
      sched = with_overhead(std::move(sched), latency);
      json out = schedule_to_json(sched, latency, schedule_cost(sched, latency, table));
      out["run_config"] = run_config_json({{"subcommand", "schedule"},
                                           {"in", in_path},
                                           {"sidecar", sidecar_path},
                                           {"plan", plan_path},
                                           {"latency_s", detail::format_double(latency_s)},
                                           {"entry", entry_arg},
                                           {"prune", prune ? "true" : "false"}});
      write_file(out_path, out.dump(2) + "\n");
    } else if (*validate) {
      MeasurementTable table = expand_repeats(load_table(in_path, sidecar_path));
      Assignment a = assignment_from_json(json::parse(read_file(plan_path)));
      NoiseModel noise{sigma_time, sigma_power};
      ValidationReport r = validate_assignment(table, a, noise, reps, seed);
      json out = validation_report_to_json(r);
      out["planned"] = deltas_to_json(a.deltas);
      out["run_config"] = run_config_json({{"subcommand", "validate"},
                                           {"in", in_path},
                                           {"sidecar", sidecar_path},
                                           {"plan", plan_path},
                                           {"reps", std::to_string(reps)},
                                           {"sigma_time", detail::format_double(sigma_time)},
                                           {"sigma_power", detail::format_double(sigma_power)},
                                           {"seed", std::to_string(seed)}});
      write_file(out_path, out.dump(2) + "\n");
    } else if (*report) {
      json plan = json::parse(read_file(plan_path));
      write_file(out_path, render_report(plan, format));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
