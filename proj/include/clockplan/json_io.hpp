#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "clockplan/measurements.hpp"
#include "clockplan/optimizer.hpp"
#include "clockplan/scheduler.hpp"
#include "clockplan/simulator.hpp"

namespace clockplan {

using json = nlohmann::ordered_json;

inline json clock_to_json(ClockSetting s) {
  if (s.is_auto()) return json("auto");
  return json(s.mhz);
}

inline ClockSetting clock_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "auto") return ClockSetting::auto_clock();
    fail(ErrorCode::MalformedRecord, "clock must be a positive integer or \"auto\"");
  }
  if (!j.is_number_integer() || j.get<long>() <= 0)
    fail(ErrorCode::MalformedRecord, "clock must be a positive integer or \"auto\"");
  return ClockSetting::at(j.get<int>());
}

/// Apply the sidecar document: `constraints` (mem/max_core rules) and
/// `metadata`. Re-validates the table afterwards, so samples at now-invalid
/// configs surface as ConstraintViolation.
inline void apply_sidecar(MeasurementTable& table, const json& sidecar) {
  if (sidecar.contains("constraints")) {
    for (const auto& rule : sidecar.at("constraints")) {
      ConstraintRule r;
      r.mem_mhz = rule.at("mem").get<int>();
      r.max_core_mhz = rule.at("max_core").get<int>();
      if (r.mem_mhz <= 0 || r.max_core_mhz <= 0)
        fail(ErrorCode::MalformedRecord, "constraint clocks must be positive");
      table.constraints.push_back(r);
    }
  }
  if (sidecar.contains("metadata")) {
    for (const auto& [key, value] : sidecar.at("metadata").items())
      table.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  table.validate();
}

inline json sidecar_to_json(const MeasurementTable& table) {
  json j;
  j["constraints"] = json::array();
  for (const auto& r : table.constraints)
    j["constraints"].push_back({{"mem", r.mem_mhz}, {"max_core", r.max_core_mhz}});
  j["metadata"] = json::object();
  for (const auto& [k, v] : table.metadata) j["metadata"][k] = v;
  return j;
}

inline json totals_to_json(const Totals& t) {
  return json{{"time_s", t.time}, {"energy_j", t.energy}};
}

inline Totals totals_from_json(const json& j) {
  return Totals{j.at("time_s").get<double>(), j.at("energy_j").get<double>()};
}

inline json deltas_to_json(const DeltaPct& d) {
  return json{{"time_pct", d.time_pct}, {"energy_pct", d.energy_pct}};
}

inline json assignment_to_json(const Assignment& a) {
  json j;
  j["objective"] = to_string(a.objective.kind);
  j["strategy"] = to_string(a.strategy);
  j["threshold"] = a.objective.time_loss_threshold;
  j["baseline"] = totals_to_json(a.baseline);
  j["totals"] = totals_to_json(a.totals);
  j["deltas"] = deltas_to_json(a.deltas);
  j["choices"] = json::array();
  for (const auto& c : a.choices) {
    j["choices"].push_back({{"index", c.kernel.index},
                            {"name", c.kernel.name},
                            {"phase", to_string(c.kernel.phase)},
                            {"mem_clock", clock_to_json(c.config.mem)},
                            {"core_clock", clock_to_json(c.config.core)},
                            {"time_s", c.sample.time},
                            {"energy_j", c.sample.energy},
                            {"time_pct", c.deltas.time_pct},
                            {"energy_pct", c.deltas.energy_pct}});
  }
  return j;
}

inline Assignment assignment_from_json(const json& j) {
  Assignment a;
  std::string kind = j.at("objective").get<std::string>();
  a.objective.kind = kind == "edp" ? ObjectiveKind::EDP : ObjectiveKind::Waste;
  a.objective.time_loss_threshold = j.at("threshold").get<double>();
  std::string strat = j.at("strategy").get<std::string>();
  a.strategy = strat == "local"    ? Strategy::Local
               : strat == "coarse" ? Strategy::Coarse
                                   : Strategy::Global;
  a.baseline = totals_from_json(j.at("baseline"));
  a.totals = totals_from_json(j.at("totals"));
  const json& d = j.at("deltas");
  a.deltas = {d.at("time_pct").get<double>(), d.at("energy_pct").get<double>()};
  for (const auto& cj : j.at("choices")) {
    Choice c;
    c.kernel.index = cj.at("index").get<int>();
    c.kernel.name = cj.at("name").get<std::string>();
    if (cj.contains("phase")) phase_from_string(cj.at("phase").get<std::string>(), c.kernel.phase);
    c.config.mem = clock_from_json(cj.at("mem_clock"));
    c.config.core = clock_from_json(cj.at("core_clock"));
    c.sample = {cj.at("time_s").get<double>(), cj.at("energy_j").get<double>()};
    c.deltas = {cj.at("time_pct").get<double>(), cj.at("energy_pct").get<double>()};
    a.choices.push_back(std::move(c));
  }
  return a;
}

inline json schedule_to_json(const FrequencySchedule& s, const LatencyModel& latency,
                             const Totals& modeled) {
  json j;
  j["latency_s"] = latency.switch_latency_s;
  if (s.entry_config) {
    j["entry_config"] = {{"mem_clock", clock_to_json(s.entry_config->mem)},
                         {"core_clock", clock_to_json(s.entry_config->core)}};
  } else {
    j["entry_config"] = nullptr;
  }
  j["steps"] = json::array();
  for (const auto& step : s.steps) {
    j["steps"].push_back({{"mem_clock", clock_to_json(step.config.mem)},
                          {"core_clock", clock_to_json(step.config.core)},
                          {"first_index", step.first_index()},
                          {"last_index", step.last_index()},
                          {"kernel_indices", step.kernel_indices}});
  }
  j["switch_count"] = s.switch_count;
  j["modeled_overhead_s"] = s.modeled_overhead;
  j["modeled"] = totals_to_json(modeled);
  return j;
}

inline json validation_report_to_json(const ValidationReport& r) {
  json j;
  j["repetitions"] = r.repetitions;
  j["mean"] = deltas_to_json(r.mean);
  j["min"] = deltas_to_json(r.min);
  j["max"] = deltas_to_json(r.max);
  j["planned_runs"] = json::array();
  for (const auto& t : r.planned_runs) j["planned_runs"].push_back(totals_to_json(t));
  j["baseline_runs"] = json::array();
  for (const auto& t : r.baseline_runs) j["baseline_runs"].push_back(totals_to_json(t));
  return j;
}

struct Scenario {
  std::vector<SimKernelSpec> specs;
  ClockGrid grid = ClockGrid::default_grid();
  VoltageCurve curve = VoltageCurve::default_curve();
  std::optional<NoiseModel> noise;
  uint64_t seed = 0;
};

inline Scenario scenario_from_json(const json& j) {
  Scenario s;
  for (const auto& sj : j.at("specs")) {
    SimKernelSpec spec;
    spec.name = sj.value("name", std::string("kernel"));
    std::string ph = sj.value("phase", std::string("forward"));
    if (!phase_from_string(ph, spec.phase))
      fail(ErrorCode::MalformedRecord, "unknown phase '" + ph + "'");
    spec.repeat_count = sj.value("repeat_count", 1);
    spec.core_work = sj.value("core_work", 0.0);
    spec.mem_work = sj.value("mem_work", 0.0);
    spec.overhead = sj.value("overhead", 0.0);
    spec.static_power = sj.value("static_power", 0.0);
    spec.core_coeff = sj.value("core_coeff", 0.0);
    spec.mem_coeff = sj.value("mem_coeff", 0.0);
    spec.validate();
    s.specs.push_back(std::move(spec));
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (g.contains("core_clocks")) s.grid.core_clocks = g.at("core_clocks").get<std::vector<int>>();
    if (g.contains("mem_clocks")) s.grid.mem_clocks = g.at("mem_clocks").get<std::vector<int>>();
  }
  if (j.contains("auto_policy")) {
    const json& p = j.at("auto_policy");
    if (p.is_string() && p.get<std::string>() == "max_clocks") {
      s.grid.auto_policy = AutoPolicy::MaxClocks;
    } else if (p.is_object() && p.contains("throttle_cap_w")) {
      s.grid.auto_policy = AutoPolicy::ThrottleCap;
      s.grid.throttle_cap_w = p.at("throttle_cap_w").get<double>();
    } else {
      fail(ErrorCode::MalformedRecord, "auto_policy must be \"max_clocks\" or {throttle_cap_w}");
    }
  }
  if (j.contains("curve")) {
    s.curve.points.clear();
    for (const auto& pt : j.at("curve"))
      s.curve.points.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
  }
  if (j.contains("noise") && !j.at("noise").is_null()) {
    NoiseModel n;
    n.sigma_time = j.at("noise").value("sigma_time", 0.0);
    n.sigma_power = j.at("noise").value("sigma_power", 0.0);
    s.noise = n;
  }
  s.seed = j.value("seed", 0ULL);
  s.grid.validate();
  s.curve.validate();
  return s;
}

/// Kernel-by-kernel listing regenerated from a plan document.
inline std::string render_report(const json& plan, const std::string& format) {
  if (format == "json") return plan.dump(2) + "\n";
  std::string out;
  if (format == "csv") {
    out = "index,name,mem_clock,core_clock,time_pct,energy_pct\n";
    for (const auto& c : plan.at("choices")) {
      out += std::to_string(c.at("index").get<int>()) + "," + c.at("name").get<std::string>() +
             "," + (c.at("mem_clock").is_string() ? "auto" : std::to_string(c.at("mem_clock").get<int>())) +
             "," + (c.at("core_clock").is_string() ? "auto" : std::to_string(c.at("core_clock").get<int>())) +
             "," + detail::format_double(c.at("time_pct").get<double>()) + "," +
             detail::format_double(c.at("energy_pct").get<double>()) + "\n";
    }
    return out;
  }
  if (format == "markdown-table") {
    out = "| # | Name | Mem (MHz) | Core (MHz) | Time (%) | Energy (%) |\n";
    out += "|---:|:---|---:|---:|---:|---:|\n";
    char buf[64];
    auto pct = [&](double v) {
      std::snprintf(buf, sizeof(buf), "%+.2f", v);
      return std::string(buf);
    };
    for (const auto& c : plan.at("choices")) {
      out += "| " + std::to_string(c.at("index").get<int>()) + " | " +
             c.at("name").get<std::string>() + " | " +
             (c.at("mem_clock").is_string() ? "auto" : std::to_string(c.at("mem_clock").get<int>())) +
             " | " +
             (c.at("core_clock").is_string() ? "auto" : std::to_string(c.at("core_clock").get<int>())) +
             " | " + pct(c.at("time_pct").get<double>()) + " | " +
             pct(c.at("energy_pct").get<double>()) + " |\n";
    }
    out += "| | **Total** | | | " + pct(plan.at("deltas").at("time_pct").get<double>()) + " | " +
           pct(plan.at("deltas").at("energy_pct").get<double>()) + " |\n";
    return out;
  }
  fail(ErrorCode::InvalidArgument, "unknown report format '" + format + "'");
}

inline std::string sweep_to_csv(const SweepCurve& curve) {
  std::string out = "strategy,threshold,time_pct,energy_pct\n";
  for (const auto& e : curve.entries) {
    out += std::string(to_string(e.strategy)) + "," + detail::format_double(e.threshold) + "," +
           detail::format_double(e.deltas.time_pct) + "," +
           detail::format_double(e.deltas.energy_pct) + "\n";
  }
  return out;
}

}  // namespace clockplan
