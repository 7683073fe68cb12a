#pragma once

#include <optional>
#include <vector>

#include "clockplan/optimizer.hpp"

namespace clockplan {

struct ScheduleStep {
  ClockConfig config;
  std::vector<int> kernel_indices;  // contiguous span of the execution order

  int first_index() const { return kernel_indices.front(); }
  int last_index() const { return kernel_indices.back(); }
};

/// A per-kernel assignment flattened into an executable sequence of clock
/// changes. `entry_config` is the config the GPU is already running when the
/// schedule starts; when unknown (nullopt), the first step always counts as
/// a switch.
struct FrequencySchedule {
  std::vector<ScheduleStep> steps;
  std::optional<ClockConfig> entry_config;
  int switch_count = 0;
  double modeled_overhead = 0.0;  // seconds, switch_count x latency
};

struct LatencyModel {
  double switch_latency_s = 0.0;

  LatencyModel() = default;
  explicit LatencyModel(double s) : switch_latency_s(s) {
    if (s < 0.0) fail(ErrorCode::InvalidArgument, "switch latency must be >= 0");
  }
};

namespace detail {

inline int count_switches(const std::vector<ScheduleStep>& steps,
                          const std::optional<ClockConfig>& entry) {
  if (steps.empty()) return 0;
  int n = static_cast<int>(steps.size()) - 1;
  if (!entry || steps.front().config != *entry) ++n;
  return n;
}

}  // namespace detail

/// Run-length coalesce identical adjacent configs along the execution order.
inline FrequencySchedule build_schedule(const Assignment& assignment,
                                        const std::vector<int>& order,
                                        std::optional<ClockConfig> entry_config = std::nullopt) {
  if (order.size() != assignment.choices.size())
    fail(ErrorCode::OrderMismatch, "order length differs from assignment size");
  std::vector<const Choice*> by_index;
  for (int idx : order) {
    const Choice* found = nullptr;
    for (const auto& c : assignment.choices)
      if (c.kernel.index == idx) { found = &c; break; }
    if (!found) fail(ErrorCode::OrderMismatch, "order names kernel #" + std::to_string(idx) +
                                                   " absent from the assignment");
    for (const Choice* prev : by_index)
      if (prev->kernel.index == idx)
        fail(ErrorCode::OrderMismatch, "order repeats kernel #" + std::to_string(idx));
    by_index.push_back(found);
  }

  FrequencySchedule sched;
  sched.entry_config = entry_config;
  for (const Choice* c : by_index) {
    if (!sched.steps.empty() && sched.steps.back().config == c->config)
      sched.steps.back().kernel_indices.push_back(c->kernel.index);
    else
      sched.steps.push_back({c->config, {c->kernel.index}});
  }
  sched.switch_count = detail::count_switches(sched.steps, entry_config);
  return sched;
}

/// Totals of a schedule: chosen samples plus switch stalls. Stall time adds
/// switch_count x latency; stall energy is charged at the baseline-config
/// average power of the table.
inline Totals schedule_cost(const FrequencySchedule& schedule, const LatencyModel& latency,
                            const MeasurementTable& table) {
  Totals base = baseline_totals(table);
  Totals out;
  for (const auto& step : schedule.steps)
    for (int idx : step.kernel_indices) {
      size_t pos = table.position_of(idx);
      out += table.sample_at(pos, step.config);
    }
  double stall = schedule.switch_count * latency.switch_latency_s;
  out.time += stall;
  out.energy += stall * (base.energy / base.time);
  return out;
}

/// Annotate the schedule with its modeled stall time.
inline FrequencySchedule with_overhead(FrequencySchedule schedule, const LatencyModel& latency) {
  schedule.modeled_overhead = schedule.switch_count * latency.switch_latency_s;
  return schedule;
}

namespace detail {

inline FrequencySchedule merge_steps(const FrequencySchedule& s, size_t i, bool keep_left) {
  FrequencySchedule out;
  out.entry_config = s.entry_config;
  for (size_t j = 0; j < s.steps.size(); ++j) {
    if (j == i + 1) continue;
    ScheduleStep step = s.steps[j];
    if (j == i) {
      step.config = keep_left ? s.steps[i].config : s.steps[i + 1].config;
      step.kernel_indices.insert(step.kernel_indices.end(),
                                 s.steps[i + 1].kernel_indices.begin(),
                                 s.steps[i + 1].kernel_indices.end());
    }
    if (!out.steps.empty() && out.steps.back().config == step.config)
      out.steps.back().kernel_indices.insert(out.steps.back().kernel_indices.end(),
                                             step.kernel_indices.begin(),
                                             step.kernel_indices.end());
    else
      out.steps.push_back(std::move(step));
  }
  out.switch_count = count_switches(out.steps, out.entry_config);
  return out;
}

inline bool schedule_measured(const FrequencySchedule& s, const MeasurementTable& table) {
  for (const auto& step : s.steps)
    for (int idx : step.kernel_indices)
      if (!table.has_sample(table.position_of(idx), step.config)) return false;
  return true;
}

}  // namespace detail

/// Greedy switch pruning: repeatedly apply the adjacent-pair merge (one span
/// re-run at its neighbor's config) that most improves the objective under
/// schedule_cost, until no merge improves it. A fully collapsed schedule is
/// additionally compared against every uniform common config, so with
/// latencies dwarfing the workload the result degenerates to the coarse
/// uniform optimum.
inline FrequencySchedule prune_switches(const FrequencySchedule& schedule,
                                        const LatencyModel& latency,
                                        const MeasurementTable& table,
                                        const Objective& objective) {
  Totals baseline = baseline_totals(table);
  FrequencySchedule current = schedule;
  Totals current_cost = schedule_cost(current, latency, table);

  while (current.steps.size() > 1) {
    FrequencySchedule best;
    Totals best_cost;
    bool improved = false;
    for (size_t i = 0; i + 1 < current.steps.size(); ++i) {
      for (bool keep_left : {true, false}) {
        FrequencySchedule cand = detail::merge_steps(current, i, keep_left);
        if (!detail::schedule_measured(cand, table)) continue;
        Totals cost = schedule_cost(cand, latency, table);
        if (compare(cost, improved ? best_cost : current_cost, objective, baseline) < 0) {
          improved = true;
          best = std::move(cand);
          best_cost = cost;
        }
      }
    }
    if (!improved) break;
    current = std::move(best);
    current_cost = best_cost;
  }

  if (current.steps.size() == 1) {
    // Candidate uniform configs: those measured for every scheduled kernel.
    std::vector<int> order;
    for (const auto& step : schedule.steps)
      for (int idx : step.kernel_indices) order.push_back(idx);
    std::vector<ClockConfig> common;
    for (const auto& [c, s] : candidate_set(table, order.front())) {
      bool everywhere = true;
      for (size_t i = 1; i < order.size() && everywhere; ++i) {
        everywhere = false;
        for (const auto& [c2, s2] : candidate_set(table, order[i]))
          if (c2 == c) { everywhere = true; break; }
      }
      if (everywhere) common.push_back(c);
    }
    for (const ClockConfig& c : common) {
      FrequencySchedule cand = current;
      cand.steps[0].config = c;
      cand.switch_count = detail::count_switches(cand.steps, cand.entry_config);
      Totals cost = schedule_cost(cand, latency, table);
      if (compare(cost, current_cost, objective, baseline) < 0) {
        current = std::move(cand);
        current_cost = cost;
      }
    }
  }
  return with_overhead(std::move(current), latency);
}

}  // namespace clockplan
