#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "clockplan/measurements.hpp"
#include "clockplan/metrics.hpp"

namespace clockplan {

enum class Strategy { Local, Global, Coarse };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Local: return "local";
    case Strategy::Global: return "global";
    case Strategy::Coarse: return "coarse";
  }
  return "?";
}

struct Choice {
  KernelId kernel;
  ClockConfig config;
  Sample sample;       // repeat-expanded
  DeltaPct deltas;     // vs. this kernel's baseline sample
};

struct Assignment {
  std::vector<Choice> choices;  // one per kernel, table order
  Totals totals;
  Totals baseline;
  DeltaPct deltas;
  Objective objective;
  Strategy strategy = Strategy::Global;
};

struct FrontPoint {
  double time = 0.0;
  double energy = 0.0;
  // choice[k] = index into candidate_set(table, kernels[k].index)
  std::vector<uint16_t> choice;
};

/// Non-dominated (total time, total energy) pairs reachable by any per-kernel
/// config choice, sorted by time ascending, energy descending.
struct ParetoFront {
  std::vector<FrontPoint> points;
};

inline size_t front_point_cap() {
  if (const char* env = std::getenv("CLOCKPLAN_FRONT_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<size_t>(v);
  }
  return 5'000'000;
}

using CandidateSets = std::vector<std::vector<std::pair<ClockConfig, Sample>>>;

inline CandidateSets all_candidates(const MeasurementTable& table) {
  CandidateSets sets;
  sets.reserve(table.kernel_count());
  for (const auto& k : table.kernels) {
    auto cands = candidate_set(table, k.index);
    if (cands.size() > 65535) fail(ErrorCode::InstanceTooLarge, "more than 65535 configs per kernel");
    sets.push_back(std::move(cands));
  }
  return sets;
}

namespace detail {

inline void prune_front(std::vector<FrontPoint>& pts) {
  std::sort(pts.begin(), pts.end(), [](const FrontPoint& a, const FrontPoint& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.choice < b.choice;
  });
  std::vector<FrontPoint> kept;
  double best_energy = std::numeric_limits<double>::infinity();
  for (auto& p : pts) {
    if (p.energy < best_energy) {
      best_energy = p.energy;
      kept.push_back(std::move(p));
    }
  }
  pts = std::move(kept);
}

// Log-grid epsilon pruning: one representative per cell of width
// log1p(eps)/levels per axis, so composed error over all kernels stays
// within (1+eps) in both coordinates.
inline void epsilon_prune(std::vector<FrontPoint>& pts, double cell_width) {
  std::vector<FrontPoint> kept;
  std::vector<std::pair<long long, long long>> seen;
  for (auto& p : pts) {  // sorted by time asc, so equal time cells are contiguous
    long long tc = static_cast<long long>(std::floor(std::log(p.time) / cell_width));
    long long ec = static_cast<long long>(std::floor(std::log(p.energy) / cell_width));
    bool dup = false;
    for (auto it = seen.rbegin(); it != seen.rend() && it->first == tc; ++it)
      if (it->second == ec) { dup = true; break; }
    if (!dup) {
      seen.emplace_back(tc, ec);
      kept.push_back(std::move(p));
    }
  }
  pts = std::move(kept);
}

}  // namespace detail

/// Exact (epsilon = 0) or epsilon-approximate Pareto front over all
/// assignments of a repeat-expanded table. Kernels are folded in descending
/// candidate-count order; dominated partial sums are pruned after each fold.
inline ParetoFront pareto_front(const MeasurementTable& table, double epsilon = 0.0,
                                size_t cap = front_point_cap()) {
  if (epsilon < 0.0) fail(ErrorCode::InvalidArgument, "epsilon must be >= 0");
  CandidateSets cands = all_candidates(table);
  size_t n = cands.size();

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return cands[a].size() > cands[b].size(); });

  double cell_width = epsilon > 0.0 && n > 0 ? std::log1p(epsilon) / static_cast<double>(n) : 0.0;

  std::vector<FrontPoint> front(1);
  front[0].choice.assign(n, 0);
  for (size_t k : order) {
    std::vector<FrontPoint> next;
    next.reserve(front.size() * cands[k].size());
    for (const auto& p : front) {
      for (size_t ci = 0; ci < cands[k].size(); ++ci) {
        FrontPoint q = p;
        q.time += cands[k][ci].second.time;
        q.energy += cands[k][ci].second.energy;
        q.choice[k] = static_cast<uint16_t>(ci);
        next.push_back(std::move(q));
      }
    }
    detail::prune_front(next);
    if (epsilon > 0.0) detail::epsilon_prune(next, cell_width);
    if (epsilon == 0.0 && next.size() > cap)
      fail(ErrorCode::FrontOverflow,
           "front exceeds " + std::to_string(cap) +
               " points; raise --epsilon (or CLOCKPLAN_FRONT_CAP) to prune approximately");
    front = std::move(next);
  }

  // Re-sum every point in table order so front totals are bit-identical to
  // baseline_totals and brute-force sums over the same choice vector.
  for (auto& p : front) {
    Totals sum;
    for (size_t k = 0; k < n; ++k) sum += cands[k][p.choice[k]].second;
    p.time = sum.time;
    p.energy = sum.energy;
  }
  detail::prune_front(front);
  return ParetoFront{std::move(front)};
}

namespace detail {

inline Assignment make_assignment(const MeasurementTable& table, const CandidateSets& cands,
                                  const std::vector<uint16_t>& choice, const Objective& objective,
                                  Strategy strategy, const Totals& reference) {
  Assignment a;
  a.objective = objective;
  a.strategy = strategy;
  a.baseline = reference;
  for (size_t i = 0; i < table.kernel_count(); ++i) {
    const auto& [config, sample] = cands[i][choice[i]];
    const Sample& base = table.baseline_sample(i);
    Choice c{table.kernels[i], config, sample,
             delta_pct(Totals{sample.time, sample.energy}, Totals{base.time, base.energy})};
    a.totals += sample;
    a.choices.push_back(std::move(c));
  }
  a.deltas = delta_pct(a.totals, a.baseline);
  return a;
}

}  // namespace detail

/// Globally optimal assignment: only the summed totals must satisfy the
/// objective, so kernels may compensate for one another. `reference`
/// replaces the (auto, auto) baseline as the waste scoring target when set.
inline Assignment optimize_global(const MeasurementTable& table, const Objective& objective,
                                  double epsilon = 0.0, size_t cap = front_point_cap(),
                                  std::optional<Totals> reference = std::nullopt) {
  ParetoFront front = pareto_front(table, epsilon, cap);
  Totals baseline = reference ? *reference : baseline_totals(table);
  const FrontPoint* best = nullptr;
  if (objective.kind == ObjectiveKind::Waste) {
    double budget = (1.0 + objective.time_loss_threshold) * baseline.time;
    for (const auto& p : front.points) {
      if (p.time > budget) continue;
      if (!best || p.energy < best->energy) best = &p;
    }
    if (!best) fail(ErrorCode::Infeasible, "no assignment meets the time budget");
  } else {
    for (const auto& p : front.points)
      if (!best || p.time * p.energy < best->time * best->energy) best = &p;
    if (!best) fail(ErrorCode::Infeasible, "empty front");
  }
  return detail::make_assignment(table, all_candidates(table), best->choice, objective,
                                 Strategy::Global, baseline);
}

/// Per-kernel independent optimum: every kernel obeys its own time budget
/// (Waste) or minimizes its own product (EDP).
inline Assignment optimize_local(const MeasurementTable& table, const Objective& objective) {
  CandidateSets cands = all_candidates(table);
  std::vector<uint16_t> choice(cands.size(), 0);
  for (size_t i = 0; i < cands.size(); ++i) {
    const Sample& base = table.baseline_sample(i);
    Totals kbase{base.time, base.energy};
    size_t best = SIZE_MAX;
    for (size_t ci = 0; ci < cands[i].size(); ++ci) {
      Totals t{cands[i][ci].second.time, cands[i][ci].second.energy};
      if (objective.kind == ObjectiveKind::Waste &&
          t.time > (1.0 + objective.time_loss_threshold) * kbase.time)
        continue;
      if (best == SIZE_MAX ||
          compare(t, {cands[i][best].second.time, cands[i][best].second.energy}, objective,
                  kbase) < 0)
        best = ci;
    }
    if (best == SIZE_MAX)
      fail(ErrorCode::Infeasible, "kernel #" + std::to_string(table.kernels[i].index) +
                                      " has no candidate within its time budget");
    choice[i] = static_cast<uint16_t>(best);
  }
  return detail::make_assignment(table, cands, choice, objective, Strategy::Local,
                                 baseline_totals(table));
}

/// One uniform config for the whole table, chosen among the configs measured
/// for every kernel.
inline Assignment optimize_coarse(const MeasurementTable& table, const Objective& objective) {
  CandidateSets cands = all_candidates(table);
  if (cands.empty()) fail(ErrorCode::NoCommonConfig, "empty table");
  std::vector<ClockConfig> common;
  for (const auto& [c, s] : cands[0]) {
    bool everywhere = true;
    for (size_t i = 1; i < cands.size() && everywhere; ++i) {
      everywhere = false;
      for (const auto& [c2, s2] : cands[i])
        if (c2 == c) { everywhere = true; break; }
    }
    if (everywhere) common.push_back(c);
  }
  if (common.empty()) fail(ErrorCode::NoCommonConfig, "kernels share no measured config");

  Totals baseline = baseline_totals(table);
  size_t best = SIZE_MAX;
  Totals best_totals;
  std::vector<Totals> sums(common.size());
  for (size_t u = 0; u < common.size(); ++u) {
    for (size_t i = 0; i < cands.size(); ++i) sums[u] += table.sample_at(i, common[u]);
    if (objective.kind == ObjectiveKind::Waste &&
        sums[u].time > (1.0 + objective.time_loss_threshold) * baseline.time)
      continue;
    if (best == SIZE_MAX || compare(sums[u], best_totals, objective, baseline) < 0) {
      best = u;
      best_totals = sums[u];
    }
  }
  if (best == SIZE_MAX) fail(ErrorCode::Infeasible, "no uniform config meets the time budget");

  std::vector<uint16_t> choice(cands.size(), 0);
  for (size_t i = 0; i < cands.size(); ++i)
    for (size_t ci = 0; ci < cands[i].size(); ++ci)
      if (cands[i][ci].first == common[best]) { choice[i] = static_cast<uint16_t>(ci); break; }
  return detail::make_assignment(table, cands, choice, objective, Strategy::Coarse, baseline);
}

struct SweepEntry {
  Strategy strategy;
  double threshold;
  DeltaPct deltas;
};

struct SweepCurve {
  std::vector<SweepEntry> entries;
};

/// Waste-objective threshold sweep. Global entries reuse a single Pareto
/// front across all thresholds.
inline SweepCurve threshold_sweep(const MeasurementTable& table,
                                  const std::vector<Strategy>& strategies,
                                  const std::vector<double>& thresholds, double epsilon = 0.0,
                                  size_t cap = front_point_cap()) {
  for (size_t i = 1; i < thresholds.size(); ++i)
    if (thresholds[i] < thresholds[i - 1])
      fail(ErrorCode::InvalidArgument, "thresholds must be sorted ascending");

  SweepCurve curve;
  Totals baseline = baseline_totals(table);
  bool want_global = false;
  for (Strategy s : strategies) want_global = want_global || s == Strategy::Global;
  ParetoFront front;
  if (want_global) front = pareto_front(table, epsilon, cap);

  for (Strategy s : strategies) {
    for (double theta : thresholds) {
      Objective obj = Objective::waste(theta);
      DeltaPct d;
      if (s == Strategy::Global) {
        double budget = (1.0 + theta) * baseline.time;
        const FrontPoint* best = nullptr;
        for (const auto& p : front.points) {
          if (p.time > budget) continue;
          if (!best || p.energy < best->energy) best = &p;
        }
        if (!best) fail(ErrorCode::Infeasible, "no front point meets the time budget");
        d = delta_pct(Totals{best->time, best->energy}, baseline);
      } else if (s == Strategy::Local) {
        d = optimize_local(table, obj).deltas;
      } else {
        d = optimize_coarse(table, obj).deltas;
      }
      curve.entries.push_back({s, theta, d});
    }
  }
  return curve;
}

/// Exhaustive enumeration; the test oracle for optimize_global.
inline Assignment brute_force(const MeasurementTable& table, const Objective& objective,
                              uint64_t enumeration_cap = 10'000'000) {
  CandidateSets cands = all_candidates(table);
  uint64_t total = 1;
  for (const auto& cs : cands) {
    if (total > enumeration_cap / cs.size())
      fail(ErrorCode::InstanceTooLarge, "assignment space exceeds enumeration cap");
    total *= cs.size();
  }

  Totals baseline = baseline_totals(table);
  std::vector<uint16_t> current(cands.size(), 0), best;
  Totals best_totals;
  bool have_best = false;
  Totals running;

  auto recurse = [&](auto&& self, size_t k) -> void {
    if (k == cands.size()) {
      if (objective.kind == ObjectiveKind::Waste &&
          running.time > (1.0 + objective.time_loss_threshold) * baseline.time)
        return;
      if (!have_best || compare(running, best_totals, objective, baseline) < 0) {
        have_best = true;
        best_totals = running;
        best = current;
      }
      return;
    }
    for (size_t ci = 0; ci < cands[k].size(); ++ci) {
      current[k] = static_cast<uint16_t>(ci);
      Totals saved = running;
      running += cands[k][ci].second;
      self(self, k + 1);
      running = saved;
    }
  };
  recurse(recurse, 0);
  if (!have_best) fail(ErrorCode::Infeasible, "no assignment meets the time budget");
  return detail::make_assignment(table, cands, best, objective, Strategy::Global, baseline);
}

struct ValidationReport {
  int repetitions = 0;
  DeltaPct mean, min, max;  // statistics across all repetition pairs
  std::vector<Totals> planned_runs;
  std::vector<Totals> baseline_runs;
};

namespace detail {

inline Sample noisy(const Sample& truth, const NoiseModel& noise, std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  double zt = unit(rng);
  double zp = unit(rng);
  double time = truth.time * std::exp(noise.sigma_time * zt);
  double power = truth.energy / truth.time * std::exp(noise.sigma_power * zp);
  return Sample{time, power * time};
}

}  // namespace detail

/// Re-measure the planned assignment and the baseline `repetitions` times
/// under the noise model, then report delta statistics over all
/// repetition pairs (repetitions^2 comparisons).
inline ValidationReport validate_assignment(const MeasurementTable& truth,
                                            const Assignment& assignment, const NoiseModel& noise,
                                            int repetitions, uint64_t seed) {
  if (repetitions < 1) fail(ErrorCode::InvalidArgument, "repetitions must be >= 1");
  struct Pair { Sample chosen, base; };
  std::vector<Pair> rows;
  for (const auto& choice : assignment.choices) {
    size_t pos = truth.position_of(choice.kernel.index);
    rows.push_back({truth.sample_at(pos, choice.config), truth.baseline_sample(pos)});
  }

  std::mt19937_64 rng(seed);
  ValidationReport report;
  report.repetitions = repetitions;
  for (int r = 0; r < repetitions; ++r) {
    Totals planned, base;
    for (const auto& row : rows) planned += detail::noisy(row.chosen, noise, rng);
    for (const auto& row : rows) base += detail::noisy(row.base, noise, rng);
    report.planned_runs.push_back(planned);
    report.baseline_runs.push_back(base);
  }

  bool first = true;
  double sum_t = 0.0, sum_e = 0.0;
  for (const Totals& p : report.planned_runs) {
    for (const Totals& b : report.baseline_runs) {
      DeltaPct d = delta_pct(p, b);
      sum_t += d.time_pct;
      sum_e += d.energy_pct;
      if (first) {
        report.min = report.max = d;
        first = false;
      } else {
        report.min.time_pct = std::min(report.min.time_pct, d.time_pct);
        report.min.energy_pct = std::min(report.min.energy_pct, d.energy_pct);
        report.max.time_pct = std::max(report.max.time_pct, d.time_pct);
        report.max.energy_pct = std::max(report.max.energy_pct, d.energy_pct);
      }
    }
  }
  double n = static_cast<double>(repetitions) * repetitions;
  report.mean = {sum_t / n, sum_e / n};
  return report;
}

}  // namespace clockplan
