#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "clockplan/scheduler.hpp"
#include "clockplan/simulator.hpp"
#include "fixtures.hpp"

using namespace clockplan;
using fixtures::auto_c;
using fixtures::mhz;

namespace {

Assignment manual_assignment(const MeasurementTable& t, const std::vector<ClockConfig>& cfgs) {
  Assignment a;
  a.objective = Objective::waste(10.0);
  a.baseline = baseline_totals(t);
  for (size_t i = 0; i < t.kernel_count(); ++i) {
    Sample s = t.sample_at(i, cfgs[i]);
    const Sample& b = t.baseline_sample(i);
    a.totals += s;
    a.choices.push_back(Choice{t.kernels[i], cfgs[i], s,
                               delta_pct({s.time, s.energy}, {b.time, b.energy})});
  }
  a.deltas = delta_pct(a.totals, a.baseline);
  return a;
}

std::vector<int> identity_order(const MeasurementTable& t) {
  std::vector<int> order;
  for (const auto& k : t.kernels) order.push_back(k.index);
  return order;
}

// Three kernels measured at the same two configs X and Y; the middle kernel
// is tiny, so a nonzero switch latency makes re-running it at X cheaper than
// switching twice.
MeasurementTable xyx_fixture() {
  ClockConfig X{mhz(9501), mhz(1470)};
  ClockConfig Y{mhz(9501), mhz(630)};
  fixtures::TableBuilder b;
  b.kernel(0, "a", Phase::Forward)
      .baseline(1.0, 100.0)
      .sample(X.mem, X.core, 1.0, 80.0)
      .sample(Y.mem, Y.core, 1.3, 70.0);
  b.kernel(1, "b", Phase::Forward)
      .baseline(0.01, 1.0)
      .sample(X.mem, X.core, 0.01, 0.9)
      .sample(Y.mem, Y.core, 0.013, 0.7);
  b.kernel(2, "c", Phase::Forward)
      .baseline(1.0, 100.0)
      .sample(X.mem, X.core, 1.0, 80.0)
      .sample(Y.mem, Y.core, 1.3, 70.0);
  return b.build();
}

}  // namespace

TEST_CASE("build_schedule coalesces identical adjacent configs") {
  ClockConfig X{mhz(9501), mhz(1470)};
  ClockConfig Y{mhz(9501), mhz(630)};
  fixtures::TableBuilder b;
  for (int k = 0; k < 4; ++k)
    b.kernel(k, "k" + std::to_string(k), Phase::Forward)
        .baseline(1.0, 100.0)
        .sample(X.mem, X.core, 1.0, 90.0)
        .sample(Y.mem, Y.core, 1.2, 80.0);
  MeasurementTable t = b.build();

  Assignment a = manual_assignment(t, {X, X, Y, X});
  FrequencySchedule s = build_schedule(a, {0, 1, 2, 3});
  REQUIRE(s.steps.size() == 3);
  REQUIRE(s.steps[0].kernel_indices == std::vector<int>{0, 1});
  REQUIRE(s.steps[1].kernel_indices == std::vector<int>{2});
  REQUIRE(s.steps[2].kernel_indices == std::vector<int>{3});
  REQUIRE(s.steps[0].config == X);
  REQUIRE(s.steps[1].config == Y);
  REQUIRE(s.switch_count == 3);  // unknown entry config counts the first step

  FrequencySchedule from_x = build_schedule(a, {0, 1, 2, 3}, X);
  REQUIRE(from_x.switch_count == 2);
  FrequencySchedule from_y = build_schedule(a, {0, 1, 2, 3}, Y);
  REQUIRE(from_y.switch_count == 3);
}

TEST_CASE("a uniform assignment collapses to one step") {
  MeasurementTable t = xyx_fixture();
  ClockConfig X{mhz(9501), mhz(1470)};
  Assignment a = manual_assignment(t, {X, X, X});
  FrequencySchedule s = build_schedule(a, {0, 1, 2}, X);
  REQUIRE(s.steps.size() == 1);
  REQUIRE(s.switch_count == 0);
  REQUIRE(build_schedule(a, {0, 1, 2}).switch_count == 1);
}

TEST_CASE("build_schedule rejects inconsistent orders") {
  MeasurementTable t = xyx_fixture();
  ClockConfig X{mhz(9501), mhz(1470)};
  Assignment a = manual_assignment(t, {X, X, X});
  REQUIRE_THROWS_AS(build_schedule(a, {0, 1}), Error);
  REQUIRE_THROWS_AS(build_schedule(a, {0, 1, 7}), Error);
  REQUIRE_THROWS_AS(build_schedule(a, {0, 1, 1}), Error);
}

TEST_CASE("switch count matches an independent run-length recount") {
  MeasurementTable t = fixtures::train_step_fixture();
  const auto& rows = fixtures::train_step_rows();

  std::vector<ClockConfig> cfgs;
  for (const auto& r : rows)
    cfgs.push_back(ClockConfig{r.mem == 0 ? auto_c() : mhz(r.mem),
                               r.core == 0 ? auto_c() : mhz(r.core)});
  Assignment a = manual_assignment(t, cfgs);
  FrequencySchedule s = build_schedule(a, identity_order(t));

  int runs = 1;
  for (size_t i = 1; i < cfgs.size(); ++i)
    if (!(cfgs[i] == cfgs[i - 1])) ++runs;
  REQUIRE(static_cast<int>(s.steps.size()) == runs);
  REQUIRE(s.switch_count == runs);  // nullopt entry adds one for the first step
  size_t covered = 0;
  for (const auto& step : s.steps) covered += step.kernel_indices.size();
  REQUIRE(covered == t.kernel_count());
}

TEST_CASE("zero-latency schedule cost equals the assignment totals") {
  MeasurementTable t = fixtures::two_kernel_fixture();
  Assignment a = optimize_global(t, Objective::waste(0.0));
  FrequencySchedule s = build_schedule(a, identity_order(t));
  Totals cost = schedule_cost(s, LatencyModel(0.0), t);
  REQUIRE(cost.time == Catch::Approx(a.totals.time));
  REQUIRE(cost.energy == Catch::Approx(a.totals.energy));
}

TEST_CASE("switch stalls add latency time and baseline-power energy") {
  ClockConfig X{mhz(9501), mhz(1470)};
  ClockConfig Y{mhz(9501), mhz(630)};
  fixtures::TableBuilder b;
  for (int k = 0; k < 4; ++k)
    b.kernel(k, "k" + std::to_string(k), Phase::Forward)
        .baseline(1.0, 200.0)  // baseline average power: 200 W
        .sample(X.mem, X.core, 1.0, 150.0)
        .sample(Y.mem, Y.core, 1.1, 120.0);
  MeasurementTable t = b.build();
  Assignment a = manual_assignment(t, {X, X, Y, X});
  FrequencySchedule s = build_schedule(a, {0, 1, 2, 3});
  REQUIRE(s.switch_count == 3);

  Totals cost = schedule_cost(s, LatencyModel(0.15), t);
  REQUIRE(cost.time == Catch::Approx(a.totals.time + 0.45));
  REQUIRE(cost.energy == Catch::Approx(a.totals.energy + 0.45 * 200.0));

  FrequencySchedule annotated = with_overhead(s, LatencyModel(0.15));
  REQUIRE(annotated.modeled_overhead == Catch::Approx(0.45));
}

TEST_CASE("pruning at zero latency keeps a globally optimal plan's cost") {
  MeasurementTable t = fixtures::two_kernel_fixture();
  for (Objective obj : {Objective::waste(0.0), Objective::edp()}) {
    Assignment a = optimize_global(t, obj);
    FrequencySchedule s = build_schedule(a, identity_order(t));
    FrequencySchedule pruned = prune_switches(s, LatencyModel(0.0), t, obj);
    Totals before = schedule_cost(s, LatencyModel(0.0), t);
    Totals after = schedule_cost(pruned, LatencyModel(0.0), t);
    REQUIRE(compare(after, before, obj, baseline_totals(t)) == 0);
  }
}

TEST_CASE("pruning absorbs a tiny span when switches dominate it") {
  MeasurementTable t = xyx_fixture();
  ClockConfig X{mhz(9501), mhz(1470)};
  ClockConfig Y{mhz(9501), mhz(630)};
  Assignment a = manual_assignment(t, {X, Y, X});
  FrequencySchedule s = build_schedule(a, {0, 1, 2}, X);
  REQUIRE(s.switch_count == 2);

  FrequencySchedule pruned = prune_switches(s, LatencyModel(0.5), t, Objective::edp());
  REQUIRE(pruned.steps.size() == 1);
  REQUIRE(pruned.steps[0].config == X);
  REQUIRE(pruned.switch_count == 0);
  REQUIRE(pruned.modeled_overhead == 0.0);
}

TEST_CASE("huge latencies collapse the schedule to the uniform optimum") {
  MeasurementTable t = generate_table(fixtures::planted_specs(), fixtures::planted_grid(),
                                      VoltageCurve::default_curve(), std::nullopt, 0);
  Objective obj = Objective::waste(1000.0);
  Assignment global = optimize_global(t, obj);
  Assignment coarse = optimize_coarse(t, obj);

  FrequencySchedule s = build_schedule(global, identity_order(t));
  LatencyModel latency(1e4);
  FrequencySchedule pruned = prune_switches(s, latency, t, obj);

  REQUIRE(pruned.steps.size() == 1);
  REQUIRE(pruned.steps[0].config == coarse.choices[0].config);
  Totals cost = schedule_cost(pruned, latency, t);
  double stall = pruned.switch_count * latency.switch_latency_s;
  REQUIRE(cost.time == Catch::Approx(coarse.totals.time + stall));
}

TEST_CASE("pruning never worsens the objective") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> lat(0.0, 0.5);
  for (int i = 0; i < 100; ++i) {
    MeasurementTable t = fixtures::random_instance(rng);
    for (Objective obj : {Objective::edp(), Objective::waste(0.5)}) {
      Assignment a = optimize_local(t, Objective::waste(0.5));
      FrequencySchedule s = build_schedule(a, identity_order(t));
      LatencyModel latency(lat(rng));
      FrequencySchedule pruned = prune_switches(s, latency, t, obj);
      Totals before = schedule_cost(s, latency, t);
      Totals after = schedule_cost(pruned, latency, t);
      REQUIRE(compare(after, before, obj, baseline_totals(t)) <= 0);
    }
  }
}

TEST_CASE("pruned switch counts fall as latency grows") {
  MeasurementTable t = generate_table(fixtures::planted_specs(), fixtures::planted_grid(),
                                      VoltageCurve::default_curve(), std::nullopt, 0);
  Objective obj = Objective::waste(1000.0);
  Assignment a = optimize_global(t, obj);
  FrequencySchedule s = build_schedule(a, identity_order(t));

  int prev = std::numeric_limits<int>::max();
  for (double latency : {0.0, 0.01, 0.1, 1.0, 10.0, 1e4}) {
    FrequencySchedule pruned = prune_switches(s, LatencyModel(latency), t, obj);
    REQUIRE(pruned.switch_count <= prev);
    prev = pruned.switch_count;
  }
}

TEST_CASE("negative switch latency is rejected") {
  REQUIRE_THROWS_AS(LatencyModel(-0.1), Error);
}
