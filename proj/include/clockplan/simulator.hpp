#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "clockplan/measurements.hpp"

namespace clockplan {

/// Piecewise-linear frequency-to-voltage map, clamped outside the sampled
/// range.
struct VoltageCurve {
  std::vector<std::pair<double, double>> points;  // (MHz, volts), strictly increasing

  void validate() const {
    if (points.size() < 2) fail(ErrorCode::InvalidArgument, "voltage curve needs >= 2 points");
    for (size_t i = 0; i < points.size(); ++i) {
      if (points[i].second <= 0.0) fail(ErrorCode::InvalidArgument, "voltage must be positive");
      if (i > 0 && (points[i].first <= points[i - 1].first ||
                    points[i].second <= points[i - 1].second))
        fail(ErrorCode::InvalidArgument, "voltage curve must be strictly increasing");
    }
  }

  double at(double f) const {
    if (f <= points.front().first) return points.front().second;
    if (f >= points.back().first) return points.back().second;
    for (size_t i = 1; i < points.size(); ++i) {
      if (f <= points[i].first) {
        auto [f0, v0] = points[i - 1];
        auto [f1, v1] = points[i];
        return v0 + (v1 - v0) * (f - f0) / (f1 - f0);
      }
    }
    return points.back().second;
  }

  static VoltageCurve default_curve() {
    return VoltageCurve{{{210.0, 0.60}, {1470.0, 0.75}, {2100.0, 1.00}}};
  }
};

inline double voltage(const VoltageCurve& curve, double f_mhz) { return curve.at(f_mhz); }

/// Synthetic kernel cost parameters. Execution time is the slower of the two
/// clock domains (plus fixed overhead); power is static plus f*V(f)^2 terms
/// per domain.
struct SimKernelSpec {
  std::string name = "kernel";
  Phase phase = Phase::Forward;
  int repeat_count = 1;
  double core_work = 0.0;     // core cycles
  double mem_work = 0.0;      // memory cycles
  double overhead = 0.0;      // seconds
  double static_power = 0.0;  // watts
  double core_coeff = 0.0;    // watts per (MHz * volt^2)
  double mem_coeff = 0.0;     // watts per (MHz * volt^2)

  void validate() const {
    if (core_work < 0 || mem_work < 0 || overhead < 0 || static_power < 0 || core_coeff < 0 ||
        mem_coeff < 0)
      fail(ErrorCode::InvalidArgument, "sim kernel parameters must be non-negative");
    if (core_work == 0 && mem_work == 0)
      fail(ErrorCode::InvalidArgument, "sim kernel needs core_work or mem_work");
    if (repeat_count < 1) fail(ErrorCode::InvalidArgument, "repeat_count must be >= 1");
  }
};

enum class AutoPolicy { MaxClocks, ThrottleCap };

struct ClockGrid {
  std::vector<int> core_clocks;  // MHz, sorted ascending, unique
  std::vector<int> mem_clocks;   // MHz, sorted ascending, unique
  AutoPolicy auto_policy = AutoPolicy::MaxClocks;
  double throttle_cap_w = 0.0;  // only for ThrottleCap

  void validate() const {
    auto check = [](const std::vector<int>& v, const char* what) {
      if (v.empty()) fail(ErrorCode::InvalidArgument, std::string(what) + " list is empty");
      for (size_t i = 0; i < v.size(); ++i) {
        if (v[i] <= 0) fail(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
        if (i > 0 && v[i] <= v[i - 1])
          fail(ErrorCode::InvalidArgument, std::string(what) + " must be sorted ascending, unique");
      }
    };
    check(core_clocks, "core_clocks");
    check(mem_clocks, "mem_clocks");
  }

  static ClockGrid default_grid() {
    ClockGrid g;
    for (int f = 210; f <= 2100; f += 210) g.core_clocks.push_back(f);
    g.mem_clocks = {405, 810, 5001, 9251, 9501};
    return g;
  }
};

inline double sim_power(const SimKernelSpec& spec, double f_core, double f_mem,
                        const VoltageCurve& curve) {
  double vc = curve.at(f_core);
  double vm = curve.at(f_mem);
  return spec.static_power + spec.core_coeff * f_core * vc * vc +
         spec.mem_coeff * f_mem * vm * vm;
}

/// Noise-free model evaluation at one (core, mem) frequency pair.
inline Sample sim_kernel(const SimKernelSpec& spec, double f_core_mhz, double f_mem_mhz,
                         const VoltageCurve& curve) {
  if (f_core_mhz <= 0 || f_mem_mhz <= 0)
    fail(ErrorCode::InvalidArgument, "frequencies must be positive");
  double core_time = spec.core_work / (f_core_mhz * 1e6);
  double mem_time = spec.mem_work / (f_mem_mhz * 1e6);
  double time = std::max(core_time, mem_time) + spec.overhead;
  double power = sim_power(spec, f_core_mhz, f_mem_mhz, curve);
  return Sample{time, power * time};
}

namespace detail {

// Per-kernel auto resolution: fastest config whose modeled power fits the
// cap; falls back to the lowest-power config when nothing fits.
inline std::pair<int, int> resolve_auto(const SimKernelSpec& spec, const ClockGrid& grid,
                                        const VoltageCurve& curve) {
  if (grid.auto_policy == AutoPolicy::MaxClocks)
    return {grid.core_clocks.back(), grid.mem_clocks.back()};
  std::pair<int, int> best{0, 0};
  double best_time = std::numeric_limits<double>::infinity();
  std::pair<int, int> least{grid.core_clocks.front(), grid.mem_clocks.front()};
  double least_power = std::numeric_limits<double>::infinity();
  for (int fc : grid.core_clocks) {
    for (int fm : grid.mem_clocks) {
      double p = sim_power(spec, fc, fm, curve);
      if (p < least_power) { least_power = p; least = {fc, fm}; }
      if (p > grid.throttle_cap_w) continue;
      Sample s = sim_kernel(spec, fc, fm, curve);
      if (s.time < best_time || (s.time == best_time && std::make_pair(fc, fm) > best)) {
        best_time = s.time;
        best = {fc, fm};
      }
    }
  }
  return best.first > 0 ? best : least;
}

}  // namespace detail

/// Generate a full measurement table over the grid plus one (auto, auto) row
/// per kernel. RNG streams are split per (kernel, config) from the seed, so
/// any evaluation order produces the identical table.
inline MeasurementTable generate_table(const std::vector<SimKernelSpec>& specs,
                                       const ClockGrid& grid, const VoltageCurve& curve,
                                       const std::optional<NoiseModel>& noise, uint64_t seed) {
  grid.validate();
  curve.validate();
  MeasurementTable table;
  for (size_t i = 0; i < specs.size(); ++i) {
    const SimKernelSpec& spec = specs[i];
    spec.validate();
    table.kernels.push_back(
        KernelId{static_cast<int>(i), spec.name, spec.phase, spec.repeat_count});
    MeasurementTable::ConfigSamples rows;

    auto emit = [&](ClockConfig config, int fc, int fm, uint64_t config_id) {
      Sample s = sim_kernel(spec, fc, fm, curve);
      if (noise && !noise->silent()) {
        std::mt19937_64 rng(detail::splitmix64(seed ^ detail::splitmix64(
                                                          (static_cast<uint64_t>(i) << 32) ^ config_id)));
        std::normal_distribution<double> unit(0.0, 1.0);
        double time = s.time * std::exp(noise->sigma_time * unit(rng));
        double power = s.energy / s.time * std::exp(noise->sigma_power * unit(rng));
        s = Sample{time, power * time};
      }
      rows.emplace_back(config, s);
    };

    uint64_t config_id = 1;
    for (int fm : grid.mem_clocks)
      for (int fc : grid.core_clocks)
        emit(ClockConfig{ClockSetting::at(fm), ClockSetting::at(fc)}, fc, fm, config_id++);
    auto [afc, afm] = detail::resolve_auto(spec, grid, curve);
    emit(ClockConfig::baseline(), afc, afm, 0);

    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return canon_less(a.first, b.first); });
    table.samples.push_back(std::move(rows));
  }
  table.validate();
  return table;
}

}  // namespace clockplan
