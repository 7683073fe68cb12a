#pragma once

#include <random>
#include <string>
#include <vector>

#include "clockplan/measurements.hpp"
#include "clockplan/simulator.hpp"

namespace fixtures {

using namespace clockplan;

class TableBuilder {
 public:
  TableBuilder& kernel(int index, std::string name, Phase phase, int repeat = 1) {
    table_.kernels.push_back(KernelId{index, std::move(name), phase, repeat});
    table_.samples.emplace_back();
    return *this;
  }

  TableBuilder& sample(ClockSetting mem, ClockSetting core, double t, double e) {
    table_.samples.back().emplace_back(ClockConfig{mem, core}, Sample{t, e});
    return *this;
  }

  TableBuilder& baseline(double t, double e) {
    return sample(ClockSetting::auto_clock(), ClockSetting::auto_clock(), t, e);
  }

  MeasurementTable build() {
    for (auto& cfgs : table_.samples)
      std::sort(cfgs.begin(), cfgs.end(),
                [](const auto& a, const auto& b) { return canon_less(a.first, b.first); });
    table_.validate();
    return table_;
  }

 private:
  MeasurementTable table_;
};

inline ClockSetting mhz(int v) { return ClockSetting::at(v); }
inline ClockSetting auto_c() { return ClockSetting::auto_clock(); }

// The worked two-kernel example: equal per-kernel baselines (1 s, 1 J);
// kernel A offers (0.98, 0.80) and (0.97, 0.85), kernel B offers (1.01, 0.65)
// and a do-nothing (1.00, 1.00) alternative. 3 x 3 = 9 assignments total.
inline MeasurementTable two_kernel_fixture() {
  return TableBuilder()
      .kernel(0, "A", Phase::Forward)
      .baseline(1.0, 1.0)
      .sample(mhz(5001), auto_c(), 0.98, 0.80)   // A1
      .sample(mhz(9501), mhz(1680), 0.97, 0.85)  // A2
      .kernel(1, "B", Phase::Forward)
      .baseline(1.0, 1.0)
      .sample(mhz(9501), mhz(630), 1.01, 0.65)   // B1
      .sample(mhz(9501), mhz(2100), 1.0, 1.0)    // B2
      .build();
}

// Random multiple-choice instance: each kernel has a baseline plus up to
// max_configs-1 alternatives with time/energy multipliers around 1.
inline MeasurementTable random_instance(std::mt19937_64& rng, int max_kernels = 6,
                                        int max_configs = 5) {
  std::uniform_int_distribution<int> nk(1, max_kernels);
  std::uniform_int_distribution<int> nc(1, max_configs);
  std::uniform_real_distribution<double> base_t(0.5, 2.0);
  std::uniform_real_distribution<double> base_e(50.0, 400.0);
  std::uniform_real_distribution<double> t_mult(0.8, 1.5);
  std::uniform_real_distribution<double> e_mult(0.5, 1.4);

  const int mems[] = {405, 810, 5001, 9251, 9501};
  const int cores[] = {630, 1050, 1470, 1890, 2100};

  TableBuilder b;
  int kernels = nk(rng);
  for (int k = 0; k < kernels; ++k) {
    b.kernel(k, "k" + std::to_string(k), Phase::Forward);
    double t0 = base_t(rng), e0 = base_e(rng);
    b.baseline(t0, e0);
    int configs = nc(rng);
    std::vector<ClockConfig> used;
    for (int c = 1; c < configs; ++c) {
      ClockConfig cfg{mhz(mems[std::uniform_int_distribution<int>(0, 4)(rng)]),
                      mhz(cores[std::uniform_int_distribution<int>(0, 4)(rng)])};
      bool dup = false;
      for (const auto& u : used) dup = dup || u == cfg;
      if (dup) continue;
      used.push_back(cfg);
      b.sample(cfg.mem, cfg.core, t0 * t_mult(rng), e0 * e_mult(rng));
    }
  }
  return b.build();
}

// Reference 46-kernel transformer training step: per kernel the (mem, core)
// of a chosen plan, 0 = auto. Used for parser-shape and run-length tests.
struct TrainStepRow {
  int index;
  const char* name;
  Phase phase;
  int repeat;
  int mem;   // 0 = auto
  int core;  // 0 = auto
};

inline const std::vector<TrainStepRow>& train_step_rows() {
  static const std::vector<TrainStepRow> rows = {
      {0, "WTE & WPE", Phase::Embedding, 1, 0, 630},
      {1, "Layernorm", Phase::Embedding, 1, 0, 1050},
      {2, "GEMM", Phase::Forward, 24, 5001, 0},
      {3, "Permute", Phase::Forward, 24, 9501, 1680},
      {4, "GEMM", Phase::Forward, 24, 9501, 0},
      {5, "Softmax", Phase::Forward, 24, 9501, 1050},
      {6, "GEMM", Phase::Forward, 24, 9251, 0},
      {7, "Permute", Phase::Forward, 24, 9251, 0},
      {8, "GEMM", Phase::Forward, 24, 5001, 0},
      {9, "Residual", Phase::Forward, 24, 0, 840},
      {10, "GEMM", Phase::Forward, 24, 5001, 0},
      {11, "GELU", Phase::Forward, 24, 9501, 630},
      {12, "GEMM", Phase::Forward, 24, 5001, 0},
      {13, "Residual", Phase::Forward, 24, 9501, 1050},
      {14, "GEMM", Phase::LossCalc, 1, 5001, 0},
      {15, "Softmax", Phase::LossCalc, 1, 9501, 1680},
      {16, "GEMM", Phase::LossCalc, 1, 9251, 0},
      {17, "GEMM", Phase::LossCalc, 1, 5001, 1680},
      {18, "Layernorm bwd", Phase::LossCalc, 1, 0, 1260},
      {19, "GELU", Phase::Backward, 24, 9501, 630},
      {20, "Bias bwd", Phase::Backward, 24, 0, 1260},
      {21, "Bias reduce bwd", Phase::Backward, 24, 0, 0},
      {22, "GEMM", Phase::Backward, 24, 5001, 0},
      {23, "GELU bwd", Phase::Backward, 24, 9501, 840},
      {24, "GEMM", Phase::Backward, 24, 5001, 1680},
      {25, "Bias bwd", Phase::Backward, 24, 0, 1050},
      {26, "GEMM", Phase::Backward, 24, 5001, 0},
      {27, "GEMM", Phase::Backward, 24, 9251, 0},
      {28, "Layernorm bwd", Phase::Backward, 24, 0, 1260},
      {29, "Bias bwd", Phase::Backward, 24, 9501, 1260},
      {30, "Bias reduce bwd", Phase::Backward, 24, 0, 0},
      {31, "GEMM", Phase::Backward, 24, 5001, 0},
      {32, "GEMM", Phase::Backward, 24, 5001, 0},
      {33, "Permute", Phase::Backward, 24, 9501, 0},
      {34, "GEMM", Phase::Backward, 24, 9501, 0},
      {35, "GEMM", Phase::Backward, 24, 9251, 0},
      {36, "Softmax bwd", Phase::Backward, 24, 9501, 0},
      {37, "GEMM", Phase::Backward, 24, 9251, 0},
      {38, "GEMM", Phase::Backward, 24, 9501, 0},
      {39, "Permute", Phase::Backward, 24, 9501, 1470},
      {40, "Bias bwd", Phase::Backward, 24, 0, 1260},
      {41, "GEMM", Phase::Backward, 24, 5001, 1680},
      {42, "GEMM", Phase::Backward, 24, 9501, 0},
      {43, "Layernorm bwd", Phase::Backward, 24, 9501, 1260},
      {44, "WPE bwd", Phase::EmbeddingBackward, 1, 9501, 1260},
      {45, "WTE bwd", Phase::EmbeddingBackward, 1, 0, 1680},
  };
  return rows;
}

// 46-kernel table: per kernel a baseline row plus (when non-auto) one row at
// the listed config. Costs are synthetic; only the shape matters.
inline MeasurementTable train_step_fixture() {
  TableBuilder b;
  for (const auto& r : train_step_rows()) {
    b.kernel(r.index, r.name, r.phase, r.repeat);
    double t0 = 0.001 + 0.0001 * r.index;
    double e0 = 0.3 + 0.01 * r.index;
    b.baseline(t0, e0);
    if (r.mem != 0 || r.core != 0) {
      ClockSetting mem = r.mem == 0 ? auto_c() : mhz(r.mem);
      ClockSetting core = r.core == 0 ? auto_c() : mhz(r.core);
      b.sample(mem, core, t0 * 1.01, e0 * 0.8);
    }
  }
  return b.build();
}

// Simulator scenario with one compute-bound and one memory-bound kernel;
// the optimal plan lowers exactly the non-bottleneck domain of each.
inline std::vector<SimKernelSpec> planted_specs() {
  SimKernelSpec compute;
  compute.name = "compute_bound";
  compute.core_work = 2.1e9;
  compute.mem_work = 1.0e8;
  compute.static_power = 60.0;
  compute.core_coeff = 0.05;
  compute.mem_coeff = 0.002;

  SimKernelSpec memory;
  memory.name = "memory_bound";
  memory.core_work = 1.0e8;
  memory.mem_work = 9.5e9;
  memory.static_power = 60.0;
  memory.core_coeff = 0.05;
  memory.mem_coeff = 0.002;

  return {compute, memory};
}

inline ClockGrid planted_grid() {
  ClockGrid g;
  g.core_clocks = {1050, 1470, 2100};
  g.mem_clocks = {5001, 9501};
  return g;
}

}  // namespace fixtures
