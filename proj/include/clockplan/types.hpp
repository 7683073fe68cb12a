#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace clockplan {

enum class ErrorCode {
  MissingBaseline,
  NonPositiveSample,
  DuplicateRow,
  ConstraintViolation,
  MalformedRecord,
  UnknownKernel,
  FrontOverflow,
  Infeasible,
  InstanceTooLarge,
  UnknownConfigInAssignment,
  NoCommonConfig,
  OrderMismatch,
  InvalidArgument,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::MissingBaseline: return "MissingBaseline";
    case ErrorCode::NonPositiveSample: return "NonPositiveSample";
    case ErrorCode::DuplicateRow: return "DuplicateRow";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::UnknownKernel: return "UnknownKernel";
    case ErrorCode::FrontOverflow: return "FrontOverflow";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::UnknownConfigInAssignment: return "UnknownConfigInAssignment";
    case ErrorCode::NoCommonConfig: return "NoCommonConfig";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

/// One clock domain setting: either the hardware's automatic governor or a
/// fixed frequency in MHz. Auto is a label, never a number.
struct ClockSetting {
  int mhz = 0;  // 0 encodes auto

  static ClockSetting auto_clock() { return ClockSetting{0}; }
  static ClockSetting at(int mhz) {
    if (mhz <= 0) fail(ErrorCode::InvalidArgument, "clock frequency must be positive");
    return ClockSetting{mhz};
  }

  bool is_auto() const { return mhz == 0; }

  friend bool operator==(ClockSetting a, ClockSetting b) { return a.mhz == b.mhz; }
  friend bool operator!=(ClockSetting a, ClockSetting b) { return !(a == b); }

  std::string str() const { return is_auto() ? "auto" : std::to_string(mhz); }
};

// Canonical ordering for candidate enumeration: auto first, then MHz descending.
inline bool canon_less(ClockSetting a, ClockSetting b) {
  if (a.is_auto() != b.is_auto()) return a.is_auto();
  return a.mhz > b.mhz;
}

struct ClockConfig {
  ClockSetting mem;
  ClockSetting core;

  static ClockConfig baseline() { return {ClockSetting::auto_clock(), ClockSetting::auto_clock()}; }
  bool is_baseline() const { return mem.is_auto() && core.is_auto(); }

  friend bool operator==(ClockConfig a, ClockConfig b) { return a.mem == b.mem && a.core == b.core; }
  friend bool operator!=(ClockConfig a, ClockConfig b) { return !(a == b); }

  std::string str() const { return "(" + mem.str() + ", " + core.str() + ")"; }
};

inline bool canon_less(ClockConfig a, ClockConfig b) {
  if (a.mem != b.mem) return canon_less(a.mem, b.mem);
  return canon_less(a.core, b.core);
}

struct ClockConfigCanonLess {
  bool operator()(const ClockConfig& a, const ClockConfig& b) const { return canon_less(a, b); }
};

enum class Phase { Embedding, Forward, LossCalc, Backward, EmbeddingBackward, Pass };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::Embedding: return "embedding";
    case Phase::Forward: return "forward";
    case Phase::LossCalc: return "loss";
    case Phase::Backward: return "backward";
    case Phase::EmbeddingBackward: return "embedding_backward";
    case Phase::Pass: return "pass";
  }
  return "?";
}

inline bool phase_from_string(const std::string& s, Phase& out) {
  for (Phase p : {Phase::Embedding, Phase::Forward, Phase::LossCalc, Phase::Backward,
                  Phase::EmbeddingBackward, Phase::Pass}) {
    if (s == to_string(p)) { out = p; return true; }
  }
  return false;
}

/// Kernel identity is positional: `index` is the ordinal position in the
/// iteration and is the only identity key (names repeat across kernels).
struct KernelId {
  int index = 0;
  std::string name;
  Phase phase = Phase::Forward;
  int repeat_count = 1;
};

struct Sample {
  double time = 0.0;    // seconds
  double energy = 0.0;  // joules

  bool valid() const {
    return std::isfinite(time) && std::isfinite(energy) && time > 0.0 && energy > 0.0;
  }
  friend bool operator==(const Sample& a, const Sample& b) {
    return a.time == b.time && a.energy == b.energy;
  }
};

struct Totals {
  double time = 0.0;
  double energy = 0.0;

  Totals& operator+=(const Sample& s) { time += s.time; energy += s.energy; return *this; }
  Totals& operator+=(const Totals& t) { time += t.time; energy += t.energy; return *this; }
  friend bool operator==(const Totals& a, const Totals& b) {
    return a.time == b.time && a.energy == b.energy;
  }
};

/// Signed percentages vs. a baseline; negative means improvement.
struct DeltaPct {
  double time_pct = 0.0;
  double energy_pct = 0.0;
};

inline DeltaPct delta_pct(const Totals& value, const Totals& baseline) {
  return {(value.time - baseline.time) / baseline.time * 100.0,
          (value.energy - baseline.energy) / baseline.energy * 100.0};
}

/// Multiplicative log-normal measurement noise, split per domain: time jitter
/// and average-power jitter. Energy is derived as noisy power x noisy time.
struct NoiseModel {
  double sigma_time = 0.0;
  double sigma_power = 0.0;

  bool silent() const { return sigma_time == 0.0 && sigma_power == 0.0; }
};

namespace detail {

// Shortest round-trip decimal representation; keeps serialized tables byte
// deterministic and parse(serialize(t)) == t.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

}  // namespace clockplan
