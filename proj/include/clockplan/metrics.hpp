#pragma once

#include "clockplan/types.hpp"

namespace clockplan {

enum class ObjectiveKind { Waste, EDP };

inline const char* to_string(ObjectiveKind k) {
  return k == ObjectiveKind::Waste ? "waste" : "edp";
}

/// Optimization goal. For Waste, the time budget is
/// (1 + time_loss_threshold) x reference time; threshold 0 is the strict
/// no-slowdown policy.
struct Objective {
  ObjectiveKind kind = ObjectiveKind::Waste;
  double time_loss_threshold = 0.0;

  static Objective waste(double threshold = 0.0) {
    if (threshold < 0.0) fail(ErrorCode::InvalidArgument, "threshold must be >= 0");
    return {ObjectiveKind::Waste, threshold};
  }
  static Objective edp() { return {ObjectiveKind::EDP, 0.0}; }
};

struct WasteScore {
  double energy_saved = 0.0;  // baseline energy minus achieved energy
  bool feasible = false;      // time within the (1+threshold) budget
};

/// Energy-delay product: time x energy, in joule-seconds.
inline double edp(const Totals& totals) { return totals.time * totals.energy; }

inline WasteScore waste_score(const Totals& totals, const Totals& baseline, double threshold) {
  if (threshold < 0.0) fail(ErrorCode::InvalidArgument, "threshold must be >= 0");
  WasteScore score;
  score.energy_saved = baseline.energy - totals.energy;
  score.feasible = totals.time <= (1.0 + threshold) * baseline.time;
  return score;
}

/// Three-way comparison under an objective; negative means `a` is strictly
/// better. EDP: smaller product. Waste: feasible beats infeasible, then more
/// energy saved. Ties fall through to lower time; remaining ties are broken
/// by the caller's enumeration order (canonical clock order).
inline int compare(const Totals& a, const Totals& b, const Objective& objective,
                   const Totals& baseline) {
  if (objective.kind == ObjectiveKind::EDP) {
    double ea = edp(a), eb = edp(b);
    if (ea != eb) return ea < eb ? -1 : 1;
  } else {
    WasteScore sa = waste_score(a, baseline, objective.time_loss_threshold);
    WasteScore sb = waste_score(b, baseline, objective.time_loss_threshold);
    if (sa.feasible != sb.feasible) return sa.feasible ? -1 : 1;
    if (sa.energy_saved != sb.energy_saved) return sa.energy_saved > sb.energy_saved ? -1 : 1;
  }
  if (a.time != b.time) return a.time < b.time ? -1 : 1;
  return 0;
}

}  // namespace clockplan
