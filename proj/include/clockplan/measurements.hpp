#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clockplan/types.hpp"

namespace clockplan {

/// A clock-validity rule: when the memory clock is `mem_mhz`, the core clock
/// must not exceed `max_core_mhz`. Auto settings are never constrained.
struct ConstraintRule {
  int mem_mhz = 0;
  int max_core_mhz = 0;

  bool violated_by(const ClockConfig& c) const {
    return !c.mem.is_auto() && !c.core.is_auto() && c.mem.mhz == mem_mhz &&
           c.core.mhz > max_core_mhz;
  }
};

class MeasurementTable {
 public:
  using ConfigSamples = std::vector<std::pair<ClockConfig, Sample>>;

  std::vector<KernelId> kernels;        // sorted by index, unique
  std::vector<ConfigSamples> samples;   // parallel to kernels, canonical config order
  std::vector<ConstraintRule> constraints;
  std::map<std::string, std::string> metadata;
  std::vector<std::string> warnings;

  size_t kernel_count() const { return kernels.size(); }

  size_t position_of(int kernel_index) const {
    for (size_t i = 0; i < kernels.size(); ++i)
      if (kernels[i].index == kernel_index) return i;
    fail(ErrorCode::UnknownKernel, "no kernel with index " + std::to_string(kernel_index));
  }

  bool has_sample(size_t pos, const ClockConfig& config) const {
    for (const auto& [c, s] : samples[pos])
      if (c == config) return true;
    return false;
  }

  const Sample& sample_at(size_t pos, const ClockConfig& config) const {
    for (const auto& [c, s] : samples[pos])
      if (c == config) return s;
    fail(ErrorCode::UnknownConfigInAssignment,
         "kernel #" + std::to_string(kernels[pos].index) + " has no sample at " + config.str());
  }

  const Sample& baseline_sample(size_t pos) const {
    for (const auto& [c, s] : samples[pos])
      if (c.is_baseline()) return s;
    fail(ErrorCode::MissingBaseline,
         "kernel #" + std::to_string(kernels[pos].index) + " lacks an (auto, auto) sample");
  }

  void validate() const {
    for (size_t i = 0; i < kernels.size(); ++i) {
      if (kernels[i].repeat_count < 1)
        fail(ErrorCode::MalformedRecord, "repeat_count < 1 on kernel #" + std::to_string(kernels[i].index));
      if (i > 0 && kernels[i].index <= kernels[i - 1].index)
        fail(ErrorCode::DuplicateRow, "kernel indices not strictly increasing");
      bool has_baseline = false;
      for (const auto& [c, s] : samples[i]) {
        if (!s.valid())
          fail(ErrorCode::NonPositiveSample,
               "kernel #" + std::to_string(kernels[i].index) + " at " + c.str());
        for (const auto& rule : constraints)
          if (rule.violated_by(c))
            fail(ErrorCode::ConstraintViolation,
                 "kernel #" + std::to_string(kernels[i].index) + " sampled at " + c.str() +
                     " but mem=" + std::to_string(rule.mem_mhz) +
                     " requires core<=" + std::to_string(rule.max_core_mhz));
        if (c.is_baseline()) has_baseline = true;
      }
      if (!has_baseline)
        fail(ErrorCode::MissingBaseline,
             "kernel #" + std::to_string(kernels[i].index) + " lacks an (auto, auto) sample");
    }
  }
};

/// All measured configs for one kernel, constraint-filtered, in canonical
/// order (mem desc, core desc, auto first on each axis). Baseline included.
inline std::vector<std::pair<ClockConfig, Sample>> candidate_set(const MeasurementTable& table,
                                                                 int kernel_index) {
  size_t pos = table.position_of(kernel_index);
  std::vector<std::pair<ClockConfig, Sample>> out;
  for (const auto& entry : table.samples[pos]) {
    bool ok = true;
    for (const auto& rule : table.constraints)
      if (rule.violated_by(entry.first)) { ok = false; break; }
    if (ok) out.push_back(entry);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return canon_less(a.first, b.first); });
  return out;
}

/// Sum of the (auto, auto) samples over all kernels. Call on a
/// repeat-expanded table.
inline Totals baseline_totals(const MeasurementTable& table) {
  Totals t;
  for (size_t i = 0; i < table.kernel_count(); ++i) t += table.baseline_sample(i);
  return t;
}

/// Scale every sample by its kernel's repeat_count and reset the counts to 1.
/// Idempotent; per-kernel relative deltas are unchanged.
inline MeasurementTable expand_repeats(const MeasurementTable& table) {
  MeasurementTable out = table;
  for (size_t i = 0; i < out.kernel_count(); ++i) {
    double r = static_cast<double>(out.kernels[i].repeat_count);
    if (r != 1.0)
      for (auto& [c, s] : out.samples[i]) { s.time *= r; s.energy *= r; }
    out.kernels[i].repeat_count = 1;
  }
  return out;
}

namespace detail {

inline std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

[[noreturn]] inline void bad_record(size_t line_no, const std::string& what) {
  fail(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": " + what);
}

inline long parse_int(const std::string& s, size_t line_no, const char* field) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    bad_record(line_no, std::string("bad integer in ") + field + ": '" + s + "'");
  return v;
}

inline double parse_num(const std::string& s, size_t line_no, const char* field) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    bad_record(line_no, std::string("bad number in ") + field + ": '" + s + "'");
  return v;
}

inline ClockSetting parse_clock(const std::string& s, size_t line_no, const char* field) {
  if (s == "auto") return ClockSetting::auto_clock();
  long v = parse_int(s, line_no, field);
  if (v <= 0) bad_record(line_no, std::string(field) + " must be positive or 'auto'");
  return ClockSetting::at(static_cast<int>(v));
}

// "time" | "time[s]" | "time[ms]" | "time[us]" -> scale to seconds; same
// scheme for energy in J/mJ.
inline double unit_scale(const std::string& header, const std::string& base, size_t line_no) {
  if (header == base) return 1.0;
  if (header.size() > base.size() + 2 && header.compare(0, base.size(), base) == 0 &&
      header[base.size()] == '[' && header.back() == ']') {
    std::string unit = header.substr(base.size() + 1, header.size() - base.size() - 2);
    if (base == "time") {
      if (unit == "s") return 1.0;
      if (unit == "ms") return 1e-3;
      if (unit == "us") return 1e-6;
    } else {
      if (unit == "J") return 1.0;
      if (unit == "mJ") return 1e-3;
    }
  }
  bad_record(line_no, "unrecognized column header '" + header + "'");
}

}  // namespace detail

/// Parse the measurement CSV. Header:
///   index,name,phase,repeat_count,mem_clock,core_clock,time,energy
/// with optional unit suffixes time[s|ms|us], energy[J|mJ]. Lines starting
/// with '#' are comments. Constraints/metadata come from the sidecar (see
/// json_io.hpp) and are applied after parsing.
inline MeasurementTable parse_table(std::string_view text) {
  struct Row {
    long index;
    std::string name;
    Phase phase;
    long repeat_count;
    ClockConfig config;
    Sample sample;
    size_t line_no;
  };
  std::vector<Row> rows;
  double time_scale = 1.0, energy_scale = 1.0;
  bool saw_header = false;

  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line_view =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    std::string line = detail::trim(line_view);
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_csv(line);
    if (!saw_header) {
      if (fields.size() != 8 || fields[0] != "index" || fields[1] != "name" ||
          fields[2] != "phase" || fields[3] != "repeat_count" || fields[4] != "mem_clock" ||
          fields[5] != "core_clock")
        detail::bad_record(line_no, "bad header");
      time_scale = detail::unit_scale(fields[6], "time", line_no);
      energy_scale = detail::unit_scale(fields[7], "energy", line_no);
      saw_header = true;
      continue;
    }
    if (fields.size() != 8) detail::bad_record(line_no, "expected 8 fields, got " + std::to_string(fields.size()));
    Row row;
    row.index = detail::parse_int(fields[0], line_no, "index");
    if (row.index < 0) detail::bad_record(line_no, "index must be >= 0");
    row.name = fields[1];
    if (!phase_from_string(fields[2], row.phase))
      detail::bad_record(line_no, "unknown phase '" + fields[2] + "'");
    row.repeat_count = detail::parse_int(fields[3], line_no, "repeat_count");
    if (row.repeat_count < 1) detail::bad_record(line_no, "repeat_count must be >= 1");
    row.config.mem = detail::parse_clock(fields[4], line_no, "mem_clock");
    row.config.core = detail::parse_clock(fields[5], line_no, "core_clock");
    row.sample.time = detail::parse_num(fields[6], line_no, "time") * time_scale;
    row.sample.energy = detail::parse_num(fields[7], line_no, "energy") * energy_scale;
    if (!row.sample.valid())
      fail(ErrorCode::NonPositiveSample, "line " + std::to_string(line_no) +
                                             ": time and energy must be positive and finite");
    row.line_no = line_no;
    rows.push_back(std::move(row));
  }
  if (!saw_header) fail(ErrorCode::MalformedRecord, "missing header line");

  MeasurementTable table;
  std::map<long, size_t> pos_by_index;
  for (const auto& row : rows) {
    auto it = pos_by_index.find(row.index);
    size_t p;
    if (it == pos_by_index.end()) {
      p = table.kernels.size();
      pos_by_index.emplace(row.index, p);
      table.kernels.push_back(KernelId{static_cast<int>(row.index), row.name, row.phase,
                                       static_cast<int>(row.repeat_count)});
      table.samples.emplace_back();
    } else {
      p = it->second;
      const KernelId& k = table.kernels[p];
      if (k.name != row.name || k.phase != row.phase || k.repeat_count != row.repeat_count)
        detail::bad_record(row.line_no, "kernel #" + std::to_string(row.index) +
                                            " has inconsistent name/phase/repeat_count");
    }
    for (const auto& [c, s] : table.samples[p])
      if (c == row.config)
        fail(ErrorCode::DuplicateRow, "line " + std::to_string(row.line_no) + ": duplicate (kernel #" +
                                          std::to_string(row.index) + ", " + row.config.str() + ")");
    table.samples[p].emplace_back(row.config, row.sample);
  }

  // Reorder kernels by index and configs canonically.
  std::vector<size_t> order(table.kernels.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return table.kernels[a].index < table.kernels[b].index; });
  MeasurementTable sorted;
  for (size_t i : order) {
    sorted.kernels.push_back(table.kernels[i]);
    auto cfgs = table.samples[i];
    std::sort(cfgs.begin(), cfgs.end(),
              [](const auto& a, const auto& b) { return canon_less(a.first, b.first); });
    sorted.samples.push_back(std::move(cfgs));
  }

  // Sparse grids are allowed; flag kernels with fewer configs than the union.
  size_t max_cfgs = 0;
  for (const auto& cs : sorted.samples) max_cfgs = std::max(max_cfgs, cs.size());
  for (size_t i = 0; i < sorted.kernel_count(); ++i)
    if (sorted.samples[i].size() < max_cfgs)
      sorted.warnings.push_back("kernel #" + std::to_string(sorted.kernels[i].index) + " has " +
                                std::to_string(sorted.samples[i].size()) + " configs (max " +
                                std::to_string(max_cfgs) + "); missing cells excluded from candidates");

  sorted.validate();
  return sorted;
}

/// Canonical CSV emission; parse(serialize(t)) reproduces t exactly.
inline std::string serialize_table(const MeasurementTable& table) {
  std::string out = "index,name,phase,repeat_count,mem_clock,core_clock,time,energy\n";
  for (size_t i = 0; i < table.kernel_count(); ++i) {
    const KernelId& k = table.kernels[i];
    for (const auto& [c, s] : table.samples[i]) {
      out += std::to_string(k.index) + "," + k.name + "," + to_string(k.phase) + "," +
             std::to_string(k.repeat_count) + "," + c.mem.str() + "," + c.core.str() + "," +
             detail::format_double(s.time) + "," + detail::format_double(s.energy) + "\n";
    }
  }
  return out;
}

}  // namespace clockplan
