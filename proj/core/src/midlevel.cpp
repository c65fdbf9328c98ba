#include "emodec/midlevel.hpp"

#include <algorithm>
#include <cmath>

#include "emodec/csv.hpp"
#include "emodec/error.hpp"
#include "emodec/io_util.hpp"

namespace emodec {

namespace {

void check_trace(const MidLevelTrace& trace) {
  if (trace.timestamps.size() != trace.vectors.size()) throw InvalidArgument("trace timestamps/vectors size mismatch");
  if (trace.timestamps.empty()) throw InvalidArgument("mid-level trace is empty");
  for (std::size_t i = 1; i < trace.timestamps.size(); ++i) {
    if (!(trace.timestamps[i] > trace.timestamps[i - 1])) {
      throw InvalidArgument("mid-level trace timestamps must be strictly increasing");
    }
  }
}

}  // namespace

MidLevelVector MidLevelTrace::at(double t) const {
  if (timestamps.empty()) throw InvalidArgument("mid-level trace is empty");
  if (t <= timestamps.front()) return vectors.front();
  if (t >= timestamps.back()) return vectors.back();
  const auto it = std::upper_bound(timestamps.begin(), timestamps.end(), t);
  const auto hi = static_cast<std::size_t>(it - timestamps.begin());
  const std::size_t lo = hi - 1;
  if (timestamps[lo] == t) return vectors[lo];
  const double w = (t - timestamps[lo]) / (timestamps[hi] - timestamps[lo]);
  MidLevelVector out;
  for (std::size_t i = 0; i < kMidLevelCount; ++i) {
    out[i] = vectors[lo][i] + w * (vectors[hi][i] - vectors[lo][i]);
  }
  return out;
}

MidLevelTrace parse_midlevel_trace(std::string_view csv_text, std::string_view source_name) {
  const auto table = csv::parse(csv_text, source_name);
  const std::size_t time_col = table.require_column("time_s");
  std::array<std::size_t, kMidLevelCount> cols{};
  for (std::size_t i = 0; i < kMidLevelCount; ++i) cols[i] = table.require_column(kMidLevelNames[i]);

  MidLevelTrace trace;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = table.line_numbers[r];
    const double t = csv::parse_finite(row[time_col], line, "time_s");
    if (!trace.timestamps.empty() && !(t > trace.timestamps.back())) {
      throw SchemaError("timestamps must be strictly increasing (" + format_double(t) + " after " +
                            format_double(trace.timestamps.back()) + ")",
                        line);
    }
    MidLevelVector v;
    for (std::size_t i = 0; i < kMidLevelCount; ++i) v[i] = csv::parse_finite(row[cols[i]], line, kMidLevelNames[i]);
    trace.timestamps.push_back(t);
    trace.vectors.push_back(v);
  }
  if (trace.timestamps.empty()) throw SchemaError("mid-level trace has no rows: " + std::string(source_name));
  return trace;
}

MidLevelTrace load_midlevel_trace(const std::filesystem::path& path) {
  return parse_midlevel_trace(read_text_file(path), path.string());
}

std::string midlevel_trace_csv(const MidLevelTrace& trace) {
  std::string out = "time_s";
  for (auto name : kMidLevelNames) out += "," + std::string(name);
  out += '\n';
  for (std::size_t r = 0; r < trace.size(); ++r) {
    out += format_double(trace.timestamps[r]);
    for (std::size_t i = 0; i < kMidLevelCount; ++i) out += ',' + format_double(trace.vectors[r][i]);
    out += '\n';
  }
  return out;
}

void save_midlevel_trace(const MidLevelTrace& trace, const std::filesystem::path& path) {
  write_file_atomic(path, midlevel_trace_csv(trace));
}

MidLevelVector ConstantProvider::window_features(double t_start, double t_end) const {
  if (!(t_start < t_end)) throw InvalidArgument("window requires t_start < t_end");
  return value_;
}

std::string ConstantProvider::describe() const {
  std::string out = "constant:";
  for (std::size_t i = 0; i < kMidLevelCount; ++i) {
    if (i) out += ',';
    out += format_double(value_[i]);
  }
  return out;
}

TraceProvider::TraceProvider(MidLevelTrace trace) : trace_(std::move(trace)) { check_trace(trace_); }

MidLevelVector TraceProvider::window_features(double t_start, double t_end) const {
  if (!(t_start < t_end)) throw InvalidArgument("window requires t_start < t_end");
  return trace_.at(0.5 * (t_start + t_end));
}

std::string TraceProvider::describe() const { return "trace:" + std::to_string(trace_.size()) + " rows"; }

std::shared_ptr<const MidLevelProvider> make_provider(std::string_view spec) {
  if (spec.starts_with("constant:")) {
    const std::string list(spec.substr(9));
    MidLevelVector v;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = list.find(',', start);
      std::string field = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      std::erase_if(field, [](char c) { return c == ' ' || c == '\t'; });
      fields.push_back(std::move(field));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != kMidLevelCount) {
      throw InvalidArgument("constant provider needs 7 comma-separated values, got " + std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < kMidLevelCount; ++i) {
      try {
        v[i] = csv::parse_finite(fields[i], 0, kMidLevelNames[i]);
      } catch (const SchemaError& e) {
        throw InvalidArgument(std::string("constant provider: ") + e.what());
      }
    }
    return std::make_shared<ConstantProvider>(v);
  }
  if (spec.starts_with("trace:")) {
    return std::make_shared<TraceProvider>(load_midlevel_trace(std::filesystem::path(std::string(spec.substr(6)))));
  }
  throw InvalidArgument("provider must be 'constant:<v1,...,v7>' or 'trace:<path>', got '" + std::string(spec) + "'");
}

}  // namespace emodec
