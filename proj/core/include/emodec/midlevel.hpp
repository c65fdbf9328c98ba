#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace emodec {

inline constexpr std::size_t kMidLevelCount = 7;

/// Canonical order of the seven perceptual mid-level features.
inline constexpr std::array<std::string_view, kMidLevelCount> kMidLevelNames = {
    "melodiousness", "articulation", "rhythm_complexity", "rhythm_stability",
    "dissonance",    "tonal_stability", "minorness",
};

/// Seven mid-level values in canonical order. Values are passed through unscaled.
struct MidLevelVector {
  std::array<double, kMidLevelCount> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const MidLevelVector&) const = default;

  double melodiousness() const { return values[0]; }
  double articulation() const { return values[1]; }
  double rhythm_complexity() const { return values[2]; }
  double rhythm_stability() const { return values[3]; }
  double dissonance() const { return values[4]; }
  double tonal_stability() const { return values[5]; }
  double minorness() const { return values[6]; }
};

/// Time-varying mid-level features; timestamps strictly increasing.
struct MidLevelTrace {
  std::vector<double> timestamps;
  std::vector<MidLevelVector> vectors;

  std::size_t size() const noexcept { return timestamps.size(); }
  /// Pointwise linear interpolation, clamped to the first/last row outside the range.
  MidLevelVector at(double t) const;
};

/// Reads a CSV with header `time_s` plus the seven canonical names, in any column order.
MidLevelTrace load_midlevel_trace(const std::filesystem::path& path);
MidLevelTrace parse_midlevel_trace(std::string_view csv_text, std::string_view source_name = "<memory>");
void save_midlevel_trace(const MidLevelTrace& trace, const std::filesystem::path& path);
std::string midlevel_trace_csv(const MidLevelTrace& trace);

/// Source of mid-level features for an analysis window. Implementations are
/// immutable after construction and safe to share across threads.
class MidLevelProvider {
 public:
  virtual ~MidLevelProvider() = default;
  virtual MidLevelVector window_features(double t_start, double t_end) const = 0;
  virtual std::string describe() const = 0;
};

/// Returns the same vector for every window.
class ConstantProvider final : public MidLevelProvider {
 public:
  explicit ConstantProvider(MidLevelVector v) : value_(v) {}
  MidLevelVector window_features(double t_start, double t_end) const override;
  std::string describe() const override;

 private:
  MidLevelVector value_;
};

/// Evaluates a precomputed trace at the window midpoint.
class TraceProvider final : public MidLevelProvider {
 public:
  explicit TraceProvider(MidLevelTrace trace);
  MidLevelVector window_features(double t_start, double t_end) const override;
  std::string describe() const override;
  const MidLevelTrace& trace() const noexcept { return trace_; }

 private:
  MidLevelTrace trace_;
};

/// Parses `constant:<v1,...,v7>` or `trace:<path>`.
std::shared_ptr<const MidLevelProvider> make_provider(std::string_view spec);

}  // namespace emodec
