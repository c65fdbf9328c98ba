#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "emodec/dsp.hpp"
#include "emodec/emotion.hpp"
#include "emodec/error.hpp"
#include "emodec/midlevel.hpp"

namespace emodec {

inline constexpr std::size_t kFeatureCount = 9;
inline constexpr std::size_t kOnsetDensityIndex = 7;
inline constexpr std::size_t kMeanRmsIndex = 8;

/// Canonical regression input order: the seven mid-level features, then the two
/// signal-derived ones.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "melodiousness", "articulation",    "rhythm_complexity", "rhythm_stability", "dissonance",
    "tonal_stability", "minorness",     "onset_density",     "mean_rms",
};

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const FeatureVector&) const = default;

  static FeatureVector assemble(const MidLevelVector& mid, const WindowDynamics& dyn);
};

struct DatasetRow {
  std::string clip_id;
  FeatureVector features;
  double arousal = 0.0;
  double valence = 0.0;
};

/// Per-recording features and ratings. CSV columns: clip_id, the nine feature
/// names, arousal, valence (any order, header-driven).
struct Dataset {
  std::vector<DatasetRow> rows;
  std::size_t size() const noexcept { return rows.size(); }
};

Dataset parse_dataset(std::string_view csv_text, std::string_view source_name = "<memory>");
Dataset load_dataset(const std::filesystem::path& path);
std::string dataset_csv(const Dataset& ds);

/// Ordinary least squares with intercept, plus the usual diagnostics.
struct OlsFit {
  std::vector<double> weights;
  double intercept = 0.0;
  std::vector<double> standard_errors;
  double intercept_standard_error = 0.0;
  std::vector<double> t_values;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  double residual_variance = 0.0;
  std::size_t n = 0;
  std::size_t p = 0;

  bool operator==(const OlsFit&) const = default;
};

/// Raised when a design column is a linear combination of the ones before it.
/// `column` indexes X (not counting the intercept).
class RankDeficientError : public FitError {
 public:
  RankDeficientError(const std::string& what, std::size_t column) : FitError(what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

/// Fits y ~ 1 + X by Householder QR. Rows are put in a canonical order first, so
/// the result does not depend on row order. Requires n >= p + 2 and full column rank.
/// TSS == 0 yields r2 = 0; a zero standard error yields t = 0.
OlsFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Indices into kFeatureNames, sorted and unique.
using FeatureSubset = std::vector<std::size_t>;

namespace feature_sets {
FeatureSubset all();
FeatureSubset midlevel7();
FeatureSubset new2();
}  // namespace feature_sets

/// `all`, `midlevel7`, `new2`, or a comma-separated list of feature names.
FeatureSubset parse_feature_subset(std::string_view spec);

/// Human-readable row label, e.g. "The (9)-mid-level feature set".
std::string feature_set_label(const FeatureSubset& subset);

struct AffineCalibration {
  double scale = 1.0;
  double offset = 0.0;
  bool operator==(const AffineCalibration&) const = default;
};

/// Two z-scored linear maps (arousal, valence) over a feature subset. The
/// normalization statistics cover the subset features only, in subset order.
struct EmotionModel {
  FeatureSubset subset;
  std::vector<std::string> feature_names;
  std::vector<double> feature_means;
  std::vector<double> feature_stds;
  OlsFit arousal;
  OlsFit valence;
  AffineCalibration arousal_calibration;
  AffineCalibration valence_calibration;

  std::size_t p() const noexcept { return subset.size(); }
  bool operator==(const EmotionModel&) const = default;
};

/// Z-scores the subset columns with training statistics (sample std) and fits
/// arousal and valence independently.
EmotionModel fit_emotion_model(const Dataset& ds, const FeatureSubset& subset);

/// Applies both maps and the calibration, clamped to [-1, 1]. The returned t is 0.
EmotionPoint predict(const EmotionModel& model, const FeatureVector& features);

inline constexpr int kModelSchemaVersion = 1;

std::string model_to_text(const EmotionModel& model);
EmotionModel model_from_text(std::string_view text);
void save_model(const EmotionModel& model, const std::filesystem::path& path);
EmotionModel load_model(const std::filesystem::path& path);

struct ImportanceEntry {
  std::string feature;
  double t_value = 0.0;
};

/// Per-target T-values sorted by decreasing |t|.
struct ImportanceReport {
  std::vector<ImportanceEntry> arousal;
  std::vector<ImportanceEntry> valence;
};

ImportanceReport importance_report(const EmotionModel& model);
/// Columns: target,feature,t_value.
std::string importance_csv(const ImportanceReport& report);
/// Two horizontal bar charts (arousal, valence).
std::string importance_svg(const ImportanceReport& report);

}  // namespace emodec
