#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "emodec/io_util.hpp"
#include "emodec/regression.hpp"

namespace emodec {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kFormatName = "emodecode-emotion-model";

Json fit_to_json(const OlsFit& fit, const AffineCalibration& cal) {
  Json j;
  j["weights"] = fit.weights;
  j["intercept"] = fit.intercept;
  j["standard_errors"] = fit.standard_errors;
  j["intercept_standard_error"] = fit.intercept_standard_error;
  j["t_values"] = fit.t_values;
  j["r2"] = fit.r2;
  j["adjusted_r2"] = fit.adjusted_r2;
  j["residual_variance"] = fit.residual_variance;
  j["n"] = fit.n;
  j["p"] = fit.p;
  j["calibration"] = {{"scale", cal.scale}, {"offset", cal.offset}};
  return j;
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw SchemaError("model file: missing '" + where + key + "'");
  return obj.at(key);
}

double number(const Json& v, const std::string& name) {
  if (!v.is_number()) throw SchemaError("model file: '" + name + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError("model file: '" + name + "' must be finite");
  return d;
}

std::vector<double> numbers(const Json& v, const std::string& name, std::size_t expected) {
  if (!v.is_array()) throw SchemaError("model file: '" + name + "' must be an array");
  if (v.size() != expected) {
    throw SchemaError("model file: '" + name + "' has " + std::to_string(v.size()) + " entries, expected " +
                      std::to_string(expected));
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(number(e, name));
  return out;
}

std::size_t count(const Json& v, const std::string& name) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw SchemaError("model file: '" + name + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

OlsFit fit_from_json(const Json& j, const std::string& target, std::size_t p, AffineCalibration& cal) {
  const std::string at = target + ".";
  OlsFit fit;
  fit.p = p;
  fit.weights = numbers(require(j, "weights", at), at + "weights", p);
  fit.intercept = number(require(j, "intercept", at), at + "intercept");
  fit.standard_errors = j.contains("standard_errors") ? numbers(j["standard_errors"], at + "standard_errors", p)
                                                      : std::vector<double>(p, 0.0);
  fit.t_values = j.contains("t_values") ? numbers(j["t_values"], at + "t_values", p) : std::vector<double>(p, 0.0);
  if (j.contains("intercept_standard_error")) {
    fit.intercept_standard_error = number(j["intercept_standard_error"], at + "intercept_standard_error");
  }
  if (j.contains("r2")) fit.r2 = number(j["r2"], at + "r2");
  if (j.contains("adjusted_r2")) fit.adjusted_r2 = number(j["adjusted_r2"], at + "adjusted_r2");
  if (j.contains("residual_variance")) fit.residual_variance = number(j["residual_variance"], at + "residual_variance");
  if (j.contains("n")) fit.n = count(j["n"], at + "n");
  if (j.contains("p") && count(j["p"], at + "p") != p) throw SchemaError("model file: '" + at + "p' disagrees with feature_names");
  if (j.contains("calibration")) {
    const auto& c = j["calibration"];
    cal.scale = number(require(c, "scale", at + "calibration."), at + "calibration.scale");
    cal.offset = number(require(c, "offset", at + "calibration."), at + "calibration.offset");
  }
  return fit;
}

}  // namespace

std::string model_to_text(const EmotionModel& model) {
  Json j;
  j["format"] = kFormatName;
  j["schema_version"] = kModelSchemaVersion;
  j["canonical_feature_order"] = std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end());
  j["normalization"] = "zscore";
  j["fit_scope"] = "in-sample";
  j["feature_subset"] = model.subset;
  j["feature_names"] = model.feature_names;
  j["feature_means"] = model.feature_means;
  j["feature_stds"] = model.feature_stds;
  j["arousal"] = fit_to_json(model.arousal, model.arousal_calibration);
  j["valence"] = fit_to_json(model.valence, model.valence_calibration);
  return j.dump(2) + "\n";
}

EmotionModel model_from_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("model file: top level must be an object");
  const auto& version = require(j, "schema_version", "");
  if (!version.is_number_integer() || version.get<long long>() != kModelSchemaVersion) {
    throw SchemaError("model file: unsupported schema_version " + version.dump() + " (expected " +
                      std::to_string(kModelSchemaVersion) + ")");
  }
  if (j.contains("format") && j["format"] != kFormatName) throw SchemaError("model file: unexpected format " + j["format"].dump());

  const auto& names = require(j, "feature_names", "");
  if (!names.is_array() || names.empty()) throw SchemaError("model file: 'feature_names' must be a non-empty array");

  EmotionModel model;
  for (const auto& n : names) {
    if (!n.is_string()) throw SchemaError("model file: 'feature_names' must contain strings");
    const auto name = n.get<std::string>();
    const auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), name);
    if (it == kFeatureNames.end()) throw SchemaError("model file: unknown feature '" + name + "'");
    const auto idx = static_cast<std::size_t>(it - kFeatureNames.begin());
    if (!model.subset.empty() && idx <= model.subset.back()) {
      throw SchemaError("model file: 'feature_names' must follow canonical order without repeats");
    }
    model.subset.push_back(idx);
    model.feature_names.push_back(name);
  }
  const std::size_t p = model.subset.size();
  if (j.contains("feature_subset")) {
    const auto& s = j["feature_subset"];
    if (!s.is_array() || s.size() != p) throw SchemaError("model file: 'feature_subset' disagrees with feature_names");
    for (std::size_t i = 0; i < p; ++i) {
      if (count(s[i], "feature_subset") != model.subset[i]) {
        throw SchemaError("model file: 'feature_subset' disagrees with feature_names");
      }
    }
  }
  model.feature_means = numbers(require(j, "feature_means", ""), "feature_means", p);
  model.feature_stds = numbers(require(j, "feature_stds", ""), "feature_stds", p);
  for (double s : model.feature_stds) {
    if (!(s > 0.0)) throw SchemaError("model file: feature_stds must be positive");
  }
  model.arousal = fit_from_json(require(j, "arousal", ""), "arousal", p, model.arousal_calibration);
  model.valence = fit_from_json(require(j, "valence", ""), "valence", p, model.valence_calibration);
  return model;
}

void save_model(const EmotionModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_text(model));
}

EmotionModel load_model(const std::filesystem::path& path) { return model_from_text(read_text_file(path)); }

}  // namespace emodec
