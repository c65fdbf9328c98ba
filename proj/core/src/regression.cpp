#include "emodec/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "emodec/csv.hpp"
#include "emodec/io_util.hpp"

namespace emodec {

FeatureVector FeatureVector::assemble(const MidLevelVector& mid, const WindowDynamics& dyn) {
  FeatureVector f;
  for (std::size_t i = 0; i < kMidLevelCount; ++i) f[i] = mid[i];
  f[kOnsetDensityIndex] = dyn.onset_density;
  f[kMeanRmsIndex] = dyn.mean_rms;
  return f;
}

// ---------------------------------------------------------------------------
// Dataset CSV

Dataset parse_dataset(std::string_view csv_text, std::string_view source_name) {
  const auto table = csv::parse(csv_text, source_name);
  const std::size_t id_col = table.require_column("clip_id");
  std::array<std::size_t, kFeatureCount> cols{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) cols[i] = table.require_column(kFeatureNames[i]);
  const std::size_t arousal_col = table.require_column("arousal");
  const std::size_t valence_col = table.require_column("valence");

  Dataset ds;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = table.line_numbers[r];
    DatasetRow out;
    out.clip_id = row[id_col];
    if (out.clip_id.empty()) throw SchemaError("empty clip_id", line);
    if (!seen.insert(out.clip_id).second) throw SchemaError("duplicated clip_id '" + out.clip_id + "'", line);
    for (std::size_t i = 0; i < kFeatureCount; ++i) out.features[i] = csv::parse_finite(row[cols[i]], line, kFeatureNames[i]);
    out.arousal = csv::parse_finite(row[arousal_col], line, "arousal");
    out.valence = csv::parse_finite(row[valence_col], line, "valence");
    ds.rows.push_back(std::move(out));
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) { return parse_dataset(read_text_file(path), path.string()); }

std::string dataset_csv(const Dataset& ds) {
  std::string out = "clip_id";
  for (auto name : kFeatureNames) out += "," + std::string(name);
  out += ",arousal,valence\n";
  for (const auto& row : ds.rows) {
    out += row.clip_id;
    for (double v : row.features.values) out += ',' + format_double(v);
    out += ',' + format_double(row.arousal) + ',' + format_double(row.valence) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// OLS

namespace {

std::vector<std::size_t> canonical_row_order(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  std::vector<std::size_t> order(static_cast<std::size_t>(X.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (X(ia, j) != X(ib, j)) return X(ia, j) < X(ib, j);
    }
    return y(ia) < y(ib);
  });
  return order;
}

Eigen::Index column_rank(const Eigen::MatrixXd& A) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  return qr.rank();
}

}  // namespace

OlsFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const auto n = static_cast<std::size_t>(X.rows());
  const auto p = static_cast<std::size_t>(X.cols());
  if (p == 0) throw FitError("design matrix has no columns");
  if (static_cast<std::size_t>(y.size()) != n) throw FitError("target length does not match design rows");
  if (n < p + 2) {
    throw FitError("need at least p + 2 = " + std::to_string(p + 2) + " rows, got " + std::to_string(n));
  }
  if (!X.allFinite() || !y.allFinite()) throw FitError("design or target contains non-finite values");

  const auto order = canonical_row_order(X, y);
  const auto cols = static_cast<Eigen::Index>(p + 1);
  Eigen::MatrixXd A(static_cast<Eigen::Index>(n), cols);
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto src = static_cast<Eigen::Index>(order[r]);
    const auto dst = static_cast<Eigen::Index>(r);
    A(dst, 0) = 1.0;
    A.row(dst).tail(static_cast<Eigen::Index>(p)) = X.row(src);
    b(dst) = y(src);
  }

  if (column_rank(A) < cols) {
    for (Eigen::Index j = 1; j < cols; ++j) {
      if (column_rank(A.leftCols(j + 1)) < j + 1) {
        const auto column = static_cast<std::size_t>(j - 1);
        throw RankDeficientError("rank-deficient design: column " + std::to_string(column) +
                                     " is a linear combination of the intercept and earlier columns",
                                 column);
      }
    }
    throw RankDeficientError("rank-deficient design", p);
  }

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::VectorXd beta = qr.solve(b);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd R_inv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(cols, cols));
  // diag((A^T A)^-1) = row-wise squared norms of R^-1.
  const Eigen::VectorXd unscaled_var = R_inv.rowwise().squaredNorm();

  const Eigen::VectorXd residuals = b - A * beta;
  const double rss = residuals.squaredNorm();
  const bool constant_target = (b.array() == b(0)).all();
  const double mean_y = b.mean();
  const double tss = constant_target ? 0.0 : (b.array() - mean_y).square().sum();
  const double dof = static_cast<double>(n - p - 1);

  OlsFit fit;
  fit.n = n;
  fit.p = p;
  fit.intercept = beta(0);
  fit.residual_variance = rss / dof;
  fit.r2 = tss > 0.0 ? 1.0 - rss / tss : 0.0;
  fit.adjusted_r2 = 1.0 - (1.0 - fit.r2) * static_cast<double>(n - 1) / dof;
  fit.intercept_standard_error = std::sqrt(fit.residual_variance * unscaled_var(0));
  fit.weights.resize(p);
  fit.standard_errors.resize(p);
  fit.t_values.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    const auto k = static_cast<Eigen::Index>(j + 1);
    fit.weights[j] = beta(k);
    fit.standard_errors[j] = std::sqrt(fit.residual_variance * unscaled_var(k));
    fit.t_values[j] = fit.standard_errors[j] > 0.0 ? fit.weights[j] / fit.standard_errors[j] : 0.0;
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Feature subsets

namespace feature_sets {
FeatureSubset all() { return {0, 1, 2, 3, 4, 5, 6, 7, 8}; }
FeatureSubset midlevel7() { return {0, 1, 2, 3, 4, 5, 6}; }
FeatureSubset new2() { return {kOnsetDensityIndex, kMeanRmsIndex}; }
}  // namespace feature_sets

FeatureSubset parse_feature_subset(std::string_view spec) {
  if (spec == "all") return feature_sets::all();
  if (spec == "midlevel7") return feature_sets::midlevel7();
  if (spec == "new2") return feature_sets::new2();
  std::set<std::size_t> picked;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    std::string_view name = spec.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    if (!name.empty()) {
      const auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), name);
      if (it == kFeatureNames.end()) throw InvalidArgument("unknown feature '" + std::string(name) + "'");
      picked.insert(static_cast<std::size_t>(it - kFeatureNames.begin()));
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (picked.empty()) throw InvalidArgument("feature subset is empty");
  return {picked.begin(), picked.end()};
}

std::string feature_set_label(const FeatureSubset& subset) {
  if (subset == feature_sets::all()) return "The (9)-mid-level feature set";
  if (subset == feature_sets::midlevel7()) return "The (7)-mid-level feature set";
  if (subset == feature_sets::new2()) return "Onset density and RMS amplitude";
  std::string label = "Custom (" + std::to_string(subset.size()) + ") feature set";
  return label;
}

// ---------------------------------------------------------------------------
// Emotion model

EmotionModel fit_emotion_model(const Dataset& ds, const FeatureSubset& subset) {
  if (subset.empty()) throw InvalidArgument("feature subset is empty");
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] >= kFeatureCount) throw InvalidArgument("feature index out of range");
    if (i > 0 && subset[i] <= subset[i - 1]) throw InvalidArgument("feature subset must be sorted and unique");
  }

  // Statistics are accumulated in clip_id order so the fit is independent of row order.
  std::vector<const DatasetRow*> rows;
  rows.reserve(ds.rows.size());
  for (const auto& r : ds.rows) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(), [](const DatasetRow* a, const DatasetRow* b) { return a->clip_id < b->clip_id; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i]->clip_id == rows[i - 1]->clip_id) throw FitError("duplicated clip_id '" + rows[i]->clip_id + "'");
  }

  const std::size_t n = rows.size();
  const std::size_t p = subset.size();
  if (n < p + 2) {
    throw FitError("need at least " + std::to_string(p + 2) + " rows to fit " + std::to_string(p) +
                   " features, got " + std::to_string(n));
  }

  EmotionModel model;
  model.subset = subset;
  for (std::size_t j : subset) model.feature_names.emplace_back(kFeatureNames[j]);
  model.feature_means.assign(p, 0.0);
  model.feature_stds.assign(p, 0.0);

  for (std::size_t j = 0; j < p; ++j) {
    double sum = 0.0;
    for (const auto* r : rows) sum += r->features[subset[j]];
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto* r : rows) {
      const double d = r->features[subset[j]] - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw FitError("feature '" + model.feature_names[j] + "' has zero variance");
    model.feature_means[j] = mean;
    model.feature_stds[j] = sd;
  }

  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  Eigen::VectorXd arousal(static_cast<Eigen::Index>(n));
  Eigen::VectorXd valence(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < p; ++j) {
      X(r, static_cast<Eigen::Index>(j)) = (rows[i]->features[subset[j]] - model.feature_means[j]) / model.feature_stds[j];
    }
    arousal(r) = rows[i]->arousal;
    valence(r) = rows[i]->valence;
  }

  try {
    model.arousal = fit_ols(X, arousal);
    model.valence = fit_ols(X, valence);
  } catch (const RankDeficientError& e) {
    const std::size_t col = e.column();
    const std::string name = col < p ? model.feature_names[col] : "?";
    throw RankDeficientError("rank-deficient design: feature '" + name +
                                 "' is a linear combination of the intercept and earlier features",
                             col);
  }
  return model;
}

EmotionPoint predict(const EmotionModel& model, const FeatureVector& features) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!std::isfinite(features[i])) {
      throw InvalidArgument("non-finite value for feature '" + std::string(kFeatureNames[i]) + "'");
    }
  }
  double a = model.arousal.intercept;
  double v = model.valence.intercept;
  for (std::size_t j = 0; j < model.subset.size(); ++j) {
    const double z = (features[model.subset[j]] - model.feature_means[j]) / model.feature_stds[j];
    a += model.arousal.weights[j] * z;
    v += model.valence.weights[j] * z;
  }
  EmotionPoint out;
  out.arousal = std::clamp(model.arousal_calibration.scale * a + model.arousal_calibration.offset, -1.0, 1.0);
  out.valence = std::clamp(model.valence_calibration.scale * v + model.valence_calibration.offset, -1.0, 1.0);
  return out;
}

}  // namespace emodec
