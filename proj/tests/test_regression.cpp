#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "emodec/error.hpp"
#include "emodec/io_util.hpp"
#include "emodec/regression.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace emodec;
namespace et = emodec::testing;

namespace {

struct Problem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::vector<double>> rows;
  std::vector<double> ys;
};

Problem random_problem(std::size_t n, std::size_t p, std::uint32_t seed, double noise) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  Problem pr;
  pr.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  pr.y.resize(static_cast<Eigen::Index>(n));
  std::vector<double> w(p), col_scale(p);
  for (auto& v : w) v = g(rng);
  for (auto& s : col_scale) s = scale(rng);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(p);
    double yi = 0.7;
    for (std::size_t j = 0; j < p; ++j) {
      row[j] = col_scale[j] * g(rng) + 0.5 * static_cast<double>(j);
      yi += w[j] * row[j];
      pr.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
    yi += noise * g(rng);
    pr.y(static_cast<Eigen::Index>(i)) = yi;
    pr.rows.push_back(row);
    pr.ys.push_back(yi);
  }
  return pr;
}

// Dataset drawn from a known linear model on raw features.
struct Synthetic {
  Dataset ds;
  std::array<double, kFeatureCount> w_arousal{};
  std::array<double, kFeatureCount> w_valence{};
};

Synthetic synthetic_dataset(std::size_t n, std::uint32_t seed, double noise) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Synthetic s;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    s.w_arousal[j] = (j % 2 ? 1.0 : -1.0) * (0.2 + 0.1 * static_cast<double>(j));
    s.w_valence[j] = (j % 3 ? -1.0 : 1.0) * (0.15 + 0.05 * static_cast<double>(j));
  }
  for (std::size_t i = 0; i < n; ++i) {
    DatasetRow r;
    r.clip_id = "clip" + std::to_string(i);
    for (std::size_t j = 0; j < kMidLevelCount; ++j) r.features[j] = 3.0 + g(rng);
    r.features[kOnsetDensityIndex] = 4.0 + 1.5 * g(rng);
    r.features[kMeanRmsIndex] = 0.1 + 0.03 * g(rng);
    double a = 0.1, v = -0.2;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      a += s.w_arousal[j] * r.features[j];
      v += s.w_valence[j] * r.features[j];
    }
    r.arousal = a + noise * g(rng);
    r.valence = v + noise * g(rng);
    s.ds.rows.push_back(r);
  }
  return s;
}

double std_of(const Dataset& ds, std::size_t j) {
  double m = 0.0;
  for (const auto& r : ds.rows) m += r.features[j];
  m /= static_cast<double>(ds.size());
  double ss = 0.0;
  for (const auto& r : ds.rows) ss += (r.features[j] - m) * (r.features[j] - m);
  return std::sqrt(ss / static_cast<double>(ds.size() - 1));
}

}  // namespace

TEST_SUITE("fit_ols") {
  TEST_CASE("exact linear target is recovered") {
    auto pr = random_problem(40, 5, 1, 0.0);
    const auto fit = fit_ols(pr.X, pr.y);
    const auto oracle = et::normal_equations_ols(pr.rows, pr.ys);
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.adjusted_r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(0.7).epsilon(1e-9));
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(fit.weights[j] - oracle.weights[j]) <= 1e-9);
  }

  TEST_CASE("constant target") {
    auto pr = random_problem(30, 4, 2, 0.0);
    pr.y.setConstant(2.5);
    const auto fit = fit_ols(pr.X, pr.y);
    CHECK(fit.intercept == doctest::Approx(2.5).epsilon(1e-12));
    for (double w : fit.weights) CHECK(std::abs(w) <= 1e-12);
    CHECK(fit.r2 == 0.0);
  }

  TEST_CASE("random 50x9 design matches the closed-form oracle within 1e-7") {
    for (std::uint32_t seed = 10; seed < 20; ++seed) {
      auto pr = random_problem(50, 9, seed, 0.5);
      const auto fit = fit_ols(pr.X, pr.y);
      const auto o = et::normal_equations_ols(pr.rows, pr.ys);
      CHECK(et::close_relative(fit.intercept, o.intercept, 1e-7));
      CHECK(et::close_relative(fit.r2, o.r2, 1e-7));
      CHECK(et::close_relative(fit.adjusted_r2, o.adjusted_r2, 1e-7));
      CHECK(et::close_relative(fit.residual_variance, o.residual_variance, 1e-7));
      for (std::size_t j = 0; j < 9; ++j) {
        CHECK(et::close_relative(fit.weights[j], o.weights[j], 1e-7));
        CHECK(et::close_relative(fit.standard_errors[j], o.standard_errors[j], 1e-7));
        CHECK(et::close_relative(fit.t_values[j], o.t_values[j], 1e-7));
      }
    }
  }

  TEST_CASE("t = weight / SE and adjusted R2 <= R2 <= 1") {
    auto pr = random_problem(60, 6, 3, 1.0);
    const auto fit = fit_ols(pr.X, pr.y);
    for (std::size_t j = 0; j < 6; ++j) CHECK(fit.t_values[j] == fit.weights[j] / fit.standard_errors[j]);
    CHECK(fit.adjusted_r2 <= fit.r2);
    CHECK(fit.r2 <= 1.0);
    CHECK(fit.n == 60);
    CHECK(fit.p == 6);
  }

  TEST_CASE("adjusted R2 formula is reproduced exactly") {
    for (std::uint32_t seed = 0; seed < 10; ++seed) {
      auto pr = random_problem(20 + seed * 7, 1 + seed % 9, seed, 0.8);
      const auto f = fit_ols(pr.X, pr.y);
      CHECK(f.adjusted_r2 == 1.0 - (1.0 - f.r2) * static_cast<double>(f.n - 1) / static_cast<double>(f.n - f.p - 1));
    }
  }

  TEST_CASE("residuals are orthogonal to the design") {
    for (std::uint32_t seed = 0; seed < 5; ++seed) {
      auto pr = random_problem(80, 7, seed + 40, 2.0);
      const auto f = fit_ols(pr.X, pr.y);
      Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(f.weights.data(), 7);
      const Eigen::VectorXd r = pr.y - (pr.X * w).array().matrix() - Eigen::VectorXd::Constant(80, f.intercept);
      CHECK(std::abs(r.sum()) <= 1e-8);
      const Eigen::VectorXd xr = pr.X.transpose() * r;
      for (Eigen::Index j = 0; j < xr.size(); ++j) CHECK(std::abs(xr(j)) <= 1e-8 * pr.X.col(j).norm() * pr.y.norm());
    }
  }

  TEST_CASE("a pure-noise feature moves adjusted R2 by no more than R2") {
    std::mt19937 rng(77);
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::uint32_t seed = 0; seed < 20; ++seed) {
      auto pr = random_problem(40, 3, seed + 100, 1.0);
      Eigen::MatrixXd X2(40, 4);
      X2.leftCols(3) = pr.X;
      for (Eigen::Index i = 0; i < 40; ++i) X2(i, 3) = g(rng);
      const auto a = fit_ols(pr.X, pr.y);
      const auto b = fit_ols(X2, pr.y);
      CHECK(b.adjusted_r2 - a.adjusted_r2 <= b.r2 - a.r2 + 1e-12);
    }
  }

  TEST_CASE("row permutation gives a bitwise-identical fit") {
    auto pr = random_problem(100, 9, 5, 1.0);
    const auto base = fit_ols(pr.X, pr.y);
    std::mt19937 rng(9);
    for (int k = 0; k < 5; ++k) {
      std::vector<Eigen::Index> perm(100);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      Eigen::MatrixXd X(100, 9);
      Eigen::VectorXd y(100);
      for (Eigen::Index i = 0; i < 100; ++i) {
        X.row(i) = pr.X.row(perm[static_cast<std::size_t>(i)]);
        y(i) = pr.y(perm[static_cast<std::size_t>(i)]);
      }
      CHECK(fit_ols(X, y) == base);
    }
  }

  TEST_CASE("rank deficiency names the dependent column") {
    auto pr = random_problem(30, 4, 6, 1.0);
    pr.X.col(2) = 2.0 * pr.X.col(0) - pr.X.col(1);
    try {
      fit_ols(pr.X, pr.y);
      FAIL("expected RankDeficientError");
    } catch (const RankDeficientError& e) {
      CHECK(e.column() == 2);
      CHECK(std::string(e.what()).find("column 2") != std::string::npos);
    }
    pr = random_problem(30, 3, 7, 1.0);
    pr.X.col(1).setConstant(4.0);  // collinear with the intercept
    try {
      fit_ols(pr.X, pr.y);
      FAIL("expected RankDeficientError");
    } catch (const RankDeficientError& e) {
      CHECK(e.column() == 1);
    }
  }

  TEST_CASE("too few rows") {
    auto pr = random_problem(10, 9, 8, 1.0);
    CHECK_THROWS_AS(fit_ols(pr.X, pr.y), FitError);
    pr = random_problem(11, 9, 8, 1.0);
    CHECK_NOTHROW(fit_ols(pr.X, pr.y));
  }
}

TEST_SUITE("emotion model") {
  TEST_CASE("all nine features: coefficients recovered up to z-score rescaling") {
    const auto s = synthetic_dataset(200, 1, 0.0);
    const auto m = fit_emotion_model(s.ds, feature_sets::all());
    REQUIRE(m.p() == 9);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const double sd = std_of(s.ds, j);
      CHECK(std::abs(m.arousal.weights[j] - s.w_arousal[j] * sd) <= 1e-6);
      CHECK(std::abs(m.valence.weights[j] - s.w_valence[j] * sd) <= 1e-6);
      CHECK(m.feature_names[j] == kFeatureNames[j]);
    }
  }

  TEST_CASE("subset new2 gives p = 2 with its feature-set label") {
    const auto s = synthetic_dataset(50, 2, 0.3);
    const auto m = fit_emotion_model(s.ds, parse_feature_subset("new2"));
    CHECK(m.p() == 2);
    CHECK(m.feature_names == std::vector<std::string>{"onset_density", "mean_rms"});
    CHECK(feature_set_label(m.subset) == "Onset density and RMS amplitude");
    CHECK(m.feature_means.size() == 2);
  }

  TEST_CASE("empty subset and out-of-range indices are rejected") {
    const auto s = synthetic_dataset(30, 3, 0.3);
    CHECK_THROWS_AS(fit_emotion_model(s.ds, {}), InvalidArgument);
    CHECK_THROWS_AS(fit_emotion_model(s.ds, {3, 1}), InvalidArgument);
    CHECK_THROWS_AS(fit_emotion_model(s.ds, {12}), InvalidArgument);
  }

  TEST_CASE("zero-variance feature is reported by name") {
    auto s = synthetic_dataset(30, 4, 0.3);
    for (auto& r : s.ds.rows) r.features[kMeanRmsIndex] = 0.2;
    try {
      fit_emotion_model(s.ds, feature_sets::all());
      FAIL("expected FitError");
    } catch (const FitError& e) {
      CHECK(std::string(e.what()).find("mean_rms") != std::string::npos);
    }
  }

  TEST_CASE("collinear features are reported by name") {
    auto s = synthetic_dataset(30, 5, 0.3);
    for (auto& r : s.ds.rows) r.features[4] = 2.0 * r.features[1] + 1.0;
    try {
      fit_emotion_model(s.ds, feature_sets::all());
      FAIL("expected RankDeficientError");
    } catch (const RankDeficientError& e) {
      CHECK(std::string(e.what()).find("dissonance") != std::string::npos);
    }
  }

  TEST_CASE("scaling a raw feature column leaves predictions unchanged") {
    const auto s = synthetic_dataset(80, 6, 0.5);
    const auto base = fit_emotion_model(s.ds, feature_sets::all());
    for (std::size_t j : {std::size_t{0}, kOnsetDensityIndex, kMeanRmsIndex}) {
      for (double c : {0.001, 3.0, 250.0}) {
        auto scaled = s.ds;
        for (auto& r : scaled.rows) r.features[j] *= c;
        const auto m = fit_emotion_model(scaled, feature_sets::all());
        for (std::size_t i = 0; i < 20; ++i) {
          auto f = s.ds.rows[i].features;
          const auto p0 = predict(base, f);
          f[j] *= c;
          const auto p1 = predict(m, f);
          CHECK(std::abs(p0.arousal - p1.arousal) <= 1e-9);
          CHECK(std::abs(p0.valence - p1.valence) <= 1e-9);
        }
      }
    }
  }

  TEST_CASE("row order does not matter") {
    auto s = synthetic_dataset(60, 7, 0.5);
    const auto a = fit_emotion_model(s.ds, feature_sets::all());
    std::reverse(s.ds.rows.begin(), s.ds.rows.end());
    std::swap(s.ds.rows[3], s.ds.rows[40]);
    CHECK(fit_emotion_model(s.ds, feature_sets::all()) == a);
  }
}

TEST_SUITE("predict") {
  EmotionModel flat_model(double a_icpt, double v_icpt) {
    EmotionModel m;
    m.subset = feature_sets::all();
    for (auto n : kFeatureNames) m.feature_names.emplace_back(n);
    m.feature_means.assign(9, 0.0);
    m.feature_stds.assign(9, 1.0);
    m.arousal.weights.assign(9, 0.0);
    m.valence.weights.assign(9, 0.0);
    m.arousal.intercept = a_icpt;
    m.valence.intercept = v_icpt;
    return m;
  }

  TEST_CASE("training means map to the intercepts") {
    const auto s = synthetic_dataset(100, 8, 0.2);
    auto sub = feature_sets::all();
    const auto m = fit_emotion_model(s.ds, sub);
    FeatureVector f;
    for (std::size_t j = 0; j < 9; ++j) f[j] = m.feature_means[j];
    const auto p = predict(m, f);
    CHECK(p.arousal == std::clamp(m.arousal.intercept, -1.0, 1.0));
    CHECK(p.valence == std::clamp(m.valence.intercept, -1.0, 1.0));
    CHECK(p.t == 0.0);
  }

  TEST_CASE("zero weights give the intercepts for any input") {
    const auto m = flat_model(0.3, -0.2);
    std::mt19937 rng(1);
    std::normal_distribution<double> g(0.0, 100.0);
    for (int k = 0; k < 10; ++k) {
      FeatureVector f;
      for (auto& x : f.values) x = g(rng);
      const auto p = predict(m, f);
      CHECK(p.arousal == 0.3);
      CHECK(p.valence == -0.2);
    }
  }

  TEST_CASE("large inputs clamp to exactly 1") {
    const auto s = synthetic_dataset(100, 9, 0.2);
    const auto m = fit_emotion_model(s.ds, feature_sets::all());
    // Feature 1 has a positive arousal weight by construction.
    REQUIRE(m.arousal.weights[1] > 0.0);
    FeatureVector f;
    for (std::size_t j = 0; j < 9; ++j) f[j] = m.feature_means[j];
    f[1] = 1e12;
    CHECK(predict(m, f).arousal == 1.0);
    f[1] = -1e12;
    CHECK(predict(m, f).arousal == -1.0);
  }

  TEST_CASE("affine calibration is applied before the clamp") {
    auto m = flat_model(0.4, 0.1);
    m.arousal_calibration = {0.5, 0.1};
    m.valence_calibration = {20.0, 0.0};
    const auto p = predict(m, FeatureVector{});
    CHECK(p.arousal == doctest::Approx(0.3));
    CHECK(p.valence == 1.0);
  }

  TEST_CASE("non-finite features are rejected") {
    const auto m = flat_model(0.0, 0.0);
    FeatureVector f;
    f[kMeanRmsIndex] = std::nan("");
    CHECK_THROWS_AS(predict(m, f), InvalidArgument);
    f[kMeanRmsIndex] = INFINITY;
    CHECK_THROWS_AS(predict(m, f), InvalidArgument);
  }
}

TEST_SUITE("model file") {
  TEST_CASE("save, load, save is byte-identical and value-identical") {
    et::TempDir dir;
    const auto s = synthetic_dataset(120, 10, 0.4);
    auto m = fit_emotion_model(s.ds, parse_feature_subset("melodiousness,minorness,onset_density"));
    m.valence_calibration = {0.8, -0.05};
    save_model(m, dir / "a.json");
    const auto back = load_model(dir / "a.json");
    CHECK(back == m);
    save_model(back, dir / "b.json");
    CHECK(read_text_file(dir / "a.json") == read_text_file(dir / "b.json"));
  }

  TEST_CASE("file records format, version and canonical order") {
    const auto s = synthetic_dataset(40, 11, 0.4);
    const auto text = model_to_text(fit_emotion_model(s.ds, feature_sets::all()));
    CHECK(text.find("\"schema_version\": 1") != std::string::npos);
    CHECK(text.find("\"canonical_feature_order\"") != std::string::npos);
    CHECK(text.find("\"normalization\": \"zscore\"") != std::string::npos);
    CHECK(text.find("\"fit_scope\": \"in-sample\"") != std::string::npos);
  }

  TEST_CASE("hand-written minimal file loads and predicts") {
    const auto m = model_from_text(R"({
      "schema_version": 1,
      "feature_names": ["onset_density", "mean_rms"],
      "feature_means": [4.0, 0.1],
      "feature_stds": [2.0, 0.05],
      "arousal": {"weights": [0.2, 0.1], "intercept": 0.05},
      "valence": {"weights": [-0.1, 0.3], "intercept": -0.1}
    })");
    CHECK(m.subset == feature_sets::new2());
    FeatureVector f;
    f[kOnsetDensityIndex] = 6.0;  // z = 1
    f[kMeanRmsIndex] = 0.2;       // z = 2
    const auto p = predict(m, f);
    CHECK(p.arousal == doctest::Approx(0.05 + 0.2 * 1.0 + 0.1 * 2.0));
    CHECK(p.valence == doctest::Approx(-0.1 - 0.1 * 1.0 + 0.3 * 2.0));
  }

  TEST_CASE("schema violations") {
    const std::string good_tail = R"("feature_means": [0], "feature_stds": [1],
      "arousal": {"weights": [1], "intercept": 0}, "valence": {"weights": [1], "intercept": 0}})";
    CHECK_NOTHROW(model_from_text(R"({"schema_version": 1, "feature_names": ["mean_rms"], )" + good_tail));
    CHECK_THROWS_AS(model_from_text(R"({"schema_version": 1, )" + good_tail), SchemaError);
    CHECK_THROWS_AS(model_from_text(R"({"schema_version": 2, "feature_names": ["mean_rms"], )" + good_tail),
                    SchemaError);
    CHECK_THROWS_AS(model_from_text(R"({"schema_version": 1, "feature_names": ["loudness"], )" + good_tail),
                    SchemaError);
    CHECK_THROWS_AS(model_from_text(R"({"schema_version": 1, "feature_names": ["mean_rms", "minorness"], )" + good_tail),
                    SchemaError);
    CHECK_THROWS_AS(model_from_text("not json"), SchemaError);
    CHECK_THROWS_AS(load_model("/no/such/model.json"), IoError);
  }
}

TEST_SUITE("importance") {
  TEST_CASE("exact fit: zero-weight features have negligible t") {
    auto s = synthetic_dataset(80, 12, 0.0);
    for (auto& r : s.ds.rows) {
      // Rebuild arousal without features 2 and 5.
      r.arousal = 0.1;
      for (std::size_t j = 0; j < kFeatureCount; ++j) {
        if (j != 2 && j != 5) r.arousal += s.w_arousal[j] * r.features[j];
      }
    }
    const auto m = fit_emotion_model(s.ds, feature_sets::all());
    const auto rep = importance_report(m);
    REQUIRE(rep.arousal.size() == 9);
    const double top = std::abs(rep.arousal.front().t_value);
    for (const auto& e : rep.arousal) {
      if (e.feature == "rhythm_complexity" || e.feature == "tonal_stability") CHECK(std::abs(e.t_value) <= 1e-6 * top);
    }
  }

  TEST_CASE("sorted by |t| with nine rows per target") {
    const auto s = synthetic_dataset(150, 13, 0.5);
    const auto rep = importance_report(fit_emotion_model(s.ds, feature_sets::all()));
    REQUIRE(rep.arousal.size() == 9);
    REQUIRE(rep.valence.size() == 9);
    for (std::size_t i = 1; i < 9; ++i) {
      CHECK(std::abs(rep.arousal[i - 1].t_value) >= std::abs(rep.arousal[i].t_value));
      CHECK(std::abs(rep.valence[i - 1].t_value) >= std::abs(rep.valence[i].t_value));
    }
  }

  TEST_CASE("t signs match the generating weights") {
    const auto s = synthetic_dataset(288, 14, 0.3);
    const auto rep = importance_report(fit_emotion_model(s.ds, feature_sets::all()));
    auto sign_of = [](double v) { return (v > 0.0) - (v < 0.0); };
    for (const auto& e : rep.arousal) {
      const auto j = static_cast<std::size_t>(std::find(kFeatureNames.begin(), kFeatureNames.end(), e.feature) -
                                              kFeatureNames.begin());
      CHECK(sign_of(e.t_value) == sign_of(s.w_arousal[j]));
    }
    for (const auto& e : rep.valence) {
      const auto j = static_cast<std::size_t>(std::find(kFeatureNames.begin(), kFeatureNames.end(), e.feature) -
                                              kFeatureNames.begin());
      CHECK(sign_of(e.t_value) == sign_of(s.w_valence[j]));
    }
  }

  TEST_CASE("CSV and SVG output") {
    const auto s = synthetic_dataset(40, 15, 0.5);
    const auto rep = importance_report(fit_emotion_model(s.ds, feature_sets::new2()));
    const auto csv = importance_csv(rep);
    CHECK(csv.rfind("target,feature,t_value\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(csv.find("arousal,onset_density,") != std::string::npos);
    const auto svg = importance_svg(rep);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(std::count(svg.begin(), svg.end(), '<') > 8);
    CHECK(svg.find("mean_rms") != std::string::npos);
  }
}

TEST_SUITE("dataset and subsets") {
  TEST_CASE("CSV round trip") {
    const auto s = synthetic_dataset(25, 16, 0.5);
    const auto back = parse_dataset(dataset_csv(s.ds));
    REQUIRE(back.size() == 25);
    for (std::size_t i = 0; i < 25; ++i) {
      CHECK(back.rows[i].clip_id == s.ds.rows[i].clip_id);
      CHECK(back.rows[i].features == s.ds.rows[i].features);
      CHECK(back.rows[i].arousal == s.ds.rows[i].arousal);
    }
  }

  TEST_CASE("duplicated clip_id names the row") {
    auto s = synthetic_dataset(5, 17, 0.5);
    s.ds.rows[3].clip_id = s.ds.rows[1].clip_id;
    try {
      parse_dataset(dataset_csv(s.ds));
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.row() == 5);
    }
  }

  TEST_CASE("missing column and bad number") {
    CHECK_THROWS_AS(parse_dataset("clip_id,arousal,valence\na,1,2\n"), SchemaError);
    auto text = dataset_csv(synthetic_dataset(3, 18, 0.5).ds);
    text.replace(text.rfind(','), 1, ",x");
    try {
      parse_dataset(text);
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.row() == 4);
    }
  }

  TEST_CASE("subset parsing and labels") {
    CHECK(parse_feature_subset("all") == feature_sets::all());
    CHECK(parse_feature_subset("midlevel7").size() == 7);
    CHECK(parse_feature_subset("mean_rms, melodiousness") == FeatureSubset{0, 8});
    CHECK_THROWS_AS(parse_feature_subset("tempo"), InvalidArgument);
    CHECK_THROWS_AS(parse_feature_subset(""), InvalidArgument);
    CHECK(feature_set_label(feature_sets::all()) == "The (9)-mid-level feature set");
    CHECK(feature_set_label(feature_sets::midlevel7()) == "The (7)-mid-level feature set");
    CHECK(feature_set_label({0, 8}) == "Custom (2) feature set");
  }
}
