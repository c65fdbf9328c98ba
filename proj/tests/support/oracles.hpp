#pragma once

// Independent reference implementations used to freeze expected values. They
// deliberately share no code with the library paths they check.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace emodec::testing {

/// O(n^2) DFT of a real frame, bins 0..n/2.
inline std::vector<std::complex<double>> direct_dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    long double re = 0.0L;
    long double im = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      const long double angle = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k * i % n) / n;
      re += x[i] * std::cos(angle);
      im += x[i] * std::sin(angle);
    }
    out[k] = {static_cast<double>(re), static_cast<double>(im)};
  }
  return out;
}

/// Closed-form OLS: beta = (A^T A)^-1 A^T y with A = [1 | X], all in long double,
/// inverse by Gauss-Jordan elimination with partial pivoting.
struct OracleFit {
  std::vector<double> weights;
  double intercept = 0.0;
  std::vector<double> standard_errors;
  std::vector<double> t_values;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  double residual_variance = 0.0;
};

inline OracleFit normal_equations_ols(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
  using ld = long double;
  const std::size_t n = X.size();
  const std::size_t p = X.front().size();
  const std::size_t m = p + 1;
  auto a = [&](std::size_t r, std::size_t c) -> ld { return c == 0 ? 1.0L : static_cast<ld>(X[r][c - 1]); };

  std::vector<std::vector<ld>> aug(m, std::vector<ld>(2 * m, 0.0L));
  std::vector<ld> aty(m, 0.0L);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      ld s = 0.0L;
      for (std::size_t r = 0; r < n; ++r) s += a(r, i) * a(r, j);
      aug[i][j] = s;
    }
    aug[i][m + i] = 1.0L;
    ld s = 0.0L;
    for (std::size_t r = 0; r < n; ++r) s += a(r, i) * static_cast<ld>(y[r]);
    aty[i] = s;
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
    }
    if (aug[pivot][col] == 0.0L) throw std::runtime_error("oracle: singular normal matrix");
    std::swap(aug[col], aug[pivot]);
    const ld d = aug[col][col];
    for (auto& v : aug[col]) v /= d;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const ld f = aug[r][col];
      if (f == 0.0L) continue;
      for (std::size_t c = 0; c < 2 * m; ++c) aug[r][c] -= f * aug[col][c];
    }
  }
  std::vector<ld> beta(m, 0.0L);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) beta[i] += aug[i][m + j] * aty[j];
  }

  ld rss = 0.0L;
  ld mean = 0.0L;
  for (double v : y) mean += v;
  mean /= static_cast<ld>(n);
  ld tss = 0.0L;
  for (std::size_t r = 0; r < n; ++r) {
    ld fitted = 0.0L;
    for (std::size_t j = 0; j < m; ++j) fitted += a(r, j) * beta[j];
    const ld e = static_cast<ld>(y[r]) - fitted;
    rss += e * e;
    tss += (static_cast<ld>(y[r]) - mean) * (static_cast<ld>(y[r]) - mean);
  }
  const ld dof = static_cast<ld>(n - p - 1);
  const ld s2 = rss / dof;

  OracleFit fit;
  fit.intercept = static_cast<double>(beta[0]);
  fit.residual_variance = static_cast<double>(s2);
  fit.r2 = tss > 0.0L ? static_cast<double>(1.0L - rss / tss) : 0.0;
  fit.adjusted_r2 = static_cast<double>(1.0L - (1.0L - static_cast<ld>(fit.r2)) * static_cast<ld>(n - 1) / dof);
  for (std::size_t j = 1; j < m; ++j) {
    const ld se = std::sqrt(s2 * aug[j][m + j]);
    fit.weights.push_back(static_cast<double>(beta[j]));
    fit.standard_errors.push_back(static_cast<double>(se));
    fit.t_values.push_back(static_cast<double>(se > 0.0L ? beta[j] / se : 0.0L));
  }
  return fit;
}

/// |actual - expected| <= rel * |expected|, with a denormal-level floor for exact zeros.
inline bool close_relative(double actual, double expected, double rel) {
  return std::abs(actual - expected) <= rel * std::max(std::abs(expected), 1e-300);
}

}  // namespace emodec::testing
