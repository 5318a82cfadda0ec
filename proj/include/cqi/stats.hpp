// Copyright 2026 the cqi-lab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cqi {

struct LinearFit {
  double intercept = 0;
  double slope = 0;
};

inline LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("linear_fit needs >= 2 matching points");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0) throw std::invalid_argument("linear_fit: degenerate abscissae");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

// Slope of log(y) against log(x); all values must be positive.
inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= 0 || ys[i] <= 0)
      throw std::invalid_argument("loglog_slope needs positive data");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  return linear_fit(lx, ly).slope;
}

struct PowerFit {
  double slope = 0;       // asymptotic exponent s
  double intercept = 0;   // log-amplitude a
  double correction = 0;  // 1/x correction coefficient b
  double r2 = 1;          // coefficient of determination of the regression
  double slope_se = 0;    // standard error of the fitted exponent
};

// Least-squares fit of log y = a + s*log x + b/x. Scaling laws on moderate
// grids carry relative corrections of order 1/x; modeling them explicitly
// recovers the asymptotic exponent s instead of a grid-dependent blend.
inline PowerFit power_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 3)
    throw std::invalid_argument("power_fit needs >= 3 matching points");
  double m[3][3] = {};
  double rhs[3] = {};
  double sy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (xs[i] <= 0 || ys[i] <= 0)
      throw std::invalid_argument("power_fit needs positive data");
    const double c[3] = {1.0, std::log(xs[i]), 1.0 / xs[i]};
    const double y = std::log(ys[i]);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m[a][b] += c[a] * c[b];
      rhs[a] += c[a] * y;
    }
    sy += y;
    syy += y * y;
  }
  // Solve the 3x3 normal equations by Gaussian elimination with pivoting.
  double aug[3][4];
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) aug[a][b] = m[a][b];
    aug[a][3] = rhs[a];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(aug[r][col]) > std::abs(aug[piv][col])) piv = r;
    if (std::abs(aug[piv][col]) < 1e-12)
      throw std::invalid_argument("power_fit: degenerate abscissae");
    if (piv != col)
      for (int b = 0; b < 4; ++b) std::swap(aug[piv][b], aug[col][b]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = aug[r][col] / aug[col][col];
      for (int b = col; b < 4; ++b) aug[r][b] -= f * aug[col][b];
    }
  }
  PowerFit f;
  f.intercept = aug[0][3] / aug[0][0];
  f.slope = aug[1][3] / aug[1][1];
  f.correction = aug[2][3] / aug[2][2];
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred =
        f.intercept + f.slope * std::log(xs[i]) + f.correction / xs[i];
    const double r = std::log(ys[i]) - pred;
    ss_res += r * r;
  }
  const double ss_tot = syy - sy * sy / static_cast<double>(n);
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  if (n > 3) {
    // Var(s) = sigma^2 * [ (X^T X)^{-1} ]_{11}; recover the inverse entry by
    // solving M v = e1 with the already-eliminated system's matrix.
    double inv[3][4];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) inv[a][b] = m[a][b];
      inv[a][3] = a == 1 ? 1.0 : 0.0;
    }
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::abs(inv[r][col]) > std::abs(inv[piv][col])) piv = r;
      if (piv != col)
        for (int b = 0; b < 4; ++b) std::swap(inv[piv][b], inv[col][b]);
      for (int r = 0; r < 3; ++r) {
        if (r == col) continue;
        const double fac = inv[r][col] / inv[col][col];
        for (int b = col; b < 4; ++b) inv[r][b] -= fac * inv[col][b];
      }
    }
    const double sigma2 = ss_res / static_cast<double>(n - 3);
    f.slope_se = std::sqrt(std::max(0.0, sigma2 * inv[1][3] / inv[1][1]));
  }
  return f;
}

}  // namespace cqi
