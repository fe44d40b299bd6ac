// Test-only oracles: quadrature, densities, empirical-distribution
// statistics. Deliberately independent of the library implementation paths
// they are used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

// Adaptive Simpson quadrature.
inline double simpson_step(const std::function<double(double)>& f, double a,
                           double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 60);
}

// Student-t density (unnormalized handled via lgamma normalization).
inline double t_density(double x, double dof) {
  const double log_norm = std::lgamma(0.5 * (dof + 1.0)) -
                          std::lgamma(0.5 * dof) -
                          0.5 * std::log(dof * M_PI);
  return std::exp(log_norm -
                  0.5 * (dof + 1.0) * std::log1p(x * x / dof));
}

// Kolmogorov-Smirnov statistic against U(0, 1).
inline double ks_uniform(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double m = static_cast<double>(sample.size());
  double d = 0.0;
  for (size_t i = 0; i < sample.size(); ++i) {
    const double cdf = sample[i];
    d = std::max(d, std::fabs(cdf - static_cast<double>(i) / m));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / m - cdf));
  }
  return d;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double mu = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace oracles
