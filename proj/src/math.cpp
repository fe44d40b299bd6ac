#include "ocdesign/math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ocdesign {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kSqrt2Pi = 2.5066282746310005024157652848110;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

}  // namespace

double logit(double p, double eps) {
  if (!(eps > 0.0) || !(eps < 0.5)) {
    throw ConfigError("logit clamp eps must lie in (0, 0.5), got " +
                      std::to_string(eps));
  }
  const double pc = std::clamp(p, eps, 1.0 - eps);
  return std::log(pc) - std::log1p(-pc);
}

double inv_logit(double l) {
  if (l >= 0.0) {
    return 1.0 / (1.0 + std::exp(-l));
  }
  const double e = std::exp(l);
  return e / (1.0 + e);
}

double xi(int a, std::span<const double> values) {
  std::vector<double> scratch(values.begin(), values.end());
  return xi_inplace(a, scratch);
}

double xi_inplace(int a, std::span<double> values) {
  if (a < 1 || static_cast<size_t>(a) > values.size()) {
    throw ArgumentError("order statistic rank " + std::to_string(a) +
                        " out of range for collection of size " +
                        std::to_string(values.size()));
  }
  auto nth = values.begin() + (a - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double std_normal_log_cdf(double x) {
  if (x > -8.0) {
    const double p = std_normal_cdf(x);
    if (x < 8.0) return std::log(p);
    return std::log1p(-std_normal_cdf(-x));
  }
  // Lower tail: log Phi(x) = -x^2/2 - log(2*pi)/2 + log(Mills ratio at -x).
  // Continued fraction 1/(t + 1/(t + 2/(t + 3/(t + ...)))) for the Mills
  // ratio, t = -x >= 8; converges to double precision quickly there.
  const double t = -x;
  double cf = 0.0;
  for (int k = 60; k >= 1; --k) {
    cf = static_cast<double>(k) / (t + cf);
  }
  const double mills = 1.0 / (t + cf);
  return -0.5 * x * x - 0.5 * kLog2Pi + std::log(mills);
}

namespace {

// Rational approximation for the normal quantile (relative error ~1.2e-9),
// refined below to full precision.
double normal_quantile_estimate(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw ArgumentError("normal quantile requires p in (0, 1), got " +
                        std::to_string(p));
  }
  double x = normal_quantile_estimate(p);
  // One Halley step: e = Phi(x) - p, u = e / phi(x).
  const double e = std_normal_cdf(x) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 20000;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  throw NumericalError("incomplete beta continued fraction failed to converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ArgumentError("incomplete beta requires a, b > 0");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double x, double dof) {
  if (!(dof > 0.0)) {
    throw ArgumentError("Student-t CDF requires dof > 0, got " +
                        std::to_string(dof));
  }
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const double x2 = x * x;
  const double z = dof / (dof + x2);
  const double half_tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, z);
  return x >= 0.0 ? 1.0 - half_tail : half_tail;
}

namespace {

long long nearest_if_close(double x, bool* snapped) {
  const double r = std::nearbyint(x);
  const double tol = 1e-9 * std::max(1.0, std::fabs(x));
  *snapped = std::fabs(x - r) <= tol;
  return static_cast<long long>(r);
}

}  // namespace

long long guarded_floor(double x) {
  bool snapped = false;
  const long long r = nearest_if_close(x, &snapped);
  if (snapped) return r;
  return static_cast<long long>(std::floor(x));
}

long long guarded_ceil(double x) {
  bool snapped = false;
  const long long r = nearest_if_close(x, &snapped);
  if (snapped) return r;
  return static_cast<long long>(std::ceil(x));
}

}  // namespace ocdesign
