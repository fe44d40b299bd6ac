#include "ocdesign/proxy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ocdesign/math.hpp"

namespace ocdesign {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// log(exp(la) + exp(lb)) with either argument possibly -inf.
double log_add_exp(double la, double lb) {
  if (la == -kInf) return lb;
  if (lb == -kInf) return la;
  const double m = std::max(la, lb);
  return m + std::log1p(std::exp(std::min(la, lb) - m));
}

void check_point(const ProxyPoint& pt, double n) {
  if (!(pt.u > 0.0) || !(pt.u < 1.0)) {
    throw ArgumentError("proxy point u must lie strictly in (0, 1)");
  }
  if (!(pt.info > 0.0)) {
    throw ArgumentError("proxy point requires positive information");
  }
  if (!(n > 0.0)) {
    throw ArgumentError("sample size must be positive");
  }
}

}  // namespace

double standardized_distance(double delta, double theta, double info) {
  if (!(info > 0.0)) {
    throw ArgumentError("standardized distance requires positive information");
  }
  if (std::isinf(delta)) return delta > 0 ? kInf : -kInf;
  return (delta - theta) * std::sqrt(info);
}

double proxy_prob(const ProxyPoint& pt, const IntervalHypothesis& hyp,
                  double n) {
  check_point(pt, n);
  const double z_u = std_normal_quantile(pt.u);
  const double sqrt_n = std::sqrt(n);
  const double hi =
      std::isinf(hyp.upper)
          ? 1.0
          : std_normal_cdf(standardized_distance(hyp.upper, pt.theta, pt.info) *
                               sqrt_n -
                           z_u);
  const double lo =
      std::isinf(hyp.lower)
          ? 0.0
          : std_normal_cdf(standardized_distance(hyp.lower, pt.theta, pt.info) *
                               sqrt_n -
                           z_u);
  return std::clamp(hi - lo, 0.0, 1.0);
}

double logit_proxy_prob(const ProxyPoint& pt, const IntervalHypothesis& hyp,
                        double n) {
  check_point(pt, n);
  const double z_u = std_normal_quantile(pt.u);
  const double sqrt_n = std::sqrt(n);
  // Arguments of the two normal CDFs; A > C always since upper > lower.
  const double arg_hi =
      std::isinf(hyp.upper)
          ? kInf
          : standardized_distance(hyp.upper, pt.theta, pt.info) * sqrt_n - z_u;
  const double arg_lo =
      std::isinf(hyp.lower)
          ? -kInf
          : standardized_distance(hyp.lower, pt.theta, pt.info) * sqrt_n - z_u;

  const double log_phi_hi = arg_hi == kInf ? 0.0 : std_normal_log_cdf(arg_hi);
  const double log_phi_lo = arg_lo == -kInf ? -kInf : std_normal_log_cdf(arg_lo);
  const double log_sf_hi = arg_hi == kInf ? -kInf : std_normal_log_cdf(-arg_hi);
  const double log_sf_lo = arg_lo == -kInf ? 0.0 : std_normal_log_cdf(-arg_lo);

  // p = Phi(A) - Phi(C) = (1 - Phi(-A)) - (1 - Phi(-C)). When both
  // arguments sit in the upper tail the CDF side cancels catastrophically,
  // so evaluate through whichever tail keeps the difference well separated.
  double log_p;
  if (arg_lo == -kInf) {
    log_p = log_phi_hi;
  } else if (arg_hi == kInf) {
    log_p = log_sf_lo;
  } else if (arg_lo >= 0.0) {
    log_p = log_sf_lo + std::log1p(-std::exp(log_sf_hi - log_sf_lo));
  } else {
    log_p = log_phi_hi + std::log1p(-std::exp(log_phi_lo - log_phi_hi));
  }
  const double log_1mp = log_add_exp(log_sf_hi, log_phi_lo);
  const double result = log_p - log_1mp;
  if (std::isnan(result) || std::isinf(result)) {
    throw NumericalError("proxy logit not finite at n = " + std::to_string(n));
  }
  return result;
}

double limiting_slope(double theta, const IntervalHypothesis& hyp,
                      double info) {
  if (std::isinf(hyp.lower) && std::isinf(hyp.upper)) {
    throw ArgumentError(
        "limiting slope undefined when both interval endpoints are infinite");
  }
  const double a_hi = standardized_distance(hyp.upper, theta, info);
  const double a_lo = standardized_distance(hyp.lower, theta, info);
  const double min_sq = std::min(a_hi * a_hi, a_lo * a_lo);
  const double sign = hyp.contains(theta) ? 0.5 : -0.5;
  return sign * min_sq;
}

double numeric_slope(const ProxyPoint& pt, const IntervalHypothesis& hyp,
                     double n, double h) {
  if (!(h > 0.0) || !(n - h > 0.0)) {
    throw ArgumentError("numeric slope requires 0 < h < n");
  }
  const double upper = logit_proxy_prob(pt, hyp, n + h);
  const double lower = logit_proxy_prob(pt, hyp, n - h);
  return (upper - lower) / (2.0 * h);
}

std::vector<SlopeCase> slope_verification_cases() {
  auto c = [](std::string label, double theta, double lo, double hi,
              double u) {
    return SlopeCase{std::move(label), ProxyPoint{u, theta, 1.0},
                     IntervalHypothesis{lo, hi}};
  };
  const double inf = kInf;
  return {
      c("inside, upper endpoint closer", 0.0, -2.0, 1.0, 0.3),
      c("inside, lower endpoint closer", 0.0, -1.0, 2.0, 0.3),
      c("inside, equidistant endpoints", 0.0, -1.5, 1.5, 0.7),
      c("inside, equidistant, off-center u", 0.25, -0.75, 1.25, 0.9),
      c("inside, wide interval", 0.0, -0.6, 3.0, 0.45),
      c("at the upper boundary", 1.0, -2.0, 1.0, 0.4),
      c("at the lower boundary", -2.0, -2.0, 1.0, 0.6),
      c("outside above", 2.0, -1.0, 1.0, 0.55),
      c("outside below", -2.0, -1.0, 1.0, 0.35),
      c("one-sided lower, inside", 1.0, 0.5, inf, 0.25),
      c("one-sided lower, outside", 0.0, 0.5, inf, 0.6),
      c("one-sided lower, boundary", 0.5, 0.5, inf, 0.35),
      c("one-sided upper, inside", 0.0, -inf, 0.5, 0.8),
      c("one-sided upper, outside", 1.0, -inf, 0.5, 0.45),
  };
}

}  // namespace ocdesign
