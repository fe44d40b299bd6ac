#pragma once

#include <string>
#include <vector>

#include "ocdesign/model.hpp"

namespace ocdesign {

// One point of the large-sample proxy construction: the CDF-inversion draw
// u, the true estimand theta, and the per-unit Fisher information at theta.
struct ProxyPoint {
  double u = 0.5;
  double theta = 0.0;
  double info = 1.0;
};

// a(delta, theta) = (delta - theta) * sqrt(info); +/-inf for infinite delta.
double standardized_distance(double delta, double theta, double info);

// Large-sample approximation to Pr(delta_L < theta < delta_U | data) for
// the MLE realization at u: Phi(a_U sqrt(n) - z_u) - Phi(a_L sqrt(n) - z_u).
double proxy_prob(const ProxyPoint& pt, const IntervalHypothesis& hyp,
                  double n);

// logit(proxy_prob) evaluated in log space, stable at sample sizes where
// the probability itself rounds to 0 or 1 in double precision.
double logit_proxy_prob(const ProxyPoint& pt, const IntervalHypothesis& hyp,
                        double n);

// Limiting d/dn of logit(proxy_prob):
// (0.5 - I{theta outside (delta_L, delta_U)}) * min(a_U^2, a_L^2).
// Rejects intervals with two infinite endpoints.
double limiting_slope(double theta, const IntervalHypothesis& hyp,
                      double info);

// Central difference of logit(proxy_prob) over [n-h, n+h]; verification
// oracle for the limiting slope.
double numeric_slope(const ProxyPoint& pt, const IntervalHypothesis& hyp,
                     double n, double h);

// Canonical verification grid: every qualitative slope case (estimand
// inside with either endpoint dominating or tied, on each boundary, outside
// on each side, one-sided intervals), each with a nontrivial u.
struct SlopeCase {
  std::string label;
  ProxyPoint pt;
  IntervalHypothesis hyp;
};
std::vector<SlopeCase> slope_verification_cases();

}  // namespace ocdesign
