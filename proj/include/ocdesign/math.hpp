#pragma once

#include <span>

#include "ocdesign/errors.hpp"

namespace ocdesign {

// Default clamp applied before taking logits so that probabilities of
// exactly 0 or 1 map to large finite values.
inline constexpr double kDefaultLogitEps = 1e-12;

// log(p'/(1-p')) with p' = clamp(p, eps, 1-eps). Strictly increasing on
// [eps, 1-eps]. Throws ConfigError unless 0 < eps < 0.5.
double logit(double p, double eps = kDefaultLogitEps);

// 1/(1 + exp(-l)), numerically stable in both tails.
double inv_logit(double l);

// a-th smallest element of `values`, 1-indexed, duplicates counted with
// multiplicity. Throws ArgumentError when a is out of range.
double xi(int a, std::span<const double> values);

// Same as xi() but selects in place (partial reordering of `values`).
double xi_inplace(int a, std::span<double> values);

double std_normal_pdf(double x);

// Standard normal CDF, accurate to full double precision via erfc.
double std_normal_cdf(double x);

// log Phi(x), usable far into the lower tail (x ~ -1e7) where Phi(x)
// underflows. Upper tail returns log1p(-Phi(-x)).
double std_normal_log_cdf(double x);

// Inverse of std_normal_cdf for p in (0,1). Rational initial guess
// polished with one Halley step; max error well below 1e-12.
double std_normal_quantile(double p);

// CDF of Student's t with dof > 0 degrees of freedom, via the regularized
// incomplete beta function.
double student_t_cdf(double x, double dof);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

// floor/ceil guarded against floating point representation error: values
// within 1e-9 (relative) of an integer are treated as that integer, so
// e.g. guarded_floor(1e4 * 0.2) == 2000 even though the product rounds
// slightly below 2000.
long long guarded_floor(double x);
long long guarded_ceil(double x);

}  // namespace ocdesign
