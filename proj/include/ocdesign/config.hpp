#pragma once

#include <string>
#include <vector>

#include "ocdesign/design.hpp"

namespace ocdesign {

struct PsiConfig {
  std::vector<double> eta;
  int uniform_component = -1;
  double uniform_lo = 0.0;
  double uniform_hi = 0.0;

  bool operator==(const PsiConfig&) const = default;
};

// Parsed design configuration (TOML). Strict schema: unknown keys are
// rejected with a diagnostic naming the key.
struct DesignConfig {
  // [model]
  std::string model_id;
  double toy_sigma = 1.0;
  std::string toy_prior = "flat";
  double toy_prior_mean = 0.0;
  double toy_prior_sd = 1.0;
  std::vector<double> reg_prior_mean;
  double reg_prior_precision = 0.01;
  double reg_prior_a = 1.0;
  double reg_prior_b = 1.0;
  std::vector<double> logit_prior_mean;
  std::vector<double> logit_prior_sd;
  double covariate_mean = 0.0;
  double covariate_sd = 1.0;
  double error_sd = 1.0;

  // [hypothesis]
  double delta_lower = 0.0;
  double delta_upper = 0.0;

  // [psi0] / [psi1]
  PsiConfig psi0;
  PsiConfig psi1;

  // [design]
  double alpha = 0.05;
  double beta = 0.2;
  double q = 1.0;
  int m = 10000;
  uint64_t seed = 1;
  int subgroups = 10;
  bool fractional = false;
  bool resimulate = true;
  double resim_threshold = 0.5;

  // [bootstrap]
  int boot_resamples = 1000;
  int boot_m_star = 0;  // 0 = use m
  double boot_level = 0.95;

  // [contour]
  double contour_n_lo = 0.0;
  double contour_n_hi = 0.0;
  double contour_gamma_lo = 0.0;
  double contour_gamma_hi = 0.0;
  int contour_gamma_steps = 200;

  bool operator==(const DesignConfig&) const = default;
};

DesignConfig parse_config_text(const std::string& text);
DesignConfig parse_config(const std::string& path);

// Resolves the config to a model instance plus validated optimizer inputs.
DesignInputs build_inputs(const DesignConfig& cfg);

}  // namespace ocdesign
