#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ocdesign/proxy.hpp"
#include "ocdesign/sampdist.hpp"

namespace ocdesign {

// Everything the optimizer needs, already validated and resolved to a model
// instance. Built from a DesignConfig by the config module.
struct DesignInputs {
  std::shared_ptr<const Model> model;
  IntervalHypothesis hyp;
  DataGenProcess psi0;
  DataGenProcess psi1;
  double alpha = 0.05;
  double beta = 0.2;
  double q = 1.0;
  int m = 10000;
  uint64_t seed = 1;
  int subgroups = 10;  // theta subgroups for nondegenerate Psi
  bool fractional = false;
  bool resimulate = true;
  double resim_threshold = 0.5;
  std::optional<double> fixed_gamma;  // comparison mode: power-only search

  void validate() const;
};

// Per-rank linear approximations to logits of posterior probabilities as
// functions of the sample size.
//
// kTheorySlope: one line per repetition through (n0, logit_r) with the
// limiting slope at that repetition's estimand (first optimizer phase).
// kMatched: within theta subgroups, sorted logits at the two anchors joined
// rank by rank; evaluation is exact at both anchors.
struct RankLines {
  enum class Kind { kTheorySlope, kMatched };
  Kind kind = Kind::kMatched;
  int hyp_index = 0;
  double n0 = 0.0;
  double n1 = 0.0;  // unused for kTheorySlope
  std::vector<double> l0;
  std::vector<double> l1;     // kMatched only
  std::vector<double> slope;  // kTheorySlope only
  std::vector<int> subgroup_sizes;

  int m() const { return static_cast<int>(l0.size()); }
  void predict(double n, std::vector<double>& out) const;
};

std::vector<double> predict_dist(const RankLines& lines, double n);

// BvM-based initialization: smallest n with approximate power 1-beta at
// gamma (default 1-alpha), using the median estimand under Psi1 and the
// per-n_b Fisher information. Throws InfeasibleError when the median
// estimand sits on a hypothesis boundary.
int initial_n0(const Model& model, const IntervalHypothesis& hyp,
               const DataGenProcess& psi1, double alpha, double beta, double q,
               std::optional<double> gamma = std::nullopt);

RankLines phase1_lines(const Model& model, const IntervalHypothesis& hyp,
                       const SampDist& sd, double q);

// Matched-rank construction between two equal-m estimates at distinct
// anchors. `subgroups` > 1 splits by the order statistics of the theta
// draws first (the last subgroup absorbs any remainder).
RankLines matched_lines(const SampDist& at_n0, const SampDist& at_n1,
                        int subgroups);

struct SearchProbe {
  double n = 0.0;
  bool ok = false;
};

struct SearchOptions {
  double lo = 4.0;
  double start = 8.0;
  double cap = 1 << 24;
  bool fractional = false;  // hundredth resolution instead of integers
  double alpha = 0.05;
  double beta = 0.2;
  std::optional<double> fixed_gamma;
  // 8-step downward verification window after bisection (full mode); the
  // light mode used inside the bootstrap probes a single extra point.
  bool light_verification = false;
};

struct SearchResult {
  double n = 0.0;
  std::vector<SearchProbe> probes;
  bool monotone_ok = true;
};

// Smallest n in [lo, cap] whose predicted distributions satisfy the design
// predicate: xi0(n) <= xi1(n), or xi1(n) >= logit(fixed_gamma) in
// fixed-gamma mode. Doubles from `start` to bracket, then bisects; the
// result n satisfies P(n) and not P(n - step). Throws InfeasibleError when
// the predicate never turns true below the cap.
SearchResult search_smallest_n(const RankLines& lines1, const RankLines& lines0,
                               const SearchOptions& options);

struct AnchorSim {
  int n_b = 0;
  SampDist h1;
  SampDist h0;
};

struct OptimizerTrace {
  int n0_init = 0;
  std::vector<AnchorSim> anchors;
  int active_lo = 0;
  int active_hi = 1;
  RankLines phase1_h1, phase1_h0;
  RankLines matched_h1, matched_h0;
  std::vector<std::string> search_labels;
  std::vector<SearchResult> searches;
  double n2 = 0.0;
  bool resimulated = false;
  bool lines_stale = false;  // set by augment_m until lines are rebuilt

  // Design parameters echoed for downstream consumers (bootstrap, contour).
  double alpha = 0.05, beta = 0.2, q = 1.0;
  int m = 0;
  uint64_t seed = 0;
  int subgroups1 = 1, subgroups0 = 1;
  bool fractional = false;
  std::optional<double> fixed_gamma;
  double search_lo = 4.0, search_cap = 1 << 24;
};

struct DesignRecommendation {
  double n_b = 0.0;  // integer-valued unless fractional mode
  double gamma = 0.0;
  bool gamma_clamped = false;
  bool fractional = false;
  double power_predicted = 0.0;
  double type1_predicted = 0.0;
  bool monotone_ok = true;
};

// Rebuilds the matched lines from the active anchor pair (if stale or not
// yet built), reruns the final search, and derives gamma from the predicted
// H0 distribution at the recommended size.
DesignRecommendation finalize_trace(OptimizerTrace& trace);

// Full optimizer: BvM initialization, simulation at n0, theory-slope lines,
// first search, simulation at n1, matched lines, second search, gamma; with
// optional re-simulation at n2 when it lands far from n1.
std::pair<DesignRecommendation, OptimizerTrace> optimize(
    const DesignInputs& inputs, int threads);

struct BootstrapResult {
  int resamples = 0;  // M
  int m_star = 0;
  double level = 0.95;
  std::vector<double> n_samples;      // feasible resamples, unsorted
  std::vector<double> gamma_samples;  // aligned with n_samples
  int infeasible_count = 0;
  bool flagged = false;  // > 1% of resamples infeasible
  double n_lo = 0.0, n_hi = 0.0;
  double gamma_lo = 0.0, gamma_hi = 0.0;
};

// Percentile bootstrap over with-replacement resamples of the four anchor
// sampling distributions; each resample rebuilds matched lines and reruns
// the final search and gamma selection.
BootstrapResult bootstrap_cis(const OptimizerTrace& trace, int resamples,
                              int m_star, double level, uint64_t seed,
                              int threads);

// Extends all four active anchor estimates by additional_m repetitions on
// continuation lanes and marks the rank lines stale.
void augment_m(OptimizerTrace& trace, const DesignInputs& inputs,
               int additional_m, int threads);

}  // namespace ocdesign
