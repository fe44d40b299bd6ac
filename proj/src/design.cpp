#include "ocdesign/design.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

#include "ocdesign/math.hpp"
#include "ocdesign/parallel.hpp"

namespace ocdesign {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

void DesignInputs::validate() const {
  if (!model) throw ConfigError("design inputs missing a model");
  hyp.validate();
  psi0.validate(model->eta_dim());
  psi1.validate(model->eta_dim());
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1)");
  }
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw ConfigError("beta must lie in (0, 1)");
  }
  if (m < 1) throw ConfigError("repetition count m must be >= 1");
  if (guarded_floor(m * beta) < 1) {
    throw ConfigError("m too small for beta: floor(m*beta) must be >= 1");
  }
  if (guarded_floor(m * beta) + 1 > m || guarded_ceil(m * (1.0 - alpha)) > m) {
    throw ConfigError("threshold ranks out of range for this m");
  }
  if (!(q > 0.0)) throw ConfigError("allocation q must be positive");
  if (subgroups < 1) throw ConfigError("subgroup count must be >= 1");
  if (!(resim_threshold > 0.0)) {
    throw ConfigError("re-simulation threshold must be positive");
  }
  if (fixed_gamma && (!(*fixed_gamma >= 0.5) || !(*fixed_gamma < 1.0))) {
    throw ConfigError("fixed gamma must lie in [0.5, 1)");
  }
  // Each data generation process must produce estimands consistent with its
  // hypothesis. Checked at the support endpoints and midpoint.
  auto check = [&](const DataGenProcess& psi, int j) {
    auto probe = [&](const Eigen::VectorXd& eta) {
      const double theta = model->estimand(eta);
      const bool inside = hyp.contains(theta);
      if (j == 1 && !inside) {
        throw ConfigError("Psi1 generates estimand " + std::to_string(theta) +
                          " outside the alternative interval");
      }
      if (j == 0 && inside) {
        throw ConfigError("Psi0 generates estimand " + std::to_string(theta) +
                          " inside the alternative interval");
      }
    };
    if (psi.degenerate()) {
      probe(psi.eta);
    } else {
      Eigen::VectorXd eta = psi.eta;
      for (double v : {psi.uniform_lo, 0.5 * (psi.uniform_lo + psi.uniform_hi),
                       psi.uniform_hi}) {
        eta[psi.uniform_component] = v;
        probe(eta);
      }
    }
  };
  check(psi0, 0);
  check(psi1, 1);
}

void RankLines::predict(double n, std::vector<double>& out) const {
  const int count = m();
  out.resize(count);
  if (kind == Kind::kTheorySlope) {
    for (int r = 0; r < count; ++r) {
      out[r] = l0[r] + slope[r] * (n - n0);
    }
    return;
  }
  // Evaluate from the nearest anchor: exact at both anchors, and exactly
  // constant when the two anchor logits coincide.
  const double t = (n - n0) / (n1 - n0);
  if (t <= 0.5) {
    for (int r = 0; r < count; ++r) {
      out[r] = l0[r] + (l1[r] - l0[r]) * t;
    }
  } else {
    const double u = t - 1.0;
    for (int r = 0; r < count; ++r) {
      out[r] = l1[r] + (l1[r] - l0[r]) * u;
    }
  }
}

std::vector<double> predict_dist(const RankLines& lines, double n) {
  if (!(n > 0.0)) throw ArgumentError("sample size must be positive");
  std::vector<double> out;
  lines.predict(n, out);
  return out;
}

int initial_n0(const Model& model, const IntervalHypothesis& hyp,
               const DataGenProcess& psi1, double alpha, double beta, double q,
               std::optional<double> gamma) {
  psi1.validate(model.eta_dim());
  hyp.validate();
  const Eigen::VectorXd eta_star = psi1.median_eta();
  const double theta_star = model.analysis_scale_theta(eta_star);
  const IntervalHypothesis ah = model.analysis_scale_hypothesis(hyp);
  const double info = model.fisher_info(eta_star, q);
  const double a_hi = standardized_distance(ah.upper, theta_star, info);
  const double a_lo = standardized_distance(ah.lower, theta_star, info);
  const double a = std::min(std::fabs(a_hi), std::fabs(a_lo));
  if (!(a > 0.0)) {
    throw InfeasibleError(
        "median estimand under Psi1 lies on a hypothesis boundary; no sample "
        "size achieves the power target");
  }
  const double g = gamma.value_or(1.0 - alpha);
  const double z = std_normal_quantile(g) + std_normal_quantile(1.0 - beta);
  const double n = (z / a) * (z / a);
  return std::max(model.min_viable_n(),
                  static_cast<int>(guarded_ceil(n)));
}

RankLines phase1_lines(const Model& model, const IntervalHypothesis& hyp,
                       const SampDist& sd, double q) {
  RankLines lines;
  lines.kind = RankLines::Kind::kTheorySlope;
  lines.hyp_index = sd.hyp_index;
  lines.n0 = sd.n_b;
  lines.l0 = sd.logits;
  lines.slope.resize(sd.m);
  const IntervalHypothesis ah = model.analysis_scale_hypothesis(hyp);
  for (int r = 0; r < sd.m; ++r) {
    const Eigen::VectorXd eta = sd.etas.row(r);
    const double theta = model.analysis_scale_theta(eta);
    const double info = model.fisher_info(eta, q);
    lines.slope[r] = limiting_slope(theta, ah, info);
  }
  lines.subgroup_sizes = {sd.m};
  return lines;
}

namespace {

RankLines matched_from_arrays(double n0, std::span<const double> thetas0,
                              std::span<const double> logits0, double n1,
                              std::span<const double> thetas1,
                              std::span<const double> logits1, int hyp_index,
                              int subgroups) {
  const int m = static_cast<int>(logits0.size());
  if (static_cast<int>(logits1.size()) != m) {
    throw ArgumentError("matched lines require equal repetition counts");
  }
  if (m < 1) throw ArgumentError("matched lines require at least one repetition");
  if (n0 == n1) {
    throw ArgumentError("matched lines require distinct anchor sample sizes");
  }
  RankLines lines;
  lines.kind = RankLines::Kind::kMatched;
  lines.hyp_index = hyp_index;
  lines.n0 = n0;
  lines.n1 = n1;
  lines.l0.resize(m);
  lines.l1.resize(m);

  const int s = std::clamp(subgroups, 1, m);
  std::vector<int> idx0(m), idx1(m);
  std::iota(idx0.begin(), idx0.end(), 0);
  std::iota(idx1.begin(), idx1.end(), 0);
  // theta order at each anchor; stable so theta ties break by index
  std::stable_sort(idx0.begin(), idx0.end(), [&](int a, int b) {
    return thetas0[a] < thetas0[b];
  });
  std::stable_sort(idx1.begin(), idx1.end(), [&](int a, int b) {
    return thetas1[a] < thetas1[b];
  });

  const int base = m / s;
  std::vector<double> g0, g1;
  int offset = 0;
  int out = 0;
  for (int g = 0; g < s; ++g) {
    const int size = g + 1 == s ? m - offset : base;
    g0.resize(size);
    g1.resize(size);
    for (int i = 0; i < size; ++i) {
      g0[i] = logits0[idx0[offset + i]];
      g1[i] = logits1[idx1[offset + i]];
    }
    std::sort(g0.begin(), g0.end());
    std::sort(g1.begin(), g1.end());
    for (int i = 0; i < size; ++i, ++out) {
      lines.l0[out] = g0[i];
      lines.l1[out] = g1[i];
    }
    lines.subgroup_sizes.push_back(size);
    offset += size;
  }
  return lines;
}

}  // namespace

RankLines matched_lines(const SampDist& at_n0, const SampDist& at_n1,
                        int subgroups) {
  if (at_n0.hyp_index != at_n1.hyp_index) {
    throw ArgumentError("matched lines require the same hypothesis");
  }
  return matched_from_arrays(at_n0.n_b, at_n0.thetas, at_n0.logits, at_n1.n_b,
                             at_n1.thetas, at_n1.logits, at_n0.hyp_index,
                             subgroups);
}

namespace {

class SearchPredicate {
 public:
  SearchPredicate(const RankLines& lines1, const RankLines& lines0,
                  const SearchOptions& options)
      : lines1_(lines1), lines0_(lines0) {
    const int m = lines1.m();
    if (!options.fixed_gamma && lines0.m() != m) {
      throw ArgumentError("predicted distributions must share the same m");
    }
    rank1_ = power_threshold_rank(m, options.beta);
    if (options.fixed_gamma) {
      fixed_logit_ = logit(*options.fixed_gamma);
    } else {
      rank0_ = type1_threshold_rank(lines0.m(), options.alpha);
    }
  }

  bool operator()(double n) {
    lines1_.predict(n, buf1_);
    const double xi1 = xi_inplace(rank1_, buf1_);
    if (fixed_logit_) return xi1 >= *fixed_logit_;
    lines0_.predict(n, buf0_);
    const double xi0 = xi_inplace(rank0_, buf0_);
    return xi0 <= xi1;
  }

 private:
  const RankLines& lines1_;
  const RankLines& lines0_;
  int rank1_ = 1;
  int rank0_ = 1;
  std::optional<double> fixed_logit_;
  std::vector<double> buf1_, buf0_;
};

}  // namespace

SearchResult search_smallest_n(const RankLines& lines1, const RankLines& lines0,
                               const SearchOptions& options) {
  const double scale = options.fractional ? 100.0 : 1.0;
  const long long lo_u = guarded_ceil(options.lo * scale);
  const long long cap_u = guarded_floor(options.cap * scale);
  if (lo_u > cap_u) throw ArgumentError("search bounds are empty");

  SearchPredicate predicate(lines1, lines0, options);
  SearchResult result;
  auto probe = [&](long long u) {
    const double n = static_cast<double>(u) / scale;
    const bool ok = predicate(n);
    result.probes.push_back({n, ok});
    return ok;
  };

  if (probe(lo_u)) {
    result.n = static_cast<double>(lo_u) / scale;
    return result;
  }
  if (lo_u >= cap_u) {
    throw InfeasibleError(
        "design criteria unsatisfiable: predicate false at the search cap n "
        "= " +
        std::to_string(static_cast<double>(cap_u) / scale));
  }

  // Bracket: expand upward from the start point with doubling offsets.
  // Rank lines extrapolated far beyond the anchors are noise, so the first
  // satisfying band can sit close above the start; offset doubling cannot
  // step over it the way doubling the absolute size would.
  long long lo_bound = lo_u;  // known false
  const long long start_u = std::clamp<long long>(
      static_cast<long long>(std::llround(options.start * scale)), lo_u + 1,
      cap_u);
  long long hi = start_u;
  long long offset = 1;
  while (!probe(hi)) {
    lo_bound = hi;
    if (hi >= cap_u) {
      throw InfeasibleError(
          "design criteria unsatisfiable: predicate still false at the search "
          "cap n = " +
          std::to_string(static_cast<double>(hi) / scale));
    }
    hi = std::min(cap_u, start_u + offset);
    offset *= 2;
  }

  while (hi - lo_bound > 1) {
    const long long mid = lo_bound + (hi - lo_bound) / 2;
    if (probe(mid)) {
      hi = mid;
    } else {
      lo_bound = mid;
    }
  }
  // P(hi) holds and P(hi - 1) fails by the bisection invariant. Rank lines
  // can cross, so scan below the result for an earlier satisfying run. The
  // light mode (bootstrap resamples) checks one extra point and widens only
  // when that point fires.
  long long chosen = hi;
  constexpr int kWindow = 8;
  const long long scan_lo =
      std::max(lo_u, chosen - (options.light_verification ? 2 : kWindow));
  long long lowest_true = chosen;
  for (long long u = chosen - 2; u >= scan_lo; --u) {
    if (probe(u)) lowest_true = u;
  }
  if (lowest_true < chosen) {
    // Locally non-monotone: walk to the start of the satisfying run, giving
    // up (flagged) if it extends past the verification window.
    chosen = lowest_true;
    int extra = 0;
    while (chosen - 1 >= lo_u && probe(chosen - 1)) {
      --chosen;
      if (++extra >= kWindow) {
        result.monotone_ok = false;
        break;
      }
    }
  }
  result.n = static_cast<double>(chosen) / scale;
  return result;
}

namespace {

DesignRecommendation derive_recommendation(const OptimizerTrace& trace) {
  DesignRecommendation rec;
  rec.n_b = trace.n2;
  rec.fractional = trace.fractional;
  rec.monotone_ok = trace.searches.empty() || trace.searches.back().monotone_ok;

  std::vector<double> pred1 = predict_dist(trace.matched_h1, trace.n2);
  std::vector<double> pred0 = predict_dist(trace.matched_h0, trace.n2);
  double gamma_logit;
  if (trace.fixed_gamma) {
    rec.gamma = *trace.fixed_gamma;
    gamma_logit = logit(rec.gamma);
  } else {
    const int k0 = type1_threshold_rank(static_cast<int>(pred0.size()),
                                        trace.alpha);
    gamma_logit = xi(k0, pred0);
    rec.gamma = inv_logit(gamma_logit);
    if (rec.gamma < 0.5) {
      rec.gamma = 0.5;
      gamma_logit = 0.0;
      rec.gamma_clamped = true;
    } else if (rec.gamma >= 1.0) {
      rec.gamma = std::nextafter(1.0, 0.0);
      gamma_logit = logit(rec.gamma);
      rec.gamma_clamped = true;
    }
  }
  long long c1 = 0, c0 = 0;
  for (double l : pred1) c1 += (l >= gamma_logit);
  for (double l : pred0) c0 += (l >= gamma_logit);
  rec.power_predicted = static_cast<double>(c1) / pred1.size();
  rec.type1_predicted = static_cast<double>(c0) / pred0.size();
  return rec;
}

}  // namespace

DesignRecommendation finalize_trace(OptimizerTrace& trace) {
  if (trace.anchors.size() < 2) {
    throw ArgumentError("trace needs two anchor simulations");
  }
  const AnchorSim& lo_anchor = trace.anchors[trace.active_lo];
  const AnchorSim& hi_anchor = trace.anchors[trace.active_hi];
  trace.matched_h1 = matched_lines(lo_anchor.h1, hi_anchor.h1,
                                   trace.subgroups1);
  trace.matched_h0 = matched_lines(lo_anchor.h0, hi_anchor.h0,
                                   trace.subgroups0);
  trace.lines_stale = false;

  SearchOptions opt;
  opt.lo = trace.search_lo;
  opt.start = hi_anchor.n_b;
  opt.cap = trace.search_cap;
  opt.fractional = trace.fractional;
  opt.alpha = trace.alpha;
  opt.beta = trace.beta;
  opt.fixed_gamma = trace.fixed_gamma;
  SearchResult sr = search_smallest_n(trace.matched_h1, trace.matched_h0, opt);
  trace.search_labels.push_back(trace.resimulated ? "n2-resim" : "n2");
  trace.searches.push_back(sr);
  trace.n2 = sr.n;
  return derive_recommendation(trace);
}

std::pair<DesignRecommendation, OptimizerTrace> optimize(
    const DesignInputs& inputs, int threads) {
  inputs.validate();
  const Model& model = *inputs.model;

  OptimizerTrace trace;
  trace.alpha = inputs.alpha;
  trace.beta = inputs.beta;
  trace.q = inputs.q;
  trace.m = inputs.m;
  trace.seed = inputs.seed;
  trace.subgroups1 = inputs.psi1.degenerate() ? 1 : inputs.subgroups;
  trace.subgroups0 = inputs.psi0.degenerate() ? 1 : inputs.subgroups;
  trace.fractional = inputs.fractional;
  trace.fixed_gamma = inputs.fixed_gamma;

  const int lo = model.min_viable_n();
  trace.search_lo = lo;
  const int n0 = std::max(
      lo, initial_n0(model, inputs.hyp, inputs.psi1, inputs.alpha, inputs.beta,
                     inputs.q, inputs.fixed_gamma));
  trace.n0_init = n0;
  trace.search_cap = 65536.0 * n0;

  AnchorSim a0;
  a0.n_b = n0;
  a0.h1 = estimate(model, inputs.hyp, inputs.psi1, 1, n0, inputs.q, inputs.m,
                   inputs.seed, 0, 0, threads);
  a0.h0 = estimate(model, inputs.hyp, inputs.psi0, 0, n0, inputs.q, inputs.m,
                   inputs.seed, 0, 0, threads);
  trace.anchors.push_back(std::move(a0));

  trace.phase1_h1 =
      phase1_lines(model, inputs.hyp, trace.anchors[0].h1, inputs.q);
  trace.phase1_h0 =
      phase1_lines(model, inputs.hyp, trace.anchors[0].h0, inputs.q);

  SearchOptions opt1;
  opt1.lo = lo;
  opt1.start = n0;
  opt1.cap = trace.search_cap;
  opt1.fractional = false;  // n1 is simulated, so it stays an integer
  opt1.alpha = inputs.alpha;
  opt1.beta = inputs.beta;
  opt1.fixed_gamma = inputs.fixed_gamma;
  SearchResult s1 = search_smallest_n(trace.phase1_h1, trace.phase1_h0, opt1);
  trace.search_labels.push_back("n1");
  trace.searches.push_back(s1);

  int n1 = static_cast<int>(std::llround(s1.n));
  // The matched-rank lines need anchors far enough apart that the empirical
  // slopes are not dominated by quantile noise; enforce a minimum gap,
  // keeping the estimated crossing between the anchors where possible.
  const int min_gap = std::max(2, static_cast<int>(guarded_ceil(0.1 * n0)));
  if (std::abs(n1 - n0) < min_gap) {
    if (n1 <= n0 && n0 - min_gap >= lo) {
      n1 = n0 - min_gap;
    } else {
      n1 = n0 + min_gap;
    }
  }

  AnchorSim a1;
  a1.n_b = n1;
  a1.h1 = estimate(model, inputs.hyp, inputs.psi1, 1, n1, inputs.q, inputs.m,
                   inputs.seed, 1, 0, threads);
  a1.h0 = estimate(model, inputs.hyp, inputs.psi0, 0, n1, inputs.q, inputs.m,
                   inputs.seed, 1, 0, threads);
  trace.anchors.push_back(std::move(a1));
  trace.active_lo = 0;
  trace.active_hi = 1;

  DesignRecommendation rec = finalize_trace(trace);

  if (inputs.resimulate &&
      std::fabs(trace.n2 - n1) > inputs.resim_threshold * n1) {
    const int n2_sim =
        std::max(lo, static_cast<int>(guarded_ceil(trace.n2)));
    if (n2_sim != n1) {
      AnchorSim a2;
      a2.n_b = n2_sim;
      a2.h1 = estimate(model, inputs.hyp, inputs.psi1, 1, n2_sim, inputs.q,
                       inputs.m, inputs.seed, 2, 0, threads);
      a2.h0 = estimate(model, inputs.hyp, inputs.psi0, 0, n2_sim, inputs.q,
                       inputs.m, inputs.seed, 2, 0, threads);
      trace.anchors.push_back(std::move(a2));
      trace.active_lo = 1;
      trace.active_hi = 2;
      trace.resimulated = true;
      rec = finalize_trace(trace);
    }
  }

  return {rec, std::move(trace)};
}

BootstrapResult bootstrap_cis(const OptimizerTrace& trace, int resamples,
                              int m_star, double level, uint64_t seed,
                              int threads) {
  if (resamples < 1) throw ArgumentError("bootstrap requires M >= 1");
  if (m_star < 1) throw ArgumentError("bootstrap requires m* >= 1");
  if (!(level > 0.0) || !(level < 1.0)) {
    throw ArgumentError("confidence level must lie in (0, 1)");
  }
  if (trace.anchors.size() < 2) {
    throw ArgumentError("trace missing anchor simulations");
  }
  const AnchorSim& lo_anchor = trace.anchors[trace.active_lo];
  const AnchorSim& hi_anchor = trace.anchors[trace.active_hi];
  // Validate the resample-size ranks up front.
  power_threshold_rank(m_star, trace.beta);
  const int k0_star =
      trace.fixed_gamma ? 1 : type1_threshold_rank(m_star, trace.alpha);

  BootstrapResult out;
  out.resamples = resamples;
  out.m_star = m_star;
  out.level = level;

  std::vector<double> ns(resamples, kNan);
  std::vector<double> gs(resamples, kNan);
  std::atomic<int> infeasible{0};

  parallel_for(0, resamples, threads, [&](int b) {
    auto resample = [&](const SampDist& sd, uint8_t anchor_tag,
                        std::vector<double>& thetas,
                        std::vector<double>& logits) {
      StreamLane lane;
      lane.phase = StreamPhase::kBootstrap;
      lane.hyp_index = static_cast<uint8_t>(sd.hyp_index);
      lane.attempt = anchor_tag;
      lane.repetition = static_cast<uint32_t>(b);
      RngStream rng(seed, lane);
      thetas.resize(m_star);
      logits.resize(m_star);
      for (int i = 0; i < m_star; ++i) {
        int idx = static_cast<int>(rng.uniform_open() * sd.m);
        if (idx >= sd.m) idx = sd.m - 1;
        thetas[i] = sd.thetas[idx];
        logits[i] = sd.logits[idx];
      }
    };
    std::vector<double> th_lo1, lg_lo1, th_hi1, lg_hi1;
    std::vector<double> th_lo0, lg_lo0, th_hi0, lg_hi0;
    resample(lo_anchor.h1, 0, th_lo1, lg_lo1);
    resample(hi_anchor.h1, 1, th_hi1, lg_hi1);
    resample(lo_anchor.h0, 0, th_lo0, lg_lo0);
    resample(hi_anchor.h0, 1, th_hi0, lg_hi0);

    RankLines lines1 =
        matched_from_arrays(lo_anchor.n_b, th_lo1, lg_lo1, hi_anchor.n_b,
                            th_hi1, lg_hi1, 1, trace.subgroups1);
    RankLines lines0 =
        matched_from_arrays(lo_anchor.n_b, th_lo0, lg_lo0, hi_anchor.n_b,
                            th_hi0, lg_hi0, 0, trace.subgroups0);

    SearchOptions opt;
    opt.lo = trace.search_lo;
    opt.start = std::max(trace.search_lo, trace.n2);
    opt.cap = trace.search_cap;
    opt.fractional = trace.fractional;
    opt.alpha = trace.alpha;
    opt.beta = trace.beta;
    opt.fixed_gamma = trace.fixed_gamma;
    opt.light_verification = true;
    try {
      const SearchResult sr = search_smallest_n(lines1, lines0, opt);
      double gamma;
      if (trace.fixed_gamma) {
        gamma = *trace.fixed_gamma;
      } else {
        std::vector<double> pred0 = predict_dist(lines0, sr.n);
        gamma = inv_logit(xi_inplace(k0_star, pred0));
        gamma = std::clamp(gamma, 0.5, std::nextafter(1.0, 0.0));
      }
      ns[b] = sr.n;
      gs[b] = gamma;
    } catch (const InfeasibleError&) {
      ++infeasible;
    }
  });

  out.infeasible_count = infeasible.load();
  out.flagged = out.infeasible_count > 0.01 * resamples;
  for (int b = 0; b < resamples; ++b) {
    if (!std::isnan(ns[b])) {
      out.n_samples.push_back(ns[b]);
      out.gamma_samples.push_back(gs[b]);
    }
  }
  if (out.n_samples.empty()) {
    throw InfeasibleError("every bootstrap resample was infeasible");
  }
  const int mf = static_cast<int>(out.n_samples.size());
  const long long lo_rank =
      std::max<long long>(1, guarded_floor(mf * (1.0 - level) / 2.0));
  const long long hi_rank =
      std::min<long long>(mf, guarded_ceil(mf * (1.0 + level) / 2.0));
  std::vector<double> sorted_n = out.n_samples;
  std::vector<double> sorted_g = out.gamma_samples;
  std::sort(sorted_n.begin(), sorted_n.end());
  std::sort(sorted_g.begin(), sorted_g.end());
  out.n_lo = sorted_n[lo_rank - 1];
  out.n_hi = sorted_n[hi_rank - 1];
  out.gamma_lo = sorted_g[lo_rank - 1];
  out.gamma_hi = sorted_g[hi_rank - 1];
  return out;
}

void augment_m(OptimizerTrace& trace, const DesignInputs& inputs,
               int additional_m, int threads) {
  if (additional_m < 0) {
    throw ArgumentError("additional repetition count must be >= 0");
  }
  if (additional_m == 0) return;
  if (trace.anchors.size() < 2) {
    throw ArgumentError("trace missing anchor simulations");
  }
  for (int idx : {trace.active_lo, trace.active_hi}) {
    AnchorSim& anchor = trace.anchors[idx];
    extend(anchor.h1, *inputs.model, inputs.hyp, inputs.psi1, inputs.q,
           additional_m, threads);
    extend(anchor.h0, *inputs.model, inputs.hyp, inputs.psi0, inputs.q,
           additional_m, threads);
  }
  trace.m += additional_m;
  trace.lines_stale = true;
}

}  // namespace ocdesign
