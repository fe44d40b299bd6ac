// Acceptance suite: one criterion per test case, one PASS/FAIL line each.
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>

#include "ocdesign/contour.hpp"
#include "ocdesign/math.hpp"
#include "ocdesign/parallel.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ocdesign;
using fixtures::kInf;

namespace {

void verdict(int number, const char* name, bool pass) {
  std::printf("ACCEPTANCE %d (%s): %s\n", number, name,
              pass ? "PASS" : "FAIL");
  std::fflush(stdout);
  CHECK_MESSAGE(pass, "criterion ", number, " (", name, ")");
}

}  // namespace

TEST_CASE("criterion 1: weight-example reproduction over 100 seeds") {
  const int runs = 100;
  std::vector<double> n_values(runs), gammas(runs);
  std::atomic<int> failures{0};
  parallel_for(0, runs, 2, [&](int r) {
    try {
      DesignInputs in = fixtures::weight_example(10000, 1000 + r);
      auto [rec, trace] = optimize(in, 1);
      n_values[r] = rec.n_b;
      gammas[r] = rec.gamma;
    } catch (const std::exception&) {
      ++failures;
      n_values[r] = -1;
    }
  });
  int inside = 0;
  for (int r = 0; r < runs; ++r) {
    if (n_values[r] >= 34 && n_values[r] <= 36 && gammas[r] >= 0.9535 &&
        gammas[r] <= 0.9595) {
      ++inside;
    }
  }
  std::vector<double> sorted_n = n_values;
  std::sort(sorted_n.begin(), sorted_n.end());
  std::printf("  criterion 1: %d/100 runs inside, median n_b = %.0f\n",
              inside, sorted_n[runs / 2]);
  verdict(1, "weight-example (n_b, gamma) reproduction", inside >= 95 &&
                                                             failures == 0);
}

TEST_CASE("criterion 2: confirmatory operating characteristics") {
  DesignInputs in = fixtures::weight_example(100000, 424242);
  const SampDist sd1 = estimate(*in.model, in.hyp, in.psi1, 1, 35, in.q, in.m,
                                in.seed, 0, 0, 2);
  const SampDist sd0 = estimate(*in.model, in.hyp, in.psi0, 0, 35, in.q, in.m,
                                in.seed, 0, 0, 2);
  const OCEstimate oc = oc_estimate(sd1, sd0, 0.9564, in.alpha, in.beta);
  std::printf("  criterion 2: power = %.4f (target 0.8029 +- 0.006), "
              "type1 = %.4f (target 0.0500 +- 0.004)\n",
              oc.power, oc.type1);
  verdict(2, "confirmatory OCs at (35, 0.9564)",
          std::fabs(oc.power - 0.8029) <= 0.006 &&
              std::fabs(oc.type1 - 0.0500) <= 0.004);
}

TEST_CASE("criterion 3: BvM initialization reference values") {
  DesignInputs in = fixtures::weight_example();
  const int at_median =
      initial_n0(*in.model, in.hyp, in.psi1, in.alpha, in.beta, in.q);
  DataGenProcess at9 = in.psi0;
  at9.eta = Eigen::Vector3d(-25.75, 9.0, 0.25);
  DataGenProcess at12 = in.psi0;
  at12.eta = Eigen::Vector3d(-25.75, 12.0, 0.25);
  const int lo = initial_n0(*in.model, in.hyp, at9, in.alpha, in.beta, in.q);
  const int hi = initial_n0(*in.model, in.hyp, at12, in.alpha, in.beta, in.q);
  std::printf("  criterion 3: n0 = %d / %d / %d (want 32 / 59 / 20)\n",
              at_median, lo, hi);
  verdict(3, "n0 initialization 32/59/20",
          at_median == 32 && lo == 59 && hi == 20);
}

TEST_CASE("criterion 4: limiting slope verification grid") {
  const auto cases = slope_verification_cases();
  bool pass = cases.size() >= 12;
  for (const SlopeCase& sc : cases) {
    const double analytic = limiting_slope(sc.pt.theta, sc.hyp, sc.pt.info);
    double last_err = kInf;
    for (double n : {1e3, 1e4, 1e5, 1e6}) {
      const double err =
          std::fabs(numeric_slope(sc.pt, sc.hyp, n, n / 1000.0) - analytic);
      if (err > last_err) pass = false;
      last_err = err;
    }
    if (!(last_err < 1e-3)) pass = false;
  }
  verdict(4, "limiting slopes over the full case grid", pass);
}

TEST_CASE("criterion 5: exact criterion equivalence, 1e4 trials") {
  std::mt19937_64 gen(314159);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  long long counterexamples = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int m = 10 + static_cast<int>(gen() % 491);
    std::vector<double> p1(m), p0(m);
    for (double& p : p1) p = unif(gen);
    for (double& p : p0) p = unif(gen);
    if (trial % 7 == 0) {  // inject ties
      for (int i = 0; i + 1 < m; i += 3) p1[i + 1] = p1[i];
      for (int i = 0; i + 1 < m; i += 4) p0[i + 1] = p0[i];
    }
    const double alpha = 0.02 + 0.96 * unif(gen);
    const double beta = 0.02 + 0.96 * unif(gen);
    const long long floor_mb = guarded_floor(m * beta);
    if (floor_mb < 1 || floor_mb + 1 > m) continue;

    std::vector<double> s1 = p1, s0 = p0;
    std::sort(s1.begin(), s1.end());
    std::sort(s0.begin(), s0.end());
    const double xi1 = s1[power_threshold_rank(m, beta) - 1];
    const double xi0 = s0[type1_threshold_rank(m, alpha) - 1];

    std::vector<double> pooled = p1;
    pooled.insert(pooled.end(), p0.begin(), p0.end());
    pooled.push_back(0.0);
    pooled.push_back(1.0);
    std::sort(pooled.begin(), pooled.end());
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

    auto count_ge = [](const std::vector<double>& sorted, double gamma) {
      return static_cast<double>(
          sorted.end() - std::lower_bound(sorted.begin(), sorted.end(),
                                          gamma));
    };
    auto check_gamma = [&](double gamma, bool include_type1) {
      const bool power_ok = count_ge(s1, gamma) / m >= 1.0 - beta;
      if (power_ok != (xi1 >= gamma)) ++counterexamples;
      if (include_type1) {
        const bool type1_ok = count_ge(s0, gamma) / m <= alpha;
        if (type1_ok != (xi0 <= gamma)) ++counterexamples;
      }
    };
    for (size_t i = 0; i + 1 < pooled.size(); ++i) {
      check_gamma(0.5 * (pooled[i] + pooled[i + 1]), true);
    }
    // the power-side equivalence is exact even at tie points
    for (double gamma : pooled) check_gamma(gamma, false);
  }
  std::printf("  criterion 5: %lld counterexamples\n", counterexamples);
  verdict(5, "criterion equivalence, zero counterexamples",
          counterexamples == 0);
}

TEST_CASE("criterion 6: oracle agreement and economy on the toy model") {
  bool agree = true;
  bool economical = true;
  for (int s = 0; s < 20; ++s) {
    DesignInputs in = fixtures::toy_example(0.5, 10000, 9000 + s);
    auto [rec, trace] = optimize(in, 2);
    long long method_evals = 0;
    for (const AnchorSim& a : trace.anchors) method_evals += 2LL * a.h1.m;

    long long oracle_evals = 0;
    auto feasible_at = [&](int n) {
      SampDist sd1 = estimate(*in.model, in.hyp, in.psi1, 1, n, in.q, in.m,
                              in.seed, 0, 0, 2);
      SampDist sd0 = estimate(*in.model, in.hyp, in.psi0, 0, n, in.q, in.m,
                              in.seed, 0, 0, 2);
      oracle_evals += 2LL * in.m;
      return feasible(sd1, sd0, in.alpha, in.beta);
    };
    const int lo = in.model->min_viable_n();
    int hi = trace.n0_init;
    int lo_bound = lo - 1;
    while (!feasible_at(hi)) {
      lo_bound = hi;
      hi *= 2;
      REQUIRE(hi < 8192);
    }
    while (hi - lo_bound > 1) {
      const int mid = lo_bound + (hi - lo_bound) / 2;
      if (feasible_at(mid)) {
        hi = mid;
      } else {
        lo_bound = mid;
      }
    }
    SampDist sd0 = estimate(*in.model, in.hyp, in.psi0, 0, hi, in.q, in.m,
                            in.seed, 0, 0, 2);
    const double gamma_oracle =
        xi(type1_threshold_rank(in.m, in.alpha), sd0.probs);
    if (std::fabs(rec.n_b - hi) > 1.0) agree = false;
    if (std::fabs(rec.gamma - gamma_oracle) > 0.01) agree = false;
    if (oracle_evals < 3 * method_evals) economical = false;
  }
  verdict(6, "toy-model oracle agreement (|dn|<=1, |dgamma|<=0.01)", agree);
  verdict(6, "two-anchor method >=3x fewer evaluations", economical);
}

TEST_CASE("criterion 7: null uniformity of posterior probabilities") {
  DesignInputs in = fixtures::toy_example(0.5, 10000, 2718);
  const SampDist sd0 = estimate(*in.model, in.hyp, in.psi0, 0, 25, 1.0, 10000,
                                in.seed, 0, 0, 2);
  const double ks = oracles::ks_uniform(sd0.probs);
  std::printf("  criterion 7: KS = %.5f (limit 0.0163)\n", ks);
  verdict(7, "flat-prior boundary null is standard uniform", ks < 0.0163);
}

TEST_CASE("criterion 8: bootstrap coverage and width direction") {
  const int runs = 100;
  std::vector<int> covers(runs, 0), width_ok(runs, 0), point_in(runs, 0);
  std::atomic<int> failures{0};
  parallel_for(0, runs, 2, [&](int r) {
    try {
      DesignInputs in = fixtures::weight_example(10000, 5000 + r);
      auto [rec, trace] = optimize(in, 1);
      const BootstrapResult full =
          bootstrap_cis(trace, 1000, 10000, 0.95, in.seed, 1);
      const BootstrapResult quarter =
          bootstrap_cis(trace, 1000, 2500, 0.95, in.seed, 1);
      covers[r] = (full.n_lo <= 35.0 && 35.0 <= full.n_hi) ? 1 : 0;
      const double width_full = full.n_hi - full.n_lo;
      const double width_quarter = quarter.n_hi - quarter.n_lo;
      width_ok[r] = (width_full <= width_quarter) ? 1 : 0;
      point_in[r] = (full.n_lo <= rec.n_b && rec.n_b <= full.n_hi) ? 1 : 0;
    } catch (const std::exception&) {
      ++failures;
    }
  });
  int cover_count = 0, width_count = 0, point_count = 0;
  for (int r = 0; r < runs; ++r) {
    cover_count += covers[r];
    width_count += width_ok[r];
    point_count += point_in[r];
  }
  std::printf("  criterion 8: CI covers 35 in %d/100, width nonincreasing in "
              "%d/100, point inside own CI in %d/100\n",
              cover_count, width_count, point_count);
  verdict(8, "bootstrap CIs cover 35 in >=90% of runs",
          cover_count >= 90 && failures == 0);
  verdict(8, "CI width nonincreasing in m* in >=90% of pairs",
          width_count >= 90);
  verdict(8, "point recommendation inside its own CI in >=95% of runs",
          point_count >= 95);
}

TEST_CASE("criterion 9: contour consistency with the optimizer") {
  bool crossing_matches = true;
  bool anchors_exact = true;
  bool monotone = true;
  for (int s = 0; s < 5; ++s) {
    DesignInputs in = fixtures::weight_example(10000, 7000 + s);
    auto [rec, trace] = optimize(in, 2);
    ContourRanges ranges;
    ranges.n_lo = std::min<double>(trace.anchors[trace.active_lo].n_b,
                                   std::floor(0.7 * trace.n2));
    ranges.n_hi = std::max<double>(trace.anchors[trace.active_hi].n_b,
                                   std::ceil(1.4 * trace.n2));
    ranges.gamma_steps = 220;  // ~0.0009 spacing over the default range
    const ContourGrid grid =
        build_grid(trace, rec, ranges, in.model->min_viable_n(), 2);

    const auto crossing = crossing_point(grid, 1.0 - in.beta, in.alpha);
    if (!crossing || crossing->first != trace.n2) crossing_matches = false;

    for (int i = 0; i < grid.n_count() && monotone; ++i) {
      for (int j = 1; j < grid.gamma_count(); ++j) {
        if (grid.power_at(i, j) > grid.power_at(i, j - 1) ||
            grid.type1_at(i, j) > grid.type1_at(i, j - 1)) {
          monotone = false;
          break;
        }
      }
    }

    for (int anchor_idx : {trace.active_lo, trace.active_hi}) {
      const AnchorSim& anchor = trace.anchors[anchor_idx];
      const auto it = std::find(grid.n_values.begin(), grid.n_values.end(),
                                static_cast<double>(anchor.n_b));
      if (it == grid.n_values.end()) {
        anchors_exact = false;
        continue;
      }
      const int col = static_cast<int>(it - grid.n_values.begin());
      for (int j = 0; j < grid.gamma_count(); ++j) {
        const double gamma = grid.gamma_values[j];
        long long c1 = 0, c0 = 0;
        for (double p : anchor.h1.probs) c1 += (p >= gamma);
        for (double p : anchor.h0.probs) c0 += (p >= gamma);
        if (grid.power_at(col, j) != static_cast<double>(c1) / anchor.h1.m ||
            grid.type1_at(col, j) != static_cast<double>(c0) / anchor.h0.m) {
          anchors_exact = false;
          break;
        }
      }
    }
  }
  verdict(9, "contour crossing returns the optimizer n2", crossing_matches);
  verdict(9, "anchor columns equal direct OC estimates exactly",
          anchors_exact);
  verdict(9, "surfaces monotone nonincreasing in gamma", monotone);
}

TEST_CASE("criterion 10: SAE example direction under the Laplace posterior") {
  DesignInputs in = fixtures::sae_example(1000, 1);
  auto [rec, trace] = optimize(in, 2);

  DesignInputs fixed = fixtures::sae_example(1000, 1);
  fixed.fixed_gamma = 0.6;
  auto [rec_fixed, trace_fixed] = optimize(fixed, 2);

  std::printf("  criterion 10: gamma = %.4f (< 0.595), n_b = %.0f vs "
              "fixed-gamma n_b = %.0f\n",
              rec.gamma, rec.n_b, rec_fixed.n_b);
  verdict(10, "SAE gamma below 0.595", rec.gamma < 0.595);
  verdict(10, "SAE optimized n_b below the fixed-gamma baseline",
          rec.n_b < rec_fixed.n_b);
}
