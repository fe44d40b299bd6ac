#include <CLI11.hpp>

#include "ocdesign/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Sample size and critical value determination for posterior analyses"};
  app.require_subcommand(1);

  ocdesign::RunOptions options;
  uint64_t seed = 0;
  int m = 0, threads = 0, m_star = 0, big_m = 0, n_b = 0;
  double fixed_gamma = 0.0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) {
      sub->add_option("config", options.config_path, "TOML design config")
          ->required()
          ->check(CLI::ExistingFile);
    }
    sub->add_option("--seed", seed, "root seed override");
    sub->add_option("--m", m, "simulation repetition override");
    sub->add_option("--out", options.out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads");
    return sub;
  };

  CLI::App* optimize = add_common(
      app.add_subcommand("optimize", "find the optimal (n, gamma)"), true);
  optimize->add_flag("--fractional-n", options.fractional,
                     "search n to the nearest hundredth");
  optimize->add_option("--fixed-gamma", fixed_gamma,
                       "sample-size-only comparison mode at this gamma");

  CLI::App* bootstrap = add_common(
      app.add_subcommand("bootstrap",
                         "optimize plus percentile bootstrap intervals"),
      true);
  bootstrap->add_flag("--fractional-n", options.fractional,
                      "search n to the nearest hundredth");
  bootstrap->add_option("--fixed-gamma", fixed_gamma,
                        "sample-size-only comparison mode at this gamma");
  bootstrap->add_option("--m-star", m_star, "bootstrap resample size");
  bootstrap->add_option("--big-m", big_m, "bootstrap resample count");

  CLI::App* contour = add_common(
      app.add_subcommand("contour",
                         "power and type-I surfaces over an (n, gamma) grid"),
      true);
  contour->add_flag("--fractional-n", options.fractional,
                    "search n to the nearest hundredth");

  CLI::App* simulate = add_common(
      app.add_subcommand("simulate",
                         "estimate both sampling distributions at one size"),
      true);
  simulate->add_option("--n-b", n_b, "sample size to simulate at")->required();

  add_common(app.add_subcommand(
                 "proxy-check",
                 "numeric verification of the limiting logit slopes"),
             false);

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  options.subcommand = sub->get_name();
  const auto given = [sub](const std::string& name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--seed")) options.seed = seed;
  if (given("--m")) options.m = m;
  if (given("--threads")) options.threads = threads;
  if (given("--fixed-gamma")) options.fixed_gamma = fixed_gamma;
  if (given("--m-star")) options.m_star = m_star;
  if (given("--big-m")) options.big_m = big_m;
  if (given("--n-b")) options.n_b = n_b;

  return ocdesign::run(options);
}
