#include "ocdesign/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ocdesign/parallel.hpp"
#include "ocdesign/report.hpp"

namespace ocdesign {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

nlohmann::json proxy_check_rows() {
  nlohmann::json rows = nlohmann::json::array();
  for (const SlopeCase& sc : slope_verification_cases()) {
    const double analytic = limiting_slope(sc.pt.theta, sc.hyp, sc.pt.info);
    for (double n : {1e3, 1e4, 1e5, 1e6}) {
      const double numeric = numeric_slope(sc.pt, sc.hyp, n, n / 1000.0);
      rows.push_back({
          {"case", sc.label},
          {"n", n},
          {"numeric_slope", numeric},
          {"analytic_slope", analytic},
          {"abs_error", std::fabs(numeric - analytic)},
      });
    }
  }
  return rows;
}

}  // namespace

nlohmann::json run_to_report(const RunOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  const int threads = options.threads.value_or(default_threads());
  std::filesystem::create_directories(options.out_dir);
  const auto out_path = [&](const std::string& name) {
    return (std::filesystem::path(options.out_dir) / name).string();
  };

  nlohmann::json report{
      {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
      {"subcommand", options.subcommand},
      {"threads", threads},
  };
  nlohmann::json artifacts = nlohmann::json::object();

  if (options.subcommand == "proxy-check") {
    report["proxy_check"] = proxy_check_rows();
  } else {
    if (options.config_path.empty()) {
      throw ConfigError("subcommand '" + options.subcommand +
                        "' requires a config file");
    }
    const std::string config_text = read_file(options.config_path);
    DesignConfig cfg = parse_config_text(config_text);
    if (options.seed) cfg.seed = *options.seed;
    if (options.m) cfg.m = *options.m;
    if (options.fractional) cfg.fractional = true;
    if (options.m_star) cfg.boot_m_star = *options.m_star;
    if (options.big_m) cfg.boot_resamples = *options.big_m;

    DesignInputs inputs = build_inputs(cfg);
    if (options.fixed_gamma) inputs.fixed_gamma = *options.fixed_gamma;
    inputs.validate();

    report["seed"] = cfg.seed;
    report["config"] = {
        {"path", options.config_path},
        {"hash", fnv1a64_hex(config_text)},
        {"text", config_text},
    };

    if (options.subcommand == "simulate") {
      if (!options.n_b) {
        throw ConfigError("simulate requires --n-b");
      }
      std::cerr << "simulating m = " << cfg.m << " repetitions at n_b = "
                << *options.n_b << "\n";
      const SampDist sd1 =
          estimate(*inputs.model, inputs.hyp, inputs.psi1, 1, *options.n_b,
                   inputs.q, cfg.m, cfg.seed, 0, 0, threads);
      const SampDist sd0 =
          estimate(*inputs.model, inputs.hyp, inputs.psi0, 0, *options.n_b,
                   inputs.q, cfg.m, cfg.seed, 0, 0, threads);
      write_sampdist_csv(out_path("sampdist_h1.csv"), sd1);
      write_sampdist_csv(out_path("sampdist_h0.csv"), sd0);
      artifacts["sampdist_h1_csv"] = "sampdist_h1.csv";
      artifacts["sampdist_h0_csv"] = "sampdist_h0.csv";
      report["simulate"] = {{"n_b", *options.n_b}, {"m", cfg.m}};
    } else if (options.subcommand == "optimize" ||
               options.subcommand == "bootstrap" ||
               options.subcommand == "contour") {
      std::cerr << "optimizing (m = " << cfg.m << ", seed = " << cfg.seed
                << ", threads = " << threads << ")\n";
      auto [rec, trace] = optimize(inputs, threads);
      report["recommendation"] = recommendation_json(rec);
      report["trace"] = trace_json(trace);

      if (options.subcommand == "bootstrap") {
        const int m_star = cfg.boot_m_star > 0 ? cfg.boot_m_star : trace.m;
        std::cerr << "bootstrapping M = " << cfg.boot_resamples
                  << " resamples of size " << m_star << "\n";
        const BootstrapResult boot =
            bootstrap_cis(trace, cfg.boot_resamples, m_star, cfg.boot_level,
                          cfg.seed, threads);
        write_bootstrap_csv(out_path("bootstrap.csv"), boot);
        artifacts["bootstrap_csv"] = "bootstrap.csv";
        report["bootstrap"] = bootstrap_json(boot);
      } else if (options.subcommand == "contour") {
        ContourRanges ranges;
        ranges.n_lo = cfg.contour_n_lo;
        ranges.n_hi = cfg.contour_n_hi;
        ranges.gamma_lo = cfg.contour_gamma_lo;
        ranges.gamma_hi = cfg.contour_gamma_hi;
        ranges.gamma_steps = cfg.contour_gamma_steps;
        std::cerr << "building contour grid\n";
        const ContourGrid grid =
            build_grid(trace, rec, ranges, inputs.model->min_viable_n(),
                       threads);
        write_grid_csv(out_path("grid.csv"), grid);
        artifacts["grid_csv"] = "grid.csv";

        std::vector<LevelPolyline> polylines =
            extract_level(grid, SurfaceTag::kPower, 1.0 - inputs.beta);
        const auto type1_lines =
            extract_level(grid, SurfaceTag::kType1, inputs.alpha);
        polylines.insert(polylines.end(), type1_lines.begin(),
                         type1_lines.end());
        write_polylines_json(out_path("polylines.json"), polylines);
        artifacts["polylines_json"] = "polylines.json";

        const auto crossing =
            crossing_point(grid, 1.0 - inputs.beta, inputs.alpha);
        nlohmann::json crossing_json;
        if (crossing) {
          crossing_json = {{"n", crossing->first}, {"gamma", crossing->second}};
        }
        report["contour"] = {
            {"n_range", {grid.n_values.front(), grid.n_values.back()}},
            {"gamma_range",
             {grid.gamma_values.front(), grid.gamma_values.back()}},
            {"gamma_steps", grid.gamma_count()},
            {"crossing", crossing_json},
        };
      }
    } else {
      throw ConfigError("unknown subcommand '" + options.subcommand + "'");
    }
  }

  const auto t_end = std::chrono::steady_clock::now();
  report["timing_seconds"] =
      std::chrono::duration<double>(t_end - t_start).count();
  report["artifacts"] = artifacts;

  std::ofstream out(out_path("report.json"), std::ios::binary);
  if (!out) {
    throw ConfigError("cannot write report.json under " + options.out_dir);
  }
  out << report.dump(2) << '\n';
  return report;
}

int run(const RunOptions& options) {
  try {
    const nlohmann::json report = run_to_report(options);
    if (options.subcommand == "proxy-check") {
      std::printf("%-34s %10s %15s %15s %12s\n", "case", "n", "numeric",
                  "analytic", "abs_error");
      for (const auto& row : report.at("proxy_check")) {
        std::printf("%-34s %10.0f %15.8f %15.8f %12.3e\n",
                    row.at("case").get<std::string>().c_str(),
                    row.at("n").get<double>(),
                    row.at("numeric_slope").get<double>(),
                    row.at("analytic_slope").get<double>(),
                    row.at("abs_error").get<double>());
      }
    } else {
      std::cout << report.dump(2) << std::endl;
    }
    return 0;
  } catch (const ConfigError& err) {
    std::cout << nlohmann::json{
                     {"error", {{"type", "config"}, {"message", err.what()}}}}
                     .dump(2)
              << std::endl;
    return 1;
  } catch (const ArgumentError& err) {
    std::cout << nlohmann::json{
                     {"error", {{"type", "argument"}, {"message", err.what()}}}}
                     .dump(2)
              << std::endl;
    return 1;
  } catch (const InfeasibleError& err) {
    std::cout << nlohmann::json{{"error",
                                 {{"type", "infeasible"},
                                  {"message", err.what()}}}}
                     .dump(2)
              << std::endl;
    return 2;
  } catch (const std::exception& err) {
    std::cout << nlohmann::json{{"error",
                                 {{"type", "numerical"},
                                  {"message", err.what()}}}}
                     .dump(2)
              << std::endl;
    return 3;
  }
}

}  // namespace ocdesign
