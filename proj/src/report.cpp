#include "ocdesign/report.hpp"

#include <cstdio>
#include <fstream>

namespace ocdesign {

std::string fnv1a64_hex(const std::string& text) {
  uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

nlohmann::json recommendation_json(const DesignRecommendation& rec) {
  return nlohmann::json{
      {"n_b", rec.n_b},
      {"gamma", rec.gamma},
      {"gamma_clamped", rec.gamma_clamped},
      {"fractional", rec.fractional},
      {"power_predicted", rec.power_predicted},
      {"type1_predicted", rec.type1_predicted},
      {"monotone_ok", rec.monotone_ok},
  };
}

nlohmann::json trace_json(const OptimizerTrace& trace) {
  nlohmann::json anchors = nlohmann::json::array();
  for (const AnchorSim& a : trace.anchors) {
    anchors.push_back({{"n_b", a.n_b}, {"m", a.h1.m}});
  }
  nlohmann::json searches = nlohmann::json::array();
  for (size_t i = 0; i < trace.searches.size(); ++i) {
    nlohmann::json probes = nlohmann::json::array();
    for (const SearchProbe& p : trace.searches[i].probes) {
      probes.push_back({p.n, p.ok});
    }
    searches.push_back({
        {"target", i < trace.search_labels.size() ? trace.search_labels[i]
                                                  : "search"},
        {"n", trace.searches[i].n},
        {"monotone_ok", trace.searches[i].monotone_ok},
        {"probes", probes},
    });
  }
  return nlohmann::json{
      {"n0_init", trace.n0_init},
      {"anchors", anchors},
      {"active", {trace.active_lo, trace.active_hi}},
      {"n2", trace.n2},
      {"resimulated", trace.resimulated},
      {"m", trace.m},
      {"seed", trace.seed},
      {"searches", searches},
  };
}

nlohmann::json bootstrap_json(const BootstrapResult& boot) {
  return nlohmann::json{
      {"resamples", boot.resamples},
      {"m_star", boot.m_star},
      {"level", boot.level},
      {"infeasible", boot.infeasible_count},
      {"flagged", boot.flagged},
      {"n_ci", {boot.n_lo, boot.n_hi}},
      {"gamma_ci", {boot.gamma_lo, boot.gamma_hi}},
  };
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

void print_full(std::ofstream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

void write_sampdist_csv(const std::string& path, const SampDist& sd) {
  std::ofstream out = open_out(path);
  out << "r,theta,prob,logit\n";
  for (int r = 0; r < sd.m; ++r) {
    out << r + 1 << ',';
    print_full(out, sd.thetas[r]);
    out << ',';
    print_full(out, sd.probs[r]);
    out << ',';
    print_full(out, sd.logits[r]);
    out << '\n';
  }
}

void write_grid_csv(const std::string& path, const ContourGrid& grid) {
  std::ofstream out = open_out(path);
  out << "n,gamma,power,type1\n";
  for (int i = 0; i < grid.n_count(); ++i) {
    for (int j = 0; j < grid.gamma_count(); ++j) {
      print_full(out, grid.n_values[i]);
      out << ',';
      print_full(out, grid.gamma_values[j]);
      out << ',';
      print_full(out, grid.power_at(i, j));
      out << ',';
      print_full(out, grid.type1_at(i, j));
      out << '\n';
    }
  }
}

void write_polylines_json(const std::string& path,
                          const std::vector<LevelPolyline>& polylines) {
  nlohmann::json list = nlohmann::json::array();
  for (const LevelPolyline& pl : polylines) {
    nlohmann::json vertices = nlohmann::json::array();
    for (const auto& v : pl.vertices) {
      vertices.push_back({v[0], v[1]});
    }
    list.push_back({
        {"surface", pl.surface == SurfaceTag::kPower ? "power" : "type1"},
        {"level", pl.level},
        {"vertices", vertices},
    });
  }
  std::ofstream out = open_out(path);
  out << list.dump(2) << '\n';
}

void write_bootstrap_csv(const std::string& path, const BootstrapResult& boot) {
  std::ofstream out = open_out(path);
  out << "n,gamma\n";
  for (size_t i = 0; i < boot.n_samples.size(); ++i) {
    print_full(out, boot.n_samples[i]);
    out << ',';
    print_full(out, boot.gamma_samples[i]);
    out << '\n';
  }
}

}  // namespace ocdesign
