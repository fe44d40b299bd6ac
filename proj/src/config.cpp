#include "ocdesign/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ocdesign/math.hpp"
#include "ocdesign/toml.hpp"

namespace ocdesign {

namespace {

class SchemaReader {
 public:
  explicit SchemaReader(const toml::Table& table) : table_(table) {}

  bool has(const std::string& key) {
    return table_.find(key) != nullptr;
  }

  const toml::Value& require(const std::string& key) {
    const toml::Value* v = table_.find(key);
    if (!v) throw ConfigError("missing required config key '" + key + "'");
    consumed_.insert(key);
    return *v;
  }

  const toml::Value* optional(const std::string& key) {
    const toml::Value* v = table_.find(key);
    if (v) consumed_.insert(key);
    return v;
  }

  double number(const std::string& key) {
    const toml::Value& v = require(key);
    if (!v.is_number()) {
      throw ConfigError("config key '" + key + "' must be a number");
    }
    return v.as_number();
  }

  double number_or(const std::string& key, double fallback) {
    const toml::Value* v = optional(key);
    if (!v) return fallback;
    if (!v->is_number()) {
      throw ConfigError("config key '" + key + "' must be a number");
    }
    return v->as_number();
  }

  long long integer(const std::string& key) {
    const toml::Value& v = require(key);
    if (v.kind != toml::Value::Kind::kInteger) {
      throw ConfigError("config key '" + key + "' must be an integer");
    }
    return v.integer;
  }

  long long integer_or(const std::string& key, long long fallback) {
    const toml::Value* v = optional(key);
    if (!v) return fallback;
    if (v->kind != toml::Value::Kind::kInteger) {
      throw ConfigError("config key '" + key + "' must be an integer");
    }
    return v->integer;
  }

  bool boolean_or(const std::string& key, bool fallback) {
    const toml::Value* v = optional(key);
    if (!v) return fallback;
    if (v->kind != toml::Value::Kind::kBool) {
      throw ConfigError("config key '" + key + "' must be a boolean");
    }
    return v->boolean;
  }

  std::string text(const std::string& key) {
    const toml::Value& v = require(key);
    if (v.kind != toml::Value::Kind::kString) {
      throw ConfigError("config key '" + key + "' must be a string");
    }
    return v.str;
  }

  std::string text_or(const std::string& key, const std::string& fallback) {
    const toml::Value* v = optional(key);
    if (!v) return fallback;
    if (v->kind != toml::Value::Kind::kString) {
      throw ConfigError("config key '" + key + "' must be a string");
    }
    return v->str;
  }

  std::vector<double> number_array(const std::string& key, int expected) {
    const toml::Value& v = require(key);
    if (v.kind != toml::Value::Kind::kArray) {
      throw ConfigError("config key '" + key + "' must be an array");
    }
    std::vector<double> out;
    for (const toml::Value& item : v.array) {
      if (!item.is_number()) {
        throw ConfigError("config key '" + key + "' must hold numbers only");
      }
      out.push_back(item.as_number());
    }
    if (expected > 0 && static_cast<int>(out.size()) != expected) {
      throw ConfigError("config key '" + key + "' must have " +
                        std::to_string(expected) + " entries");
    }
    return out;
  }

  // "inf"/"-inf" string tokens or a plain number.
  double endpoint(const std::string& key) {
    const toml::Value& v = require(key);
    if (v.kind == toml::Value::Kind::kString) {
      if (v.str == "inf" || v.str == "+inf") {
        return std::numeric_limits<double>::infinity();
      }
      if (v.str == "-inf") {
        return -std::numeric_limits<double>::infinity();
      }
      throw ConfigError("config key '" + key +
                        "': expected a number or \"inf\"/\"-inf\"");
    }
    if (!v.is_number()) {
      throw ConfigError("config key '" + key + "' must be a number");
    }
    return v.as_number();
  }

  void reject_unknown() const {
    for (const std::string& key : table_.keys()) {
      if (!consumed_.count(key)) {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  }

 private:
  const toml::Table& table_;
  std::set<std::string> consumed_;
};

PsiConfig read_psi(SchemaReader& reader, const std::string& section) {
  PsiConfig psi;
  psi.eta = reader.number_array(section + ".eta", 0);
  const toml::Value* comp = reader.optional(section + ".uniform_component");
  const toml::Value* range = reader.optional(section + ".uniform_range");
  if ((comp == nullptr) != (range == nullptr)) {
    throw ConfigError(section +
                      ": uniform_component and uniform_range go together");
  }
  if (comp) {
    if (comp->kind != toml::Value::Kind::kInteger) {
      throw ConfigError(section + ".uniform_component must be an integer");
    }
    psi.uniform_component = static_cast<int>(comp->integer);
    if (range->kind != toml::Value::Kind::kArray || range->array.size() != 2 ||
        !range->array[0].is_number() || !range->array[1].is_number()) {
      throw ConfigError(section + ".uniform_range must be [lo, hi]");
    }
    psi.uniform_lo = range->array[0].as_number();
    psi.uniform_hi = range->array[1].as_number();
  }
  return psi;
}

}  // namespace

DesignConfig parse_config_text(const std::string& text) {
  const toml::Table table = toml::parse_string(text);
  SchemaReader reader(table);
  DesignConfig cfg;

  cfg.model_id = reader.text("model.id");
  if (cfg.model_id == "normal-mean") {
    cfg.toy_sigma = reader.number("model.sigma");
    cfg.toy_prior = reader.text_or("model.prior", "flat");
    if (cfg.toy_prior == "normal") {
      cfg.toy_prior_mean = reader.number("model.prior_mean");
      cfg.toy_prior_sd = reader.number("model.prior_sd");
    } else if (cfg.toy_prior != "flat") {
      throw ConfigError("model.prior must be \"flat\" or \"normal\"");
    }
  } else if (cfg.model_id == "gaussian-regression") {
    cfg.reg_prior_mean = reader.number_array("model.prior_mean", 3);
    cfg.reg_prior_precision = reader.number("model.prior_precision");
    cfg.reg_prior_a = reader.number("model.prior_a");
    cfg.reg_prior_b = reader.number("model.prior_b");
    cfg.covariate_mean = reader.number("model.covariate_mean");
    cfg.covariate_sd = reader.number("model.covariate_sd");
    cfg.error_sd = reader.number("model.error_sd");
  } else if (cfg.model_id == "logistic-regression") {
    cfg.logit_prior_mean = reader.number_array("model.prior_mean", 3);
    cfg.logit_prior_sd = reader.number_array("model.prior_sd", 3);
    cfg.covariate_mean = reader.number("model.covariate_mean");
    cfg.covariate_sd = reader.number("model.covariate_sd");
  } else {
    throw ConfigError("unknown model.id '" + cfg.model_id + "'");
  }

  cfg.delta_lower = reader.endpoint("hypothesis.lower");
  cfg.delta_upper = reader.endpoint("hypothesis.upper");

  cfg.psi0 = read_psi(reader, "psi0");
  cfg.psi1 = read_psi(reader, "psi1");

  cfg.alpha = reader.number("design.alpha");
  cfg.beta = reader.number("design.beta");
  cfg.q = reader.number_or("design.q", 1.0);
  cfg.m = static_cast<int>(reader.integer("design.m"));
  cfg.seed = static_cast<uint64_t>(reader.integer_or("design.seed", 1));
  cfg.subgroups = static_cast<int>(reader.integer_or("design.subgroups", 10));
  cfg.fractional = reader.boolean_or("design.fractional", false);
  cfg.resimulate = reader.boolean_or("design.resimulate", true);
  cfg.resim_threshold = reader.number_or("design.resim_threshold", 0.5);

  cfg.boot_resamples =
      static_cast<int>(reader.integer_or("bootstrap.resamples", 1000));
  cfg.boot_m_star = static_cast<int>(reader.integer_or("bootstrap.m_star", 0));
  cfg.boot_level = reader.number_or("bootstrap.level", 0.95);

  cfg.contour_n_lo = reader.number_or("contour.n_lo", 0.0);
  cfg.contour_n_hi = reader.number_or("contour.n_hi", 0.0);
  cfg.contour_gamma_lo = reader.number_or("contour.gamma_lo", 0.0);
  cfg.contour_gamma_hi = reader.number_or("contour.gamma_hi", 0.0);
  cfg.contour_gamma_steps =
      static_cast<int>(reader.integer_or("contour.gamma_steps", 200));

  reader.reject_unknown();

  // Constraint checks with the offending key in the message.
  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0)) {
    throw ConfigError("design.alpha must lie strictly between 0 and 1");
  }
  if (!(cfg.beta > 0.0) || !(cfg.beta < 1.0)) {
    throw ConfigError("design.beta must lie strictly between 0 and 1");
  }
  if (!(cfg.q > 0.0)) throw ConfigError("design.q must be positive");
  if (cfg.m < 1) throw ConfigError("design.m must be >= 1");
  if (guarded_floor(cfg.m * cfg.beta) < 1) {
    throw ConfigError("design.m too small: floor(m*beta) must be >= 1");
  }
  if (cfg.subgroups < 1) throw ConfigError("design.subgroups must be >= 1");
  if (cfg.boot_resamples < 1) {
    throw ConfigError("bootstrap.resamples must be >= 1");
  }
  if (!(cfg.boot_level > 0.0) || !(cfg.boot_level < 1.0)) {
    throw ConfigError("bootstrap.level must lie strictly between 0 and 1");
  }
  if (cfg.boot_m_star < 0) throw ConfigError("bootstrap.m_star must be >= 0");
  if (cfg.contour_gamma_steps < 2) {
    throw ConfigError("contour.gamma_steps must be >= 2");
  }
  return cfg;
}

DesignConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

DesignInputs build_inputs(const DesignConfig& cfg) {
  DesignInputs inputs;
  if (cfg.model_id == "normal-mean") {
    ToyNormalConfig mc;
    mc.sigma = cfg.toy_sigma;
    mc.flat_prior = cfg.toy_prior == "flat";
    mc.prior_mean = cfg.toy_prior_mean;
    mc.prior_sd = cfg.toy_prior_sd;
    inputs.model = make_toy_normal_model(mc);
  } else if (cfg.model_id == "gaussian-regression") {
    GaussianRegressionConfig mc;
    mc.prior_mean = Eigen::Vector3d(cfg.reg_prior_mean[0],
                                    cfg.reg_prior_mean[1],
                                    cfg.reg_prior_mean[2]);
    mc.prior_precision = cfg.reg_prior_precision;
    mc.prior_a = cfg.reg_prior_a;
    mc.prior_b = cfg.reg_prior_b;
    mc.covariate_mean = cfg.covariate_mean;
    mc.covariate_sd = cfg.covariate_sd;
    mc.error_sd = cfg.error_sd;
    inputs.model = make_gaussian_regression_model(mc);
  } else if (cfg.model_id == "logistic-regression") {
    LogisticRegressionConfig mc;
    mc.prior_mean = Eigen::Vector3d(cfg.logit_prior_mean[0],
                                    cfg.logit_prior_mean[1],
                                    cfg.logit_prior_mean[2]);
    mc.prior_sd = Eigen::Vector3d(cfg.logit_prior_sd[0], cfg.logit_prior_sd[1],
                                  cfg.logit_prior_sd[2]);
    mc.covariate_mean = cfg.covariate_mean;
    mc.covariate_sd = cfg.covariate_sd;
    inputs.model = make_logistic_regression_model(mc);
  } else {
    throw ConfigError("unknown model.id '" + cfg.model_id + "'");
  }

  inputs.hyp.lower = cfg.delta_lower;
  inputs.hyp.upper = cfg.delta_upper;

  auto to_psi = [](const PsiConfig& pc) {
    DataGenProcess psi;
    psi.eta = Eigen::Map<const Eigen::VectorXd>(pc.eta.data(),
                                                static_cast<long>(pc.eta.size()));
    psi.uniform_component = pc.uniform_component;
    psi.uniform_lo = pc.uniform_lo;
    psi.uniform_hi = pc.uniform_hi;
    return psi;
  };
  inputs.psi0 = to_psi(cfg.psi0);
  inputs.psi1 = to_psi(cfg.psi1);

  inputs.alpha = cfg.alpha;
  inputs.beta = cfg.beta;
  inputs.q = cfg.q;
  inputs.m = cfg.m;
  inputs.seed = cfg.seed;
  inputs.subgroups = cfg.subgroups;
  inputs.fractional = cfg.fractional;
  inputs.resimulate = cfg.resimulate;
  inputs.resim_threshold = cfg.resim_threshold;

  inputs.validate();
  return inputs;
}

}  // namespace ocdesign
