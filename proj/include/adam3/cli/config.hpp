#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "adam3/errors.hpp"
#include "adam3/games.hpp"
#include "adam3/runner.hpp"
#include "adam3/types.hpp"

namespace adam3::cli {

struct GameConfig {
  enum class Kind { quadratic, bilinear };
  Kind kind = Kind::quadratic;
  QuadraticGameParams quadratic;
  double bilinear_scale = 1.0;
};

struct OutputConfig {
  std::string dir = ".";
  std::string trace = "trace.csv";
  std::string meta = "run.meta.json";
  std::string plot;  ///< empty disables the plot
};

/// A fully resolved experiment. Defaults mirror the reference synthetic
/// setup: quadratic game with c = 1010, k = 0.01, eta = 1e-2, beta1 = 0,
/// beta2 = 1 / (1 + c^2), beta3 = 0.1, batch 1, 1e7 iterations. An omitted
/// beta2 resolves to 1 / (1 + c^2) for the quadratic game and 0.9 otherwise.
struct ExperimentConfig {
  GameConfig game;
  Method method = Method::adam3;
  HyperParams hp;
  std::uint64_t seed = 1;
  std::uint64_t trace_stride = 1000;
  OutputConfig outputs;
};

inline GameSpec build_game(const GameConfig& gc) {
  if (gc.kind == GameConfig::Kind::quadratic) return quadratic_game(gc.quadratic);
  return bilinear_game(gc.bilinear_scale);
}

namespace detail {

inline void position_of(const std::string& text, std::size_t byte, std::size_t& line,
                        std::size_t& column) {
  line = 1;
  column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw config_error(std::string("config field '") + key + "': " + e.what());
    }
  }
}

}  // namespace detail

inline Method method_from_string(const std::string& s) {
  if (s == "adam3") return Method::adam3;
  if (s == "sadam") return Method::sadam;
  if (s == "oadagrad") return Method::oadagrad;
  throw config_error("unknown method '" + s + "' (expected adam3, sadam or oadagrad)");
}

/// Parses a config from JSON text. Unknown keys are ignored so run metadata
/// files can be fed back in as configs. Throws parse_error with a 1-based
/// line/column for malformed JSON and config_error for invalid values.
inline ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    detail::position_of(text, e.byte > 0 ? e.byte - 1 : 0, line, column);
    throw parse_error(e.what(), line, column);
  }
  if (!j.is_object()) throw config_error("config root must be a JSON object");

  ExperimentConfig cfg;

  if (auto it = j.find("game"); it != j.end()) {
    const nlohmann::json& g = *it;
    std::string type = "quadratic";
    detail::read_field(g, "type", type);
    if (type == "quadratic") {
      cfg.game.kind = GameConfig::Kind::quadratic;
      detail::read_field(g, "c", cfg.game.quadratic.c);
      detail::read_field(g, "k", cfg.game.quadratic.k_coupling);
    } else if (type == "bilinear") {
      cfg.game.kind = GameConfig::Kind::bilinear;
      detail::read_field(g, "scale", cfg.game.bilinear_scale);
    } else {
      throw config_error("unknown game type '" + type + "'");
    }
  }

  if (auto it = j.find("method"); it != j.end())
    cfg.method = method_from_string(it->get<std::string>());

  bool beta2_given = false;
  cfg.hp.beta1_1 = 0.0;
  cfg.hp.beta3 = 0.1;
  cfg.hp.eps_guard = 1e-8;
  if (auto it = j.find("hp"); it != j.end()) {
    const nlohmann::json& h = *it;
    detail::read_field(h, "eta", cfg.hp.eta);
    detail::read_field(h, "beta1_1", cfg.hp.beta1_1);
    detail::read_field(h, "kappa", cfg.hp.kappa);
    if (h.contains("beta2")) {
      beta2_given = true;
      detail::read_field(h, "beta2", cfg.hp.beta2);
    }
    detail::read_field(h, "beta3", cfg.hp.beta3);
    detail::read_field(h, "batch_m", cfg.hp.batch_m);
    detail::read_field(h, "n_iters", cfg.hp.n_iters);
    detail::read_field(h, "eps_guard", cfg.hp.eps_guard);
    detail::read_field(h, "v0_init", cfg.hp.v0_init);
  }
  if (!beta2_given) {
    if (cfg.game.kind == GameConfig::Kind::quadratic) {
      const double c = cfg.game.quadratic.c;
      cfg.hp.beta2 = 1.0 / (1.0 + c * c);
    } else {
      cfg.hp.beta2 = 0.9;
    }
  }

  detail::read_field(j, "seed", cfg.seed);
  detail::read_field(j, "trace_stride", cfg.trace_stride);
  if (cfg.trace_stride == 0) throw config_error("trace_stride must be >= 1");

  if (auto it = j.find("outputs"); it != j.end()) {
    const nlohmann::json& o = *it;
    detail::read_field(o, "dir", cfg.outputs.dir);
    detail::read_field(o, "trace", cfg.outputs.trace);
    detail::read_field(o, "meta", cfg.outputs.meta);
    detail::read_field(o, "plot", cfg.outputs.plot);
  }

  if (cfg.game.kind == GameConfig::Kind::quadratic) validate(cfg.game.quadratic);
  if (cfg.game.kind == GameConfig::Kind::bilinear && cfg.game.bilinear_scale == 0.0)
    throw config_error("bilinear scale must be nonzero");
  validate(cfg.hp);
  return cfg;
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  if (cfg.game.kind == GameConfig::Kind::quadratic) {
    j["game"] = {{"type", "quadratic"},
                 {"c", cfg.game.quadratic.c},
                 {"k", cfg.game.quadratic.k_coupling}};
  } else {
    j["game"] = {{"type", "bilinear"}, {"scale", cfg.game.bilinear_scale}};
  }
  j["method"] = method_name(cfg.method);
  j["hp"] = {{"eta", cfg.hp.eta},           {"beta1_1", cfg.hp.beta1_1},
             {"kappa", cfg.hp.kappa},       {"beta2", cfg.hp.beta2},
             {"beta3", cfg.hp.beta3},       {"batch_m", cfg.hp.batch_m},
             {"n_iters", cfg.hp.n_iters},   {"eps_guard", cfg.hp.eps_guard},
             {"v0_init", cfg.hp.v0_init}};
  j["seed"] = cfg.seed;
  j["trace_stride"] = cfg.trace_stride;
  j["outputs"] = {{"dir", cfg.outputs.dir},
                  {"trace", cfg.outputs.trace},
                  {"meta", cfg.outputs.meta},
                  {"plot", cfg.outputs.plot}};
  return j;
}

}  // namespace adam3::cli
