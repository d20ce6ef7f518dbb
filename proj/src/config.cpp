#include "lqgcodec/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "lqgcodec/errors.hpp"

namespace lqgcodec {

namespace {

using nlohmann::json;

Eigen::MatrixXd parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ConfigError(where + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd m;
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.empty())
      throw ConfigError(where + ": row " + std::to_string(r) +
                        " is not a non-empty array");
    if (r == 0) {
      cols = row.size();
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      throw ConfigError(where + ": ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        throw ConfigError(where + "[" + std::to_string(r) + "][" +
                          std::to_string(c) + "]: expected a number");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          row[c].get<double>();
    }
  }
  return m;
}

const json& require(const json& j, const std::string& k, const std::string& where) {
  auto it = j.find(k);
  if (it == j.end()) throw ConfigError(where + ": missing field \"" + k + "\"");
  return *it;
}

double number_field(const json& j, const std::string& k, const std::string& where) {
  const json& v = require(j, k, where);
  if (!v.is_number()) throw ConfigError(where + "." + k + ": expected a number");
  return v.get<double>();
}

long integer_or(const json& j, const std::string& k, long fallback,
                const std::string& where) {
  auto it = j.find(k);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer())
    throw ConfigError(where + "." + k + ": expected an integer");
  return it->get<long>();
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");

  ExperimentConfig cfg;
  const json& plant = require(root, "plant", "config");
  if (!plant.is_object()) throw ConfigError("config.plant: expected an object");
  cfg.plant.A = parse_matrix(require(plant, "A", "plant"), "plant.A");
  cfg.plant.B = parse_matrix(require(plant, "B", "plant"), "plant.B");
  cfg.plant.W = parse_matrix(require(plant, "W", "plant"), "plant.W");
  cfg.plant.X0 = parse_matrix(require(plant, "X0", "plant"), "plant.X0");
  cfg.plant.Q = parse_matrix(require(plant, "Q", "plant"), "plant.Q");
  cfg.plant.R = parse_matrix(require(plant, "R", "plant"), "plant.R");
  cfg.plant.gamma = number_field(plant, "gamma", "plant");

  if (auto it = root.find("solver"); it != root.end()) {
    if (!it->is_object()) throw ConfigError("config.solver: expected an object");
    if (auto v = it->find("v"); v != it->end()) {
      if (!v->is_number() || !(v->get<double>() > 0.0))
        throw ConfigError("config.solver.v: expected a positive number");
      cfg.v = v->get<double>();
    }
  }

  if (auto it = root.find("sim"); it != root.end()) {
    const json& sim = *it;
    if (!sim.is_object()) throw ConfigError("config.sim: expected an object");
    if (auto mj = sim.find("mode"); mj != sim.end()) {
      if (!mj->is_string()) throw ConfigError("config.sim.mode: expected a string");
      const auto mode = codec_mode_from_string(mj->get<std::string>());
      if (!mode)
        throw ConfigError("config.sim.mode: expected one of tv-si, tv-nosi, "
                          "ti-si, ti-nosi");
      cfg.mode = *mode;
    }
    cfg.horizon = integer_or(sim, "horizon", cfg.horizon, "config.sim");
    const long trials = integer_or(sim, "trials", cfg.trials, "config.sim");
    if (trials < 1 || trials > 1000000)
      throw ConfigError("config.sim.trials: out of range");
    cfg.trials = static_cast<int>(trials);
    const long seed = integer_or(sim, "seed", 0, "config.sim");
    if (sim.find("seed") != sim.end()) {
      if (seed < 0) throw ConfigError("config.sim.seed: must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(seed);
    }
    if (auto cj = sim.find("checkpoints"); cj != sim.end()) {
      if (!cj->is_array()) throw ConfigError("config.sim.checkpoints: expected an array");
      cfg.checkpoints.clear();
      for (const json& e : *cj) {
        if (!e.is_number_integer() || e.get<long>() < 1)
          throw ConfigError("config.sim.checkpoints: entries must be integers >= 1");
        cfg.checkpoints.push_back(e.get<long>());
      }
      if (cfg.checkpoints.empty())
        throw ConfigError("config.sim.checkpoints: empty");
    }
    cfg.rollouts = integer_or(sim, "rollouts", cfg.rollouts, "config.sim");
    cfg.mc_steps = integer_or(sim, "mc_steps", cfg.mc_steps, "config.sim");
    cfg.burnin = integer_or(sim, "burnin", cfg.burnin, "config.sim");
    if (cfg.horizon < 1) throw ConfigError("config.sim.horizon: must be >= 1");
    if (cfg.rollouts < 1) throw ConfigError("config.sim.rollouts: must be >= 1");
    if (cfg.mc_steps < 2) throw ConfigError("config.sim.mc_steps: must be >= 2");
    if (cfg.burnin < 0) throw ConfigError("config.sim.burnin: must be >= 0");
  }

  // Malformed numerics (asymmetry, indefiniteness, bad shapes) are schema
  // problems; NonStabilizable passes through untouched so callers can tell a
  // bad file from an out-of-scope plant.
  try {
    cfg.plant.validate();
  } catch (const NonStabilizable&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config.plant: ") + e.what());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse(buf.str());
}

}  // namespace lqgcodec
