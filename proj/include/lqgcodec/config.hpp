#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lqgcodec/loop.hpp"
#include "lqgcodec/plant.hpp"

namespace lqgcodec {

// JSON experiment description:
// {
//   "plant": {"A": [[...]], "B": [[...]], "W": [[...]], "X0": [[...]],
//             "Q": [[...]], "R": [[...]], "gamma": <num>},
//   "solver": {"v": <num>},                       // optional, default 1.0
//   "sim": {"mode": "tv-si|tv-nosi|ti-si|ti-nosi",
//           "horizon": <int>, "trials": <int>, "seed": <int>,
//           "checkpoints": [..], "rollouts": <int>,
//           "mc_steps": <int>, "burnin": <int>}   // optional block
// }
struct ExperimentConfig {
  PlantModel plant;
  double v = 1.0;
  CodecMode mode = CodecMode::kTvNosi;
  long horizon = 1000;
  int trials = 1;
  std::uint64_t seed = 0;
  std::vector<long> checkpoints = {1, 5, 20, 100};
  long rollouts = 100000;
  long mc_steps = 10000000;
  long burnin = 1000;

  // Throws ConfigError with the offending field in the message.
  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig parse(const std::string& json_text);
};

}  // namespace lqgcodec
