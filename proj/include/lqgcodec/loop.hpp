#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lqgcodec/plant.hpp"
#include "lqgcodec/rate_distortion.hpp"

namespace lqgcodec {

// Who models the symbol law, and whether the coder conditions on the dither.
//   tv-si   : per-step Gaussian innovation model, dither-conditioned (sorted)
//   tv-nosi : per-step Gaussian marginal model, dither ignored (sorted)
//   ti-si   : fixed invariant-density conditional model (Fano), m = 1
//   ti-nosi : fixed invariant-density marginal codebook (sorted), m = 1
enum class CodecMode { kTvSi, kTvNosi, kTiSi, kTiNosi };

const char* to_string(CodecMode m);
std::optional<CodecMode> codec_mode_from_string(const std::string& s);

struct LoopConfig {
  PlantModel plant;
  RdfSolution rdf;
  CodecMode mode = CodecMode::kTvNosi;
  long horizon = 1000;
  int trials = 1;
  std::uint64_t seed = 0;
  bool record_trace = false;  // trial 0 only

  void validate() const;
};

struct LoopStep {
  long t = 0;
  Eigen::VectorXd x;                 // plant state x_t
  Eigen::VectorXd u;                 // input u_t
  std::vector<std::int64_t> cells;   // transmitted q_t
  int bits = 0;                      // codeword bits this step
  double cost = 0.0;                 // |x_{t+1}|_Q^2 + |u_t|_R^2
};

struct LoopTrace {
  std::vector<LoopStep> steps;
};

struct LoopSummary {
  double avg_cost = 0.0;       // mean over trials of time-averaged stage cost
  double avg_bits = 0.0;       // mean over trials of bits/step
  double bound_bits = 0.0;     // codeword-length bound for the configured mode
  double rate_lower = 0.0;     // directed-information lower bound (bits/step)
  double avg_ideal_bits = 0.0; // time-average of -log2 P_model[q_t]
  double cost_stderr = 0.0;    // MC standard error of avg_cost
  bool sync_ok = false;
  bool cost_pass = false;      // avg_cost <= gamma + 4*stderr
  bool bits_pass = false;      // avg_bits <= bound_bits
  int trials = 0;
  long horizon = 0;
};

struct LoopResult {
  LoopSummary summary;
  std::optional<LoopTrace> trace;
};

// Runs encoder and decoder in bit-exact lockstep over a clean binary channel;
// throws SyncLoss if their reconstructions ever part ways.
LoopResult run_loop(const LoopConfig& cfg);

// Expected codeword-length budget (bits/step) for a mode at rate R when m
// components are streamed per step, each as its own prefix codeword.
double mode_bound_bits(CodecMode mode, double rate, int m);

}  // namespace lqgcodec
