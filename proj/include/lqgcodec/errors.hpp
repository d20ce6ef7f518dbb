#pragma once

#include <stdexcept>
#include <string>

namespace lqgcodec {

// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch broadly; the CLI maps these onto process exit codes.

// (A, B) has an uncontrollable unstable mode, or the Riccati iteration failed
// to converge to a stabilizing solution.
struct NonStabilizable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cost budget gamma is at or below the full-information floor Tr(S W).
struct InfeasibleBudget : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative numeric routine lost feasibility / failed to converge.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The optimal sensing matrix is zero (rate 0): no channel to build.
struct DegenerateChannel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Closed-loop / error-chain dynamics are not a contraction.
struct UnstableChain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bitstream does not decode under the active codebook.
struct MalformedStream : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Encoder and decoder state diverged (must never happen on a clean channel).
struct SyncLoss : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad config file: message names the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lqgcodec
