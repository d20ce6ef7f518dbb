#pragma once

#include <cstdint>
#include <string>

#include "lqgcodec/pmf.hpp"

namespace lqgcodec {

// Self-diagnostic sweep over generated symbol tables: builds both code kinds
// for each PMF, checks prefix-freeness, Kraft, and the enumerated length
// bounds, then round-trips random symbol streams (escape paths included).
struct CodecCheckReport {
  int pmfs = 0;
  long streams = 0;
  long symbols = 0;
  bool prefix_free = true;
  bool kraft_ok = true;
  bool shannon_bound_ok = true;  // H <= E[len] <= H + 1
  bool fano_bound_ok = true;     // H <= E[len] <= H + 2
  long mismatches = 0;           // decoded symbol != encoded symbol
  long misaligned = 0;           // stream not fully/cleanly consumed
  std::string first_failure;     // empty when everything passed

  bool all_ok() const {
    return prefix_free && kraft_ok && shannon_bound_ok && fano_bound_ok &&
           mismatches == 0 && misaligned == 0;
  }
};

// PMF families cycle dyadic / geometric-truncated / random-weights; the
// geometric family always carries escape mass, the random family alternates.
FinitePmf generated_pmf(int index, std::uint64_t seed);

CodecCheckReport run_codec_checks(int n_pmfs, long streams_per_pmf,
                                  std::uint64_t seed);

}  // namespace lqgcodec
