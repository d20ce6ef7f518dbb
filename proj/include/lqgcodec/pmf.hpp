#pragma once

#include <cstdint>
#include <vector>

namespace lqgcodec {

// Finite probability table over integer lattice cells, plus the mass of
// everything the table does not list. probs align with cells; cells strictly
// ascending; probs + escape_mass sum to 1 within 1e-12.
struct FinitePmf {
  std::vector<std::int64_t> cells;
  std::vector<double> probs;
  double escape_mass = 0.0;

  void validate() const;  // throws std::invalid_argument naming the defect

  // -sum p log2 p, escape mass counted as one pseudo-symbol when positive.
  double entropy_bits() const;

  // Probability of a symbol; unlisted symbols report escape_mass.
  double prob_of(std::int64_t cell) const;
};

}  // namespace lqgcodec
