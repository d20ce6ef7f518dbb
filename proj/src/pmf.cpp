#include "lqgcodec/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lqgcodec {

void FinitePmf::validate() const {
  if (cells.size() != probs.size())
    throw std::invalid_argument("FinitePmf: cells/probs size mismatch");
  if (cells.empty()) throw std::invalid_argument("FinitePmf: empty table");
  double total = escape_mass;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0 && cells[i] <= cells[i - 1])
      throw std::invalid_argument("FinitePmf: cells not strictly ascending at index " +
                                  std::to_string(i));
    if (!(probs[i] > 0.0))
      throw std::invalid_argument("FinitePmf: non-positive prob at cell " +
                                  std::to_string(cells[i]));
    total += probs[i];
  }
  if (!(escape_mass >= 0.0))
    throw std::invalid_argument("FinitePmf: negative escape mass");
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("FinitePmf: mass sums to " + std::to_string(total) +
                                ", expected 1 within 1e-12");
}

double FinitePmf::entropy_bits() const {
  double h = 0.0;
  for (double p : probs) h -= p * std::log2(p);
  if (escape_mass > 0.0) h -= escape_mass * std::log2(escape_mass);
  return h;
}

double FinitePmf::prob_of(std::int64_t cell) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), cell);
  if (it != cells.end() && *it == cell)
    return probs[static_cast<std::size_t>(it - cells.begin())];
  return escape_mass;
}

}  // namespace lqgcodec
