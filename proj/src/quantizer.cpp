#include "lqgcodec/quantizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lqgcodec/errors.hpp"

namespace lqgcodec {

std::int64_t quantize_scalar(double x, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("quantize: delta must be > 0");
  if (!std::isfinite(x)) throw NumericalFailure("quantize: non-finite input");
  // Half-open cells [k*delta - delta/2, k*delta + delta/2): floor keeps the
  // lower edge inclusive.
  const double k = std::floor(x / delta + 0.5);
  if (!(std::fabs(k) < 9.0e18)) {
    throw NumericalFailure("quantize: cell index " + std::to_string(k) +
                           " exceeds the integer range");
  }
  return static_cast<std::int64_t>(k);
}

QuantizedVector quantize(const Eigen::VectorXd& x, double delta) {
  QuantizedVector q;
  q.cells.resize(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i)
    q.cells[static_cast<std::size_t>(i)] = quantize_scalar(x[i], delta);
  return q;
}

DitheredSample dither_quantize(const Eigen::VectorXd& z,
                               const Eigen::VectorXd& d, double delta) {
  if (z.size() != d.size())
    throw std::invalid_argument("dither_quantize: z/d dimension mismatch");
  DitheredSample s;
  s.q = quantize(z + d, delta);
  s.qtilde = s.q.values(delta) - d;
  s.recon_error = s.qtilde - z;
  return s;
}

double space_filling_bits() { return 0.5 * std::log2(2.0 * M_PI * M_E / 12.0); }

}  // namespace lqgcodec
