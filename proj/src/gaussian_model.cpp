#include "lqgcodec/gaussian_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lqgcodec {
namespace {

// Listed cells keep each discarded tail below 2^-41, so the escape mass of a
// model PMF stays under 2^-40.
constexpr double kTailMass = 0x1.0p-41;
// Pushing escape below 2^-50 is numerically meaningless; keep a floor so a
// tail symbol in a very long run still has an encodable escape path.
constexpr double kEscapeFloor = 0x1.0p-50;

// Reach (in sigmas) with Q(x) < 2^-41: Q(7.5) ~ 3e-14.
constexpr double kReachSigmas = 7.5;

void finalize_escape(std::vector<std::int64_t>& cells, std::vector<double>& probs,
                     FinitePmf& pmf) {
  double total = 0.0;
  for (double p : probs) total += p;
  double escape = 1.0 - total;
  if (escape < kEscapeFloor) {
    // Rescale listed mass down a hair so escape keeps a usable floor.
    const double scale = (1.0 - kEscapeFloor) / total;
    for (double& p : probs) p *= scale;
    escape = kEscapeFloor;
  }
  pmf.cells = std::move(cells);
  pmf.probs = std::move(probs);
  pmf.escape_mass = escape;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

FinitePmf gaussian_conditional_pmf(double sigma2, double d, double delta) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("gaussian_conditional_pmf: sigma2 <= 0");
  if (!(delta > 0.0)) throw std::invalid_argument("gaussian_conditional_pmf: delta <= 0");
  const double sigma = std::sqrt(sigma2);
  const double reach = kReachSigmas * sigma;
  auto kmin = static_cast<std::int64_t>(std::floor((d - reach) / delta)) - 1;
  auto kmax = static_cast<std::int64_t>(std::ceil((d + reach) / delta)) + 1;
  // Expand until the discarded tails are individually below threshold.
  while (normal_cdf((kmin * delta - delta / 2 - d) / sigma) >= kTailMass) --kmin;
  while (normal_cdf(-(kmax * delta + delta / 2 - d) / sigma) >= kTailMass) ++kmax;

  std::vector<std::int64_t> cells;
  std::vector<double> probs;
  for (std::int64_t k = kmin; k <= kmax; ++k) {
    const double lo = (static_cast<double>(k) * delta - delta / 2 - d) / sigma;
    const double hi = (static_cast<double>(k) * delta + delta / 2 - d) / sigma;
    const double p = normal_cdf(hi) - normal_cdf(lo);
    if (p > 0.0) {
      cells.push_back(k);
      probs.push_back(p);
    }
  }
  FinitePmf pmf;
  finalize_escape(cells, probs, pmf);
  pmf.validate();
  return pmf;
}

FinitePmf gaussian_marginal_pmf(double sigma2, double delta) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("gaussian_marginal_pmf: sigma2 <= 0");
  if (!(delta > 0.0)) throw std::invalid_argument("gaussian_marginal_pmf: delta <= 0");
  const double sigma = std::sqrt(sigma2);
  // psi is the antiderivative of the normal CDF; integrating the cell
  // probability over the dither gives a second difference of psi.
  auto psi = [](double x) { return x * normal_cdf(x) + normal_pdf(x); };
  auto cell_prob = [&](std::int64_t k) {
    const double u = static_cast<double>(k) * delta / sigma;
    const double step = delta / sigma;
    return (sigma / delta) * (psi(u + step) - 2.0 * psi(u) + psi(u - step));
  };

  auto kmax = static_cast<std::int64_t>(
                  std::ceil((kReachSigmas * sigma + delta) / delta)) +
              1;
  while (normal_cdf(-((kmax - 1) * delta - delta / 2) / sigma) >= kTailMass) ++kmax;

  // Evaluate k >= 0 and mirror so the table is symmetric bit-for-bit.
  std::vector<std::int64_t> cells;
  std::vector<double> probs;
  for (std::int64_t k = -kmax; k <= kmax; ++k) {
    const double p = cell_prob(std::llabs(k));
    if (p > 0.0) {
      cells.push_back(k);
      probs.push_back(p);
    }
  }
  FinitePmf pmf;
  finalize_escape(cells, probs, pmf);
  pmf.validate();
  return pmf;
}

double gaussian_conditional_entropy_bits(double sigma2, double delta,
                                         int grid_points) {
  if (grid_points < 1)
    throw std::invalid_argument("gaussian_conditional_entropy_bits: empty grid");
  double acc = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    const double d = (-0.5 + (i + 0.5) / grid_points) * delta;
    acc += gaussian_conditional_pmf(sigma2, d, delta).entropy_bits();
  }
  return acc / grid_points;
}

}  // namespace lqgcodec
