#include "lqgcodec/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lqgcodec/errors.hpp"
#include "lqgcodec/gaussian_model.hpp"

namespace lqgcodec {

double DensityGrid::total_mass() const {
  double s = 0.0, c = 0.0;
  for (double m : mass) {  // Kahan; cell masses span many magnitudes
    const double y = m - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double DensityGrid::mean() const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += mass[static_cast<std::size_t>(i)] * center(i);
  return s;
}

double DensityGrid::variance() const {
  const double mu = mean();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = center(i) - mu;
    s += mass[static_cast<std::size_t>(i)] * d * d;
  }
  // Within-cell spread of the piecewise-constant density.
  return s + h() * h() / 12.0 * total_mass();
}

double DensityGrid::cdf(double x) const {
  if (x <= lo) return 0.0;
  if (x >= hi) return total_mass();
  const double pos = (x - lo) / h();
  const int cell = std::min(static_cast<int>(pos), n - 1);
  double acc = 0.0;
  for (int i = 0; i < cell; ++i) acc += mass[static_cast<std::size_t>(i)];
  return acc + mass[static_cast<std::size_t>(cell)] * (pos - cell);
}

void DensityGrid::normalize() {
  const double total = total_mass();
  if (!(total > 1e-300)) throw NumericalFailure("DensityGrid: vanishing mass");
  for (double& m : mass) m /= total;
}

DensityGrid DensityGrid::from_gaussian(double variance, double lo, double hi,
                                       int n) {
  if (!(variance > 0.0))
    throw std::invalid_argument("from_gaussian: variance must be > 0");
  DensityGrid g;
  g.lo = lo;
  g.hi = hi;
  g.n = n;
  g.mass.resize(static_cast<std::size_t>(n));
  const double sigma = std::sqrt(variance);
  double prev = normal_cdf(lo / sigma);
  for (int i = 0; i < n; ++i) {
    const double edge = lo + (i + 1) * g.h();
    const double next = normal_cdf(edge / sigma);
    g.mass[static_cast<std::size_t>(i)] = next - prev;
    prev = next;
  }
  return g;
}

DensityGrid coarsen(const DensityGrid& g, int factor) {
  if (factor < 1 || g.n % factor != 0)
    throw std::invalid_argument("coarsen: factor must divide the cell count");
  DensityGrid out;
  out.lo = g.lo;
  out.hi = g.hi;
  out.n = g.n / factor;
  out.mass.assign(static_cast<std::size_t>(out.n), 0.0);
  for (int i = 0; i < g.n; ++i)
    out.mass[static_cast<std::size_t>(i / factor)] +=
        g.mass[static_cast<std::size_t>(i)];
  return out;
}

double tv_distance(const DensityGrid& a, const DensityGrid& b) {
  if (std::fabs(a.lo - b.lo) > 1e-12 || std::fabs(a.hi - b.hi) > 1e-12)
    throw std::invalid_argument("tv_distance: windows differ");
  const DensityGrid* fine = &a;
  const DensityGrid* coarse = &b;
  if (fine->n < coarse->n) std::swap(fine, coarse);
  if (fine->n % coarse->n != 0)
    throw std::invalid_argument("tv_distance: incompatible resolutions");
  DensityGrid reduced;
  if (fine->n != coarse->n) {
    reduced = coarsen(*fine, fine->n / coarse->n);
    fine = &reduced;
  }
  double s = 0.0;
  for (int i = 0; i < coarse->n; ++i)
    s += std::fabs(fine->mass[static_cast<std::size_t>(i)] -
                   coarse->mass[static_cast<std::size_t>(i)]);
  return 0.5 * s;
}

}  // namespace lqgcodec
