#pragma once

#include <vector>

namespace lqgcodec {

// Piecewise-constant density on a uniform grid: cell i carries mass[i] over
// [lo + i*h, lo + (i+1)*h), h = (hi - lo)/n.
struct DensityGrid {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
  std::vector<double> mass;

  double h() const { return (hi - lo) / n; }
  double center(int i) const { return lo + (i + 0.5) * h(); }

  double total_mass() const;
  double mean() const;
  double variance() const;  // Sheppard-corrected second moment about the mean

  // CDF of the piecewise-constant density (linear within cells, clamped
  // outside the window).
  double cdf(double x) const;

  void normalize();  // rescale to total mass 1 (throws if mass is ~0)

  static DensityGrid from_gaussian(double variance, double lo, double hi, int n);
};

// Sum adjacent cells by an integer factor (n must divide evenly).
DensityGrid coarsen(const DensityGrid& g, int factor);

// 0.5 * sum |a_i - b_i| after aligning resolutions; windows must match and the
// finer grid is coarsened when cell counts differ by an integer factor.
double tv_distance(const DensityGrid& a, const DensityGrid& b);

}  // namespace lqgcodec
