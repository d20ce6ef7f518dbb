#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lqgcodec/rng.hpp"

namespace lqgcodec {

// Uniform mid-rise-free lattice cells: component x maps to the integer k with
// x in [k*delta - delta/2, k*delta + delta/2)  (lower edge inclusive).
struct QuantizedVector {
  std::vector<std::int64_t> cells;

  Eigen::VectorXd values(double delta) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i)
      v[static_cast<Eigen::Index>(i)] = static_cast<double>(cells[i]) * delta;
    return v;
  }
};

std::int64_t quantize_scalar(double x, double delta);
QuantizedVector quantize(const Eigen::VectorXd& x, double delta);

// One dithered step: q = Q_delta(z + d), reconstruction qtilde = q*delta - d,
// recon error v = qtilde - z (uniform on [-delta/2, delta/2], independent of z).
struct DitheredSample {
  QuantizedVector q;
  Eigen::VectorXd qtilde;
  Eigen::VectorXd recon_error;
};

DitheredSample dither_quantize(const Eigen::VectorXd& z, const Eigen::VectorXd& d,
                               double delta);

// Entropy penalty of a uniform vs a Gaussian of equal variance, in bits:
// 0.5*log2(2*pi*e/12) per dimension.
double space_filling_bits();

}  // namespace lqgcodec
