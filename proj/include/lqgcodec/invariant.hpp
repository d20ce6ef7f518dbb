#pragma once

#include <cstdint>
#include <vector>

#include "lqgcodec/codebook.hpp"
#include "lqgcodec/density.hpp"
#include "lqgcodec/pmf.hpp"
#include "lqgcodec/rng.hpp"

namespace lqgcodec {

// Scalar (m = 1) innovation-error chain of the closed loop:
//   e_{t+1} = Rcl e_t - L v_t + w_t,  w ~ N(0, W),
//   v_t = (Q_delta(C e_t + d_t) - d_t) - C e_t,  d ~ U[-delta/2, delta/2).
struct ChainParams {
  double Rcl = 0.0;
  double L = 0.0;
  double C = 0.0;
  double W = 0.0;
  double delta = 0.0;

  void validate() const;  // |Rcl| < 1 (UnstableChain), W > 0, delta > 0, C != 0
};

// Steps the chain with counter-based noise/dither; exposes (e, d, q) so tests
// can probe independence claims directly.
class ChainSimulator {
 public:
  ChainSimulator(const ChainParams& p, std::uint64_t seed, double e0 = 0.0);

  void step();
  double e() const { return e_; }                // current state e_t
  double last_dither() const { return d_; }      // d_{t-1} used by last step
  std::int64_t last_cell() const { return q_; }  // quantizer cell from last step
  std::uint64_t t() const { return t_; }

 private:
  ChainParams p_;
  DitherStream dither_;
  GaussianStream noise_;
  double e_;
  double d_ = 0.0;
  std::int64_t q_ = 0;
  std::uint64_t t_ = 0;
};

// Law of e_infinity = sum_i Rcl^i (w_i - L nu_i): all Gaussian terms collapse
// into one Gaussian, the uniform terms convolve in (FFT, analytic box kernel).
// Terms kept until Rcl^(2N) (W + L^2 delta^2/12) / (1 - Rcl^2) < tol^2.
DensityGrid invariant_density_series(const ChainParams& p, double tol = 1e-6,
                                     int n = 1 << 14, double span_sigmas = 8.0);

// Histogram of a single long chain run on the same window (burn-in dropped).
DensityGrid invariant_density_mc(const ChainParams& p, long steps,
                                 long burnin, std::uint64_t seed,
                                 int n = 1 << 10, double span_sigmas = 8.0);

// Stationary conditional/marginal symbol laws induced by the invariant
// density: P[q = k*delta | d] integrates the density of C*e over the shifted
// cell; the marginal averages over a dither grid.
class InvariantSymbolModel {
 public:
  InvariantSymbolModel(DensityGrid density, const ChainParams& p,
                       int dither_grid = 1024);

  FinitePmf conditional_pmf(double d) const;
  const FinitePmf& marginal_pmf() const { return marginal_; }
  const Codebook& marginal_book() const { return marginal_book_; }
  const DensityGrid& density() const { return density_; }

 private:
  double cdf_fast(double x) const;  // cached prefix sums; cdf() is O(n)

  DensityGrid density_;
  ChainParams p_;
  std::vector<double> cum_;  // cum_[i] = mass of cells [0, i)
  FinitePmf marginal_;
  Codebook marginal_book_;
};

// Plug-in KL (bits) of the empirical time-t symbol law vs the stationary one,
// with a bootstrap standard error. Rollouts start from e_0 ~ N(0, X0).
struct KlPoint {
  long t = 0;
  double kl = 0.0;
  double err = 0.0;
};

std::vector<KlPoint> kl_decay_curve(const ChainParams& p, double X0,
                                    const InvariantSymbolModel& model,
                                    const std::vector<long>& checkpoints,
                                    long rollouts, std::uint64_t seed,
                                    int bootstrap = 200);

// Conditional law of e_n given (e_0, d_0) and forced reconstruction errors
// v_1..v_{n-1}: Gaussian with
//   mu_n = Rcl^{n-1} M(e_0, d_0) - sum_{i=0..n-2} Rcl^i L v_{n-1-i}
//   sigma2_n = sum_{i=0..n-1} Rcl^{2i} W.
struct NStepLaw {
  double mu = 0.0;
  double sigma2 = 0.0;
};

double chain_one_step_mean(const ChainParams& p, double e0, double d0);
NStepLaw nstep_gaussian_oracle(const ChainParams& p, double e0, double d0,
                               const std::vector<double>& vseq);

}  // namespace lqgcodec
