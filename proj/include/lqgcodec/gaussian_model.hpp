#pragma once

#include "lqgcodec/pmf.hpp"

namespace lqgcodec {

double normal_cdf(double x);
double normal_pdf(double x);

// Cell probabilities of q = Q_delta(z + d) for z ~ N(0, sigma2):
//   P[q = k | d] = Phi((k*delta + delta/2 - d)/sigma) - Phi((k*delta - delta/2 - d)/sigma).
// Cells truncated where each tail < 2^-41; remainder goes to escape_mass.
FinitePmf gaussian_conditional_pmf(double sigma2, double d, double delta);

// Dither integrated out (z ~ N(0, sigma2) smoothed by Uniform(delta)):
//   P[q = k] = (sigma/delta) * (psi((k+1)u) - 2 psi(k u) + psi((k-1)u)),
// u = delta/sigma, psi(x) = x Phi(x) + phi(x). Symmetric by construction.
FinitePmf gaussian_marginal_pmf(double sigma2, double delta);

// (1/delta) * Int_{-delta/2}^{delta/2} H(q | d = s) ds by midpoint rule.
double gaussian_conditional_entropy_bits(double sigma2, double delta,
                                         int grid_points = 10000);

}  // namespace lqgcodec
