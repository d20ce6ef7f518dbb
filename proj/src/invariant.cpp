#include "lqgcodec/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <fftw3.h>

#include "lqgcodec/errors.hpp"
#include "lqgcodec/quantizer.hpp"

namespace lqgcodec {

void ChainParams::validate() const {
  if (!(std::fabs(Rcl) < 1.0))
    throw UnstableChain("chain: |Rcl| must be < 1");
  if (!(W > 0.0)) throw std::invalid_argument("chain: W must be > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("chain: delta must be > 0");
  if (C == 0.0) throw std::invalid_argument("chain: C must be nonzero");
}

ChainSimulator::ChainSimulator(const ChainParams& p, std::uint64_t seed,
                               double e0)
    : p_(p),
      dither_(rng::derive(seed, rng::kDitherDomain), p.delta, 1),
      noise_(rng::derive(seed, rng::kNoiseDomain)),
      e_(e0) {
  p_.validate();
}

void ChainSimulator::step() {
  d_ = dither_.component(t_, 0);
  const double z = p_.C * e_;
  q_ = quantize_scalar(z + d_, p_.delta);
  const double v = (static_cast<double>(q_) * p_.delta - d_) - z;
  const double w = std::sqrt(p_.W) * noise_.at(t_ + 1);  // counter 0 seeds e0
  e_ = p_.Rcl * e_ - p_.L * v + w;
  ++t_;
}

namespace {

// Invariant variance of the chain: (W + L^2 delta^2/12) / (1 - Rcl^2).
double chain_variance(const ChainParams& p) {
  return (p.W + p.L * p.L * p.delta * p.delta / 12.0) / (1.0 - p.Rcl * p.Rcl);
}

// Masses of a centered Uniform[-w/2, w/2] over grid cells of width h around
// index 0; returns 2*half_span + 1 entries.
std::vector<double> box_kernel_masses(double w, double h, int* half_span) {
  const int span = static_cast<int>(std::ceil(0.5 * w / h + 0.5)) + 1;
  std::vector<double> k(static_cast<std::size_t>(2 * span + 1), 0.0);
  auto box_cdf = [&](double x) { return std::clamp(x / w + 0.5, 0.0, 1.0); };
  for (int j = -span; j <= span; ++j) {
    const double a = (j - 0.5) * h;
    const double b = (j + 0.5) * h;
    k[static_cast<std::size_t>(j + span)] = box_cdf(b) - box_cdf(a);
  }
  *half_span = span;
  return k;
}

}  // namespace

DensityGrid invariant_density_series(const ChainParams& p, double tol, int n,
                                     double span_sigmas) {
  p.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("series: tol must be > 0");
  const double var = chain_variance(p);
  const double sigma = std::sqrt(var);
  const double lo = -span_sigmas * sigma;
  const double hi = span_sigmas * sigma;

  // Terms past N contribute variance below tol^2.
  int N = 0;
  if (p.Rcl != 0.0) {
    while (std::pow(p.Rcl * p.Rcl, N) * var >= tol * tol && N < 20000) ++N;
  }

  // The Gaussian contributions collapse into a single Gaussian.
  double gauss_var = 0.0;
  double rpow = 1.0;
  for (int i = 0; i <= N; ++i) {
    gauss_var += rpow * p.W;
    rpow *= p.Rcl * p.Rcl;
  }
  DensityGrid g = DensityGrid::from_gaussian(gauss_var, lo, hi, n);

  // Uniform terms of width |Rcl|^i |L| delta that still need convolving in.
  std::vector<double> widths;
  double wscale = std::fabs(p.L) * p.delta;
  for (int i = 0; i <= N; ++i) {
    if (wscale > 0.0) widths.push_back(wscale);
    wscale *= std::fabs(p.Rcl);
  }

  if (!widths.empty()) {
    const double h = g.h();
    int max_span = 0;
    for (double w : widths) {
      int hs = 0;
      box_kernel_masses(w, h, &hs);
      max_span = std::max(max_span, hs);
    }
    int pad = n;
    while (pad < n + 2 * max_span + 2) pad *= 2;
    pad *= 2;  // headroom so circular wrap cannot reach the window

    const int nc = pad / 2 + 1;
    double* buf = fftw_alloc_real(static_cast<std::size_t>(pad));
    fftw_complex* freq = fftw_alloc_complex(static_cast<std::size_t>(nc));
    fftw_complex* acc = fftw_alloc_complex(static_cast<std::size_t>(nc));
    fftw_plan fwd = fftw_plan_dft_r2c_1d(pad, buf, freq, FFTW_ESTIMATE);
    fftw_plan inv = fftw_plan_dft_c2r_1d(pad, freq, buf, FFTW_ESTIMATE);

    std::fill(buf, buf + pad, 0.0);
    std::copy(g.mass.begin(), g.mass.end(), buf);
    fftw_execute(fwd);
    std::memcpy(acc, freq, sizeof(fftw_complex) * static_cast<std::size_t>(nc));

    // Multiply every box kernel's spectrum into the accumulator.
    for (double w : widths) {
      int hs = 0;
      const std::vector<double> k = box_kernel_masses(w, h, &hs);
      std::fill(buf, buf + pad, 0.0);
      for (int j = -hs; j <= hs; ++j)
        buf[(j + pad) % pad] += k[static_cast<std::size_t>(j + hs)];
      fftw_execute(fwd);
      for (int i = 0; i < nc; ++i) {
        const double re = acc[i][0] * freq[i][0] - acc[i][1] * freq[i][1];
        const double im = acc[i][0] * freq[i][1] + acc[i][1] * freq[i][0];
        acc[i][0] = re;
        acc[i][1] = im;
      }
    }

    std::memcpy(freq, acc, sizeof(fftw_complex) * static_cast<std::size_t>(nc));
    fftw_execute(inv);
    for (int i = 0; i < n; ++i)
      g.mass[static_cast<std::size_t>(i)] =
          std::max(buf[i] / pad, 0.0);  // clamp ~1e-17 FFT ringing

    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(buf);
    fftw_free(freq);
    fftw_free(acc);
  }

  const double captured = g.total_mass();
  if (captured < 1.0 - 1e-9)
    throw NumericalFailure("series density: window captures only " +
                           std::to_string(captured) + " of the mass");
  g.normalize();
  return g;
}

DensityGrid invariant_density_mc(const ChainParams& p, long steps, long burnin,
                                 std::uint64_t seed, int n,
                                 double span_sigmas) {
  p.validate();
  if (steps <= burnin)
    throw std::invalid_argument("mc density: steps must exceed burnin");
  const double sigma = std::sqrt(chain_variance(p));
  DensityGrid g;
  g.lo = -span_sigmas * sigma;
  g.hi = span_sigmas * sigma;
  g.n = n;
  g.mass.assign(static_cast<std::size_t>(n), 0.0);

  ChainSimulator sim(p, seed, 0.0);
  const double h = g.h();
  long counted = 0;
  for (long t = 0; t < steps; ++t) {
    sim.step();
    if (t < burnin) continue;
    const double e = sim.e();
    if (e < g.lo || e >= g.hi) continue;  // tail beyond the window, ~never
    const int idx = std::min(static_cast<int>((e - g.lo) / h), n - 1);
    g.mass[static_cast<std::size_t>(idx)] += 1.0;
    ++counted;
  }
  if (counted == 0) throw NumericalFailure("mc density: no samples in window");
  for (double& m : g.mass) m /= static_cast<double>(counted);
  return g;
}

InvariantSymbolModel::InvariantSymbolModel(DensityGrid density,
                                           const ChainParams& p,
                                           int dither_grid)
    : density_(std::move(density)), p_(p) {
  p_.validate();
  if (dither_grid < 1)
    throw std::invalid_argument("invariant model: empty dither grid");

  cum_.assign(static_cast<std::size_t>(density_.n) + 1, 0.0);
  for (std::size_t i = 0; i < density_.mass.size(); ++i)
    cum_[i + 1] = cum_[i] + density_.mass[i];

  // Average the conditional table over a midpoint dither grid.
  std::vector<std::int64_t> cells;
  std::vector<double> probs;
  for (int i = 0; i < dither_grid; ++i) {
    const double d = (-0.5 + (i + 0.5) / dither_grid) * p_.delta;
    const FinitePmf cond = conditional_pmf(d);
    for (std::size_t j = 0; j < cond.cells.size(); ++j) {
      auto it = std::lower_bound(cells.begin(), cells.end(), cond.cells[j]);
      const auto at = static_cast<std::size_t>(it - cells.begin());
      if (it == cells.end() || *it != cond.cells[j]) {
        cells.insert(it, cond.cells[j]);
        probs.insert(probs.begin() + static_cast<std::ptrdiff_t>(at), 0.0);
      }
      probs[at] += cond.probs[j] / dither_grid;
    }
  }
  double total = 0.0;
  for (double q : probs) total += q;
  marginal_.cells = std::move(cells);
  marginal_.probs = std::move(probs);
  marginal_.escape_mass = std::max(1.0 - total, 0x1.0p-50);
  if (1.0 - total < 0x1.0p-50) {
    const double scale = (1.0 - marginal_.escape_mass) / total;
    for (double& q : marginal_.probs) q *= scale;
  }
  marginal_.validate();
  marginal_book_ = Codebook::build(marginal_, CodeKind::kShannonSorted);
}

double InvariantSymbolModel::cdf_fast(double x) const {
  if (x <= density_.lo) return 0.0;
  if (x >= density_.hi) return cum_.back();
  const double pos = (x - density_.lo) / density_.h();
  const int cell = std::min(static_cast<int>(pos), density_.n - 1);
  return cum_[static_cast<std::size_t>(cell)] +
         density_.mass[static_cast<std::size_t>(cell)] * (pos - cell);
}

FinitePmf InvariantSymbolModel::conditional_pmf(double d) const {
  // P[q = k | d] integrates the density of z = C e over the shifted cell
  // (k delta - delta/2 - d, k delta + delta/2 - d].
  const double C = p_.C;
  const double delta = p_.delta;
  const double zlo = std::min(C * density_.lo, C * density_.hi);
  const double zhi = std::max(C * density_.lo, C * density_.hi);
  auto z_cdf = [&](double z) {
    return C > 0.0 ? cdf_fast(z / C) : 1.0 - cdf_fast(z / C);
  };
  const auto kmin =
      static_cast<std::int64_t>(std::floor((zlo + d) / delta + 0.5));
  const auto kmax =
      static_cast<std::int64_t>(std::floor((zhi + d) / delta + 0.5));

  std::vector<std::int64_t> cells;
  std::vector<double> probs;
  double total = 0.0;
  for (std::int64_t k = kmin; k <= kmax; ++k) {
    const double a = static_cast<double>(k) * delta - delta / 2 - d;
    const double b = static_cast<double>(k) * delta + delta / 2 - d;
    const double pk = z_cdf(b) - z_cdf(a);
    if (pk > 0.0) {
      cells.push_back(k);
      probs.push_back(pk);
      total += pk;
    }
  }
  FinitePmf pmf;
  pmf.escape_mass = std::max(1.0 - total, 0x1.0p-50);
  if (1.0 - total < 0x1.0p-50) {
    const double scale = (1.0 - pmf.escape_mass) / total;
    for (double& q : probs) q *= scale;
  }
  pmf.cells = std::move(cells);
  pmf.probs = std::move(probs);
  pmf.validate();
  return pmf;
}

std::vector<KlPoint> kl_decay_curve(const ChainParams& p, double X0,
                                    const InvariantSymbolModel& model,
                                    const std::vector<long>& checkpoints,
                                    long rollouts, std::uint64_t seed,
                                    int bootstrap) {
  p.validate();
  if (X0 < 0.0) throw std::invalid_argument("kl_decay_curve: X0 < 0");
  if (rollouts < 100)
    throw std::invalid_argument("kl_decay_curve: too few rollouts");
  const FinitePmf& inv = model.marginal_pmf();
  const double sx0 = std::sqrt(X0);

  std::vector<KlPoint> out;
  for (std::size_t ci = 0; ci < checkpoints.size(); ++ci) {
    const long t = checkpoints[ci];
    if (t < 1)
      throw std::invalid_argument("kl_decay_curve: checkpoints start at 1");
    const std::uint64_t ckpt_seed = rng::mix(
        seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(ci + 1)));

    // Empirical symbol law at time t across independent rollouts. e0 comes
    // from noise counter 0, which the simulator reserves for exactly this.
    std::unordered_map<std::int64_t, long> counts;
    for (long r = 0; r < rollouts; ++r) {
      const std::uint64_t rseed = ckpt_seed + static_cast<std::uint64_t>(r);
      GaussianStream init(rng::derive(rseed, rng::kNoiseDomain));
      ChainSimulator sim(p, rseed, sx0 * init.at(0));
      for (long s = 0; s < t; ++s) sim.step();
      ++counts[sim.last_cell()];
    }

    // Plug-in KL over observed cells; symbols the stationary table does not
    // list lump into its escape bucket.
    std::vector<std::int64_t> syms;
    std::vector<long> cnt;
    long esc_cnt = 0;
    for (const auto& [k, c] : counts) {
      if (std::binary_search(inv.cells.begin(), inv.cells.end(), k)) {
        syms.push_back(k);
        cnt.push_back(c);
      } else {
        esc_cnt += c;
      }
    }
    auto kl_of = [&](const std::vector<long>& cin, long esc_in) {
      double kl = 0.0;
      for (std::size_t i = 0; i < cin.size(); ++i) {
        if (cin[i] == 0) continue;
        const double ph = static_cast<double>(cin[i]) / rollouts;
        kl += ph * std::log2(ph / inv.prob_of(syms[i]));
      }
      if (esc_in > 0) {
        const double ph = static_cast<double>(esc_in) / rollouts;
        kl += ph * std::log2(ph / inv.escape_mass);
      }
      return kl;
    };

    KlPoint pt;
    pt.t = t;
    pt.kl = kl_of(cnt, esc_cnt);

    // Multinomial bootstrap for the standard error.
    if (bootstrap > 1) {
      std::vector<double> cum;
      cum.reserve(cnt.size());
      double acc = 0.0;
      for (long c : cnt) {
        acc += static_cast<double>(c) / rollouts;
        cum.push_back(acc);
      }
      const bool has_esc = esc_cnt > 0;
      double mean = 0.0, m2 = 0.0;
      const std::uint64_t bseed = rng::mix(ckpt_seed ^ 0xC2B2AE3D27D4EB4Full);
      for (int b = 0; b < bootstrap; ++b) {
        std::vector<long> bc(cnt.size(), 0);
        long besc = 0;
        const std::uint64_t base = static_cast<std::uint64_t>(b) *
                                   static_cast<std::uint64_t>(rollouts);
        for (long r = 0; r < rollouts; ++r) {
          const double u =
              rng::unit(rng::at(bseed, base + static_cast<std::uint64_t>(r)));
          const auto it = std::lower_bound(cum.begin(), cum.end(), u);
          if (it == cum.end()) {
            if (has_esc)
              ++besc;
            else if (!bc.empty())
              ++bc.back();
          } else {
            ++bc[static_cast<std::size_t>(it - cum.begin())];
          }
        }
        const double v = kl_of(bc, besc);
        const double dv = v - mean;
        mean += dv / (b + 1);
        m2 += dv * (v - mean);
      }
      pt.err = std::sqrt(m2 / (bootstrap - 1));
    }
    out.push_back(pt);
  }
  return out;
}

double chain_one_step_mean(const ChainParams& p, double e0, double d0) {
  const double z = p.C * e0;
  const auto q = quantize_scalar(z + d0, p.delta);
  const double v = (static_cast<double>(q) * p.delta - d0) - z;
  return p.Rcl * e0 - p.L * v;
}

NStepLaw nstep_gaussian_oracle(const ChainParams& p, double e0, double d0,
                               const std::vector<double>& vseq) {
  p.validate();
  const std::size_t n = vseq.size() + 1;
  NStepLaw law;
  double mu = chain_one_step_mean(p, e0, d0);
  for (std::size_t i = 1; i < n; ++i) mu *= p.Rcl;
  double rpow = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    mu -= rpow * p.L * vseq[n - 2 - i];
    rpow *= p.Rcl;
  }
  law.mu = mu;
  double s2 = 0.0;
  double r2pow = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    s2 += r2pow * p.W;
    r2pow *= p.Rcl * p.Rcl;
  }
  law.sigma2 = s2;
  return law;
}

}  // namespace lqgcodec
