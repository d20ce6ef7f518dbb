#include "lqgcodec/loop.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "lqgcodec/bitstream.hpp"
#include "lqgcodec/codebook.hpp"
#include "lqgcodec/errors.hpp"
#include "lqgcodec/gaussian_model.hpp"
#include "lqgcodec/invariant.hpp"
#include "lqgcodec/quantizer.hpp"
#include "lqgcodec/rng.hpp"

namespace lqgcodec {

const char* to_string(CodecMode m) {
  switch (m) {
    case CodecMode::kTvSi:
      return "tv-si";
    case CodecMode::kTvNosi:
      return "tv-nosi";
    case CodecMode::kTiSi:
      return "ti-si";
    case CodecMode::kTiNosi:
      return "ti-nosi";
  }
  return "?";
}

std::optional<CodecMode> codec_mode_from_string(const std::string& s) {
  if (s == "tv-si") return CodecMode::kTvSi;
  if (s == "tv-nosi") return CodecMode::kTvNosi;
  if (s == "ti-si") return CodecMode::kTiSi;
  if (s == "ti-nosi") return CodecMode::kTiNosi;
  return std::nullopt;
}

void LoopConfig::validate() const {
  plant.validate();
  if (horizon < 1) throw ConfigError("loop: horizon must be >= 1");
  if (trials < 1) throw ConfigError("loop: trials must be >= 1");
  if (rdf.degenerate || !rdf.gains)
    throw ConfigError("loop: the rate solution carries no channel to code over");
  if (!(rdf.delta > 0.0)) throw ConfigError("loop: quantizer step must be > 0");
  if ((mode == CodecMode::kTiSi || mode == CodecMode::kTiNosi) &&
      plant.A.rows() != 1)
    throw ConfigError("loop: invariant-model codecs are scalar-state only");
}

double mode_bound_bits(CodecMode mode, double rate, int m) {
  const double csf = space_filling_bits();
  // Time-varying modes stream one prefix codeword per component per step, so
  // the rounding bit is paid m times; skipping the dither model costs one
  // further bit per component. Invariant-model modes are scalar-only and pay
  // a flat two bits over the rate.
  switch (mode) {
    case CodecMode::kTvSi:
      return rate + m * (csf + 1.0);
    case CodecMode::kTvNosi:
      return rate + m * (2.0 + csf);
    case CodecMode::kTiSi:
    case CodecMode::kTiNosi:
      return rate + m * csf + 2.0;
  }
  return 0.0;
}

namespace {

struct KahanSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

// U diag(sqrt(max(eig, 0))) U' for a symmetric PSD matrix.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("psd_sqrt: eigendecomposition failed");
  Eigen::VectorXd d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = std::sqrt(std::max(d[i], 0.0));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

LoopResult run_loop(const LoopConfig& cfg) {
  cfg.validate();
  const EstimatorGains& gains = *cfg.rdf.gains;
  const Eigen::MatrixXd& A = cfg.plant.A;
  const Eigen::MatrixXd& B = cfg.plant.B;
  const Eigen::MatrixXd& K = cfg.rdf.control.K;
  const Eigen::MatrixXd& C = gains.C;
  const Eigen::MatrixXd& J = gains.J;
  const Eigen::MatrixXd Acl = A + B * K;
  const int m = static_cast<int>(A.rows());
  const int mc = static_cast<int>(C.rows());
  const double delta = cfg.rdf.delta;
  const Eigen::MatrixXd Wsqrt = psd_sqrt(cfg.plant.W);
  const Eigen::MatrixXd X0sqrt = psd_sqrt(cfg.plant.X0);

  // Fixed-gain one-step-ahead error covariance recursion shared by encoder
  // and decoder in the time-varying modes:
  //   P_{t+1} = Rcl P Rcl' + v L L' + W,  P_0 = X0.
  const Eigen::MatrixXd& Rcl = gains.Rcl;
  const Eigen::MatrixXd LLt = gains.v * (gains.L * gains.L.transpose());
  const bool tv =
      cfg.mode == CodecMode::kTvSi || cfg.mode == CodecMode::kTvNosi;
  const bool si = cfg.mode == CodecMode::kTvSi || cfg.mode == CodecMode::kTiSi;

  // The invariant-density model is fixed across time and trials.
  std::optional<InvariantSymbolModel> inv_model;
  if (!tv) {
    ChainParams chain;
    chain.Rcl = Rcl(0, 0);
    chain.L = gains.L(0, 0);
    chain.C = C(0, 0);
    chain.W = cfg.plant.W(0, 0);
    chain.delta = delta;
    inv_model.emplace(invariant_density_series(chain), chain);
  }

  LoopResult result;
  if (cfg.record_trace) result.trace.emplace();

  std::vector<double> trial_cost, trial_bits, trial_ideal;
  trial_cost.reserve(static_cast<std::size_t>(cfg.trials));
  std::vector<double> batch_cost;  // batch means of trial 0, for trials == 1

  for (int trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t tseed = cfg.seed + static_cast<std::uint64_t>(trial);
    DitherStream dither(rng::derive(tseed, rng::kDitherDomain), delta, mc);
    GaussianStream noise(rng::derive(tseed, rng::kNoiseDomain));

    Eigen::VectorXd g(m);
    for (int i = 0; i < m; ++i) g[i] = noise.at(static_cast<std::uint64_t>(i));
    Eigen::VectorXd x = X0sqrt * g;

    Eigen::VectorXd enc_prior = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd dec_prior = Eigen::VectorXd::Zero(m);
    Eigen::MatrixXd P = cfg.plant.X0;

    // Preallocated step temporaries; the hot loop must not touch the heap.
    Eigen::VectorXd err(m), z(mc), d(mc), qt(mc), dec_qt(mc);
    Eigen::VectorXd enc_post(m), dec_post(m), u(B.cols()), xn(m), wn(m);
    std::vector<std::int64_t> cells(static_cast<std::size_t>(mc));
    std::vector<std::int64_t> dec_cells(static_cast<std::size_t>(mc));
    std::vector<Codebook> books;
    std::vector<FinitePmf> pmfs;
    books.reserve(static_cast<std::size_t>(mc));
    pmfs.reserve(static_cast<std::size_t>(mc));

    BitWriter writer;
    BitReader reader(writer);
    KahanSum cost_sum, bits_sum, ideal_sum;
    KahanSum batch_sum;
    const long batch_len = std::max(cfg.horizon / 100, 1l);

    for (long t = 0; t < cfg.horizon; ++t) {
      // Encoder side: innovation against its own replica of the estimate.
      err.noalias() = x - enc_prior;
      z.noalias() = C * err;
      for (int i = 0; i < mc; ++i) d[i] = dither.component(static_cast<std::uint64_t>(t), i);
      for (int i = 0; i < mc; ++i)
        cells[static_cast<std::size_t>(i)] = quantize_scalar(z[i] + d[i], delta);

      // Symbol models for this step, identical on both ends of the channel
      // (they depend only on public recursions and the shared dither).
      books.clear();
      pmfs.clear();
      if (tv) {
        for (int i = 0; i < mc; ++i) {
          const double s2 = (C.row(i) * P * C.row(i).transpose())(0, 0);
          pmfs.push_back(si ? gaussian_conditional_pmf(s2, d[i], delta)
                            : gaussian_marginal_pmf(s2, delta));
          books.push_back(Codebook::build(pmfs.back(), CodeKind::kShannonSorted));
        }
      } else if (si) {
        pmfs.push_back(inv_model->conditional_pmf(d[0]));
        books.push_back(Codebook::build(pmfs.back(), CodeKind::kFano));
      }

      int step_bits = 0;
      for (int i = 0; i < mc; ++i) {
        const bool fixed_book = !tv && !si;
        const Codebook& book = fixed_book ? inv_model->marginal_book()
                                          : books[static_cast<std::size_t>(i)];
        const FinitePmf& pmf = fixed_book ? inv_model->marginal_pmf()
                                          : pmfs[static_cast<std::size_t>(i)];
        step_bits += book.encode(writer, cells[static_cast<std::size_t>(i)]);
        dec_cells[static_cast<std::size_t>(i)] = book.decode(reader);
        // Model redundancy diagnostic: ideal bits of the symbol actually sent.
        const double psym = pmf.prob_of(cells[static_cast<std::size_t>(i)]);
        if (psym > 0.0) ideal_sum.add(-std::log2(psym));
      }

      if (cells != dec_cells)
        throw SyncLoss("loop: decoder cell mismatch at t=" + std::to_string(t));

      for (int i = 0; i < mc; ++i) {
        qt[i] = static_cast<double>(cells[static_cast<std::size_t>(i)]) * delta - d[i];
        dec_qt[i] =
            static_cast<double>(dec_cells[static_cast<std::size_t>(i)]) * delta - d[i];
      }
      enc_post = enc_prior;
      enc_post.noalias() += J * qt;
      dec_post = dec_prior;
      dec_post.noalias() += J * dec_qt;
      if ((enc_post.array() != dec_post.array()).any())
        throw SyncLoss("loop: estimate replicas diverged at t=" + std::to_string(t));

      u.noalias() = K * dec_post;

      for (int i = 0; i < m; ++i)
        wn[i] = noise.at(static_cast<std::uint64_t>(m) * (t + 1) +
                         static_cast<std::uint64_t>(i));
      xn.noalias() = A * x;
      xn.noalias() += B * u;
      xn.noalias() += Wsqrt * wn;

      const double step_cost =
          (xn.dot(cfg.plant.Q * xn)) + (u.dot(cfg.plant.R * u));
      cost_sum.add(step_cost);
      bits_sum.add(static_cast<double>(step_bits));

      if (cfg.record_trace && trial == 0) {
        LoopStep s;
        s.t = t;
        s.x = x;
        s.u = u;
        s.cells = cells;
        s.bits = step_bits;
        s.cost = step_cost;
        result.trace->steps.push_back(std::move(s));
      }
      if (cfg.trials == 1) {
        batch_sum.add(step_cost);
        if ((t + 1) % batch_len == 0) {
          batch_cost.push_back(batch_sum.s / static_cast<double>(batch_len));
          batch_sum = KahanSum{};
        }
      }

      x.swap(xn);
      enc_prior.noalias() = Acl * enc_post;
      dec_prior.noalias() = Acl * dec_post;
      if (tv) P = (Rcl * P * Rcl.transpose() + LLt + cfg.plant.W).eval();
    }

    trial_cost.push_back(cost_sum.s / static_cast<double>(cfg.horizon));
    trial_bits.push_back(bits_sum.s / static_cast<double>(cfg.horizon));
    trial_ideal.push_back(ideal_sum.s / static_cast<double>(cfg.horizon));
  }

  LoopSummary& s = result.summary;
  KahanSum mc_cost, mc_bits, mc_ideal;
  for (double c : trial_cost) mc_cost.add(c);
  for (double b : trial_bits) mc_bits.add(b);
  for (double b : trial_ideal) mc_ideal.add(b);
  s.avg_cost = mc_cost.s / cfg.trials;
  s.avg_bits = mc_bits.s / cfg.trials;
  s.avg_ideal_bits = mc_ideal.s / cfg.trials;
  s.rate_lower = cfg.rdf.rate;
  s.bound_bits = mode_bound_bits(cfg.mode, cfg.rdf.rate, mc);
  s.trials = cfg.trials;
  s.horizon = cfg.horizon;
  s.sync_ok = true;  // run_loop throws SyncLoss otherwise

  if (cfg.trials > 1) {
    double ss = 0.0;
    for (double c : trial_cost) ss += (c - s.avg_cost) * (c - s.avg_cost);
    s.cost_stderr = std::sqrt(ss / (cfg.trials - 1)) /
                    std::sqrt(static_cast<double>(cfg.trials));
  } else if (batch_cost.size() > 1) {
    double bm = 0.0;
    for (double c : batch_cost) bm += c;
    bm /= static_cast<double>(batch_cost.size());
    double ss = 0.0;
    for (double c : batch_cost) ss += (c - bm) * (c - bm);
    s.cost_stderr = std::sqrt(ss / (static_cast<double>(batch_cost.size()) - 1)) /
                    std::sqrt(static_cast<double>(batch_cost.size()));
  }
  s.cost_pass = s.avg_cost <= cfg.rdf.gamma + 4.0 * s.cost_stderr;
  s.bits_pass = s.avg_bits <= s.bound_bits;
  return result;
}

}  // namespace lqgcodec
