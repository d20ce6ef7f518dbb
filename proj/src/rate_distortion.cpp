#include "lqgcodec/rate_distortion.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lqgcodec/errors.hpp"

namespace lqgcodec {

Eigen::MatrixXd RdfSolution::phat_plus() const {
  // A Phat A' + W is not stored; rebuild from the control-side plant copy is
  // not available here, so gains carry it. Degenerate solutions keep Phat.
  if (gains) return gains->PhatPlus;
  return Phat;
}

namespace {

// Pushes a symmetric-basis coordinate step through the three log-det
// barriers. Matrix variables P, Pi are parametrized by their upper triangles.
struct SymBasis {
  std::vector<Eigen::MatrixXd> E;  // basis matrices
  int m = 0;

  explicit SymBasis(int m_) : m(m_) {
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
        B(i, j) = 1.0;
        B(j, i) = 1.0;
        E.push_back(B);
      }
  }
  int dim() const { return static_cast<int>(E.size()); }

  Eigen::MatrixXd assemble(const Eigen::VectorXd& x, int offset) const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < dim(); ++k) M += x[offset + k] * E[k];
    return M;
  }
  Eigen::VectorXd coords(const Eigen::MatrixXd& M) const {
    Eigen::VectorXd x(dim());
    int k = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) x[k++] = M(i, j);
    return x;
  }
};

// One affine-in-x PSD constraint F(x) = F0 + sum_k x_k G_k with cached
// gradient/Hessian contributions of -log det F.
struct LmiTerm {
  Eigen::MatrixXd F0;
  std::vector<Eigen::MatrixXd> G;  // one per coordinate (may be zero)

  Eigen::MatrixXd eval(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd F = F0;
    for (std::size_t k = 0; k < G.size(); ++k)
      if (G[k].size() != 0) F += x[static_cast<int>(k)] * G[k];
    return F;
  }

  // Returns false if F(x) is not PD.
  bool add_barrier(const Eigen::VectorXd& x, double weight, double* phi,
                   Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const {
    const Eigen::MatrixXd F = eval(x);
    Eigen::LLT<Eigen::MatrixXd> llt(F);
    if (llt.info() != Eigen::Success) return false;
    const int n = static_cast<int>(G.size());
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(F.rows(), F.cols());
    const Eigen::MatrixXd Finv = llt.solve(I);
    double logdet = 0.0;
    for (int i = 0; i < F.rows(); ++i)
      logdet += std::log(llt.matrixL()(i, i));
    logdet *= 2.0;
    if (phi != nullptr) *phi += -weight * logdet;
    if (grad == nullptr && hess == nullptr) return true;
    std::vector<Eigen::MatrixXd> M(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      if (G[static_cast<std::size_t>(k)].size() == 0) continue;
      M[static_cast<std::size_t>(k)] = Finv * G[static_cast<std::size_t>(k)];
      if (grad != nullptr)
        (*grad)[k] += -weight * M[static_cast<std::size_t>(k)].trace();
    }
    if (hess != nullptr) {
      for (int k = 0; k < n; ++k) {
        if (G[static_cast<std::size_t>(k)].size() == 0) continue;
        for (int l = k; l < n; ++l) {
          if (G[static_cast<std::size_t>(l)].size() == 0) continue;
          const double hkl =
              weight *
              M[static_cast<std::size_t>(k)]
                  .cwiseProduct(M[static_cast<std::size_t>(l)].transpose())
                  .sum();
          (*hess)(k, l) += hkl;
          if (l != k) (*hess)(l, k) += hkl;
        }
      }
    }
    return true;
  }
};

Eigen::MatrixXd schur_floor(const Eigen::MatrixXd& A, const Eigen::MatrixXd& W,
                            const Eigen::MatrixXd& P) {
  // P - P A' (A P A' + W)^-1 A P, the largest Pi admitted by the coupling LMI.
  const Eigen::MatrixXd Pp = A * P * A.transpose() + W;
  return symmetrized(P - P * A.transpose() *
                             Pp.ldlt().solve(A * P));
}

double rate_bits_from(const Eigen::MatrixXd& A, const Eigen::MatrixXd& W,
                      const Eigen::MatrixXd& Phat) {
  const Eigen::MatrixXd Pp = symmetrized(A * Phat * A.transpose() + W);
  const double num = Pp.ldlt().vectorD().array().log().sum();
  const double den = Phat.ldlt().vectorD().array().log().sum();
  return 0.5 * (num - den) / std::log(2.0);
}

RdfSolution finish_solution(const PlantModel& plant, const ControlSolution& ctrl,
                            const Eigen::MatrixXd& Phat, const Eigen::MatrixXd& Pi,
                            double v, bool force_zero_rate) {
  RdfSolution sol;
  sol.Phat = Phat;
  sol.Pi = Pi;
  sol.gamma = plant.gamma;
  sol.control = ctrl;
  sol.v = v;
  sol.delta = std::sqrt(12.0 * v);
  sol.rate = force_zero_rate ? 0.0 : rate_bits_from(plant.A, plant.W, Phat);
  try {
    sol.gains = extract_test_channel(plant.A, plant.W, Phat, v);
    sol.degenerate = false;
  } catch (const DegenerateChannel&) {
    sol.gains.reset();
    sol.degenerate = true;
    sol.rate = 0.0;
  }
  return sol;
}

}  // namespace

RdfSolution solve_rdf_siso(const PlantModel& plant, double v) {
  plant.validate();
  if (plant.state_dim() != 1)
    throw std::invalid_argument("solve_rdf_siso: state dimension must be 1");
  const ControlSolution ctrl = solve_control_dare(plant);
  const double a = plant.A(0, 0);
  const double w = plant.W(0, 0);
  const double theta = ctrl.Theta(0, 0);
  const double floor_cost = ctrl.min_cost;  // Tr(S W)
  if (!(plant.gamma > floor_cost))
    throw InfeasibleBudget("gamma = " + std::to_string(plant.gamma) +
                           " is not above the full-information cost " +
                           std::to_string(floor_cost));

  // Largest admissible posterior variance: the cost budget caps it at
  // (gamma - SW)/Theta; an open-loop-stable plant caps it at the stationary
  // variance w/(1 - a^2), where the rate hits exactly zero.
  double p = theta > 0.0 ? (plant.gamma - floor_cost) / theta
                         : std::numeric_limits<double>::infinity();
  bool clamped = false;
  if (std::fabs(a) < 1.0) {
    const double stationary = w / (1.0 - a * a);
    if (p >= stationary) {
      p = stationary;
      clamped = true;
    }
  }
  if (!std::isfinite(p))
    throw NumericalFailure("solve_rdf_siso: unbounded posterior variance");

  const double pplus = a * a * p + w;
  Eigen::MatrixXd Phat(1, 1), Pi(1, 1);
  Phat(0, 0) = p;
  Pi(0, 0) = p * w / pplus;
  RdfSolution sol = finish_solution(plant, ctrl, Phat, Pi, v, clamped);
  if (!clamped) sol.rate = std::max(sol.rate, 0.0);
  return sol;
}

RdfSolution solve_rdf_mimo(const PlantModel& plant, double v,
                           const BarrierOptions& opts) {
  plant.validate();
  const ControlSolution ctrl = solve_control_dare(plant);
  const int m = plant.state_dim();
  const Eigen::MatrixXd& A = plant.A;
  const Eigen::MatrixXd& W = plant.W;
  const Eigen::MatrixXd& Theta = ctrl.Theta;
  const double budget = plant.gamma - ctrl.min_cost;
  if (!(budget > 0.0))
    throw InfeasibleBudget("gamma = " + std::to_string(plant.gamma) +
                           " is not above the full-information cost " +
                           std::to_string(ctrl.min_cost));

  // Zero-rate clamp: on a stable plant whose open-loop stationary covariance
  // already fits the budget, no information is needed at all.
  if (spectral_radius(A) < 1.0 - 1e-9) {
    const Eigen::MatrixXd Pinf = discrete_lyapunov(A, W);
    if ((Theta * Pinf).trace() <= budget) {
      return finish_solution(plant, ctrl, Pinf, schur_floor(A, W, Pinf), v,
                             /*force_zero_rate=*/true);
    }
  }

  const SymBasis basis(m);
  const int nb = basis.dim();
  const int n = 2 * nb;  // P coords then Pi coords

  // Trace constraint as a 1x1 LMI: budget - Tr(Theta P) > 0.
  LmiTerm trace_term;
  trace_term.F0 = Eigen::MatrixXd::Constant(1, 1, budget);
  trace_term.G.assign(static_cast<std::size_t>(n), Eigen::MatrixXd());
  for (int k = 0; k < nb; ++k)
    trace_term.G[static_cast<std::size_t>(k)] =
        Eigen::MatrixXd::Constant(1, 1, -(Theta * basis.E[static_cast<std::size_t>(k)]).trace());

  // A P A' + W - P >= 0.
  LmiTerm contraction;
  contraction.F0 = W;
  contraction.G.assign(static_cast<std::size_t>(n), Eigen::MatrixXd());
  for (int k = 0; k < nb; ++k) {
    const Eigen::MatrixXd& E = basis.E[static_cast<std::size_t>(k)];
    contraction.G[static_cast<std::size_t>(k)] = A * E * A.transpose() - E;
  }

  // [[P - Pi, P A'], [A P, A P A' + W]] >= 0.
  LmiTerm coupling;
  coupling.F0 = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  coupling.F0.bottomRightCorner(m, m) = W;
  coupling.G.assign(static_cast<std::size_t>(n), Eigen::MatrixXd());
  for (int k = 0; k < nb; ++k) {
    const Eigen::MatrixXd& E = basis.E[static_cast<std::size_t>(k)];
    Eigen::MatrixXd Gp = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    Gp.topLeftCorner(m, m) = E;
    Gp.topRightCorner(m, m) = E * A.transpose();
    Gp.bottomLeftCorner(m, m) = A * E;
    Gp.bottomRightCorner(m, m) = A * E * A.transpose();
    coupling.G[static_cast<std::size_t>(k)] = Gp;
    Eigen::MatrixXd Gpi = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    Gpi.topLeftCorner(m, m) = -E;
    coupling.G[static_cast<std::size_t>(nb + k)] = Gpi;
  }

  // Objective -log det Pi (and its barrier role keeping Pi PD).
  LmiTerm objective;
  objective.F0 = Eigen::MatrixXd::Zero(m, m);
  objective.G.assign(static_cast<std::size_t>(n), Eigen::MatrixXd());
  for (int k = 0; k < nb; ++k)
    objective.G[static_cast<std::size_t>(nb + k)] = basis.E[static_cast<std::size_t>(k)];

  const std::vector<const LmiTerm*> barriers = {&trace_term, &contraction,
                                                &coupling};

  auto feasible = [&](const Eigen::VectorXd& x) {
    for (const LmiTerm* term : barriers) {
      Eigen::LLT<Eigen::MatrixXd> llt(term->eval(x));
      if (llt.info() != Eigen::Success) return false;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(objective.eval(x));
    return llt.info() == Eigen::Success;
  };

  // Strictly feasible start: P = tau I small enough for the budget and the
  // contraction LMI, Pi = half the coupling Schur complement.
  double tau = 1.0;
  const double theta_tr = Theta.trace();
  if (theta_tr > 0.0) tau = std::min(tau, 0.5 * budget / theta_tr);
  Eigen::VectorXd x(n);
  for (int tries = 0;; ++tries) {
    const Eigen::MatrixXd P0 = tau * Eigen::MatrixXd::Identity(m, m);
    x.head(nb) = basis.coords(P0);
    x.tail(nb) = basis.coords(0.5 * schur_floor(A, W, P0));
    if (feasible(x)) break;
    tau *= 0.5;
    if (tries > 200)
      throw NumericalFailure("barrier: could not find a feasible start");
  }

  const double nu = 3.0 * m + 1.0;  // total barrier degree
  double t = opts.t0;
  while (true) {
    for (int inner = 0; inner < opts.max_inner; ++inner) {
      double phi = 0.0;
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
      bool ok = objective.add_barrier(x, t, &phi, &grad, &hess);
      for (const LmiTerm* term : barriers)
        ok = ok && term->add_barrier(x, 1.0, &phi, &grad, &hess);
      if (!ok) throw NumericalFailure("barrier: iterate left the domain");

      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      Eigen::VectorXd step = -ldlt.solve(grad);
      if (!step.allFinite()) {
        hess.diagonal().array() += 1e-12 * (1.0 + hess.trace());
        step = -hess.ldlt().solve(grad);
      }
      const double decrement2 = -grad.dot(step);
      if (decrement2 * 0.5 <= opts.newton_tol) break;

      double s = 1.0;
      const double slope = grad.dot(step);
      while (true) {
        const Eigen::VectorXd xn = x + s * step;
        if (feasible(xn)) {
          double phin = 0.0;
          objective.add_barrier(xn, t, &phin, nullptr, nullptr);
          for (const LmiTerm* term : barriers)
            term->add_barrier(xn, 1.0, &phin, nullptr, nullptr);
          if (phin <= phi + opts.alpha * s * slope) break;
        }
        s *= opts.beta;
        if (s < 1e-18)
          throw NumericalFailure("barrier: line search stalled");
      }
      x += s * step;
    }
    if (nu / t <= opts.gap_tol) break;
    t *= opts.mu;
  }

  const Eigen::MatrixXd Phat = symmetrized(basis.assemble(x, 0));
  const Eigen::MatrixXd Pi = symmetrized(basis.assemble(x, nb));
  return finish_solution(plant, ctrl, Phat, Pi, v, /*force_zero_rate=*/false);
}

EstimatorGains extract_test_channel(const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& W,
                                    const Eigen::MatrixXd& Phat, double v,
                                    double clip_tol) {
  if (!(v > 0.0))
    throw std::invalid_argument("extract_test_channel: v must be > 0");
  const int m = static_cast<int>(A.rows());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
  const Eigen::MatrixXd PhatPlus = symmetrized(A * Phat * A.transpose() + W);
  const Eigen::MatrixXd M = symmetrized(Phat.ldlt().solve(I) -
                                        PhatPlus.ldlt().solve(I));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("extract_test_channel: eigensolver failed");
  Eigen::VectorXd lam = es.eigenvalues();
  const double clip = clip_tol * std::max(1.0, lam.cwiseAbs().maxCoeff());
  bool any = false;
  for (int i = 0; i < m; ++i) {
    if (lam[i] < -1e-8 * std::max(1.0, lam.cwiseAbs().maxCoeff()))
      throw NumericalFailure("extract_test_channel: information matrix has a "
                             "significantly negative eigenvalue");
    if (lam[i] < clip)
      lam[i] = 0.0;
    else
      any = true;
  }
  if (!any)
    throw DegenerateChannel("optimal sensing matrix is zero (rate 0)");

  // C = sqrt(v) Lambda^(1/2) U', so C' V^-1 C = U Lambda U' = M.
  const Eigen::MatrixXd C =
      std::sqrt(v) * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();

  EstimatorGains g;
  g.C = C;
  g.v = v;
  g.V = v * I;
  g.Phat = Phat;
  g.PhatPlus = PhatPlus;
  const Eigen::MatrixXd S = C * PhatPlus * C.transpose() + g.V;
  g.J = PhatPlus * C.transpose() * S.ldlt().solve(I);
  g.L = A * g.J;
  g.Rcl = A - g.L * C;
  if (!(spectral_radius(g.Rcl) < 1.0))
    throw UnstableChain("extract_test_channel: A - L C is not a contraction");
  return g;
}

}  // namespace lqgcodec
