#include "lqgcodec/control.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lqgcodec/errors.hpp"

namespace lqgcodec {

double spectral_radius(const Eigen::MatrixXd& M) {
  return M.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& M) {
  return 0.5 * (M + M.transpose());
}

namespace {

bool pbh_rank_full(const Eigen::MatrixXcd& pencil, int m, double rank_tol) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(pencil);
  qr.setThreshold(rank_tol);
  return qr.rank() == m;
}

}  // namespace

bool pbh_stabilizable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      double rank_tol) {
  const int m = static_cast<int>(A.rows());
  const Eigen::VectorXcd eigs = A.eigenvalues();
  for (int i = 0; i < m; ++i) {
    if (std::abs(eigs[i]) < 1.0) continue;  // stable modes need no control
    Eigen::MatrixXcd pencil(m, m + static_cast<int>(B.cols()));
    pencil << A.cast<std::complex<double>>() -
                  eigs[i] * Eigen::MatrixXcd::Identity(m, m),
        B.cast<std::complex<double>>();
    if (!pbh_rank_full(pencil, m, rank_tol)) return false;
  }
  return true;
}

bool pbh_detectable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                    double rank_tol) {
  const int m = static_cast<int>(A.rows());
  const Eigen::VectorXcd eigs = A.eigenvalues();
  for (int i = 0; i < m; ++i) {
    if (std::abs(eigs[i]) < 1.0) continue;
    Eigen::MatrixXcd pencil(m + static_cast<int>(C.rows()), m);
    pencil << A.cast<std::complex<double>>() -
                  eigs[i] * Eigen::MatrixXcd::Identity(m, m),
        C.cast<std::complex<double>>();
    if (!pbh_rank_full(pencil, m, rank_tol)) return false;
  }
  return true;
}

Eigen::MatrixXd discrete_lyapunov(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& Q) {
  const int m = static_cast<int>(A.rows());
  if (spectral_radius(A) >= 1.0)
    throw NumericalFailure("discrete_lyapunov: A is not a contraction");
  // vec(X) = (I - A (x) A)^-1 vec(Q)
  const int mm = m * m;
  Eigen::MatrixXd K(mm, mm);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      K.block(i * m, j * m, m, m) = A(i, j) * A;
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(mm, mm) - K;
  Eigen::VectorXd q(mm);
  for (int j = 0; j < m; ++j) q.segment(j * m, m) = Q.col(j);
  // Column-major vec: K as built above is A (x) A for vec(AXA') = (A(x)A)vec(X).
  const Eigen::VectorXd x = lhs.partialPivLu().solve(q);
  Eigen::MatrixXd X(m, m);
  for (int j = 0; j < m; ++j) X.col(j) = x.segment(j * m, m);
  return symmetrized(X);
}

ControlSolution solve_control_dare(const PlantModel& plant, double rel_tol,
                                   long max_iter) {
  plant.validate();
  const Eigen::MatrixXd& A = plant.A;
  const Eigen::MatrixXd& B = plant.B;
  const Eigen::MatrixXd& Q = plant.Q;
  const Eigen::MatrixXd& R = plant.R;

  ControlSolution sol;
  Eigen::MatrixXd S = Q;
  long it = 0;
  for (; it < max_iter; ++it) {
    const Eigen::MatrixXd BtSB_R = B.transpose() * S * B + R;
    const Eigen::MatrixXd gain = BtSB_R.ldlt().solve(B.transpose() * S * A);
    const Eigen::MatrixXd next =
        symmetrized(Q + A.transpose() * (S * A - S * B * gain));
    const double diff = (next - S).norm();
    S = next;
    if (diff <= rel_tol * (1.0 + S.norm())) break;
  }
  if (it == max_iter)
    throw NonStabilizable("Riccati iteration did not converge in " +
                          std::to_string(max_iter) + " iterations");

  const Eigen::MatrixXd BtSB_R = B.transpose() * S * B + R;
  sol.S = S;
  sol.K = -BtSB_R.ldlt().solve(B.transpose() * S * A);
  sol.Theta = symmetrized(sol.K.transpose() * BtSB_R * sol.K);
  sol.min_cost = (S * plant.W).trace();
  sol.iterations = static_cast<int>(it + 1);

  const Eigen::MatrixXd defect =
      A.transpose() * S * A - S -
      A.transpose() * S * B * BtSB_R.ldlt().solve(B.transpose() * S * A) + Q;
  sol.residual = defect.norm();
  if (!(sol.residual <= 1e-9 * (1.0 + S.norm())))
    throw NumericalFailure("Riccati residual " + std::to_string(sol.residual) +
                           " exceeds tolerance");
  if (!(spectral_radius(A + B * sol.K) < 1.0))
    throw NonStabilizable("A + B K is not a contraction");
  return sol;
}

EstimatorGains estimator_from_channel(const Eigen::MatrixXd& A,
                                      const Eigen::MatrixXd& W,
                                      const Eigen::MatrixXd& C, double v) {
  if (!(v > 0.0))
    throw std::invalid_argument("estimator_from_channel: v must be > 0");
  const int m = static_cast<int>(A.rows());
  EstimatorGains g;
  g.C = C;
  g.v = v;
  g.V = v * Eigen::MatrixXd::Identity(m, m);

  // Steady state of the one-step filter for this channel: iterate the
  // measurement/propagation recursion to its fixed point.
  Eigen::MatrixXd P = W;
  for (int it = 0; it < 100000; ++it) {
    const Eigen::MatrixXd S = C * P * C.transpose() + g.V;
    const Eigen::MatrixXd J = P * C.transpose() * S.ldlt().solve(
                                  Eigen::MatrixXd::Identity(m, m));
    const Eigen::MatrixXd post =
        symmetrized(P - J * C * P);
    const Eigen::MatrixXd next = symmetrized(A * post * A.transpose() + W);
    const double diff = (next - P).norm();
    P = next;
    if (diff <= 1e-14 * (1.0 + P.norm())) break;
  }
  g.PhatPlus = P;
  const Eigen::MatrixXd S = C * P * C.transpose() + g.V;
  g.J = P * C.transpose() * S.ldlt().solve(Eigen::MatrixXd::Identity(m, m));
  g.Phat = symmetrized((Eigen::MatrixXd::Identity(m, m) - g.J * C) * P);
  g.L = A * g.J;
  g.Rcl = A - g.L * C;
  if (!(spectral_radius(g.Rcl) < 1.0))
    throw UnstableChain("closed-loop estimator matrix is not a contraction");
  return g;
}

std::vector<Eigen::MatrixXd> filter_prior_sequence(const Eigen::MatrixXd& A,
                                                   const Eigen::MatrixXd& W,
                                                   const Eigen::MatrixXd& X0,
                                                   const Eigen::MatrixXd& C,
                                                   const Eigen::MatrixXd& V,
                                                   long T) {
  if (T < 0) throw std::invalid_argument("filter_prior_sequence: T < 0");
  const int m = static_cast<int>(A.rows());
  std::vector<Eigen::MatrixXd> seq;
  seq.reserve(static_cast<std::size_t>(T) + 1);
  Eigen::MatrixXd P = symmetrized(X0);
  seq.push_back(P);
  for (long t = 0; t < T; ++t) {
    const Eigen::MatrixXd S = C * P * C.transpose() + V;
    const Eigen::MatrixXd J =
        P * C.transpose() * S.ldlt().solve(Eigen::MatrixXd::Identity(m, m));
    const Eigen::MatrixXd post = symmetrized(P - J * C * P);
    P = symmetrized(A * post * A.transpose() + W);
    seq.push_back(P);
  }
  return seq;
}

}  // namespace lqgcodec
