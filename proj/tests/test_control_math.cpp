#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <Eigen/Dense>

#include "lqgcodec/control.hpp"
#include "lqgcodec/errors.hpp"
#include "lqgcodec/plant.hpp"
#include "lqgcodec/rng.hpp"

using namespace lqgcodec;

namespace {

PlantModel scalar_plant(double a, double b, double w = 1.0, double q = 1.0,
                        double r = 1.0, double gamma = 100.0) {
  PlantModel p;
  p.A.resize(1, 1);
  p.A << a;
  p.B.resize(1, 1);
  p.B << b;
  p.W.resize(1, 1);
  p.W << w;
  p.X0.resize(1, 1);
  p.X0 << 1.0;
  p.Q.resize(1, 1);
  p.Q << q;
  p.R.resize(1, 1);
  p.R << r;
  p.gamma = gamma;
  return p;
}

// Stationary scalar Riccati cost: the positive root of
//   b^2 S^2 + (r - q b^2 - a^2 r) S - q r = 0.
double scalar_dare_root(double a, double b, double q, double r) {
  const double bb = b * b;
  const double lin = r - q * bb - a * a * r;
  return (-lin + std::sqrt(lin * lin + 4.0 * bb * q * r)) / (2.0 * bb);
}

}  // namespace

TEST_CASE("spectral radius and symmetrization") {
  Eigen::MatrixXd M(2, 2);
  M << 2.0, 1.0, 0.0, -0.5;
  CHECK(spectral_radius(M) == doctest::Approx(2.0));
  const Eigen::MatrixXd S = symmetrized(M);
  CHECK(S(0, 1) == doctest::Approx(0.5));
  CHECK(S(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("PBH stabilizability looks only at unstable modes") {
  Eigen::MatrixXd A(2, 2), Bfull(2, 1), Bnone(2, 1), Bpart(2, 1);
  A << 2.0, 0.0, 0.0, 0.5;
  Bfull << 1.0, 1.0;
  Bnone << 0.0, 0.0;
  Bpart << 0.0, 1.0;  // reaches only the stable mode
  CHECK(pbh_stabilizable(A, Bfull));
  CHECK(!pbh_stabilizable(A, Bnone));
  CHECK(!pbh_stabilizable(A, Bpart));

  // A stable plant is stabilizable with no input at all.
  Eigen::MatrixXd As(2, 2);
  As << 0.3, 0.1, 0.0, 0.8;
  CHECK(pbh_stabilizable(As, Bnone));
}

TEST_CASE("PBH detectability is the transposed test") {
  Eigen::MatrixXd A(2, 2), Cgood(1, 2), Cblind(1, 2);
  A << 1.5, 0.0, 0.0, 0.2;
  Cgood << 1.0, 0.0;
  Cblind << 0.0, 1.0;  // watches only the stable mode
  CHECK(pbh_detectable(A, Cgood));
  CHECK(!pbh_detectable(A, Cblind));
}

TEST_CASE("discrete Lyapunov solve matches the scalar geometric series") {
  Eigen::MatrixXd A(1, 1), Q(1, 1);
  A << 0.5;
  Q << 1.0;
  const Eigen::MatrixXd X = discrete_lyapunov(A, Q);
  CHECK(X(0, 0) == doctest::Approx(1.0 / (1.0 - 0.25)).epsilon(1e-12));
}

TEST_CASE("discrete Lyapunov solve satisfies its equation in 3x3") {
  Eigen::MatrixXd A(3, 3);
  A << 0.5, 0.2, 0.0, -0.1, 0.4, 0.1, 0.0, 0.3, -0.6;
  Eigen::MatrixXd Q(3, 3);
  Q << 2.0, 0.3, 0.0, 0.3, 1.0, -0.2, 0.0, -0.2, 1.5;
  const Eigen::MatrixXd X = discrete_lyapunov(A, Q);
  const Eigen::MatrixXd resid = A * X * A.transpose() + Q - X;
  CHECK(resid.norm() <= 1e-11 * X.norm());
  CHECK((X - X.transpose()).norm() <= 1e-12);

  Eigen::MatrixXd Au(1, 1);
  Au << 1.0;
  CHECK_THROWS_AS(discrete_lyapunov(Au, Q.topLeftCorner(1, 1)),
                  NumericalFailure);
}

TEST_CASE("scalar Riccati solution hits the closed-form root") {
  const ControlSolution sol = solve_control_dare(scalar_plant(2.0, 1.0));
  CHECK(sol.S(0, 0) == doctest::Approx(2.0 + std::sqrt(5.0)).epsilon(1e-12));
  CHECK(sol.K(0, 0) ==
        doctest::Approx(-(1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  CHECK(sol.min_cost == doctest::Approx(sol.S(0, 0)).epsilon(1e-15));
  CHECK(sol.residual <= 1e-9 * (1.0 + sol.S.norm()));
  CHECK(sol.iterations > 0);

  // Theta = K' (B'SB + R) K.
  const double s = sol.S(0, 0);
  const double k = sol.K(0, 0);
  CHECK(sol.Theta(0, 0) == doctest::Approx(k * k * (s + 1.0)).epsilon(1e-12));

  // The gain closes the loop: |a + b k| < 1.
  CHECK(std::fabs(2.0 + k) < 1.0);
}

TEST_CASE("scalar Riccati matches the quadratic root across random plants") {
  std::uint64_t ctr = 0;
  for (int i = 0; i < 20; ++i) {
    const double a = 0.2 + 2.3 * rng::unit(rng::at(11, ctr++));
    const double b = 0.5 + 1.5 * rng::unit(rng::at(11, ctr++));
    const double q = 0.3 + 2.0 * rng::unit(rng::at(11, ctr++));
    const double r = 0.3 + 2.0 * rng::unit(rng::at(11, ctr++));
    const ControlSolution sol = solve_control_dare(scalar_plant(a, b, 1.0, q, r));
    const double oracle = scalar_dare_root(a, b, q, r);
    CHECK(sol.S(0, 0) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("2x2 Riccati solution satisfies the stationarity equation") {
  PlantModel p;
  p.A.resize(2, 2);
  p.A << 1.2, 0.4, 0.0, 0.9;
  p.B.resize(2, 1);
  p.B << 0.0, 1.0;
  p.W = Eigen::MatrixXd::Identity(2, 2);
  p.X0 = Eigen::MatrixXd::Identity(2, 2);
  p.Q = Eigen::MatrixXd::Identity(2, 2);
  p.R = Eigen::MatrixXd::Identity(1, 1);
  p.gamma = 100.0;
  const ControlSolution sol = solve_control_dare(p);
  const Eigen::MatrixXd& S = sol.S;
  const Eigen::MatrixXd defect =
      p.A.transpose() * S * p.A - S + p.Q -
      p.A.transpose() * S * p.B *
          (p.B.transpose() * S * p.B + p.R)
              .ldlt()
              .solve(p.B.transpose() * S * p.A);
  CHECK(defect.norm() <= 1e-9);
  CHECK(spectral_radius(p.A + p.B * sol.K) < 1.0);
  CHECK((S - S.transpose()).norm() <= 1e-12);
  // S is PSD and beats the open-loop-free lower bound Q.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S - p.Q);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("an uncontrollable unstable plant is rejected") {
  CHECK_THROWS_AS(solve_control_dare(scalar_plant(2.0, 0.0)), NonStabilizable);
}

TEST_CASE("channel-driven estimator reaches its algebraic fixed point") {
  // Scalar sanity: with a = 2, w = 1, the channel below reproduces the
  // posterior/prior pair (0.1, 1.4).
  Eigen::MatrixXd A(1, 1), W(1, 1), C(1, 1);
  A << 2.0;
  W << 1.0;
  C << 3.0472469668023603;
  const EstimatorGains g = estimator_from_channel(A, W, C, 1.0);

  const double pp = g.PhatPlus(0, 0);
  const double ph = g.Phat(0, 0);
  CHECK(pp == doctest::Approx(1.4).epsilon(1e-7));
  CHECK(ph == doctest::Approx(0.1).epsilon(1e-6));

  // Structural identities, tight: prior propagates the posterior; the
  // information gain equals C'V^-1 C; gains tie together.
  CHECK(pp == doctest::Approx(4.0 * ph + 1.0).epsilon(1e-12));
  CHECK(1.0 / ph - 1.0 / pp ==
        doctest::Approx(C(0, 0) * C(0, 0)).epsilon(1e-9));
  const double jexp = pp * C(0, 0) / (C(0, 0) * C(0, 0) * pp + 1.0);
  CHECK(g.J(0, 0) == doctest::Approx(jexp).epsilon(1e-12));
  CHECK(g.L(0, 0) == doctest::Approx(2.0 * g.J(0, 0)).epsilon(1e-12));
  CHECK(g.Rcl(0, 0) ==
        doctest::Approx(2.0 - g.L(0, 0) * C(0, 0)).epsilon(1e-12));
  CHECK(std::fabs(g.Rcl(0, 0)) < 1.0);

  CHECK_THROWS_AS(estimator_from_channel(A, W, C, 0.0), std::invalid_argument);
}

TEST_CASE("a nearly blind scalar channel still closes, at a huge covariance") {
  // Any nonzero C is enough in one dimension: the error grows until the
  // channel resolves it. Fixed point solves C^2 P^2 - (3 + C^2) P - 1 = 0,
  // so C^2 P -> 3 and Rcl -> 2 - 2*(3/4) = 1/2.
  Eigen::MatrixXd A(1, 1), W(1, 1), C(1, 1);
  A << 2.0;
  W << 1.0;
  C << 1e-6;
  const EstimatorGains g = estimator_from_channel(A, W, C, 1.0);
  CHECK(g.PhatPlus(0, 0) * 1e-12 == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(g.Rcl(0, 0) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(std::fabs(g.Rcl(0, 0)) < 1.0);
}

TEST_CASE("a channel blind to a non-contractive mode trips the guard") {
  // The second state is observed, the first (a unit root) never is; the
  // covariance iteration stalls at the cap and the closed-loop matrix keeps
  // the unit eigenvalue.
  Eigen::MatrixXd A(2, 2), W(2, 2), C(2, 2);
  A << 1.0, 0.0, 0.0, 0.5;
  W = Eigen::MatrixXd::Identity(2, 2);
  C << 0.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(estimator_from_channel(A, W, C, 1.0), UnstableChain);
}

TEST_CASE("time-varying prior covariances start at X0 and settle") {
  Eigen::MatrixXd A(1, 1), W(1, 1), X0(1, 1), C(1, 1), V(1, 1);
  A << 2.0;
  W << 1.0;
  X0 << 1.0;
  C << 3.0472469668023603;
  V << 1.0;
  const auto seq = filter_prior_sequence(A, W, X0, C, V, 60);
  REQUIRE(seq.size() == 61);
  CHECK(seq[0](0, 0) == doctest::Approx(1.0));
  // Monotone approach to the stationary prior 1.4 from below.
  CHECK(seq[1](0, 0) > seq[0](0, 0));
  CHECK(seq[60](0, 0) == doctest::Approx(1.4).epsilon(1e-7));
  for (std::size_t t = 1; t < seq.size(); ++t)
    CHECK(seq[t](0, 0) <= 1.4 + 1e-6);

  CHECK_THROWS_AS(filter_prior_sequence(A, W, X0, C, V, -1),
                  std::invalid_argument);
}
