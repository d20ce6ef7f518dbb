#pragma once

#include <optional>

#include <Eigen/Dense>

#include "lqgcodec/control.hpp"
#include "lqgcodec/plant.hpp"

namespace lqgcodec {

// Minimum feedback bitrate compatible with long-run cost <= gamma, and the
// Gaussian test channel that attains it. rate = 0.5*log2(det Phat+ / det Phat)
// where Phat solves
//   minimize 0.5*(-log2 det Pi + log2 det W)
//   s.t.     Tr(Theta P) + Tr(W S) <= gamma
//            P <= A P A' + W
//            [[P - Pi, P A'], [A P, A P A' + W]] >= 0.
struct RdfSolution {
  Eigen::MatrixXd Phat;
  Eigen::MatrixXd Pi;
  double rate = 0.0;   // bits per step
  double gamma = 0.0;
  ControlSolution control;
  std::optional<EstimatorGains> gains;  // empty iff degenerate (rate == 0)
  double v = 0.0;
  double delta = 0.0;  // sqrt(12 v)
  bool degenerate = false;

  Eigen::MatrixXd phat_plus() const;
};

// Closed form, m = 1 only.
RdfSolution solve_rdf_siso(const PlantModel& plant, double v = 1.0);

struct BarrierOptions {
  double t0 = 1.0;
  double mu = 10.0;          // barrier growth per outer stage
  double gap_tol = 1e-9;     // stop when (3m+1)/t <= gap_tol (nats)
  double newton_tol = 1e-12; // half squared Newton decrement
  int max_inner = 200;
  double alpha = 0.3;        // backtracking sufficient-decrease fraction
  double beta = 0.8;         // backtracking shrink
};

// Barrier-method solver for any m >= 1 (independent code path from the
// closed form; the two are cross-checked in tests).
RdfSolution solve_rdf_mimo(const PlantModel& plant, double v = 1.0,
                           const BarrierOptions& opts = {});

// Factor the optimal channel: M = Phat^-1 - PhatPlus^-1 = C' V^-1 C with
// V = vI, C = sqrt(v) * Lambda^(1/2) U'. Throws DegenerateChannel when M ~ 0.
EstimatorGains extract_test_channel(const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& W,
                                    const Eigen::MatrixXd& Phat, double v,
                                    double clip_tol = 1e-12);

}  // namespace lqgcodec
