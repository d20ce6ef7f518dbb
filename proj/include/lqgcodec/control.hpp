#pragma once

#include <vector>

#include <Eigen/Dense>

#include "lqgcodec/plant.hpp"

namespace lqgcodec {

double spectral_radius(const Eigen::MatrixXd& M);
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& M);

// PBH tests with an explicit rank tolerance on unit-circle-or-outside modes.
bool pbh_stabilizable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      double rank_tol = 1e-10);
bool pbh_detectable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                    double rank_tol = 1e-10);

// Solves X = A X A' + Q for stable A (Kronecker direct solve).
Eigen::MatrixXd discrete_lyapunov(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& Q);

// Stationary solution of the control Riccati equation
//   A'SA - S - A'SB (B'SB + R)^-1 B'SA + Q = 0
// with K = -(B'SB+R)^-1 B'SA, Theta = K'(B'SB+R)K, min_cost = Tr(S W).
struct ControlSolution {
  Eigen::MatrixXd S;
  Eigen::MatrixXd K;
  Eigen::MatrixXd Theta;
  double min_cost = 0.0;
  double residual = 0.0;  // Frobenius norm of the Riccati defect
  int iterations = 0;
};

ControlSolution solve_control_dare(const PlantModel& plant,
                                   double rel_tol = 1e-12,
                                   long max_iter = 1000000);

// Steady-state sensing-side gains for the channel (C, V = vI):
//   J = Phat+ C' (C Phat+ C' + V)^-1,  L = A J,  Rcl = A - L C.
struct EstimatorGains {
  Eigen::MatrixXd C;
  Eigen::MatrixXd V;  // v * I
  double v = 0.0;
  Eigen::MatrixXd J;
  Eigen::MatrixXd L;
  Eigen::MatrixXd Rcl;
  Eigen::MatrixXd Phat;      // posterior error covariance
  Eigen::MatrixXd PhatPlus;  // prior error covariance, A Phat A' + W
};

EstimatorGains estimator_from_channel(const Eigen::MatrixXd& A,
                                      const Eigen::MatrixXd& W,
                                      const Eigen::MatrixXd& C, double v);

// Time-varying one-step-ahead error covariances P_{t|t-1}, t = 0..T, from
// P_{0|-1} = X0 under the optimal (time-varying gain) filter for (C, V).
std::vector<Eigen::MatrixXd> filter_prior_sequence(const Eigen::MatrixXd& A,
                                                   const Eigen::MatrixXd& W,
                                                   const Eigen::MatrixXd& X0,
                                                   const Eigen::MatrixXd& C,
                                                   const Eigen::MatrixXd& V,
                                                   long T);

}  // namespace lqgcodec
