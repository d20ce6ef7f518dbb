#pragma once

#include <Eigen/Dense>

namespace lqgcodec {

// Discrete-time plant x_{t+1} = A x_t + B u_t + w_t, w_t ~ N(0, W),
// x_0 ~ N(0, X0), stage cost x'Qx + u'Ru, long-run budget gamma.
struct PlantModel {
  Eigen::MatrixXd A;   // m x m
  Eigen::MatrixXd B;   // m x p
  Eigen::MatrixXd W;   // m x m, PD
  Eigen::MatrixXd X0;  // m x m, PSD
  Eigen::MatrixXd Q;   // m x m, PSD
  Eigen::MatrixXd R;   // p x p, PD
  double gamma = 0.0;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }

  // Dimension/symmetry/definiteness checks plus PBH stabilizability of (A,B);
  // throws std::invalid_argument or NonStabilizable naming the defect.
  void validate() const;
};

}  // namespace lqgcodec
