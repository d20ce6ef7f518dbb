#include "lqgcodec/plant.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lqgcodec/control.hpp"
#include "lqgcodec/errors.hpp"

namespace lqgcodec {
namespace {

void require_square(const Eigen::MatrixXd& M, int m, const char* name) {
  if (M.rows() != m || M.cols() != m)
    throw std::invalid_argument(std::string(name) + ": expected " +
                                std::to_string(m) + "x" + std::to_string(m) +
                                ", got " + std::to_string(M.rows()) + "x" +
                                std::to_string(M.cols()));
}

void require_symmetric(const Eigen::MatrixXd& M, const char* name) {
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + M.cwiseAbs().maxCoeff()))
    throw std::invalid_argument(std::string(name) + ": not symmetric");
}

double min_eig(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(M));
  return es.eigenvalues().minCoeff();
}

}  // namespace

void PlantModel::validate() const {
  const int m = state_dim();
  if (m < 1) throw std::invalid_argument("A: empty state matrix");
  if (A.cols() != m)
    throw std::invalid_argument("A: expected a square matrix, got " +
                                std::to_string(A.rows()) + "x" +
                                std::to_string(A.cols()));
  if (B.rows() != m || B.cols() < 1)
    throw std::invalid_argument("B: expected " + std::to_string(m) +
                                " rows and at least one column");
  require_square(W, m, "W");
  require_square(X0, m, "X0");
  require_square(Q, m, "Q");
  require_square(R, input_dim(), "R");
  require_symmetric(W, "W");
  require_symmetric(X0, "X0");
  require_symmetric(Q, "Q");
  require_symmetric(R, "R");
  if (!(min_eig(W) > 0.0)) throw std::invalid_argument("W: not positive definite");
  if (min_eig(X0) < -1e-12) throw std::invalid_argument("X0: not positive semidefinite");
  if (min_eig(Q) < -1e-12) throw std::invalid_argument("Q: not positive semidefinite");
  if (!(min_eig(R) > 0.0)) throw std::invalid_argument("R: not positive definite");
  if (!std::isfinite(gamma)) throw std::invalid_argument("gamma: not finite");
  if (!pbh_stabilizable(A, B))
    throw NonStabilizable("(A, B) fails the PBH stabilizability test");
}

}  // namespace lqgcodec
