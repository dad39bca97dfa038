#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "nlk/diagnostics.hpp"
#include "nlk/errors.hpp"

namespace nlk {

// [u]^2 = 2 w u^T L u and ||u||^2 = w u^T u with L = diag(rowsum W) - W, so
// lambda_star = 2 * (second smallest eigenvalue of L). The constant vector is
// L's null space; adding mu/N * 1 1^T lifts it to mu without touching the
// mean-zero eigenpairs, and the shifted matrix is SPD.
PoincareResult poincare_sharp_discrete(const KernelMatrix& w_sing, const Grid& grid,
                                       double tol, int max_iterations) {
  const auto n = static_cast<Eigen::Index>(w_sing.size());
  if (static_cast<std::size_t>(n) != grid.size()) {
    throw ContractError("poincare_sharp_discrete: kernel and grid sizes differ");
  }
  if (n < 2) throw ContractError("poincare_sharp_discrete: need at least two nodes");

  Eigen::MatrixXd lap(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = w_sing.row(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < n; ++j) lap(i, j) = -row[static_cast<std::size_t>(j)];
    lap(i, i) = w_sing.row_sum(static_cast<std::size_t>(i));
  }
  const double mu = 2.0 * w_sing.max_row_sum() + 1.0;
  Eigen::MatrixXd shifted = lap;
  shifted.array() += mu / static_cast<double>(n);

  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("poincare_sharp_discrete: Cholesky factorisation failed "
                         "(kernel graph not connected?)");
  }

  // Deterministic, generic mean-zero start: a ramp plus a quadratic term.
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n - 1);
    x(i) = u - 0.5 + 0.1 * u * u + 0.01 * std::cos(7.0 * u);
  }
  x.array() -= x.mean();
  x.normalize();

  PoincareResult res;
  double q = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    x = llt.solve(x);
    x.array() -= x.mean();
    x.normalize();
    const Eigen::VectorXd lx = lap * x;
    q = x.dot(lx);
    res.residual = (lx - q * x).norm() / q;
    res.iterations = it;
    if (res.residual < tol) {
      res.lambda_star = 2.0 * q;
      return res;
    }
  }
  std::ostringstream msg;
  msg << "poincare_sharp_discrete: no convergence after " << max_iterations
      << " iterations, relative residual " << res.residual;
  throw NumericalError(msg.str());
}

}  // namespace nlk
