#include "membrane/solver.hpp"

namespace membrane {

SpdSolver::SpdSolver(const Eigen::SparseMatrix<double>& matrix, SolverOptions opts)
    : matrix_(matrix), opts_(opts) {
  if (matrix_.rows() != matrix_.cols())
    throw SolverError("SpdSolver: matrix must be square");

  if (matrix_.rows() <= opts_.direct_threshold) {
    llt_ = std::make_unique<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
    llt_->compute(matrix_);
    if (llt_->info() != Eigen::Success)
      throw SolverError("SpdSolver: Cholesky factorization failed (matrix not SPD?)");
    return;
  }

  ic_ = std::make_unique<Eigen::IncompleteCholesky<double>>();
  ic_->compute(matrix_);
  if (ic_->info() != Eigen::Success)
    throw SolverError("SpdSolver: incomplete Cholesky preconditioner failed");
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& rhs) const {
  return solve(rhs, opts_.cg_tolerance);
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& rhs, double tolerance) const {
  if (llt_) {
    Eigen::VectorXd x = llt_->solve(rhs);
    if (llt_->info() != Eigen::Success) throw SolverError("SpdSolver: solve failed");
    last_iterations_ = 0;
    return x;
  }

  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    last_iterations_ = 0;
    return Eigen::VectorXd::Zero(rhs.size());
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd r = rhs;
  Eigen::VectorXd z = ic_->solve(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);

  for (int it = 1; it <= opts_.cg_max_iterations; ++it) {
    Eigen::VectorXd ap = matrix_ * p;
    double alpha = rz / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    if (r.norm() <= tolerance * rhs_norm) {
      last_iterations_ = it;
      return x;
    }
    z = ic_->solve(r);
    double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw SolverError("SpdSolver: conjugate gradient did not converge within " +
                    std::to_string(opts_.cg_max_iterations) + " iterations");
}

Eigen::VectorXd SpdSolver::backsolve_upper(const Eigen::VectorXd& z) const {
  if (!llt_)
    throw SolverError("SpdSolver: backsolve requires the direct factorization");
  Eigen::VectorXd y = llt_->matrixU().solve(z);
  return llt_->permutationPinv() * y;
}

}  // namespace membrane
