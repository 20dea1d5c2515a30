#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <stdexcept>
#include <string>

namespace membrane {

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverOptions {
  // Direct sparse factorization below this unknown count, CG above. Fill-in
  // of the 4-d bilaplacian makes direct factorization memory-bound quickly;
  // 2e4 keeps the factor under control on desk hardware.
  std::int64_t direct_threshold = 20'000;
  double cg_tolerance = 1e-10;  // relative residual
  int cg_max_iterations = 40'000;
};

// SPD solver: sparse Cholesky for small systems, incomplete-Cholesky
// preconditioned conjugate gradient for large ones.
class SpdSolver {
 public:
  SpdSolver(const Eigen::SparseMatrix<double>& matrix, SolverOptions opts = {});

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, double tolerance) const;

  bool direct() const { return llt_ != nullptr; }
  int last_iterations() const { return last_iterations_; }
  Eigen::Index size() const { return matrix_.rows(); }
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }

  // For the exact-factorization sampler: with P A P^T = L L^T the map
  // z -> P^T L^{-T} z turns iid standard normals into a vector with
  // covariance A^{-1}. Direct mode only.
  Eigen::VectorXd backsolve_upper(const Eigen::VectorXd& z) const;

 private:
  Eigen::SparseMatrix<double> matrix_;
  SolverOptions opts_;
  std::unique_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt_;
  std::unique_ptr<Eigen::IncompleteCholesky<double>> ic_;
  mutable int last_iterations_ = 0;
};

}  // namespace membrane
