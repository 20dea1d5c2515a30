// Timing probe for bilaplacian solves at a given scale.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "membrane/solver.hpp"
#include "membrane/stencil.hpp"

using namespace membrane;
using Clock = std::chrono::steady_clock;

static double secs(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 12;
  int d = argc > 2 ? std::atoi(argv[2]) : 4;
  bool force_direct = argc > 3 && std::atoi(argv[3]) != 0;

  auto t0 = Clock::now();
  LatticeBox box(n, d);
  auto bil = assemble_bilaplacian(box);
  auto t1 = Clock::now();
  std::printf("assembly N=%d d=%d sites=%lld nnz=%lld  %.2fs\n", n, d,
              (long long)box.site_count(), (long long)bil.matrix.nonZeros(),
              secs(t0, t1));

  SolverOptions opts;
  if (force_direct) opts.direct_threshold = box.site_count() + 1;

  auto t2 = Clock::now();
  SpdSolver solver(bil.matrix, opts);
  auto t3 = Clock::now();
  std::printf("setup %.2fs (direct=%d)\n", secs(t2, t3), solver.direct() ? 1 : 0);

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(box.site_count());
  rhs[box.index_of(Site{})] = 1.0;
  auto t4 = Clock::now();
  Eigen::VectorXd x = solver.solve(rhs);
  auto t5 = Clock::now();
  double res = (bil.matrix * x - rhs).norm();
  std::printf("solve %.2fs iters=%d residual=%.3e G(0,0)=%.10f\n", secs(t4, t5),
              solver.last_iterations(), res, x[box.index_of(Site{})]);
  return 0;
}
