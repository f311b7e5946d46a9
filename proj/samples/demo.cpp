// Scale a small matrix with each method and print the factors from one run.
#include <cstdio>

#include "matscale/driver.hpp"
#include "matscale/problem.hpp"

using namespace matscale;

int main() {
  DenseMatrix a(3, 3);
  a << 4, 1, 0,
       1, 2, 1,
       0, 1, 3;
  const ScalingInstance inst = ScalingInstance::create(a.sparseView(), {1, 1, 1}, {1, 1, 1});

  if (!check_asymptotic_scalability(inst).scalable()) {
    std::puts("not scalable");
    return 2;
  }

  RunOutcome last;
  for (Method m : {Method::Ras, Method::S0, Method::S1, Method::S3}) {
    RunConfig cfg;
    cfg.method = m;
    cfg.eps = 1e-6;
    last = run(inst, cfg);
    std::printf("%-4s iterations %6lld  f %.12f  potential %.2e\n", to_string(m),
                static_cast<long long>(last.iterations), last.f, last.report.col_potential);
  }

  const ScalingFactors s = extract_scaling(inst, last.x);
  // factors refer to the stored, row-normalized matrix
  const DenseMatrix scaled = s.X.asDiagonal() * DenseMatrix(inst.A()) * s.Y.asDiagonal();
  std::puts("scaled matrix:");
  for (Index i = 0; i < 3; ++i) std::printf("  %.6f %.6f %.6f\n", scaled(i, 0), scaled(i, 1), scaled(i, 2));
  return 0;
}
