#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "matscale/firstorder.hpp"
#include "matscale/objective.hpp"
#include "matscale/options.hpp"
#include "matscale/problem.hpp"
#include "matscale/scaling3.hpp"

namespace matscale {

// ---------------------------------------------------------------- instances

enum class InstanceKind { UniformPositive, SparseScalable, UpperTriangularHard, Pattern };

struct GenerateSpec {
  InstanceKind kind = InstanceKind::UniformPositive;
  Index d = 0;
  Index n = 0;
  double lo = 0.1, hi = 1.0;  // UniformPositive entry range
  double density = 0.1;       // SparseScalable extra-entry probability
  std::string pattern_file;   // Pattern
};

// Square instances get r = c = 1; otherwise r_i = n/g, c_j = d/g with g = gcd(d, n).
ScalingInstance generate(const GenerateSpec& spec, std::uint64_t seed);

// Matrix Market coordinate files (real, integer or pattern; general or symmetric).
RowSparse read_matrix_market(const std::string& path);
RowSparse read_matrix_market(std::istream& in);
void write_matrix_market(std::ostream& out, const RowSparse& A);

// Whitespace or comma separated integers, from a file or an inline list.
std::vector<long long> parse_int_list(const std::string& text);
std::vector<long long> read_int_vector(const std::string& path_or_list);

// ---------------------------------------------------------------- runs

enum class Method { Ras, S0, S1, S2, S3, Auto };
const char* to_string(Method m);
std::optional<Method> parse_method(const std::string& s);

struct RunConfig {
  Method method = Method::Auto;
  double eps = 1e-6;
  std::optional<double> n_bound;
  std::optional<Index> T;
  Index ras_max_iters = 10'000'000;
  SolverOptions options;
};

struct RunOutcome {
  ScalePoint x;
  SolveTrace trace;
  ApproxReport report;
  Status status = Status::IterationCapReached;
  Index iterations = 0;
  double f = 0.0;
  double N = 0.0;
  WorkCounters work;
  std::int64_t wall_ns = 0;
};

// Throws Error(Infeasible) when the instance is not asymptotically scalable.
RunOutcome run(const ScalingInstance& inst, const RunConfig& config);

// 0 converged, 2 infeasible, 3 not converged.
int exit_code(Status s);
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitNotConverged = 3;

std::string summary_json(const RunConfig& config, const RunOutcome& out, int indent = 2);

// ---------------------------------------------------------------- bench

struct BenchCell {
  std::string instance;
  std::string method;
  double eps = 0.0;
  bool ok = false;
  std::string error;
  std::string status;
  Index iterations = 0;
  long long f_evals = 0;
  long long matvecs = 0;
  double wall_ms = 0.0;
  double potential = 0.0;
};

struct BenchSuite {
  std::vector<std::pair<std::string, GenerateSpec>> instances;
  std::vector<Method> methods;
  std::vector<double> eps;
  std::uint64_t seed = 0;
};

BenchSuite default_suite();
std::vector<BenchCell> bench(const BenchSuite& suite, const SolverOptions& base);
void write_bench_csv(std::ostream& os, const std::vector<BenchCell>& cells);
void write_bench_table(std::ostream& os, const std::vector<BenchCell>& cells);

}  // namespace matscale
