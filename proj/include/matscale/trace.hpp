#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "matscale/core.hpp"

namespace matscale {

enum class Status { Converged, IterationCapReached };

const char* to_string(Status s);

struct TraceRow {
  Index t = 0;
  std::string method;
  double f = 0.0;
  double potential = 0.0;
  double xinf = 0.0;
  double N = 0.0;
  std::string step_kind;
  std::int64_t elapsed_ns = 0;
};

struct SolveTrace {
  std::vector<TraceRow> rows;

  void append(const SolveTrace& other);
  // Columns t,method,f,potential,xinf,N,step_kind,elapsed_ns; 17 significant digits.
  void write_csv(std::ostream& os) const;
};

// Appends rows with wall time measured from construction. A null trace makes
// every call a no-op.
class TraceRecorder {
 public:
  TraceRecorder(SolveTrace* trace, std::string method, bool timing = true)
      : trace_(trace), method_(std::move(method)), timing_(timing), start_(std::chrono::steady_clock::now()) {}

  bool enabled() const { return trace_ != nullptr; }
  void record(Index t, double f, double potential, const Vector& x, double N, const std::string& kind);

 private:
  SolveTrace* trace_;
  std::string method_;
  bool timing_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace matscale
