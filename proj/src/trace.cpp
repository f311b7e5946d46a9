#include "matscale/trace.hpp"

#include <iomanip>
#include <ostream>

namespace matscale {

const char* to_string(Status s) {
  switch (s) {
    case Status::Converged:
      return "converged";
    case Status::IterationCapReached:
      return "iteration_cap_reached";
  }
  return "unknown";
}

void SolveTrace::append(const SolveTrace& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

void SolveTrace::write_csv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << "t,method,f,potential,xinf,N,step_kind,elapsed_ns\n";
  for (const auto& r : rows)
    os << r.t << ',' << r.method << ',' << r.f << ',' << r.potential << ',' << r.xinf << ',' << r.N << ','
       << r.step_kind << ',' << r.elapsed_ns << '\n';
  os.precision(old);
}

void TraceRecorder::record(Index t, double f, double potential, const Vector& x, double N,
                           const std::string& kind) {
  if (!trace_) return;
  TraceRow row;
  row.t = t;
  row.method = method_;
  row.f = f;
  row.potential = potential;
  row.xinf = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  row.N = N;
  row.step_kind = kind;
  if (timing_)
    row.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start_)
                         .count();
  trace_->rows.push_back(std::move(row));
}

}  // namespace matscale
