#include <algorithm>
#include <fstream>

#include "a3gnn/pipeline.hpp"

namespace a3gnn::pipeline {

void write_trace_csv(const std::vector<TraceEvent>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_trace_csv: cannot open " + path);
  out << "time,worker,stage,iteration,event\n";
  char buf[64];
  for (const TraceEvent& e : trace) {
    std::snprintf(buf, sizeof(buf), "%.9f", e.time);
    out << buf << "," << e.worker << "," << e.stage << "," << e.iteration << ","
        << (e.start ? "start" : "end") << "\n";
  }
}

double analytic_throughput(Mode mode, const StageCosts& costs, std::uint32_t n) {
  if (n < 1) throw ParameterError("analytic_throughput: n must be >= 1");
  if (costs.iters_per_epoch == 0) {
    throw ParameterError("analytic_throughput: iters_per_epoch must be > 0");
  }
  double per_iter = 0.0;
  switch (mode) {
    case Mode::sequential:
      per_iter = costs.t_sample + costs.t_batch + costs.t_train;
      break;
    case Mode::pmode1:
      per_iter = std::max((costs.t_sample + costs.t_batch) / n, costs.t_train);
      break;
    case Mode::pmode2:
      per_iter = std::max(costs.t_sample / n, costs.t_batch + costs.t_train);
      break;
  }
  const double epoch_time = static_cast<double>(costs.iters_per_epoch) * per_iter;
  if (epoch_time <= 0.0) {
    throw ParameterError("analytic_throughput: all-zero stage costs");
  }
  return 1.0 / epoch_time;
}

MemoryEstimate analytic_memory(Mode mode, std::uint32_t n, std::uint64_t theta,
                               std::uint64_t batch_bytes, std::uint64_t model_bytes,
                               std::uint64_t runtime_bytes) {
  if (n < 1) throw ParameterError("analytic_memory: n must be >= 1");
  MemoryEstimate e;
  e.cache_bytes = theta;
  e.batch_bytes = batch_bytes;
  e.model_bytes = model_bytes;
  e.runtime_bytes = runtime_bytes;
  switch (mode) {
    case Mode::sequential:
      e.peak_total = batch_bytes + model_bytes + runtime_bytes + theta;
      break;
    case Mode::pmode1:
      // Worker-replicated terms scale with n; the cache is shared per device.
      e.peak_total = static_cast<std::uint64_t>(n) * (batch_bytes + model_bytes + runtime_bytes) + theta;
      break;
    case Mode::pmode2:
      // Only the per-worker runtime contexts replicate.
      e.peak_total = batch_bytes + model_bytes + static_cast<std::uint64_t>(n) * runtime_bytes + theta;
      break;
  }
  return e;
}

}  // namespace a3gnn::pipeline
