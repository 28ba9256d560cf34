#pragma once

// The three parallelism scheduling templates: a real concurrent executor over
// the micro-trainer, the analytic throughput/memory models, and a
// discrete-event simulator that validates the analytic model.

#include <string>
#include <vector>

#include "a3gnn/design_space.hpp"
#include "a3gnn/trainer.hpp"

namespace a3gnn::pipeline {

using graph::Graph;
using sampling::SamplerConfig;
using train::ModelSpec;

struct PlatformSpec {
  std::uint32_t num_gpus = 1;
  std::uint64_t gpu_mem_capacity = 8ull << 30;
  // "Sampling device" knob is a cost multiplier pair, not a real GPU path.
  // A multiplier > 1 pads sampling wall time in the executor.
  double cpu_sample_cost_multiplier = 1.0;
  double gpu_sample_cost_multiplier = 1.0;
  std::uint64_t runtime_overhead_bytes = 1 << 20;  // per worker context
};

struct StageCosts {
  double t_sample = 0.0;  // seconds per iteration (one worker-batch unit)
  double t_batch = 0.0;
  double t_train = 0.0;
  std::uint64_t iters_per_epoch = 0;
};

struct PipelineConfig {
  Mode mode = Mode::sequential;
  std::uint32_t workers = 1;
  std::uint32_t queue_capacity = 4;
};

struct MemoryEstimate {
  std::uint64_t cache_bytes = 0;
  std::uint64_t batch_bytes = 0;
  std::uint64_t model_bytes = 0;  // params + activations
  std::uint64_t runtime_bytes = 0;
  std::uint64_t peak_total = 0;
};

struct TraceEvent {
  double time = 0.0;
  std::string worker;
  std::string stage;
  std::uint64_t iteration = 0;
  bool start = false;
};

// CSV "time,worker,stage,iteration,event{start|end}"
void write_trace_csv(const std::vector<TraceEvent>& trace, const std::string& path);

// Median-of-probes wall-clock per stage; sampling cost scaled by the chosen
// device's multiplier.
StageCosts profile_stage_costs(const Graph& g, const ResolvedDesign& design,
                               const PlatformSpec& platform, const ModelSpec& spec,
                               const SamplerConfig& sampler_base,
                               std::uint32_t probe_iters);

// Sequential: 1/(iter*(ts+tb+tt)).
// Mode 1:     1/(iter*max((ts+tb)/n, tt)).
// Mode 2:     1/(iter*max(ts/n, tb+tt)).
double analytic_throughput(Mode mode, const StageCosts& costs, std::uint32_t n);

// Per device. Mode 1: n*(B + model + Runtime) + Theta.
//             Mode 2: B + model + n*Runtime + Theta.
//             Sequential: B + model + Runtime + Theta.
MemoryEstimate analytic_memory(Mode mode, std::uint32_t n, std::uint64_t theta,
                               std::uint64_t batch_bytes, std::uint64_t model_bytes,
                               std::uint64_t runtime_bytes);

struct SimResult {
  double epoch_time = 0.0;
  std::vector<TraceEvent> trace;
  std::size_t max_queue_occupancy = 0;
};

// Deterministic discrete-event simulation with fixed service times and a
// bounded producer/consumer queue.
SimResult simulate_pipeline(Mode mode, const StageCosts& costs, std::uint32_t n,
                            std::uint64_t iters, std::uint32_t queue_capacity);

struct ExecResult {
  Metrics metrics;
  MemoryEstimate memory;
  double hit_rate = 0.0;
  double elapsed_seconds = 0.0;
  bool within_capacity = true;
  std::uint64_t batch_bytes_max = 0;
  std::uint64_t model_bytes = 0;
};

struct ExecOptions {
  std::uint32_t epochs = 5;
  std::uint32_t queue_capacity = 4;
  std::uint64_t model_seed = 1;
};

// Real concurrent run of the chosen mode over the micro-trainer. Parallelism
// is a schedule, not an algorithm change: results are bit-identical to
// train() with the same seeds.
ExecResult execute_pipeline(const Graph& g, const ResolvedDesign& design,
                            const PlatformSpec& platform, const ModelSpec& spec,
                            const SamplerConfig& sampler_base, const ExecOptions& opts);

}  // namespace a3gnn::pipeline
