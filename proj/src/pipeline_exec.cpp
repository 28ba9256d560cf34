// Real concurrent executor over the micro-trainer, plus the profiler feeding
// the analytic model. Work units are (epoch, step, worker) tuples consumed in
// a fixed global order, so every mode reproduces train() bit for bit.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

#include "a3gnn/pipeline.hpp"

namespace a3gnn::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void pad_wall_time(double measured_seconds, double multiplier) {
  if (multiplier > 1.0 && measured_seconds > 0.0) {
    std::this_thread::sleep_for(
        std::chrono::duration<double>(measured_seconds * (multiplier - 1.0)));
  }
}

template <typename T>
class OrderedBoundedChannel {
 public:
  explicit OrderedBoundedChannel(std::size_t capacity) : capacity_(capacity) {}

  void push(std::uint64_t seq, T item) {
    std::unique_lock lk(mu_);
    cv_space_.wait(lk, [&] { return seq < next_ + capacity_; });
    buffer_.emplace(seq, std::move(item));
    cv_item_.notify_all();
  }

  T pop() {
    std::unique_lock lk(mu_);
    cv_item_.wait(lk, [&] { return buffer_.count(next_) > 0; });
    auto node = buffer_.extract(next_);
    ++next_;
    cv_space_.notify_all();
    return std::move(node.mapped());
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_item_, cv_space_;
  std::map<std::uint64_t, T> buffer_;
  std::uint64_t next_ = 0;
  std::size_t capacity_;
};

// Everything a run needs, built identically by train(), the profiler and the
// executor.
struct RunSetup {
  graph::PartitionSet parts;
  std::vector<train::WorkerContext> ctxs;
  cache::CacheState cache;
  double sample_multiplier = 1.0;
  // batches[epoch][worker][step-within-worker]
  std::vector<std::vector<std::vector<std::vector<NodeId>>>> batches;
  std::vector<std::uint32_t> steps_per_epoch;
  std::uint32_t u = 1;
};

RunSetup make_setup(const Graph& g, const ResolvedDesign& d, const PlatformSpec& platform,
                    const SamplerConfig& sampler_base, std::uint32_t epochs) {
  RunSetup s;
  cache::CacheConfig ccfg;
  ccfg.volume_bytes = d.cache_volume;
  ccfg.num_devices = d.partitions;
  s.cache = cache::build_static_cache(g, ccfg);
  const graph::PartitionSet* parts_ptr = nullptr;
  if (d.partitions > 1) {
    s.parts = graph::partition_graph(g, d.partitions, graph::PartitionMethod::hash);
    parts_ptr = &s.parts;
  }
  s.ctxs = train::make_worker_contexts(g, parts_ptr, s.cache);
  s.u = static_cast<std::uint32_t>(s.ctxs.size());
  for (const auto& c : s.ctxs) {
    if (c.train_nodes.empty()) throw ConfigError("pipeline: a worker has no train nodes");
  }
  s.sample_multiplier = d.sampling_device == Device::cpu
                            ? platform.cpu_sample_cost_multiplier
                            : platform.gpu_sample_cost_multiplier;
  s.batches.resize(epochs);
  s.steps_per_epoch.resize(epochs);
  for (std::uint32_t e = 0; e < epochs; ++e) {
    s.batches[e].resize(s.u);
    std::size_t steps = 0;
    for (std::uint32_t w = 0; w < s.u; ++w) {
      s.batches[e][w] = train::plan_epoch_batches(s.ctxs[w].train_nodes, e, d.batch_size,
                                                  hash2(sampler_base.rng_seed, w));
      steps = std::max(steps, s.batches[e][w].size());
    }
    s.steps_per_epoch[e] = static_cast<std::uint32_t>(steps);
  }
  return s;
}

struct Unit {
  std::uint32_t epoch;
  std::uint32_t step;
  std::uint32_t worker;
};

std::vector<Unit> enumerate_units(const RunSetup& s) {
  std::vector<Unit> units;
  for (std::uint32_t e = 0; e < s.steps_per_epoch.size(); ++e) {
    for (std::uint32_t t = 0; t < s.steps_per_epoch[e]; ++t) {
      for (std::uint32_t w = 0; w < s.u; ++w) units.push_back({e, t, w});
    }
  }
  return units;
}

sampling::SampleBatch sample_unit(const RunSetup& s, const SamplerConfig& base,
                                  const ResolvedDesign& d, const Unit& u) {
  const auto& per_worker = s.batches[u.epoch][u.worker];
  const auto& seeds = per_worker[u.step % per_worker.size()];
  SamplerConfig cfg = base;
  cfg.bias_rate = d.bias_rate;
  cfg.rng_seed = train::sampling_seed(base.rng_seed, u.epoch, u.step, u.worker);
  return sampling::sample_khop(*s.ctxs[u.worker].graph, seeds, cfg, s.ctxs[u.worker].cache);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

StageCosts profile_stage_costs(const Graph& g, const ResolvedDesign& design,
                               const PlatformSpec& platform, const ModelSpec& spec,
                               const SamplerConfig& sampler_base,
                               std::uint32_t probe_iters) {
  if (probe_iters < 3) throw ParameterError("profile_stage_costs: probe_iters must be >= 3");
  RunSetup setup = make_setup(g, design, platform, sampler_base, 1);
  train::Model model = train::init_model(spec, 1);

  std::vector<double> ts, tb, tt;
  for (std::uint32_t i = 0; i < probe_iters; ++i) {
    const Unit u{0, i % setup.steps_per_epoch[0], static_cast<std::uint32_t>(i % setup.u)};
    cache::CacheAccounting acc(design.partitions);

    auto t0 = Clock::now();
    sampling::SampleBatch batch = sample_unit(setup, sampler_base, design, u);
    ts.push_back(seconds_since(t0));

    t0 = Clock::now();
    auto [feats, stats] =
        cache::retrieve_features(batch, setup.ctxs[u.worker].cache, *setup.ctxs[u.worker].graph, acc);
    tb.push_back(seconds_since(t0));

    t0 = Clock::now();
    train::Gradients grads;
    train::grad_on_batch(model, *setup.ctxs[u.worker].graph, batch, feats.data(), grads);
    tt.push_back(seconds_since(t0));
  }

  StageCosts costs;
  costs.t_sample = median(ts) * setup.sample_multiplier;
  costs.t_batch = median(tb);
  costs.t_train = median(tt);
  costs.iters_per_epoch = static_cast<std::uint64_t>(setup.steps_per_epoch[0]) * setup.u;
  return costs;
}

namespace {

struct ProducedItem {
  sampling::SampleBatch batch;
  std::vector<float> feats;  // empty in mode 2 (batch gen is serialized)
  cache::BatchStats stats;
};

}  // namespace

ExecResult execute_pipeline(const Graph& g, const ResolvedDesign& design,
                            const PlatformSpec& platform, const ModelSpec& spec,
                            const SamplerConfig& sampler_base, const ExecOptions& opts) {
  RunSetup setup = make_setup(g, design, platform, sampler_base, opts.epochs);
  const std::vector<Unit> units = enumerate_units(setup);
  train::Model model = train::init_model(spec, opts.model_seed);
  cache::CacheAccounting acc(design.partitions);

  std::uint64_t max_batch_bytes = 0;
  std::uint64_t max_act_bytes = 0;
  std::vector<train::Gradients> step_grads(setup.u);

  auto train_unit = [&](const Unit& u, const sampling::SampleBatch& batch,
                        const float* feats) {
    train::ForwardResult fwd = train::forward(model, batch, feats);
    max_act_bytes = std::max(max_act_bytes, fwd.activation_bytes);
    std::vector<std::uint32_t> labels(batch.num_seed_unique);
    const Graph& lg = *setup.ctxs[u.worker].graph;
    for (std::size_t s = 0; s < batch.num_seed_unique; ++s) {
      labels[s] = lg.labels[batch.unique_nodes[s]];
    }
    train::backward(model, batch, feats, fwd, labels, step_grads[u.worker]);
    if (u.worker == setup.u - 1) {
      const train::Gradients mean = train::sync_gradients(step_grads);
      train::sgd_step(model, mean, spec.learning_rate);
    }
  };

  const auto t_start = Clock::now();

  if (design.mode == Mode::sequential || units.empty()) {
    for (const Unit& u : units) {
      const auto s0 = Clock::now();
      sampling::SampleBatch batch = sample_unit(setup, sampler_base, design, u);
      pad_wall_time(seconds_since(s0), setup.sample_multiplier);
      auto [feats, stats] =
          cache::retrieve_features(batch, setup.ctxs[u.worker].cache, *setup.ctxs[u.worker].graph, acc);
      max_batch_bytes = std::max(max_batch_bytes, stats.batch_bytes);
      train_unit(u, batch, feats.data());
    }
  } else {
    const bool producers_retrieve = design.mode == Mode::pmode1;
    OrderedBoundedChannel<ProducedItem> channel(opts.queue_capacity);
    std::atomic<std::uint64_t> next_unit{0};
    std::atomic<std::uint64_t> batch_bytes_hwm{0};

    auto producer = [&] {
      for (;;) {
        const std::uint64_t seq = next_unit.fetch_add(1);
        if (seq >= units.size()) return;
        const Unit& u = units[seq];
        ProducedItem item;
        const auto s0 = Clock::now();
        item.batch = sample_unit(setup, sampler_base, design, u);
        pad_wall_time(seconds_since(s0), setup.sample_multiplier);
        if (producers_retrieve) {
          auto [feats, stats] = cache::retrieve_features(
              item.batch, setup.ctxs[u.worker].cache, *setup.ctxs[u.worker].graph, acc);
          item.feats = std::move(feats);
          item.stats = stats;
          std::uint64_t hwm = batch_bytes_hwm.load();
          while (stats.batch_bytes > hwm &&
                 !batch_bytes_hwm.compare_exchange_weak(hwm, stats.batch_bytes)) {
          }
        }
        channel.push(seq, std::move(item));
      }
    };

    std::vector<std::thread> threads;
    threads.reserve(design.workers);
    for (std::uint32_t i = 0; i < design.workers; ++i) threads.emplace_back(producer);

    for (std::uint64_t seq = 0; seq < units.size(); ++seq) {
      ProducedItem item = channel.pop();
      const Unit& u = units[seq];
      if (!producers_retrieve) {
        auto [feats, stats] = cache::retrieve_features(
            item.batch, setup.ctxs[u.worker].cache, *setup.ctxs[u.worker].graph, acc);
        item.feats = std::move(feats);
        item.stats = stats;
      }
      max_batch_bytes = std::max(max_batch_bytes, item.stats.batch_bytes);
      train_unit(u, item.batch, item.feats.data());
    }
    for (auto& t : threads) t.join();
    max_batch_bytes = std::max(max_batch_bytes, batch_bytes_hwm.load());
  }

  ExecResult result;
  result.elapsed_seconds = seconds_since(t_start);
  result.metrics.throughput_eps =
      result.elapsed_seconds > 0.0 ? static_cast<double>(opts.epochs) / result.elapsed_seconds : 0.0;
  result.batch_bytes_max = max_batch_bytes;
  result.model_bytes = spec.param_bytes() + max_act_bytes;
  result.memory =
      analytic_memory(design.mode, design.workers, design.cache_volume, max_batch_bytes,
                      result.model_bytes, platform.runtime_overhead_bytes);
  result.metrics.memory_bytes = static_cast<double>(result.memory.peak_total);
  result.within_capacity = result.memory.peak_total <= platform.gpu_mem_capacity;
  result.metrics.accuracy = train::evaluate_full_graph(model, g);
  result.hit_rate = acc.total() > 0 ? cache::hit_rate(acc) : 0.0;
  return result;
}

}  // namespace a3gnn::pipeline
