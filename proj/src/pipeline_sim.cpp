// Discrete-event simulator for the pipeline templates: n producers feed one
// consumer through a bounded FIFO queue. Fixed service times, deterministic
// event ordering (consumer completions before producer completions at equal
// times, then by id).

#include <deque>
#include <queue>

#include "a3gnn/pipeline.hpp"

namespace a3gnn::pipeline {

namespace {

struct Event {
  double time;
  int kind;  // 0 = consumer done, 1 = producer done
  std::uint32_t id;
  std::uint64_t iteration;

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (kind != o.kind) return kind > o.kind;
    return id > o.id;
  }
};

struct ProducerTrace {
  // Emit sample/batch sub-stages inside one producer service interval.
  static void emit(std::vector<TraceEvent>& trace, std::uint32_t p, std::uint64_t iter,
                   double start, double t_sample, double t_batch) {
    const std::string w = "p" + std::to_string(p);
    trace.push_back({start, w, "sample", iter, true});
    trace.push_back({start + t_sample, w, "sample", iter, false});
    if (t_batch > 0.0) {
      trace.push_back({start + t_sample, w, "batch", iter, true});
      trace.push_back({start + t_sample + t_batch, w, "batch", iter, false});
    }
  }
};

SimResult simulate_sequential(const StageCosts& c, std::uint64_t iters) {
  SimResult r;
  double t = 0.0;
  for (std::uint64_t i = 0; i < iters; ++i) {
    r.trace.push_back({t, "seq", "sample", i, true});
    t += c.t_sample;
    r.trace.push_back({t, "seq", "sample", i, false});
    r.trace.push_back({t, "seq", "batch", i, true});
    t += c.t_batch;
    r.trace.push_back({t, "seq", "batch", i, false});
    r.trace.push_back({t, "seq", "train", i, true});
    t += c.t_train;
    r.trace.push_back({t, "seq", "train", i, false});
  }
  r.epoch_time = t;
  return r;
}

}  // namespace

SimResult simulate_pipeline(Mode mode, const StageCosts& costs, std::uint32_t n,
                            std::uint64_t iters, std::uint32_t queue_capacity) {
  if (iters < 1) throw ParameterError("simulate_pipeline: iters must be >= 1");
  if (queue_capacity < 1) throw ParameterError("simulate_pipeline: queue_capacity must be >= 1");
  if (n < 1) throw ParameterError("simulate_pipeline: n must be >= 1");
  if (mode == Mode::sequential) return simulate_sequential(costs, iters);

  const double prod_sample = costs.t_sample;
  const double prod_batch = mode == Mode::pmode1 ? costs.t_batch : 0.0;
  const double prod_time = prod_sample + prod_batch;
  const double cons_time =
      mode == Mode::pmode1 ? costs.t_train : costs.t_batch + costs.t_train;
  const std::string consumer_stage = mode == Mode::pmode1 ? "train" : "batch+train";

  SimResult r;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events;
  std::deque<std::uint64_t> queue;            // iterations ready for the consumer
  std::deque<std::pair<std::uint32_t, std::uint64_t>> waiting;  // (producer, iteration)
  std::uint64_t next_claim = 0;
  std::uint64_t consumed = 0;
  bool consumer_busy = false;
  double end_time = 0.0;

  auto claim_and_schedule = [&](std::uint32_t p, double t) {
    if (next_claim >= iters) return;
    const std::uint64_t iter = next_claim++;
    ProducerTrace::emit(r.trace, p, iter, t, prod_sample, prod_batch);
    events.push({t + prod_time, 1, p, iter});
  };

  auto consumer_start = [&](double t) {
    if (consumer_busy || queue.empty()) return;
    const std::uint64_t iter = queue.front();
    queue.pop_front();
    consumer_busy = true;
    r.trace.push_back({t, "trainer", consumer_stage, iter, true});
    events.push({t + cons_time, 0, 0, iter});
    // A freed slot lets the oldest blocked producer enqueue and move on.
    if (!waiting.empty()) {
      auto [p, held] = waiting.front();
      waiting.pop_front();
      queue.push_back(held);
      r.max_queue_occupancy = std::max(r.max_queue_occupancy, queue.size());
      claim_and_schedule(p, t);
    }
  };

  for (std::uint32_t p = 0; p < n; ++p) claim_and_schedule(p, 0.0);

  while (!events.empty()) {
    const Event e = events.top();
    events.pop();
    if (e.kind == 0) {  // consumer done
      r.trace.push_back({e.time, "trainer", consumer_stage, e.iteration, false});
      ++consumed;
      end_time = e.time;
      consumer_busy = false;
      if (consumed == iters) break;
      consumer_start(e.time);
    } else {  // producer done
      if (queue.size() < queue_capacity) {
        queue.push_back(e.iteration);
        r.max_queue_occupancy = std::max(r.max_queue_occupancy, queue.size());
        claim_and_schedule(e.id, e.time);
        consumer_start(e.time);
      } else {
        waiting.emplace_back(e.id, e.iteration);
      }
    }
  }
  r.epoch_time = end_time;
  return r;
}

}  // namespace a3gnn::pipeline
