#include "a3gnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "a3gnn/kernels.hpp"
#include "a3gnn/rng.hpp"

namespace a3gnn::train {

Model init_model(const ModelSpec& spec, std::uint64_t seed) {
  if (spec.feat_dim < 1 || spec.hidden_dim < 1 || spec.num_classes < 1) {
    throw ParameterError("init_model: dims must be >= 1");
  }
  Model m;
  m.spec = spec;
  m.init_seed = seed;
  RngStream rng(seed, 0x6a10);
  auto glorot = [&rng](std::vector<double>& w, std::uint32_t fan_in, std::uint32_t fan_out) {
    const double a = std::sqrt(6.0 / (static_cast<double>(fan_in) + fan_out));
    w.resize(static_cast<std::size_t>(fan_in) * fan_out);
    for (double& x : w) x = (2.0 * rng.next_unit() - 1.0) * a;
  };
  glorot(m.w1, spec.feat_dim, spec.hidden_dim);
  glorot(m.w2, spec.hidden_dim, spec.num_classes);
  return m;
}

namespace {

// Mean-aggregate rows of `src` (dim `dim`) into `dst` according to (dst,src)
// edges; rows without any edge are handled by the caller (self-fallback).
void mean_aggregate(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                    const double* src, std::size_t dim,
                    const std::uint32_t* dst_rows_of,  // unique idx -> output row, kSkip = drop
                    const std::int32_t* src_rows_of,   // unique idx -> src row; nullptr = identity
                    double* dst, std::size_t n_rows, std::vector<std::uint32_t>& deg) {
  deg.assign(n_rows, 0);
  std::fill(dst, dst + n_rows * dim, 0.0);
  for (const auto& [d, s] : edges) {
    const std::uint32_t row = dst_rows_of[d];
    if (row == std::numeric_limits<std::uint32_t>::max()) continue;
    const std::uint32_t srow =
        src_rows_of ? static_cast<std::uint32_t>(src_rows_of[s]) : s;
    kernels::add(src + static_cast<std::size_t>(srow) * dim,
                 dst + static_cast<std::size_t>(row) * dim, dim);
    ++deg[row];
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (deg[r] > 0) {
      kernels::scale(dst + r * dim, 1.0 / static_cast<double>(deg[r]), dim);
    }
  }
}

}  // namespace

ForwardResult forward(const Model& m, const SampleBatch& batch, const float* feats) {
  const ModelSpec& spec = m.spec;
  const std::size_t n_unique = batch.unique_nodes.size();
  const std::size_t n_seeds = batch.num_seed_unique;
  constexpr std::uint32_t kSkip = std::numeric_limits<std::uint32_t>::max();

  // Widen the f32 batch features once.
  std::vector<double> featsd(n_unique * spec.feat_dim);
  {
    std::vector<std::uint32_t> iota(n_unique);
    for (std::size_t i = 0; i < n_unique; ++i) iota[i] = static_cast<std::uint32_t>(i);
    kernels::gather_rows_f32(feats, spec.feat_dim, iota.data(), n_unique, featsd.data());
  }

  ForwardResult out;
  // Nodes needing a hop-1 representation: the seeds plus every source of the
  // outermost sampled layer.
  out.inner_pos.assign(n_unique, -1);
  for (std::size_t s = 0; s < n_seeds; ++s) {
    out.inner_pos[s] = static_cast<std::int32_t>(out.inner_nodes.size());
    out.inner_nodes.push_back(static_cast<std::uint32_t>(s));
  }
  if (!batch.layers.empty()) {
    for (const auto& [d, s] : batch.layers[0].edges) {
      (void)d;
      if (out.inner_pos[s] < 0) {
        out.inner_pos[s] = static_cast<std::int32_t>(out.inner_nodes.size());
        out.inner_nodes.push_back(s);
      }
    }
  }
  const std::size_t n_inner = out.inner_nodes.size();

  // Hop-2 aggregation of raw features for every inner node.
  out.agg_inner.resize(n_inner * spec.feat_dim);
  std::vector<std::uint32_t> inner_row_of(n_unique, kSkip);
  for (std::size_t r = 0; r < n_inner; ++r) {
    inner_row_of[out.inner_nodes[r]] = static_cast<std::uint32_t>(r);
  }
  static const std::vector<std::pair<std::uint32_t, std::uint32_t>> kNoEdges;
  const auto& inner_edges = batch.layers.size() >= 2 ? batch.layers[1].edges : kNoEdges;
  mean_aggregate(inner_edges, featsd.data(), spec.feat_dim, inner_row_of.data(), nullptr,
                 out.agg_inner.data(), n_inner, out.inner_deg);
  for (std::size_t r = 0; r < n_inner; ++r) {
    if (out.inner_deg[r] == 0) {  // empty neighborhood: node's own features
      std::copy_n(featsd.data() + static_cast<std::size_t>(out.inner_nodes[r]) * spec.feat_dim,
                  spec.feat_dim, out.agg_inner.data() + r * spec.feat_dim);
    }
  }

  // h1 = ReLU(agg_inner * W1)
  out.h1.assign(n_inner * spec.hidden_dim, 0.0);
  kernels::matmul_accum(out.agg_inner.data(), m.w1.data(), out.h1.data(), n_inner,
                        spec.feat_dim, spec.hidden_dim);
  kernels::relu(out.h1.data(), out.h1.data(), out.h1.size());

  // Hop-1 aggregation of h1 into the seeds.
  out.agg_outer.resize(n_seeds * spec.hidden_dim);
  std::vector<std::uint32_t> seed_row_of(n_unique, kSkip);
  for (std::size_t s = 0; s < n_seeds; ++s) seed_row_of[s] = static_cast<std::uint32_t>(s);
  const auto& outer_edges = batch.layers.empty() ? kNoEdges : batch.layers[0].edges;
  mean_aggregate(outer_edges, out.h1.data(), spec.hidden_dim, seed_row_of.data(),
                 out.inner_pos.data(), out.agg_outer.data(), n_seeds, out.outer_deg);
  for (std::size_t s = 0; s < n_seeds; ++s) {
    if (out.outer_deg[s] == 0) {
      std::copy_n(out.h1.data() + static_cast<std::size_t>(out.inner_pos[s]) * spec.hidden_dim,
                  spec.hidden_dim, out.agg_outer.data() + s * spec.hidden_dim);
    }
  }

  out.logits.assign(n_seeds * spec.num_classes, 0.0);
  kernels::matmul_accum(out.agg_outer.data(), m.w2.data(), out.logits.data(), n_seeds,
                        spec.hidden_dim, spec.num_classes);

  // Modeled as 4 bytes per value (f32 on a real device).
  out.activation_bytes =
      (out.agg_inner.size() + out.h1.size() + out.agg_outer.size() + out.logits.size()) * 4;
  return out;
}

double backward(const Model& m, const SampleBatch& batch, const float* feats,
                const ForwardResult& fwd, const std::vector<std::uint32_t>& seed_labels,
                Gradients& grads) {
  (void)feats;
  const ModelSpec& spec = m.spec;
  const std::size_t n_seeds = batch.num_seed_unique;
  const std::size_t n_inner = fwd.inner_nodes.size();
  if (seed_labels.size() != n_seeds) {
    throw ParameterError("backward: seed_labels size mismatch");
  }

  grads.w1.assign(m.w1.size(), 0.0);
  grads.w2.assign(m.w2.size(), 0.0);

  // Softmax cross-entropy over seeds; dlogits = (softmax - onehot) / n.
  std::vector<double> dlogits(n_seeds * spec.num_classes);
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n_seeds);
  for (std::size_t s = 0; s < n_seeds; ++s) {
    const double* row = fwd.logits.data() + s * spec.num_classes;
    double* drow = dlogits.data() + s * spec.num_classes;
    double mx = row[0];
    for (std::uint32_t c = 1; c < spec.num_classes; ++c) mx = std::max(mx, row[c]);
    double denom = 0.0;
    for (std::uint32_t c = 0; c < spec.num_classes; ++c) denom += std::exp(row[c] - mx);
    const std::uint32_t y = seed_labels[s];
    loss += -(row[y] - mx - std::log(denom));
    for (std::uint32_t c = 0; c < spec.num_classes; ++c) {
      const double p = std::exp(row[c] - mx) / denom;
      drow[c] = (p - (c == y ? 1.0 : 0.0)) * inv_n;
    }
  }
  loss *= inv_n;

  // dW2 = agg_outer^T * dlogits
  kernels::matmul_at_b_accum(fwd.agg_outer.data(), dlogits.data(), grads.w2.data(),
                             n_seeds, spec.hidden_dim, spec.num_classes);
  // dagg_outer = dlogits * W2^T
  std::vector<double> dagg_outer(n_seeds * spec.hidden_dim, 0.0);
  kernels::matmul_a_bt_accum(dlogits.data(), m.w2.data(), dagg_outer.data(), n_seeds,
                             spec.num_classes, spec.hidden_dim);

  // Scatter through the outer mean aggregation into dh1.
  std::vector<double> dh1(n_inner * spec.hidden_dim, 0.0);
  static const std::vector<std::pair<std::uint32_t, std::uint32_t>> kNoEdges;
  const auto& outer_edges = batch.layers.empty() ? kNoEdges : batch.layers[0].edges;
  for (const auto& [d, s] : outer_edges) {
    if (d >= n_seeds) continue;
    const double w = 1.0 / static_cast<double>(fwd.outer_deg[d]);
    kernels::axpy(w, dagg_outer.data() + static_cast<std::size_t>(d) * spec.hidden_dim,
                  dh1.data() + static_cast<std::size_t>(fwd.inner_pos[s]) * spec.hidden_dim,
                  spec.hidden_dim);
  }
  for (std::size_t s = 0; s < n_seeds; ++s) {
    if (fwd.outer_deg[s] == 0) {  // self-fallback path
      kernels::add(dagg_outer.data() + s * spec.hidden_dim,
                   dh1.data() + static_cast<std::size_t>(fwd.inner_pos[s]) * spec.hidden_dim,
                   spec.hidden_dim);
    }
  }

  kernels::relu_mask(fwd.h1.data(), dh1.data(), dh1.size());

  // dW1 = agg_inner^T * dh1
  kernels::matmul_at_b_accum(fwd.agg_inner.data(), dh1.data(), grads.w1.data(), n_inner,
                             spec.feat_dim, spec.hidden_dim);
  return loss;
}

void sgd_step(Model& m, const Gradients& g, double lr) {
  kernels::axpy(-lr, g.w1.data(), m.w1.data(), m.w1.size());
  kernels::axpy(-lr, g.w2.data(), m.w2.data(), m.w2.size());
}

Gradients sync_gradients(const std::vector<Gradients>& grads) {
  if (grads.empty()) throw ParameterError("sync_gradients: empty gradient list");
  Gradients out;
  out.w1.assign(grads[0].w1.size(), 0.0);
  out.w2.assign(grads[0].w2.size(), 0.0);
  for (const Gradients& g : grads) {
    if (g.w1.size() != out.w1.size() || g.w2.size() != out.w2.size()) {
      throw ParameterError("sync_gradients: shape mismatch");
    }
    kernels::add(g.w1.data(), out.w1.data(), out.w1.size());
    kernels::add(g.w2.data(), out.w2.data(), out.w2.size());
  }
  const double inv = 1.0 / static_cast<double>(grads.size());
  kernels::scale(out.w1.data(), inv, out.w1.size());
  kernels::scale(out.w2.data(), inv, out.w2.size());
  return out;
}

double grad_on_batch(const Model& m, const Graph& g, const SampleBatch& batch,
                     const float* feats, Gradients& grads) {
  ForwardResult fwd = forward(m, batch, feats);
  std::vector<std::uint32_t> labels(batch.num_seed_unique);
  for (std::size_t s = 0; s < batch.num_seed_unique; ++s) {
    labels[s] = g.labels[batch.unique_nodes[s]];
  }
  return backward(m, batch, feats, fwd, labels, grads);
}

double evaluate_full_graph(const Model& m, const Graph& g) {
  const ModelSpec& spec = m.spec;
  const std::size_t n = g.num_nodes;

  std::vector<double> featsd(n * spec.feat_dim);
  {
    std::vector<std::uint32_t> iota(n);
    for (std::size_t i = 0; i < n; ++i) iota[i] = static_cast<std::uint32_t>(i);
    kernels::gather_rows_f32(g.features.data(), spec.feat_dim, iota.data(), n, featsd.data());
  }

  std::vector<double> agg(n * spec.feat_dim);
  for (std::size_t v = 0; v < n; ++v) {
    const auto nbrs = g.out_neighbors(static_cast<NodeId>(v));
    double* row = agg.data() + v * spec.feat_dim;
    if (nbrs.empty()) {
      std::copy_n(featsd.data() + v * spec.feat_dim, spec.feat_dim, row);
    } else {
      std::fill_n(row, spec.feat_dim, 0.0);
      for (NodeId w : nbrs) {
        kernels::add(featsd.data() + static_cast<std::size_t>(w) * spec.feat_dim, row,
                     spec.feat_dim);
      }
      kernels::scale(row, 1.0 / static_cast<double>(nbrs.size()), spec.feat_dim);
    }
  }
  std::vector<double> h1(n * spec.hidden_dim, 0.0);
  kernels::matmul_accum(agg.data(), m.w1.data(), h1.data(), n, spec.feat_dim, spec.hidden_dim);
  kernels::relu(h1.data(), h1.data(), h1.size());

  std::vector<double> agg2(n * spec.hidden_dim);
  for (std::size_t v = 0; v < n; ++v) {
    const auto nbrs = g.out_neighbors(static_cast<NodeId>(v));
    double* row = agg2.data() + v * spec.hidden_dim;
    if (nbrs.empty()) {
      std::copy_n(h1.data() + v * spec.hidden_dim, spec.hidden_dim, row);
    } else {
      std::fill_n(row, spec.hidden_dim, 0.0);
      for (NodeId w : nbrs) {
        kernels::add(h1.data() + static_cast<std::size_t>(w) * spec.hidden_dim, row,
                     spec.hidden_dim);
      }
      kernels::scale(row, 1.0 / static_cast<double>(nbrs.size()), spec.hidden_dim);
    }
  }
  std::vector<double> logits(n * spec.num_classes, 0.0);
  kernels::matmul_accum(agg2.data(), m.w2.data(), logits.data(), n, spec.hidden_dim,
                        spec.num_classes);

  std::uint64_t correct = 0, total = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (!g.test_mask[v]) continue;
    const double* row = logits.data() + v * spec.num_classes;
    std::uint32_t best = 0;
    for (std::uint32_t c = 1; c < spec.num_classes; ++c) {
      if (row[c] > row[best]) best = c;
    }
    ++total;
    if (best == g.labels[v]) ++correct;
  }
  if (total == 0) throw ConfigError("evaluate_full_graph: no test nodes");
  return static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<WorkerContext> make_worker_contexts(const Graph& g, const PartitionSet* parts,
                                                const CacheState& cache_global) {
  std::vector<WorkerContext> ctxs;
  if (parts == nullptr || parts->parts.size() <= 1) {
    WorkerContext c;
    c.graph = &g;
    c.cache = cache_global;
    for (std::uint64_t v = 0; v < g.num_nodes; ++v) {
      if (g.train_mask[v]) c.train_nodes.push_back(static_cast<NodeId>(v));
    }
    ctxs.push_back(std::move(c));
    return ctxs;
  }
  for (const auto& p : parts->parts) {
    WorkerContext c;
    c.graph = &p.local_graph;
    c.cache = cache::localize(cache_global, p);
    for (std::uint64_t v = 0; v < p.local_graph.num_nodes; ++v) {
      if (p.local_graph.train_mask[v]) c.train_nodes.push_back(static_cast<NodeId>(v));
    }
    ctxs.push_back(std::move(c));
  }
  return ctxs;
}

std::vector<std::vector<NodeId>> plan_epoch_batches(const std::vector<NodeId>& train_nodes,
                                                    std::uint32_t epoch,
                                                    std::uint32_t batch_size,
                                                    std::uint64_t seed) {
  std::vector<NodeId> order = train_nodes;
  RngStream rng(seed, hash2(0x5f1e, epoch));
  rng.shuffle(order);
  std::vector<std::vector<NodeId>> batches;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    const std::size_t end = std::min(order.size(), i + batch_size);
    batches.emplace_back(order.begin() + i, order.begin() + end);
  }
  return batches;
}

std::uint64_t sampling_seed(std::uint64_t base, std::uint32_t epoch, std::uint32_t step,
                            std::uint32_t worker) {
  return hash3(base, hash2(epoch, step), worker);
}

TrainReport train(const Graph& g, const ModelSpec& spec, const SamplerConfig& sampler_cfg,
                  const CacheState& cache_global, const TrainOptions& opts) {
  if (opts.batch_size < 1) throw ParameterError("train: batch_size must be >= 1");

  PartitionSet parts;
  const PartitionSet* parts_ptr = nullptr;
  if (opts.u > 1) {
    parts = graph::partition_graph(g, opts.u, opts.partition_method);
    parts_ptr = &parts;
  }
  std::vector<WorkerContext> ctxs = make_worker_contexts(g, parts_ptr, cache_global);
  const std::uint32_t u = static_cast<std::uint32_t>(ctxs.size());
  for (const auto& c : ctxs) {
    if (c.train_nodes.empty()) throw ConfigError("train: a worker has no train nodes");
  }

  Model model = init_model(spec, opts.model_seed);
  CacheAccounting acc(
      static_cast<std::uint32_t>(std::max<std::size_t>(1, cache_global.cached_per_device.size())));

  TrainReport report;
  report.param_bytes = spec.param_bytes();
  std::uint64_t hits_prev = 0, misses_prev = 0;

  for (std::uint32_t epoch = 0; epoch < opts.epochs; ++epoch) {
    std::vector<std::vector<std::vector<NodeId>>> batches(u);
    std::size_t steps = 0;
    for (std::uint32_t w = 0; w < u; ++w) {
      batches[w] = plan_epoch_batches(ctxs[w].train_nodes, epoch, opts.batch_size,
                                      hash2(sampler_cfg.rng_seed, w));
      steps = std::max(steps, batches[w].size());
    }
    double epoch_loss = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t step = 0; step < steps; ++step) {
      std::vector<Gradients> grads(u);
      for (std::uint32_t w = 0; w < u; ++w) {
        const auto& seeds = batches[w][step % batches[w].size()];
        SamplerConfig cfg = sampler_cfg;
        cfg.rng_seed = sampling_seed(sampler_cfg.rng_seed, epoch,
                                     static_cast<std::uint32_t>(step), w);
        SampleBatch batch = sampling::sample_khop(*ctxs[w].graph, seeds, cfg, ctxs[w].cache);
        auto [feats, stats] =
            cache::retrieve_features(batch, ctxs[w].cache, *ctxs[w].graph, acc);
        report.max_batch_bytes = std::max(report.max_batch_bytes, stats.batch_bytes);
        ForwardResult fwd = forward(model, batch, feats.data());
        report.max_activation_bytes =
            std::max(report.max_activation_bytes, fwd.activation_bytes);
        std::vector<std::uint32_t> labels(batch.num_seed_unique);
        for (std::size_t s = 0; s < batch.num_seed_unique; ++s) {
          labels[s] = ctxs[w].graph->labels[batch.unique_nodes[s]];
        }
        epoch_loss += backward(model, batch, feats.data(), fwd, labels, grads[w]);
        ++loss_count;
      }
      const Gradients mean = sync_gradients(grads);
      sgd_step(model, mean, spec.learning_rate);
    }
    report.loss_curve.push_back(
        loss_count > 0 ? epoch_loss / static_cast<double>(loss_count) : 0.0);
    const std::uint64_t h = acc.hits.load(), ms = acc.misses.load();
    const std::uint64_t dh = h - hits_prev, dm = ms - misses_prev;
    report.epoch_hit_rates.push_back(
        dh + dm > 0 ? static_cast<double>(dh) / static_cast<double>(dh + dm) : 0.0);
    hits_prev = h;
    misses_prev = ms;
  }

  report.epochs_run = opts.epochs;
  report.test_accuracy = evaluate_full_graph(model, g);
  report.accuracy_drop = opts.reference_accuracy
                             ? *opts.reference_accuracy - report.test_accuracy
                             : std::numeric_limits<double>::quiet_NaN();
  return report;
}

}  // namespace a3gnn::train
