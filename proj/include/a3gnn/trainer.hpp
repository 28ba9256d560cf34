#pragma once

// From-scratch 2-layer mean-aggregation GCN on sampled batches: the
// desk-scale ground truth for accuracy. Forward/backward are hand-derived and
// checked against finite differences in the tests.

#include <optional>

#include "a3gnn/cache.hpp"
#include "a3gnn/graph.hpp"
#include "a3gnn/partition.hpp"
#include "a3gnn/sampler.hpp"

namespace a3gnn::train {

using cache::CacheAccounting;
using cache::CacheState;
using graph::Graph;
using graph::PartitionMethod;
using graph::PartitionSet;
using sampling::SampleBatch;
using sampling::SamplerConfig;

struct ModelSpec {
  std::uint32_t feat_dim = 0;
  std::uint32_t hidden_dim = 0;
  std::uint32_t num_classes = 0;
  std::uint32_t num_layers = 2;  // fixed
  double learning_rate = 0.2;

  std::uint64_t param_bytes() const {
    return (static_cast<std::uint64_t>(feat_dim) * hidden_dim +
            static_cast<std::uint64_t>(hidden_dim) * num_classes) * 4;
  }
};

struct Model {
  ModelSpec spec;
  std::vector<double> w1;  // feat_dim x hidden_dim
  std::vector<double> w2;  // hidden_dim x num_classes
  std::uint64_t init_seed = 0;
};

struct Gradients {
  std::vector<double> w1;
  std::vector<double> w2;
};

// Activations cached by forward() for the backward pass and the memory model.
struct ForwardResult {
  std::vector<double> logits;  // num_seed_unique x num_classes
  std::vector<std::uint32_t> inner_nodes;   // unique-node indices needing h1
  std::vector<std::int32_t> inner_pos;      // unique-node index -> row in inner arrays
  std::vector<double> agg_inner;            // |inner| x feat_dim
  std::vector<double> h1;                   // |inner| x hidden_dim, post-ReLU
  std::vector<double> agg_outer;            // seeds x hidden_dim
  std::vector<std::uint32_t> outer_deg;     // sampled in-batch degree per seed
  std::vector<std::uint32_t> inner_deg;
  std::uint64_t activation_bytes = 0;
};

// Glorot-uniform entries, deterministic per seed.
Model init_model(const ModelSpec& spec, std::uint64_t seed);

// feats: batch.unique_nodes features, row-major.
ForwardResult forward(const Model& m, const SampleBatch& batch, const float* feats);

// Softmax cross-entropy over the unique seed prefix; returns mean loss.
double backward(const Model& m, const SampleBatch& batch, const float* feats,
                const ForwardResult& fwd, const std::vector<std::uint32_t>& seed_labels,
                Gradients& grads);

void sgd_step(Model& m, const Gradients& g, double lr);

// Element-wise arithmetic mean across workers; shapes must agree.
Gradients sync_gradients(const std::vector<Gradients>& grads);

// One sample -> retrieve -> forward -> backward on an explicit batch.
double grad_on_batch(const Model& m, const Graph& g, const SampleBatch& batch,
                     const float* feats, Gradients& grads);

// Full-graph (unsampled) inference; accuracy over the test mask.
double evaluate_full_graph(const Model& m, const Graph& g);

struct TrainOptions {
  std::uint32_t batch_size = 64;
  std::uint32_t epochs = 10;
  std::uint32_t u = 1;  // logical workers / partitions
  PartitionMethod partition_method = PartitionMethod::hash;
  std::uint64_t model_seed = 1;
  std::optional<double> reference_accuracy;  // gamma=1 run, for accuracy_drop
};

struct TrainReport {
  double test_accuracy = 0.0;
  std::uint32_t epochs_run = 0;
  std::vector<double> loss_curve;       // mean loss per epoch
  double accuracy_drop = 0.0;           // NaN until a reference is recorded
  std::vector<double> epoch_hit_rates;  // cache hit rate per epoch
  std::uint64_t max_batch_bytes = 0;
  std::uint64_t max_activation_bytes = 0;
  std::uint64_t param_bytes = 0;
};

TrainReport train(const Graph& g, const ModelSpec& spec, const SamplerConfig& sampler_cfg,
                  const CacheState& cache_global, const TrainOptions& opts);

// Deterministic helpers shared with the pipeline executor so a pipelined run
// reproduces train() exactly.
struct WorkerContext {
  const Graph* graph = nullptr;  // partition local graph (or the full graph)
  CacheState cache;              // localized to the graph above
  std::vector<NodeId> train_nodes;
};

std::vector<WorkerContext> make_worker_contexts(const Graph& g, const PartitionSet* parts,
                                                const CacheState& cache_global);

std::vector<std::vector<NodeId>> plan_epoch_batches(const std::vector<NodeId>& train_nodes,
                                                    std::uint32_t epoch,
                                                    std::uint32_t batch_size,
                                                    std::uint64_t seed);

std::uint64_t sampling_seed(std::uint64_t base, std::uint32_t epoch, std::uint32_t step,
                            std::uint32_t worker);

}  // namespace a3gnn::train
