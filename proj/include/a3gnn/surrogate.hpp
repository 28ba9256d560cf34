#pragma once

// Surrogate performance model: predicts [thr, mem, acc] from a design point
// plus graph context, so the tuner can skip ground-truth runs.

#include <functional>
#include <string>

#include "a3gnn/design_space.hpp"
#include "a3gnn/gbt.hpp"
#include "a3gnn/pipeline.hpp"

namespace a3gnn::surrogate {

using pipeline::PlatformSpec;
using sampling::SamplerConfig;
using train::ModelSpec;

using Evaluator = std::function<Metrics(const DesignPoint&)>;

// Graph-level inputs the model sees next to the knobs: eta per partition
// level, density, sizes.
struct FeatureContext {
  graph::GraphStats gstats;
  std::vector<double> eta_by_partition_level;  // aligned with space.partitions
};

FeatureContext make_feature_context(const graph::Graph& g, const DesignSpace& space);

std::vector<std::string> feature_names(const DesignSpace& space);
std::vector<double> encode_features(const DesignSpace& space, const DesignPoint& p,
                                    const FeatureContext& ctx);

struct ProfileDataset {
  std::vector<std::string> names;
  std::vector<std::vector<double>> x;
  std::vector<Metrics> y;
  std::vector<DesignPoint> points;

  std::size_t size() const { return x.size(); }
};

// Stratified draws over the quantized knobs: each level of each knob appears
// in at least floor(samples/levels) rows. Evaluator failures skip the row.
ProfileDataset collect_profile_dataset(const DesignSpace& space, const FeatureContext& ctx,
                                       const Evaluator& evaluator, std::uint32_t samples,
                                       std::uint64_t seed);

struct SurrogateModel {
  std::vector<std::string> names;
  std::vector<double> feat_min;    // min-max normalization ranges
  std::vector<double> feat_range;  // 0 for constant features
  GbtModel thr_model;
  GbtModel mem_model;
  GbtModel acc_model;
};

SurrogateModel fit_surrogate(const ProfileDataset& d, const GbtHyper& hyper);

Metrics predict(const SurrogateModel& m, std::span<const double> raw_features);
Metrics predict(const SurrogateModel& m, const DesignSpace& space, const DesignPoint& p,
                const FeatureContext& ctx);

void save_surrogate(const SurrogateModel& m, const std::string& path);
SurrogateModel load_surrogate(const std::string& path);

void save_dataset_csv(const ProfileDataset& d, const std::string& path);

struct SimEvalOptions {
  std::uint32_t probe_iters = 3;
  std::uint32_t queue_capacity = 4;
  std::uint32_t accuracy_epochs = 6;  // short micro-train for the acc target
  std::uint64_t model_seed = 1;
};

// Ground truth via the discrete-event simulator (throughput), the analytic
// memory model fed with a measured probe batch, and a short micro-train run
// for accuracy.
Evaluator make_simulate_evaluator(const graph::Graph& g, const DesignSpace& space,
                                  const PlatformSpec& platform, const ModelSpec& spec,
                                  const SamplerConfig& sampler_base,
                                  const SimEvalOptions& opts);

// Ground truth via the real concurrent executor.
Evaluator make_execute_evaluator(const graph::Graph& g, const DesignSpace& space,
                                 const PlatformSpec& platform, const ModelSpec& spec,
                                 const SamplerConfig& sampler_base,
                                 const pipeline::ExecOptions& opts);

}  // namespace a3gnn::surrogate
