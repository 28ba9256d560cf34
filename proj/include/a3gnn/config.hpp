#pragma once

// Experiment configuration: one JSON file per experiment; all defaults are
// materialized back into the output directory so runs are self-describing.

#include <string>

#include "a3gnn/design_space.hpp"
#include "a3gnn/generators.hpp"
#include "a3gnn/gbt.hpp"
#include "a3gnn/pipeline.hpp"
#include "a3gnn/tuner.hpp"

namespace a3gnn::config {

struct GraphSource {
  enum class Type { sbm, power_law, file, edge_list };
  Type type = Type::sbm;
  // generators
  std::uint64_t nodes = 300;
  std::uint32_t blocks = 3;
  double p_in = 0.3;
  double p_out = 0.01;
  std::uint32_t min_degree = 2;
  double exponent = 2.5;
  std::uint32_t feat_dim = 16;
  // file inputs
  std::string path;
  bool symmetrize = false;
};

struct ProfileOptions {
  std::vector<ResolvedDesign> points;
  std::uint32_t probe_iters = 5;
  std::uint32_t epochs = 3;
};

struct SurrogateOptions {
  std::uint32_t samples = 200;
  surrogate::GbtHyper gbt;
  std::string evaluator = "simulate";  // or "execute"
  std::uint32_t accuracy_epochs = 6;
  double holdout_fraction = 0.2;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "runs/experiment";
  GraphSource graph;
  pipeline::PlatformSpec platform;
  std::uint32_t hidden_dim = 16;
  double learning_rate = 0.2;
  sampling::SamplerConfig sampler;  // fanouts + default bias rate
  DesignSpace space;
  ProfileOptions profile;
  pipeline::ExecOptions exec;
  SurrogateOptions surrogate_opts;
  tuner::TunerConfig tuner_cfg;
};

// Throws ConfigError listing every violation found.
ExperimentConfig load_experiment_config(const std::string& path);

void save_experiment_config(const ExperimentConfig& cfg, const std::string& path);

graph::Graph load_or_generate_graph(const GraphSource& src, std::uint64_t seed);

// Output root override: $A3GNN_OUTPUT_ROOT/<output_dir> when the variable is
// set and output_dir is relative.
std::string resolve_output_dir(const std::string& output_dir);

}  // namespace a3gnn::config
