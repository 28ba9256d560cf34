#include "a3gnn/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "a3gnn/graph_io.hpp"

namespace a3gnn::config {

using nlohmann::json;

namespace {

struct Violations {
  std::vector<std::string> items;

  void add(const std::string& s) { items.push_back(s); }
  void raise_if_any() const {
    if (items.empty()) return;
    std::string msg = "config validation failed:";
    for (const auto& s : items) msg += "\n  - " + s;
    throw ConfigError(msg);
  }
};

ResolvedDesign design_from_json(const json& j) {
  ResolvedDesign d;
  d.batch_size = j.value("batch_size", d.batch_size);
  d.partitions = j.value("partitions", d.partitions);
  d.bias_rate = j.value("bias_rate", d.bias_rate);
  if (j.contains("sampling_device")) {
    d.sampling_device = device_from_string(j.at("sampling_device").get<std::string>());
  }
  d.workers = j.value("workers", d.workers);
  d.cache_volume = j.value("cache_volume", d.cache_volume);
  if (j.contains("mode")) d.mode = mode_from_string(j.at("mode").get<std::string>());
  return d;
}

json design_to_json(const ResolvedDesign& d) {
  return {{"batch_size", d.batch_size},
          {"partitions", d.partitions},
          {"bias_rate", d.bias_rate},
          {"sampling_device", to_string(d.sampling_device)},
          {"workers", d.workers},
          {"cache_volume", d.cache_volume},
          {"mode", to_string(d.mode)}};
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  ExperimentConfig cfg;
  cfg.sampler.fanouts = {10, 5};
  cfg.space = DesignSpace::defaults(4, 64 * 1024);
  Violations bad;

  try {
    cfg.seed = j.value("seed", cfg.seed);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);

    if (j.contains("graph")) {
      const json& g = j.at("graph");
      const std::string type = g.value("type", "sbm");
      if (type == "sbm") {
        cfg.graph.type = GraphSource::Type::sbm;
      } else if (type == "power_law") {
        cfg.graph.type = GraphSource::Type::power_law;
      } else if (type == "file") {
        cfg.graph.type = GraphSource::Type::file;
      } else if (type == "edge_list") {
        cfg.graph.type = GraphSource::Type::edge_list;
      } else {
        bad.add("graph.type must be one of sbm|power_law|file|edge_list, got " + type);
      }
      cfg.graph.nodes = g.value("nodes", cfg.graph.nodes);
      cfg.graph.blocks = g.value("blocks", cfg.graph.blocks);
      cfg.graph.p_in = g.value("p_in", cfg.graph.p_in);
      cfg.graph.p_out = g.value("p_out", cfg.graph.p_out);
      cfg.graph.min_degree = g.value("min_degree", cfg.graph.min_degree);
      cfg.graph.exponent = g.value("exponent", cfg.graph.exponent);
      cfg.graph.feat_dim = g.value("feat_dim", cfg.graph.feat_dim);
      cfg.graph.path = g.value("path", cfg.graph.path);
      cfg.graph.symmetrize = g.value("symmetrize", cfg.graph.symmetrize);
    }

    if (j.contains("platform")) {
      const json& p = j.at("platform");
      cfg.platform.num_gpus = p.value("num_gpus", cfg.platform.num_gpus);
      cfg.platform.gpu_mem_capacity = p.value("gpu_mem_capacity", cfg.platform.gpu_mem_capacity);
      cfg.platform.cpu_sample_cost_multiplier =
          p.value("cpu_sample_cost_multiplier", cfg.platform.cpu_sample_cost_multiplier);
      cfg.platform.gpu_sample_cost_multiplier =
          p.value("gpu_sample_cost_multiplier", cfg.platform.gpu_sample_cost_multiplier);
      cfg.platform.runtime_overhead_bytes =
          p.value("runtime_overhead_bytes", cfg.platform.runtime_overhead_bytes);
      if (cfg.platform.cpu_sample_cost_multiplier <= 0 ||
          cfg.platform.gpu_sample_cost_multiplier <= 0) {
        bad.add("platform sample cost multipliers must be > 0");
      }
      if (cfg.platform.gpu_mem_capacity == 0) bad.add("platform.gpu_mem_capacity must be > 0");
    }

    if (j.contains("model")) {
      cfg.hidden_dim = j.at("model").value("hidden_dim", cfg.hidden_dim);
      cfg.learning_rate = j.at("model").value("learning_rate", cfg.learning_rate);
      if (cfg.hidden_dim < 1) bad.add("model.hidden_dim must be >= 1");
    }

    if (j.contains("sampler")) {
      const json& s = j.at("sampler");
      if (s.contains("fanouts")) {
        cfg.sampler.fanouts = s.at("fanouts").get<std::vector<std::uint32_t>>();
      }
      cfg.sampler.bias_rate = s.value("bias_rate", cfg.sampler.bias_rate);
      if (cfg.sampler.fanouts.empty()) bad.add("sampler.fanouts must be non-empty");
      for (auto f : cfg.sampler.fanouts) {
        if (f < 1) bad.add("sampler.fanouts entries must be >= 1");
      }
      if (cfg.sampler.bias_rate < 1.0) bad.add("sampler.bias_rate must be >= 1");
    }

    if (j.contains("design_space")) {
      const json& s = j.at("design_space");
      if (s.contains("batch_sizes")) cfg.space.batch_sizes = s.at("batch_sizes").get<std::vector<std::uint32_t>>();
      if (s.contains("partitions")) cfg.space.partitions = s.at("partitions").get<std::vector<std::uint32_t>>();
      if (s.contains("bias_rates")) cfg.space.bias_rates = s.at("bias_rates").get<std::vector<double>>();
      if (s.contains("sampling_devices")) {
        cfg.space.sampling_devices.clear();
        for (const auto& d : s.at("sampling_devices")) {
          cfg.space.sampling_devices.push_back(device_from_string(d.get<std::string>()));
        }
      }
      if (s.contains("workers")) cfg.space.workers = s.at("workers").get<std::vector<std::uint32_t>>();
      if (s.contains("cache_volumes")) cfg.space.cache_volumes = s.at("cache_volumes").get<std::vector<std::uint64_t>>();
      if (s.contains("modes")) {
        cfg.space.modes.clear();
        for (const auto& m : s.at("modes")) {
          cfg.space.modes.push_back(mode_from_string(m.get<std::string>()));
        }
      }
      try {
        cfg.space.validate();
      } catch (const std::exception& e) {
        bad.add(e.what());
      }
    }

    if (j.contains("profile")) {
      const json& p = j.at("profile");
      cfg.profile.probe_iters = p.value("probe_iters", cfg.profile.probe_iters);
      cfg.profile.epochs = p.value("epochs", cfg.profile.epochs);
      if (p.contains("points")) {
        cfg.profile.points.clear();
        for (const auto& d : p.at("points")) cfg.profile.points.push_back(design_from_json(d));
      }
      if (cfg.profile.probe_iters < 3) bad.add("profile.probe_iters must be >= 3");
    }

    if (j.contains("execute")) {
      cfg.exec.epochs = j.at("execute").value("epochs", cfg.exec.epochs);
      cfg.exec.queue_capacity = j.at("execute").value("queue_capacity", cfg.exec.queue_capacity);
      if (cfg.exec.epochs < 1) bad.add("execute.epochs must be >= 1");
      if (cfg.exec.queue_capacity < 1) bad.add("execute.queue_capacity must be >= 1");
    }

    if (j.contains("surrogate")) {
      const json& s = j.at("surrogate");
      cfg.surrogate_opts.samples = s.value("samples", cfg.surrogate_opts.samples);
      cfg.surrogate_opts.gbt.trees = s.value("trees", cfg.surrogate_opts.gbt.trees);
      cfg.surrogate_opts.gbt.depth = s.value("depth", cfg.surrogate_opts.gbt.depth);
      cfg.surrogate_opts.gbt.shrinkage = s.value("shrinkage", cfg.surrogate_opts.gbt.shrinkage);
      cfg.surrogate_opts.evaluator = s.value("evaluator", cfg.surrogate_opts.evaluator);
      cfg.surrogate_opts.accuracy_epochs = s.value("accuracy_epochs", cfg.surrogate_opts.accuracy_epochs);
      cfg.surrogate_opts.holdout_fraction = s.value("holdout_fraction", cfg.surrogate_opts.holdout_fraction);
      if (cfg.surrogate_opts.samples < 1) bad.add("surrogate.samples must be >= 1");
      if (cfg.surrogate_opts.evaluator != "simulate" && cfg.surrogate_opts.evaluator != "execute") {
        bad.add("surrogate.evaluator must be simulate|execute");
      }
    }

    if (j.contains("tuner")) {
      const json& t = j.at("tuner");
      if (t.contains("weights")) {
        const auto w = t.at("weights").get<std::vector<double>>();
        if (w.size() != 3) {
          bad.add("tuner.weights must have 3 entries [thr, mem, acc]");
        } else {
          cfg.tuner_cfg.weights = {w[0], w[1], w[2]};
        }
      }
      if (t.contains("mem_max")) cfg.tuner_cfg.mem_max = t.at("mem_max").get<double>();
      if (t.contains("acc_min")) cfg.tuner_cfg.acc_min = t.at("acc_min").get<double>();
      cfg.tuner_cfg.budget = t.value("budget", cfg.tuner_cfg.budget);
      if (t.contains("thr_ref")) {
        cfg.tuner_cfg.thr_lo = t.at("thr_ref").at(0).get<double>();
        cfg.tuner_cfg.thr_hi = t.at("thr_ref").at(1).get<double>();
      }
      if (t.contains("mem_ref")) {
        cfg.tuner_cfg.mem_lo = t.at("mem_ref").at(0).get<double>();
        cfg.tuner_cfg.mem_hi = t.at("mem_ref").at(1).get<double>();
      }
      if (t.contains("acc_ref")) {
        cfg.tuner_cfg.acc_lo = t.at("acc_ref").at(0).get<double>();
        cfg.tuner_cfg.acc_hi = t.at("acc_ref").at(1).get<double>();
      }
      if (t.contains("ppo")) {
        const json& p = t.at("ppo");
        auto& h = cfg.tuner_cfg.ppo;
        h.clip = p.value("clip", h.clip);
        h.discount = p.value("discount", h.discount);
        h.policy_lr = p.value("policy_lr", h.policy_lr);
        h.value_lr = p.value("value_lr", h.value_lr);
        h.momentum = p.value("momentum", h.momentum);
        h.rollout = p.value("rollout", h.rollout);
        h.epochs_per_update = p.value("epochs_per_update", h.epochs_per_update);
        h.hidden = p.value("hidden", h.hidden);
        h.stale_limit = p.value("stale_limit", h.stale_limit);
      }
      if (cfg.tuner_cfg.budget < 1) bad.add("tuner.budget must be >= 1");
      if (!(cfg.tuner_cfg.ppo.clip > 0 && cfg.tuner_cfg.ppo.clip < 1)) {
        bad.add("tuner.ppo.clip must be in (0,1)");
      }
    }
  } catch (const json::exception& e) {
    bad.add(std::string("malformed field: ") + e.what());
  }

  if ((cfg.graph.type == GraphSource::Type::file ||
       cfg.graph.type == GraphSource::Type::edge_list)) {
    if (cfg.graph.path.empty()) {
      bad.add("graph.path required for file/edge_list sources");
    } else if (!std::filesystem::exists(cfg.graph.path)) {
      bad.add("graph.path does not exist: " + cfg.graph.path);
    }
  }

  bad.raise_if_any();
  return cfg;
}

void save_experiment_config(const ExperimentConfig& cfg, const std::string& path) {
  json j;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  json g;
  switch (cfg.graph.type) {
    case GraphSource::Type::sbm: g["type"] = "sbm"; break;
    case GraphSource::Type::power_law: g["type"] = "power_law"; break;
    case GraphSource::Type::file: g["type"] = "file"; break;
    case GraphSource::Type::edge_list: g["type"] = "edge_list"; break;
  }
  g["nodes"] = cfg.graph.nodes;
  g["blocks"] = cfg.graph.blocks;
  g["p_in"] = cfg.graph.p_in;
  g["p_out"] = cfg.graph.p_out;
  g["min_degree"] = cfg.graph.min_degree;
  g["exponent"] = cfg.graph.exponent;
  g["feat_dim"] = cfg.graph.feat_dim;
  g["path"] = cfg.graph.path;
  g["symmetrize"] = cfg.graph.symmetrize;
  j["graph"] = g;
  j["platform"] = {{"num_gpus", cfg.platform.num_gpus},
                   {"gpu_mem_capacity", cfg.platform.gpu_mem_capacity},
                   {"cpu_sample_cost_multiplier", cfg.platform.cpu_sample_cost_multiplier},
                   {"gpu_sample_cost_multiplier", cfg.platform.gpu_sample_cost_multiplier},
                   {"runtime_overhead_bytes", cfg.platform.runtime_overhead_bytes}};
  j["model"] = {{"hidden_dim", cfg.hidden_dim}, {"learning_rate", cfg.learning_rate}};
  j["sampler"] = {{"fanouts", cfg.sampler.fanouts}, {"bias_rate", cfg.sampler.bias_rate}};
  json space;
  space["batch_sizes"] = cfg.space.batch_sizes;
  space["partitions"] = cfg.space.partitions;
  space["bias_rates"] = cfg.space.bias_rates;
  json devs = json::array();
  for (auto d : cfg.space.sampling_devices) devs.push_back(to_string(d));
  space["sampling_devices"] = devs;
  space["workers"] = cfg.space.workers;
  space["cache_volumes"] = cfg.space.cache_volumes;
  json modes = json::array();
  for (auto m : cfg.space.modes) modes.push_back(to_string(m));
  space["modes"] = modes;
  j["design_space"] = space;
  json points = json::array();
  for (const auto& p : cfg.profile.points) points.push_back(design_to_json(p));
  j["profile"] = {{"points", points},
                  {"probe_iters", cfg.profile.probe_iters},
                  {"epochs", cfg.profile.epochs}};
  j["execute"] = {{"epochs", cfg.exec.epochs}, {"queue_capacity", cfg.exec.queue_capacity}};
  j["surrogate"] = {{"samples", cfg.surrogate_opts.samples},
                    {"trees", cfg.surrogate_opts.gbt.trees},
                    {"depth", cfg.surrogate_opts.gbt.depth},
                    {"shrinkage", cfg.surrogate_opts.gbt.shrinkage},
                    {"evaluator", cfg.surrogate_opts.evaluator},
                    {"accuracy_epochs", cfg.surrogate_opts.accuracy_epochs},
                    {"holdout_fraction", cfg.surrogate_opts.holdout_fraction}};
  json t;
  t["weights"] = {cfg.tuner_cfg.weights[0], cfg.tuner_cfg.weights[1], cfg.tuner_cfg.weights[2]};
  if (cfg.tuner_cfg.mem_max) t["mem_max"] = *cfg.tuner_cfg.mem_max;
  if (cfg.tuner_cfg.acc_min) t["acc_min"] = *cfg.tuner_cfg.acc_min;
  t["budget"] = cfg.tuner_cfg.budget;
  t["thr_ref"] = {cfg.tuner_cfg.thr_lo, cfg.tuner_cfg.thr_hi};
  t["mem_ref"] = {cfg.tuner_cfg.mem_lo, cfg.tuner_cfg.mem_hi};
  t["acc_ref"] = {cfg.tuner_cfg.acc_lo, cfg.tuner_cfg.acc_hi};
  t["ppo"] = {{"clip", cfg.tuner_cfg.ppo.clip},
              {"discount", cfg.tuner_cfg.ppo.discount},
              {"policy_lr", cfg.tuner_cfg.ppo.policy_lr},
              {"value_lr", cfg.tuner_cfg.ppo.value_lr},
              {"momentum", cfg.tuner_cfg.ppo.momentum},
              {"rollout", cfg.tuner_cfg.ppo.rollout},
              {"epochs_per_update", cfg.tuner_cfg.ppo.epochs_per_update},
              {"hidden", cfg.tuner_cfg.ppo.hidden},
              {"stale_limit", cfg.tuner_cfg.ppo.stale_limit}};
  j["tuner"] = t;

  std::ofstream out(path);
  if (!out) throw IoError("save_experiment_config: cannot open " + path);
  out << j.dump(1) << "\n";
}

graph::Graph load_or_generate_graph(const GraphSource& src, std::uint64_t seed) {
  switch (src.type) {
    case GraphSource::Type::sbm:
      return graph::generate_sbm(src.nodes, src.blocks, src.p_in, src.p_out, src.feat_dim, seed);
    case GraphSource::Type::power_law:
      return graph::generate_power_law(src.nodes, src.min_degree, src.exponent, src.feat_dim,
                                       seed);
    case GraphSource::Type::file:
      return graph::load_graph(src.path);
    case GraphSource::Type::edge_list:
      return graph::load_edge_list(src.path, src.feat_dim, src.symmetrize);
  }
  throw ConfigError("load_or_generate_graph: bad source type");
}

std::string resolve_output_dir(const std::string& output_dir) {
  const char* root = std::getenv("A3GNN_OUTPUT_ROOT");
  if (root != nullptr && root[0] != '\0' &&
      !std::filesystem::path(output_dir).is_absolute()) {
    return (std::filesystem::path(root) / output_dir).string();
  }
  return output_dir;
}

}  // namespace a3gnn::config
