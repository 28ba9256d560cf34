#include "a3gnn/surrogate.hpp"

#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "a3gnn/rng.hpp"

namespace a3gnn::surrogate {

using nlohmann::json;

FeatureContext make_feature_context(const graph::Graph& g, const DesignSpace& space) {
  FeatureContext ctx;
  ctx.gstats = graph::graph_stats(g);
  ctx.eta_by_partition_level.reserve(space.partitions.size());
  for (std::uint32_t u : space.partitions) {
    if (u <= 1) {
      ctx.eta_by_partition_level.push_back(1.0);
      continue;
    }
    const auto ps = graph::partition_graph(g, u, graph::PartitionMethod::hash);
    double mean_eta = 0.0;
    for (const auto& st : ps.stats) mean_eta += st.eta;
    ctx.eta_by_partition_level.push_back(mean_eta / static_cast<double>(ps.stats.size()));
  }
  return ctx;
}

std::vector<std::string> feature_names(const DesignSpace&) {
  return {"batch_size", "partitions",  "bias_rate", "device_cpu", "device_gpu",
          "workers",    "theta_bytes", "mode_seq",  "mode_p1",    "mode_p2",
          "eta",        "density",     "num_nodes", "num_edges"};
}

std::vector<double> encode_features(const DesignSpace& space, const DesignPoint& p,
                                    const FeatureContext& ctx) {
  check_point(space, p);
  const ResolvedDesign d = resolve(space, p);
  std::vector<double> f;
  f.reserve(14);
  f.push_back(static_cast<double>(d.batch_size));
  f.push_back(static_cast<double>(d.partitions));
  f.push_back(d.bias_rate);
  f.push_back(d.sampling_device == Device::cpu ? 1.0 : 0.0);
  f.push_back(d.sampling_device == Device::gpu ? 1.0 : 0.0);
  f.push_back(static_cast<double>(d.workers));
  f.push_back(static_cast<double>(d.cache_volume));
  f.push_back(d.mode == Mode::sequential ? 1.0 : 0.0);
  f.push_back(d.mode == Mode::pmode1 ? 1.0 : 0.0);
  f.push_back(d.mode == Mode::pmode2 ? 1.0 : 0.0);
  f.push_back(ctx.eta_by_partition_level[p.idx[1]]);
  f.push_back(ctx.gstats.density);
  f.push_back(static_cast<double>(ctx.gstats.num_nodes));
  f.push_back(static_cast<double>(ctx.gstats.num_edges));
  return f;
}

ProfileDataset collect_profile_dataset(const DesignSpace& space, const FeatureContext& ctx,
                                       const Evaluator& evaluator, std::uint32_t samples,
                                       std::uint64_t seed) {
  if (samples < 1) throw ParameterError("collect_profile_dataset: samples must be >= 1");
  space.validate();

  // Latin-hypercube-style columns: every level repeated floor(samples/levels)
  // times, remainder drawn uniformly, then each knob shuffled independently.
  RngStream rng(seed, 0xc011);
  std::vector<std::vector<std::uint32_t>> columns(kNumKnobs);
  for (std::size_t k = 0; k < kNumKnobs; ++k) {
    const std::uint32_t levels = static_cast<std::uint32_t>(space.level_count(k));
    auto& col = columns[k];
    col.reserve(samples);
    const std::uint32_t reps = samples / levels;
    for (std::uint32_t l = 0; l < levels; ++l) {
      for (std::uint32_t r = 0; r < reps; ++r) col.push_back(l);
    }
    while (col.size() < samples) col.push_back(rng.next_below(levels));
    RngStream knob_rng = rng.substream(k);
    knob_rng.shuffle(col);
  }

  ProfileDataset out;
  out.names = feature_names(space);
  for (std::uint32_t i = 0; i < samples; ++i) {
    DesignPoint p;
    for (std::size_t k = 0; k < kNumKnobs; ++k) p.idx[k] = columns[k][i];
    try {
      const Metrics m = evaluator(p);
      out.x.push_back(encode_features(space, p, ctx));
      out.y.push_back(m);
      out.points.push_back(p);
    } catch (const std::exception& e) {
      std::cerr << "collect_profile_dataset: row " << i << " skipped: " << e.what() << "\n";
    }
  }
  return out;
}

namespace {

std::vector<std::vector<double>> normalize(const std::vector<std::vector<double>>& x,
                                           const std::vector<double>& mn,
                                           const std::vector<double>& range) {
  std::vector<std::vector<double>> out = x;
  for (auto& row : out) {
    for (std::size_t f = 0; f < row.size(); ++f) {
      row[f] = range[f] > 0.0 ? (row[f] - mn[f]) / range[f] : 0.0;
    }
  }
  return out;
}

}  // namespace

SurrogateModel fit_surrogate(const ProfileDataset& d, const GbtHyper& hyper) {
  if (d.size() < 10) throw ParameterError("fit_surrogate: need at least 10 rows");
  SurrogateModel m;
  m.names = d.names;
  const std::size_t nf = d.x[0].size();
  m.feat_min.assign(nf, 0.0);
  m.feat_range.assign(nf, 0.0);
  for (std::size_t f = 0; f < nf; ++f) {
    double lo = d.x[0][f], hi = d.x[0][f];
    for (const auto& row : d.x) {
      lo = std::min(lo, row[f]);
      hi = std::max(hi, row[f]);
    }
    m.feat_min[f] = lo;
    m.feat_range[f] = hi - lo;
  }
  const auto xn = normalize(d.x, m.feat_min, m.feat_range);
  std::vector<double> thr(d.size()), mem(d.size()), acc(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    thr[i] = d.y[i].throughput_eps;
    mem[i] = d.y[i].memory_bytes;
    acc[i] = d.y[i].accuracy;
  }
  m.thr_model = gbt_fit(xn, thr, hyper);
  m.mem_model = gbt_fit(xn, mem, hyper);
  m.acc_model = gbt_fit(xn, acc, hyper);
  return m;
}

Metrics predict(const SurrogateModel& m, std::span<const double> raw_features) {
  if (raw_features.size() != m.feat_min.size()) {
    throw ParameterError("predict: feature vector length mismatch");
  }
  std::vector<double> xn(raw_features.size());
  for (std::size_t f = 0; f < xn.size(); ++f) {
    xn[f] = m.feat_range[f] > 0.0 ? (raw_features[f] - m.feat_min[f]) / m.feat_range[f] : 0.0;
  }
  Metrics out;
  out.throughput_eps = m.thr_model.predict(xn);
  out.memory_bytes = std::max(0.0, m.mem_model.predict(xn));
  out.accuracy = m.acc_model.predict(xn);
  return out;
}

Metrics predict(const SurrogateModel& m, const DesignSpace& space, const DesignPoint& p,
                const FeatureContext& ctx) {
  const auto f = encode_features(space, p, ctx);
  return predict(m, f);
}

namespace {

json tree_to_json(const std::vector<GbtNode>& nodes) {
  json arr = json::array();
  for (const auto& n : nodes) {
    arr.push_back({{"f", n.feature}, {"t", n.threshold}, {"v", n.value}, {"l", n.left}, {"r", n.right}});
  }
  return arr;
}

json gbt_to_json(const GbtModel& m) {
  json trees = json::array();
  for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
  return {{"base", m.base}, {"shrinkage", m.shrinkage}, {"trees", trees}};
}

GbtModel gbt_from_json(const json& j) {
  GbtModel m;
  m.base = j.at("base").get<double>();
  m.shrinkage = j.at("shrinkage").get<double>();
  for (const auto& t : j.at("trees")) {
    std::vector<GbtNode> nodes;
    for (const auto& n : t) {
      GbtNode node;
      node.feature = n.at("f").get<std::int32_t>();
      node.threshold = n.at("t").get<double>();
      node.value = n.at("v").get<double>();
      node.left = n.at("l").get<std::int32_t>();
      node.right = n.at("r").get<std::int32_t>();
      nodes.push_back(node);
    }
    m.trees.push_back(std::move(nodes));
  }
  return m;
}

}  // namespace

void save_surrogate(const SurrogateModel& m, const std::string& path) {
  json j = {{"format", "a3gnn-surrogate-v1"},
            {"feature_names", m.names},
            {"feat_min", m.feat_min},
            {"feat_range", m.feat_range},
            {"throughput", gbt_to_json(m.thr_model)},
            {"memory", gbt_to_json(m.mem_model)},
            {"accuracy", gbt_to_json(m.acc_model)}};
  std::ofstream out(path);
  if (!out) throw IoError("save_surrogate: cannot open " + path);
  out << j.dump(1) << "\n";
}

SurrogateModel load_surrogate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_surrogate: cannot open " + path);
  json j;
  in >> j;
  if (j.value("format", "") != "a3gnn-surrogate-v1") {
    throw SchemaError("load_surrogate: unknown format in " + path);
  }
  SurrogateModel m;
  m.names = j.at("feature_names").get<std::vector<std::string>>();
  m.feat_min = j.at("feat_min").get<std::vector<double>>();
  m.feat_range = j.at("feat_range").get<std::vector<double>>();
  m.thr_model = gbt_from_json(j.at("throughput"));
  m.mem_model = gbt_from_json(j.at("memory"));
  m.acc_model = gbt_from_json(j.at("accuracy"));
  return m;
}

void save_dataset_csv(const ProfileDataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_dataset_csv: cannot open " + path);
  for (std::size_t f = 0; f < d.names.size(); ++f) out << d.names[f] << ",";
  out << "thr_eps,mem_bytes,acc\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (double v : d.x[i]) {
      put(v);
      out << ",";
    }
    put(d.y[i].throughput_eps);
    out << ",";
    put(d.y[i].memory_bytes);
    out << ",";
    put(d.y[i].accuracy);
    out << "\n";
  }
}

Evaluator make_simulate_evaluator(const graph::Graph& g, const DesignSpace& space,
                                  const PlatformSpec& platform, const ModelSpec& spec,
                                  const SamplerConfig& sampler_base,
                                  const SimEvalOptions& opts) {
  return [&g, space, platform, spec, sampler_base, opts](const DesignPoint& p) -> Metrics {
    const ResolvedDesign d = resolve(space, p);
    const pipeline::StageCosts costs =
        pipeline::profile_stage_costs(g, d, platform, spec, sampler_base, opts.probe_iters);
    const pipeline::SimResult sim = pipeline::simulate_pipeline(
        d.mode, costs, d.workers, costs.iters_per_epoch, opts.queue_capacity);

    // Probe batch for B and the activation footprint.
    cache::CacheConfig ccfg{d.cache_volume, d.partitions, cache::CachePolicy::out_degree_hotness};
    const cache::CacheState cs = cache::build_static_cache(g, ccfg);
    cache::CacheAccounting acc(d.partitions);
    std::vector<NodeId> train_nodes;
    for (std::uint64_t v = 0; v < g.num_nodes; ++v) {
      if (g.train_mask[v]) train_nodes.push_back(static_cast<NodeId>(v));
    }
    if (train_nodes.empty()) throw ConfigError("simulate evaluator: no train nodes");
    const auto batches =
        train::plan_epoch_batches(train_nodes, 0, d.batch_size, hash2(sampler_base.rng_seed, 0));
    SamplerConfig cfg = sampler_base;
    cfg.bias_rate = d.bias_rate;
    cfg.rng_seed = train::sampling_seed(sampler_base.rng_seed, 0, 0, 0);
    const sampling::SampleBatch probe = sampling::sample_khop(g, batches[0], cfg, cs);
    auto [feats, stats] = cache::retrieve_features(probe, cs, g, acc);
    const train::Model model = train::init_model(spec, opts.model_seed);
    const train::ForwardResult fwd = train::forward(model, probe, feats.data());
    const std::uint64_t model_bytes = spec.param_bytes() + fwd.activation_bytes;

    const pipeline::MemoryEstimate mem =
        pipeline::analytic_memory(d.mode, d.workers, d.cache_volume, stats.batch_bytes,
                                  model_bytes, platform.runtime_overhead_bytes);

    // Short ground-truth training run for the accuracy target.
    train::TrainOptions topts;
    topts.batch_size = d.batch_size;
    topts.epochs = opts.accuracy_epochs;
    topts.u = d.partitions;
    topts.model_seed = opts.model_seed;
    SamplerConfig tcfg = sampler_base;
    tcfg.bias_rate = d.bias_rate;
    const train::TrainReport report = train::train(g, spec, tcfg, cs, topts);

    Metrics m;
    m.throughput_eps = sim.epoch_time > 0.0 ? 1.0 / sim.epoch_time : 0.0;
    m.memory_bytes = static_cast<double>(mem.peak_total);
    m.accuracy = report.test_accuracy;
    return m;
  };
}

Evaluator make_execute_evaluator(const graph::Graph& g, const DesignSpace& space,
                                 const PlatformSpec& platform, const ModelSpec& spec,
                                 const SamplerConfig& sampler_base,
                                 const pipeline::ExecOptions& opts) {
  return [&g, space, platform, spec, sampler_base, opts](const DesignPoint& p) -> Metrics {
    const ResolvedDesign d = resolve(space, p);
    return pipeline::execute_pipeline(g, d, platform, spec, sampler_base, opts).metrics;
  };
}

}  // namespace a3gnn::surrogate
