// a3gnn command-line front door: gen-graph, profile, simulate, fit-surrogate,
// tune, report. Exit codes: 0 success, 2 config validation, 3 infeasible
// tuning, 1 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "a3gnn/config.hpp"
#include "a3gnn/graph_io.hpp"
#include "a3gnn/report.hpp"

namespace fs = std::filesystem;
using namespace a3gnn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct MetricsCsvWriter {
  std::ofstream out;

  explicit MetricsCsvWriter(const std::string& path) : out(path) {
    if (!out) throw IoError("cannot open " + path);
    out << "batch_size,partitions,bias_rate,sampling_device,workers,cache_volume,mode,"
           "eta,density,theta_bytes,num_nodes,num_edges,thr_eps,mem_bytes,acc,hit_rate\n";
  }

  void row(const ResolvedDesign& d, double eta, const graph::GraphStats& gs, const Metrics& m,
           double hit_rate) {
    out << d.batch_size << "," << d.partitions << "," << d.bias_rate << ","
        << to_string(d.sampling_device) << "," << d.workers << "," << d.cache_volume << ","
        << to_string(d.mode) << "," << eta << "," << gs.density << "," << d.cache_volume << ","
        << gs.num_nodes << "," << gs.num_edges << "," << m.throughput_eps << ","
        << m.memory_bytes << "," << m.accuracy << "," << hit_rate << "\n";
  }
};

fs::path prepare_run_dir(const config::ExperimentConfig& cfg) {
  const fs::path dir(config::resolve_output_dir(cfg.output_dir));
  fs::create_directories(dir);
  config::save_experiment_config(cfg, (dir / "resolved_config.json").string());
  return dir;
}

train::ModelSpec model_spec_for(const config::ExperimentConfig& cfg, const graph::Graph& g) {
  train::ModelSpec spec;
  spec.feat_dim = g.feat_dim;
  spec.hidden_dim = cfg.hidden_dim;
  spec.num_classes = g.num_classes();
  spec.learning_rate = cfg.learning_rate;
  return spec;
}

sampling::SamplerConfig sampler_for(const config::ExperimentConfig& cfg) {
  sampling::SamplerConfig s = cfg.sampler;
  s.rng_seed = cfg.seed;
  return s;
}

int cmd_gen_graph(const std::string& type, std::uint64_t nodes, std::uint32_t blocks,
                  double p_in, double p_out, std::uint32_t min_degree, double exponent,
                  std::uint32_t feat_dim, std::uint64_t seed, const std::string& input,
                  bool symmetrize, const std::string& out_path) {
  config::GraphSource src;
  if (type == "sbm") {
    src.type = config::GraphSource::Type::sbm;
  } else if (type == "power-law") {
    src.type = config::GraphSource::Type::power_law;
  } else if (type == "edge-list") {
    src.type = config::GraphSource::Type::edge_list;
    if (input.empty()) throw ConfigError("gen-graph: --input required for edge-list");
  } else {
    throw ConfigError("gen-graph: unknown --type " + type);
  }
  src.nodes = nodes;
  src.blocks = blocks;
  src.p_in = p_in;
  src.p_out = p_out;
  src.min_degree = min_degree;
  src.exponent = exponent;
  src.feat_dim = feat_dim;
  src.path = input;
  src.symmetrize = symmetrize;
  const graph::Graph g = config::load_or_generate_graph(src, seed);
  graph::save_graph(g, out_path);
  const auto stats = graph::graph_stats(g);
  std::cout << "wrote " << out_path << ": " << stats.num_nodes << " nodes, " << stats.num_edges
            << " edges, density " << stats.density << "\n";
  return kExitOk;
}

int cmd_profile(const std::string& config_path) {
  const config::ExperimentConfig cfg = config::load_experiment_config(config_path);
  const fs::path dir = prepare_run_dir(cfg);
  const graph::Graph g = config::load_or_generate_graph(cfg.graph, cfg.seed);
  const auto gstats = graph::graph_stats(g);
  const train::ModelSpec spec = model_spec_for(cfg, g);
  const sampling::SamplerConfig sampler = sampler_for(cfg);

  std::vector<ResolvedDesign> points = cfg.profile.points;
  if (points.empty()) points.push_back(ResolvedDesign{});

  MetricsCsvWriter csv((dir / "metrics.csv").string());
  std::ofstream costs_csv((dir / "stage_costs.csv").string());
  costs_csv << "batch_size,partitions,bias_rate,sampling_device,workers,cache_volume,mode,"
               "t_sample,t_batch,t_train,iters_per_epoch\n";

  for (const ResolvedDesign& d : points) {
    const pipeline::StageCosts costs =
        pipeline::profile_stage_costs(g, d, cfg.platform, spec, sampler, cfg.profile.probe_iters);
    costs_csv << d.batch_size << "," << d.partitions << "," << d.bias_rate << ","
              << to_string(d.sampling_device) << "," << d.workers << "," << d.cache_volume << ","
              << to_string(d.mode) << "," << costs.t_sample << "," << costs.t_batch << ","
              << costs.t_train << "," << costs.iters_per_epoch << "\n";

    pipeline::ExecOptions eopts = cfg.exec;
    eopts.epochs = cfg.profile.epochs;
    const pipeline::ExecResult result =
        pipeline::execute_pipeline(g, d, cfg.platform, spec, sampler, eopts);
    double eta = 1.0;
    if (d.partitions > 1) {
      const auto ps = graph::partition_graph(g, d.partitions, graph::PartitionMethod::hash);
      eta = 0.0;
      for (const auto& st : ps.stats) eta += st.eta;
      eta /= static_cast<double>(ps.stats.size());
    }
    csv.row(d, eta, gstats, result.metrics, result.hit_rate);
    if (!result.within_capacity) {
      std::cerr << "profile: point exceeds gpu_mem_capacity (peak "
                << result.memory.peak_total << " bytes)\n";
    }
  }
  std::cout << "profile: wrote " << (dir / "metrics.csv").string() << " (" << points.size()
            << " rows)\n";
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, double t_sample, double t_batch,
                 double t_train, std::uint64_t iters, const std::string& mode_str,
                 std::uint32_t workers, std::uint32_t queue_capacity,
                 const std::string& trace_out) {
  pipeline::StageCosts costs;
  costs.t_sample = t_sample;
  costs.t_batch = t_batch;
  costs.t_train = t_train;
  costs.iters_per_epoch = iters;
  const Mode mode = mode_from_string(mode_str);
  const auto sim = pipeline::simulate_pipeline(mode, costs, workers, iters, queue_capacity);
  const double analytic = pipeline::analytic_throughput(mode, costs, workers);
  std::cout << "simulated_epoch_time_s," << sim.epoch_time << "\n";
  std::cout << "simulated_throughput_eps," << (sim.epoch_time > 0 ? 1.0 / sim.epoch_time : 0.0)
            << "\n";
  std::cout << "analytic_throughput_eps," << analytic << "\n";
  std::cout << "max_queue_occupancy," << sim.max_queue_occupancy << "\n";
  if (!trace_out.empty()) {
    pipeline::write_trace_csv(sim.trace, trace_out);
    std::cout << "trace," << trace_out << "\n";
  }
  if (!config_path.empty()) {
    // With a config, also report the analytic memory composition per mode.
    const config::ExperimentConfig cfg = config::load_experiment_config(config_path);
    const auto mem = pipeline::analytic_memory(mode, workers, cfg.space.cache_volumes.back(),
                                               0, 0, cfg.platform.runtime_overhead_bytes);
    std::cout << "analytic_memory_peak_bytes," << mem.peak_total << "\n";
  }
  return kExitOk;
}

int cmd_fit_surrogate(const std::string& config_path) {
  const config::ExperimentConfig cfg = config::load_experiment_config(config_path);
  const fs::path dir = prepare_run_dir(cfg);
  const graph::Graph g = config::load_or_generate_graph(cfg.graph, cfg.seed);
  const train::ModelSpec spec = model_spec_for(cfg, g);
  const sampling::SamplerConfig sampler = sampler_for(cfg);

  const auto ctx = surrogate::make_feature_context(g, cfg.space);
  surrogate::Evaluator evaluator;
  if (cfg.surrogate_opts.evaluator == "execute") {
    evaluator = surrogate::make_execute_evaluator(g, cfg.space, cfg.platform, spec, sampler,
                                                  cfg.exec);
  } else {
    surrogate::SimEvalOptions sopts;
    sopts.probe_iters = cfg.profile.probe_iters;
    sopts.queue_capacity = cfg.exec.queue_capacity;
    sopts.accuracy_epochs = cfg.surrogate_opts.accuracy_epochs;
    evaluator = surrogate::make_simulate_evaluator(g, cfg.space, cfg.platform, spec, sampler,
                                                   sopts);
  }

  const auto dataset = surrogate::collect_profile_dataset(cfg.space, ctx, evaluator,
                                                          cfg.surrogate_opts.samples, cfg.seed);
  surrogate::save_dataset_csv(dataset, (dir / "profile_dataset.csv").string());

  // Hold out a tail fraction for the R2 report, then fit on everything.
  const std::size_t n = dataset.size();
  const std::size_t n_test = std::min<std::size_t>(
      n > 10 ? static_cast<std::size_t>(cfg.surrogate_opts.holdout_fraction * static_cast<double>(n))
             : 0,
      n > 10 ? n - 10 : 0);
  if (n_test > 0) {
    surrogate::ProfileDataset train_split, test_split;
    train_split.names = test_split.names = dataset.names;
    for (std::size_t i = 0; i < n; ++i) {
      auto& dst = i < n - n_test ? train_split : test_split;
      dst.x.push_back(dataset.x[i]);
      dst.y.push_back(dataset.y[i]);
      dst.points.push_back(dataset.points[i]);
    }
    const auto holdout_model = surrogate::fit_surrogate(train_split, cfg.surrogate_opts.gbt);
    std::vector<double> pt, tt, pm, tm, pa, ta;
    for (std::size_t i = 0; i < test_split.size(); ++i) {
      const Metrics pred = surrogate::predict(holdout_model, test_split.x[i]);
      pt.push_back(pred.throughput_eps);
      tt.push_back(test_split.y[i].throughput_eps);
      pm.push_back(pred.memory_bytes);
      tm.push_back(test_split.y[i].memory_bytes);
      pa.push_back(pred.accuracy);
      ta.push_back(test_split.y[i].accuracy);
    }
    std::ofstream r2(dir / "surrogate_r2.csv");
    r2 << "metric,r2\n";
    r2 << "throughput," << surrogate::r2_score(pt, tt) << "\n";
    r2 << "memory," << surrogate::r2_score(pm, tm) << "\n";
    r2 << "accuracy," << surrogate::r2_score(pa, ta) << "\n";
  }

  const auto model = surrogate::fit_surrogate(dataset, cfg.surrogate_opts.gbt);
  surrogate::save_surrogate(model, (dir / "surrogate.json").string());
  std::cout << "fit-surrogate: " << dataset.size() << " rows, model at "
            << (dir / "surrogate.json").string() << "\n";
  return kExitOk;
}

int cmd_tune(const std::string& config_path) {
  const config::ExperimentConfig cfg = config::load_experiment_config(config_path);
  const fs::path dir = prepare_run_dir(cfg);
  const graph::Graph g = config::load_or_generate_graph(cfg.graph, cfg.seed);
  const train::ModelSpec spec = model_spec_for(cfg, g);
  const sampling::SamplerConfig sampler = sampler_for(cfg);
  const auto ctx = surrogate::make_feature_context(g, cfg.space);

  // Ground truth for the final re-check (and for collection when no
  // surrogate file is present yet).
  surrogate::SimEvalOptions sopts;
  sopts.probe_iters = cfg.profile.probe_iters;
  sopts.queue_capacity = cfg.exec.queue_capacity;
  sopts.accuracy_epochs = cfg.surrogate_opts.accuracy_epochs;
  const surrogate::Evaluator ground_truth =
      surrogate::make_simulate_evaluator(g, cfg.space, cfg.platform, spec, sampler, sopts);

  surrogate::SurrogateModel model;
  const fs::path model_path = dir / "surrogate.json";
  if (fs::exists(model_path)) {
    model = surrogate::load_surrogate(model_path.string());
  } else {
    const auto dataset = surrogate::collect_profile_dataset(
        cfg.space, ctx, ground_truth, cfg.surrogate_opts.samples, cfg.seed);
    surrogate::save_dataset_csv(dataset, (dir / "profile_dataset.csv").string());
    model = surrogate::fit_surrogate(dataset, cfg.surrogate_opts.gbt);
    surrogate::save_surrogate(model, model_path.string());
  }

  const surrogate::Evaluator surrogate_eval = [&](const DesignPoint& p) {
    return surrogate::predict(model, cfg.space, p, ctx);
  };

  tuner::TuneResult result = tuner::tune(cfg.space, surrogate_eval, cfg.tuner_cfg, cfg.seed);
  tuner::write_tune_trace_csv(result, cfg.space, (dir / "tune_trace.csv").string());
  if (!result.pareto.empty()) {
    tuner::write_pareto_csv(result.pareto, cfg.space, (dir / "pareto.csv").string());
  }
  if (!result.found_feasible) {
    std::cerr << "tune: no feasible point found within budget ("
              << result.evaluations_used << " evaluations)\n";
    return kExitInfeasible;
  }

  // Ground-truth re-check of the recommendation; recheck_recommendation falls
  // back along the trace if the surrogate was wrong about feasibility.
  const tuner::RecheckResult rc =
      tuner::recheck_recommendation(result, ground_truth, cfg.tuner_cfg);
  if (!rc.ok) {
    std::cerr << "tune: no candidate survives the ground-truth re-check\n";
    return kExitInfeasible;
  }
  if (!(rc.point == result.best_point)) {
    std::cerr << "tune: surrogate/truth disagreement, recommendation fell back to the next "
                 "feasible candidate\n";
  }
  const DesignPoint recommended = rc.point;
  const Metrics predicted = rc.predicted;
  const Metrics truth = rc.ground_truth;

  const ResolvedDesign d = resolve(cfg.space, recommended);
  config::ExperimentConfig rec = cfg;
  rec.profile.points = {d};
  rec.sampler.bias_rate = d.bias_rate;
  config::save_experiment_config(rec, (dir / "recommended_config.json").string());

  std::ofstream summary(dir / "tune_summary.csv");
  summary << "source,thr_eps,mem_bytes,acc\n";
  summary << "surrogate," << predicted.throughput_eps << "," << predicted.memory_bytes << ","
          << predicted.accuracy << "\n";
  summary << "ground_truth," << truth.throughput_eps << "," << truth.memory_bytes << ","
          << truth.accuracy << "\n";
  std::cout << "tune: recommended batch=" << d.batch_size << " partitions=" << d.partitions
            << " bias=" << d.bias_rate << " device=" << to_string(d.sampling_device)
            << " workers=" << d.workers << " cache=" << d.cache_volume
            << " mode=" << to_string(d.mode) << " (" << result.evaluations_used
            << " evaluations)\n";
  return kExitOk;
}

int cmd_report(const std::string& run_dir) {
  const auto paths = report::generate_report(run_dir);
  std::cout << "report: " << paths.summary << "\n" << paths.scatter_svg << "\n";
  if (!paths.gamma_svg.empty()) std::cout << paths.gamma_svg << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"a3gnn: locality-aware GNN training control plane"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-graph", "generate or import a graph file");
  std::string gen_type = "sbm", gen_input, gen_out = "graph.a3g";
  std::uint64_t gen_nodes = 300, gen_seed = 1;
  std::uint32_t gen_blocks = 3, gen_min_degree = 2, gen_feat = 16;
  double gen_p_in = 0.3, gen_p_out = 0.01, gen_exponent = 2.5;
  bool gen_symmetrize = false;
  gen->add_option("--type", gen_type, "sbm | power-law | edge-list");
  gen->add_option("--nodes", gen_nodes);
  gen->add_option("--blocks", gen_blocks);
  gen->add_option("--p-in", gen_p_in);
  gen->add_option("--p-out", gen_p_out);
  gen->add_option("--min-degree", gen_min_degree);
  gen->add_option("--exponent", gen_exponent);
  gen->add_option("--feat-dim", gen_feat);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--input", gen_input, "edge list file");
  gen->add_flag("--undirected", gen_symmetrize, "symmetrize imported edges");
  gen->add_option("--out", gen_out);

  std::string cfg_path;
  auto* profile = app.add_subcommand("profile", "profile stage costs and run design points");
  profile->add_option("--config", cfg_path)->required();

  auto* simulate = app.add_subcommand("simulate", "discrete-event pipeline simulation");
  std::string sim_mode = "pmode1", sim_trace, sim_cfg;
  double sim_ts = 1.0, sim_tb = 1.0, sim_tt = 2.0;
  std::uint64_t sim_iters = 100;
  std::uint32_t sim_workers = 2, sim_qcap = 4;
  simulate->add_option("--mode", sim_mode);
  simulate->add_option("--t-sample", sim_ts);
  simulate->add_option("--t-batch", sim_tb);
  simulate->add_option("--t-train", sim_tt);
  simulate->add_option("--iters", sim_iters);
  simulate->add_option("--workers", sim_workers);
  simulate->add_option("--queue-capacity", sim_qcap);
  simulate->add_option("--trace", sim_trace, "write event trace CSV here");
  simulate->add_option("--config", sim_cfg, "optional experiment config");

  auto* fit = app.add_subcommand("fit-surrogate", "collect profile dataset and fit the surrogate");
  std::string fit_cfg;
  fit->add_option("--config", fit_cfg)->required();

  auto* tune = app.add_subcommand("tune", "PPO design-space exploration");
  std::string tune_cfg;
  tune->add_option("--config", tune_cfg)->required();

  auto* report_cmd = app.add_subcommand("report", "render charts from a run directory");
  std::string run_dir;
  report_cmd->add_option("--run-dir", run_dir)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen_graph(gen_type, gen_nodes, gen_blocks, gen_p_in, gen_p_out, gen_min_degree,
                           gen_exponent, gen_feat, gen_seed, gen_input, gen_symmetrize, gen_out);
    }
    if (profile->parsed()) return cmd_profile(cfg_path);
    if (simulate->parsed()) {
      return cmd_simulate(sim_cfg, sim_ts, sim_tb, sim_tt, sim_iters, sim_mode, sim_workers,
                          sim_qcap, sim_trace);
    }
    if (fit->parsed()) return cmd_fit_surrogate(fit_cfg);
    if (tune->parsed()) return cmd_tune(tune_cfg);
    if (report_cmd->parsed()) return cmd_report(run_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
