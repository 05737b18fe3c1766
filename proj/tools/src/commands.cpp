#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dwmf/cli/manifest.hpp"
#include "dwmf/dwmf.hpp"

#ifndef DWMF_VERSION
#define DWMF_VERSION "unknown"
#endif

namespace dwmf::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

Run::Run(std::string command, const std::string& out_dir)
    : command_(std::move(command)),
      out_dir_(fs::absolute(out_dir).lexically_normal()),
      started_(std::chrono::system_clock::now()),
      clock_(std::chrono::steady_clock::now()) {}

std::string Run::input(const std::string& role, const std::string& path) {
  const fs::path absolute = fs::absolute(path).lexically_normal();
  if (!fs::is_regular_file(absolute)) {
    throw ValidationError("cannot read " + role + " file \"" + path + "\"");
  }
  input_paths_.push_back(fs::weakly_canonical(absolute));
  inputs_.push_back(
      {{"role", role}, {"path", absolute.string()}, {"sha256", sha256_file(absolute)}});
  return absolute.string();
}

void Run::write(const std::string& name, const std::string& bytes) {
  fs::create_directories(out_dir_);
  const fs::path path = out_dir_ / name;
  for (const auto& in : input_paths_) {
    if (fs::weakly_canonical(path) == in) {
      throw ArgumentError("refusing to overwrite input file \"" + path.string() +
                          "\"; choose another --out-dir");
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
  out.close();
  if (!out) throw ValidationError("failed to write \"" + path.string() + "\"");
  outputs_.push_back({{"path", name}, {"sha256", sha256_hex(bytes)}});
}

fs::path Run::finish(std::ostream& out) {
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - clock_;
  Json manifest;
  manifest["command"] = command_;
  manifest["version"] = DWMF_VERSION;
  manifest["config"] = config_;
  manifest["inputs"] = inputs_;
  manifest["outputs"] = outputs_;
  manifest["out_dir"] = out_dir_.string();
  manifest["started_at"] = iso8601_utc(started_);
  manifest["duration_seconds"] = elapsed.count();
  const fs::path path = out_dir_ / manifest_name(command_);
  fs::create_directories(out_dir_);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file << manifest.dump(2) << '\n';
  file.close();
  if (!file) throw ValidationError("failed to write \"" + path.string() + "\"");
  for (const auto& o : outputs_) out << (out_dir_ / o["path"].get<std::string>()).string() << '\n';
  out << path.string() << '\n';
  return path;
}

namespace {

std::string extension(const std::string& format) { return format == "json" ? ".json" : ".csv"; }

std::string matrix_bytes(const Matrix& m, const std::string& format) {
  std::ostringstream out;
  if (format == "json") {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    out << Json{{"rows", m.rows()}, {"cols", m.cols()}, {"values", rows}}.dump(2) << '\n';
  } else {
    write_matrix_csv(out, m);
  }
  return out.str();
}

std::string vector_bytes(const Vector& v, const std::string& format) {
  std::ostringstream out;
  if (format == "json") {
    Json values = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) values.push_back(v(i));
    out << Json{{"size", v.size()}, {"values", values}}.dump(2) << '\n';
  } else {
    write_vector_csv(out, v);
  }
  return out.str();
}

std::string mask_bytes(const MaskMatrix& mask, const std::string& format) {
  return matrix_bytes(mask.cast<double>(), format);
}

std::string word2vec_bytes(const Matrix& m) {
  std::ostringstream out;
  write_word2vec(out, m);
  return out.str();
}

Json report_json(const ComparisonReport& r) {
  return {{"max_abs", r.max_abs},
          {"mean_abs", r.mean_abs},
          {"compared", r.compared},
          {"excluded", r.excluded}};
}

ZeroPolicy resolve_policy(const Options& o, ZeroPolicyKind fallback) {
  const ZeroPolicyKind kind = o.zero_policy.empty() ? fallback : zero_policy_from_string(o.zero_policy);
  if (!(o.epsilon > 0.0) || !(o.epsilon < 1.0)) {
    throw ArgumentError("--epsilon must lie in (0, 1)");
  }
  return {kind, o.epsilon};
}

Graph load_graph(const Options& o, Run& run, bool directed) {
  const std::string path = run.input("graph", o.input);
  run.config()["input"] = path;
  run.config()["directed"] = directed;
  Graph g = read_edge_list(path, directed);
  require_connected(g);
  return g;
}

void require_window(std::size_t t) {
  if (t == 0) throw ArgumentError("--window must be >= 1");
}

void require_negatives(std::size_t k) {
  if (k == 0) throw ArgumentError("--negative must be >= 1");
}

TargetMatrix build_target(const Options& o, const Graph& g, const WalkMatrix& p,
                          const ZeroPolicy& policy) {
  if (o.target == "sgns") return sgns_target_exact(g, o.window, o.negatives, policy);
  return softmax_target(p, bias_mode_from_string(o.bias), policy);
}

ZeroPolicyKind default_policy(const std::string& target) {
  return target == "sgns" ? ZeroPolicyKind::truncate : ZeroPolicyKind::floor;
}

void record_target(const Options& o, const ZeroPolicy& policy, Run& run) {
  run.config()["window"] = o.window;
  run.config()["target"] = o.target;
  run.config()["bias"] = o.bias;
  run.config()["negative"] = o.negatives;
  run.config()["zero-policy"] = to_string(policy.kind);
  run.config()["epsilon"] = policy.epsilon;
}

}  // namespace

void cmd_exact(const Options& o, Run& run) {
  require_window(o.window);
  require_negatives(o.negatives);
  const ZeroPolicy policy = resolve_policy(o, default_policy(o.target));
  const Graph g = load_graph(o, run, o.directed);
  record_target(o, policy, run);
  run.config()["format"] = o.format;

  const WalkMatrix p = walk_probability_matrix(g, o.window);
  const TargetMatrix target = build_target(o, g, p, policy);
  const std::string ext = extension(o.format);
  run.write("walk_matrix" + ext, matrix_bytes(p.values, o.format));
  run.write("target" + ext, matrix_bytes(target.values, o.format));
  if (target.mask) run.write("target_mask" + ext, mask_bytes(*target.mask, o.format));
  run.write("stationary" + ext, vector_bytes(stationary_distribution(g), o.format));
}

void cmd_sample(const Options& o, Run& run) {
  if (o.length == 0) throw ArgumentError("--length must be >= 1");
  require_window(o.window);
  if (o.workers == 0) throw ArgumentError("--workers must be >= 1");
  const Graph g = load_graph(o, run, o.directed);

  SamplerConfig cfg = SamplerConfig::defaults_for(g);
  cfg.window = o.window;
  cfg.centers = o.length;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  if (!o.start.empty()) cfg.start_mode = start_mode_from_string(o.start);
  if (o.burn_in_given) cfg.burn_in = o.burn_in;
  cfg.start_node = o.start_node;
  if (cfg.start_mode == StartMode::fixed && cfg.start_node >= g.num_nodes()) {
    throw ArgumentError("--start-node " + std::to_string(cfg.start_node) +
                        " is not a node of a graph with " + std::to_string(g.num_nodes()) +
                        " nodes");
  }
  cfg.validate();

  run.config()["window"] = cfg.window;
  run.config()["length"] = cfg.centers;
  run.config()["seed"] = cfg.seed;
  run.config()["workers"] = cfg.workers;
  run.config()["start"] = to_string(cfg.start_mode);
  run.config()["start-node"] = cfg.start_node;
  run.config()["burn-in"] = cfg.burn_in;

  const CooccurrenceCounts counts = sample_counts(g, cfg);
  std::ostringstream csv;
  write_counts_csv(csv, counts);
  run.write("counts.csv", csv.str());
  run.write("counts.json", counts_sidecar_json(counts, cfg, g.directed()));
}

void cmd_compare(const Options& o, Run& run) {
  require_negatives(o.negatives);
  const ZeroPolicy policy = resolve_policy(o, ZeroPolicyKind::mask);
  const std::string counts_path = run.input("counts", o.counts);
  const auto sidecar = read_counts_sidecar(counts_path);
  if (sidecar) {
    run.input("counts-sidecar", fs::path(counts_path).replace_extension(".json").string());
  }
  if (sidecar && o.directed_given && sidecar->directed != o.directed) {
    throw ValidationError(std::string("counts were sampled on a ") +
                          (sidecar->directed ? "directed" : "undirected") + " graph but --directed is " +
                          (o.directed ? "set" : "unset"));
  }
  const bool directed = o.directed_given ? o.directed : (sidecar && sidecar->directed);
  std::size_t window = o.window;
  if (!o.window_given && sidecar && sidecar->window) window = *sidecar->window;
  require_window(window);

  const Graph g = load_graph(o, run, directed);
  run.config()["counts"] = counts_path;
  run.config()["window"] = window;
  run.config()["negative"] = o.negatives;
  run.config()["zero-policy"] = to_string(policy.kind);
  run.config()["epsilon"] = policy.epsilon;
  run.config()["threshold"] = o.threshold;

  const CooccurrenceCounts counts = read_counts_file(counts_path);
  if (counts.num_nodes() != g.num_nodes()) {
    throw ValidationError("counts cover " + std::to_string(counts.num_nodes()) +
                          " nodes but the graph has " + std::to_string(g.num_nodes()));
  }

  const WalkMatrix p = walk_probability_matrix(g, window);
  const EmpiricalConditional conditional = empirical_conditional(counts);
  MaskMatrix small = (p.values.array() < o.threshold).matrix();

  const TargetMatrix sampled = sgns_target_from_counts(counts, o.negatives, policy);
  const TargetMatrix exact = sgns_target_exact(g, window, o.negatives, policy);
  MaskMatrix excluded = MaskMatrix::Constant(p.values.rows(), p.values.cols(), false);
  if (sampled.mask) excluded = excluded.array() || sampled.mask->array();
  if (exact.mask) excluded = excluded.array() || exact.mask->array();

  Json report;
  report["n"] = g.num_nodes();
  report["window"] = window;
  report["negative"] = o.negatives;
  report["total"] = counts.total();
  report["conditional"] = report_json(compare_matrices(conditional.values, p.values));
  report["conditional_above_threshold"] =
      report_json(compare_matrices(conditional.values, p.values, &small));
  report["frequency"] =
      report_json(compare_matrices(empirical_frequency(counts), stationary_distribution(g)));
  report["sgns"] = report_json(compare_matrices(sampled.values, exact.values, &excluded));
  run.write("compare.json", report.dump(2) + "\n");
}

void cmd_embed(const Options& o, Run& run) {
  require_window(o.window);
  require_negatives(o.negatives);
  if (o.dim == 0) throw ArgumentError("--dim must be >= 1");
  const ZeroPolicy policy = resolve_policy(o, default_policy(o.target));
  const FactorSplit split = factor_split_from_string(o.split);
  const Graph g = load_graph(o, run, o.directed);
  if (o.dim > g.num_nodes()) {
    throw ArgumentError("--dim " + std::to_string(o.dim) + " exceeds the number of nodes (" +
                        std::to_string(g.num_nodes()) + ")");
  }
  record_target(o, policy, run);
  run.config()["dim"] = o.dim;
  run.config()["split"] = to_string(split);

  const WalkMatrix p = walk_probability_matrix(g, o.window);
  const TargetMatrix target = build_target(o, g, p, policy);
  const SvdResult full = truncated_svd(target.values, g.num_nodes());
  const EmbeddingPair pair = factorize(target, o.dim, split);

  double tail = 0.0;
  for (Eigen::Index i = static_cast<Eigen::Index>(o.dim); i < full.s.size(); ++i) {
    tail += full.s(i) * full.s(i);
  }
  const double error = reconstruction_error(target.values, pair);
  const double norm = target.values.norm();
  Json report;
  report["n"] = g.num_nodes();
  report["dim"] = o.dim;
  report["singular_values"] = std::vector<double>(full.s.data(), full.s.data() + full.s.size());
  report["target_norm"] = norm;
  report["reconstruction_error"] = error;
  report["relative_error"] = norm > 0.0 ? error / norm : 0.0;
  report["tail_energy"] = std::sqrt(tail);
  if (target.mask) report["masked_entries"] = target.mask->count();

  run.write("node_embeddings.txt", word2vec_bytes(pair.node));
  run.write("context_embeddings.txt", word2vec_bytes(pair.context));
  run.write("embed_report.json", report.dump(2) + "\n");
}

void cmd_train(const Options& o, Run& run) {
  const ZeroPolicy policy = resolve_policy(o, ZeroPolicyKind::mask);
  TrainConfig cfg;
  cfg.dim = o.dim;
  cfg.negatives = o.negatives;
  cfg.epochs = o.epochs;
  cfg.learning_rate = o.lr;
  cfg.seed = o.seed;
  cfg.samples_per_epoch = o.samples_per_epoch;
  cfg.validate();

  const std::string counts_path = run.input("counts", o.counts);
  run.config()["counts"] = counts_path;
  run.config()["dim"] = cfg.dim;
  run.config()["negative"] = cfg.negatives;
  run.config()["epochs"] = cfg.epochs;
  run.config()["lr"] = cfg.learning_rate;
  run.config()["seed"] = cfg.seed;
  run.config()["samples-per-epoch"] = cfg.samples_per_epoch;
  run.config()["zero-policy"] = to_string(policy.kind);
  run.config()["epsilon"] = policy.epsilon;

  const CooccurrenceCounts counts = read_counts_file(counts_path);
  const TrainResult result = train_sgns(counts, cfg);

  std::ostringstream log;
  log << "epoch,objective\n";
  for (std::size_t e = 0; e < result.objective.size(); ++e) {
    log << e << ',' << format_double(result.objective[e]) << '\n';
  }
  const TargetMatrix target = sgns_target_from_counts(counts, cfg.negatives, policy);
  const Matrix dots = dot_matrix(result.pair);
  Json comparison = report_json(
      compare_matrices(dots, target.values, target.mask ? &*target.mask : nullptr));
  comparison["final_objective"] = result.objective.back();
  comparison["objective_bound"] = sgns_objective_bound(counts, cfg.negatives);

  run.write("node_embeddings.txt", word2vec_bytes(result.pair.node));
  run.write("context_embeddings.txt", word2vec_bytes(result.pair.context));
  run.write("train_log.csv", log.str());
  run.write("train_comparison.json", comparison.dump(2) + "\n");
}

std::vector<std::string> rerun_arguments(const std::string& manifest_path,
                                         const std::string& out_dir) {
  std::ifstream in(manifest_path);
  if (!in) throw ValidationError("cannot read manifest \"" + manifest_path + "\"");
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError("invalid manifest \"" + manifest_path + "\": " + e.what());
  }
  std::vector<std::string> args;
  try {
    for (const auto& input : manifest.at("inputs")) {
      const auto path = input.at("path").get<std::string>();
      if (sha256_file(path) != input.at("sha256").get<std::string>()) {
        throw ValidationError("input \"" + path + "\" changed since the manifest was written");
      }
    }
    args.push_back(manifest.at("command").get<std::string>());
    for (const auto& [key, value] : manifest.at("config").items()) {
      const std::string flag = "--" + key;
      if (value.is_boolean()) {
        if (value.get<bool>()) args.push_back(flag);
      } else if (value.is_string()) {
        args.insert(args.end(), {flag, value.get<std::string>()});
      } else if (value.is_number_unsigned()) {
        args.insert(args.end(), {flag, std::to_string(value.get<std::uint64_t>())});
      } else if (value.is_number_integer()) {
        args.insert(args.end(), {flag, std::to_string(value.get<std::int64_t>())});
      } else if (value.is_number_float()) {
        args.insert(args.end(), {flag, format_double(value.get<double>())});
      } else {
        throw ValidationError("manifest config entry \"" + key + "\" has an unsupported type");
      }
    }
    args.insert(args.end(),
                {"--out-dir", out_dir.empty() ? manifest.at("out_dir").get<std::string>() : out_dir});
  } catch (const Json::exception& e) {
    throw ValidationError("invalid manifest \"" + manifest_path + "\": " + e.what());
  }
  return args;
}

}  // namespace dwmf::cli
