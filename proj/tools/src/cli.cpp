#include "dwmf/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <ostream>

#include "commands.hpp"
#include "dwmf/error.hpp"

namespace dwmf::cli {

namespace {

bool given(CLI::App& app, const std::string& name) {
  const CLI::Option* opt = app.get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

void add_graph(CLI::App& app, Options& o) {
  app.add_option("--input", o.input, "Edge list file")->required();
  app.add_flag("--directed", o.directed, "Treat edges as directed");
}

void add_window(CLI::App& app, Options& o) {
  app.add_option("-t,--window", o.window, "Window size t")->capture_default_str();
}

void add_policy(CLI::App& app, Options& o) {
  app.add_option("--zero-policy", o.zero_policy, "How log(0) entries become finite")
      ->check(CLI::IsMember({"floor", "truncate", "mask"}));
  app.add_option("--epsilon", o.epsilon, "Floor for the floor policy")->capture_default_str();
}

void add_target(CLI::App& app, Options& o) {
  app.add_option("--target", o.target, "Closed-form target")
      ->check(CLI::IsMember({"softmax", "sgns"}))
      ->capture_default_str();
  app.add_option("--bias", o.bias, "Softmax bias b")
      ->check(CLI::IsMember({"zero", "log2t"}))
      ->capture_default_str();
}

void add_negatives(CLI::App& app, Options& o) {
  app.add_option("-k,--negative", o.negatives, "Negative samples k")->capture_default_str();
}

void add_out_dir(CLI::App& app, Options& o) {
  app.add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
}

void dispatch(const std::string& name, const Options& o, std::ostream& out) {
  Run run(name, o.out_dir);
  if (name == "exact") cmd_exact(o, run);
  if (name == "sample") cmd_sample(o, run);
  if (name == "compare") cmd_compare(o, run);
  if (name == "embed") cmd_embed(o, run);
  if (name == "train") cmd_train(o, run);
  run.finish(out);
}

int parse_and_run(std::vector<std::string> args, std::ostream& out, std::ostream& err,
                  int depth) {
  Options o;
  CLI::App app{"Random-walk co-occurrence statistics, closed-form targets and embeddings",
               "dwmf"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(DWMF_VERSION));

  auto* exact = app.add_subcommand("exact", "Closed-form walk matrix, target and stationary distribution");
  add_graph(*exact, o);
  add_window(*exact, o);
  add_target(*exact, o);
  add_negatives(*exact, o);
  add_policy(*exact, o);
  exact->add_option("--format", o.format, "Matrix file format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  add_out_dir(*exact, o);

  auto* sample = app.add_subcommand("sample", "Sample node-context pair counts from one walk");
  add_graph(*sample, o);
  add_window(*sample, o);
  sample->add_option("-L,--length", o.length, "Walk positions used as centers")
      ->capture_default_str();
  sample->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  sample->add_option("--workers", o.workers, "Parallel walks")->capture_default_str();
  sample->add_option("--start", o.start, "Start node distribution")
      ->check(CLI::IsMember({"stationary", "uniform", "fixed"}));
  sample->add_option("--start-node", o.start_node, "Start node for --start fixed");
  sample->add_option("--burn-in", o.burn_in, "Steps discarded before counting");
  add_out_dir(*sample, o);

  auto* compare = app.add_subcommand("compare", "Compare sampled counts with closed forms");
  compare->add_option("--counts", o.counts, "Counts CSV from `sample`")->required();
  add_graph(*compare, o);
  add_window(*compare, o);
  add_negatives(*compare, o);
  add_policy(*compare, o);
  compare->add_option("--threshold", o.threshold, "Cutoff on P for the restricted comparison")
      ->capture_default_str();
  add_out_dir(*compare, o);

  auto* embed = app.add_subcommand("embed", "Factorize a closed-form target by truncated SVD");
  add_graph(*embed, o);
  add_window(*embed, o);
  embed->add_option("-d,--dim", o.dim, "Embedding dimension")->capture_default_str();
  add_target(*embed, o);
  add_negatives(*embed, o);
  add_policy(*embed, o);
  embed->add_option("--split", o.split, "How singular values are split between W and H")
      ->check(CLI::IsMember({"symmetric", "node"}))
      ->capture_default_str();
  add_out_dir(*embed, o);

  auto* train = app.add_subcommand("train", "Train SGNS embeddings on sampled counts");
  train->add_option("--counts", o.counts, "Counts CSV from `sample`")->required();
  train->add_option("-d,--dim", o.dim, "Embedding dimension")->capture_default_str();
  add_negatives(*train, o);
  train->add_option("--epochs", o.epochs, "Epochs")->capture_default_str();
  train->add_option("--lr", o.lr, "Initial learning rate")->capture_default_str();
  train->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  train->add_option("--samples-per-epoch", o.samples_per_epoch, "Positive draws per epoch")
      ->capture_default_str();
  add_policy(*train, o);
  add_out_dir(*train, o);

  auto* rerun = app.add_subcommand("rerun", "Replay a manifest");
  rerun->add_option("--manifest", o.manifest, "Manifest written by an earlier run")->required();
  rerun->add_option("--out-dir", o.out_dir, "Output directory (default: the manifest's)");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (rerun->parsed()) {
      if (depth > 0) throw ValidationError("a manifest cannot replay another rerun");
      const std::string out_dir = given(*rerun, "--out-dir") ? o.out_dir : "";
      return parse_and_run(rerun_arguments(o.manifest, out_dir), out, err, depth + 1);
    }
    CLI::App* chosen = app.get_subcommands().front();
    o.directed_given = given(*chosen, "--directed");
    o.window_given = given(*chosen, "--window");
    o.burn_in_given = given(*chosen, "--burn-in");
    dispatch(chosen->get_name(), o, out);
    return kSuccess;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return parse_and_run(args, out, err, 0);
}

}  // namespace dwmf::cli
