#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dwmf/cli/cli.hpp"
#include "dwmf/cli/manifest.hpp"
#include "dwmf/io.hpp"
#include "dwmf/sgns.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using dwmf::Matrix;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = dwmf::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli_test_tmp" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

Matrix read_csv(const fs::path& p) {
  std::ifstream in(p);
  return dwmf::read_matrix_csv(in);
}

Matrix read_w2v(const fs::path& p) {
  std::ifstream in(p);
  return dwmf::read_word2vec(in);
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

std::string counts_text(const std::vector<std::vector<std::uint64_t>>& c) {
  std::string s = "v,c,count\n";
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c[i].size(); ++j)
      if (c[i][j] > 0) s += std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(c[i][j]) + "\n";
  return s;
}

}  // namespace

TEST_CASE("exact: path graph target rows are log of the walk matrix") {
  const auto dir = scratch("exact_path");
  const auto graph = write_text(dir / "path.txt", "0 1\n1 2\n");
  const auto r = cli({"exact", "--input", graph.string(), "-t", "2", "--bias", "zero",
                      "--out-dir", (dir / "out").string()});
  REQUIRE(r.code == 0);
  const auto oracle = oracle::walk_matrix(oracle::transition(3, {{0, 1}, {1, 2}}, false), 2);
  const Matrix walk = read_csv(dir / "out" / "walk_matrix.csv");
  const Matrix target = read_csv(dir / "out" / "target.csv");
  CHECK(oracle::max_abs(oracle, walk) < 1e-12);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(std::abs(target(i, j) - std::log(oracle[i][j])) < 1e-12);
  }
  CHECK(fs::exists(dir / "out" / "exact.manifest.json"));
}

TEST_CASE("exact: K2 stationary, json format and mask output") {
  const auto dir = scratch("exact_k2");
  const auto graph = write_text(dir / "k2.txt", "0 1\n");
  REQUIRE(cli({"exact", "--input", graph.string(), "-t", "1", "--out-dir", dir.string()}).code == 0);
  const std::string stationary = slurp(dir / "stationary.csv");
  CHECK(stationary == "0.5\n0.5\n");

  REQUIRE(cli({"exact", "--input", graph.string(), "-t", "1", "--format", "json", "--zero-policy",
               "mask", "--out-dir", (dir / "js").string()})
              .code == 0);
  const auto target = read_json(dir / "js" / "target.json");
  CHECK(target["rows"] == 2);
  CHECK(target["values"][0][1].get<double>() == 0.0);  // log 1
  const auto mask = read_json(dir / "js" / "target_mask.json");
  CHECK(mask["values"][0][0].get<double>() == 1.0);
  CHECK(mask["values"][0][1].get<double>() == 0.0);
}

TEST_CASE("exact: disconnected input and bad flags") {
  const auto dir = scratch("exact_errors");
  const auto graph = write_text(dir / "two.txt", "0 1\n2 3\n");
  const auto r = cli({"exact", "--input", graph.string(), "--out-dir", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("connected") != std::string::npos);

  const auto ok = write_text(dir / "k2.txt", "0 1\n");
  CHECK(cli({"exact", "--input", ok.string(), "--bias", "huge"}).code == 1);
  CHECK(cli({"exact", "--input", ok.string(), "-t", "0"}).code == 1);
  CHECK(cli({"exact", "--input", ok.string(), "--epsilon", "0"}).code == 1);
  CHECK(cli({"exact"}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({}).code == 1);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"exact", "--input", (dir / "missing.txt").string()}).code == 2);
  const auto bad = write_text(dir / "bad.txt", "0 x\n");
  CHECK(cli({"exact", "--input", bad.string()}).code == 2);
}

TEST_CASE("sample: K2 counts, determinism and usage errors") {
  const auto dir = scratch("sample");
  const auto graph = write_text(dir / "k2.txt", "0 1\n");
  const auto a = dir / "a";
  const auto b = dir / "b";
  for (const auto& out : {a, b}) {
    REQUIRE(cli({"sample", "--input", graph.string(), "-t", "1", "-L", "1000", "--seed", "4",
                 "--out-dir", out.string()})
                .code == 0);
  }
  CHECK(slurp(a / "counts.csv") == "v,c,count\n0,1,1000\n1,0,1000\n");
  CHECK(slurp(a / "counts.csv") == slurp(b / "counts.csv"));
  CHECK(slurp(a / "counts.json") == slurp(b / "counts.json"));
  CHECK(read_json(a / "counts.json")["n"] == 2);

  const auto zero = cli({"sample", "--input", graph.string(), "-L", "0", "--out-dir", a.string()});
  CHECK(zero.code == 1);
  CHECK(cli({"sample", "--input", graph.string(), "--workers", "0"}).code == 1);
  CHECK(cli({"sample", "--input", graph.string(), "-L", "-5"}).code == 1);
  CHECK(cli({"sample", "--input", graph.string(), "--start", "fixed", "--start-node", "9"}).code == 1);
}

TEST_CASE("sample refuses to overwrite its input") {
  const auto dir = scratch("sample_overwrite");
  const auto graph = write_text(dir / "counts.csv", "0 1\n");
  const std::string before = slurp(graph);
  CHECK(cli({"sample", "--input", graph.string(), "-L", "10", "--out-dir", dir.string()}).code == 1);
  CHECK(slurp(graph) == before);
}

TEST_CASE("compare: sampled path graph converges") {
  const auto dir = scratch("compare_sampled");
  const auto graph = write_text(dir / "path.txt", "0 1\n1 2\n");
  REQUIRE(cli({"sample", "--input", graph.string(), "-t", "2", "-L", "1000000", "--seed", "11",
               "--out-dir", dir.string()})
              .code == 0);
  const std::string graph_before = slurp(graph);
  const std::string counts_before = slurp(dir / "counts.csv");
  REQUIRE(cli({"compare", "--counts", (dir / "counts.csv").string(), "--input", graph.string(),
               "--out-dir", (dir / "cmp").string()})
              .code == 0);
  const auto report = read_json(dir / "cmp" / "compare.json");
  CHECK(report["window"] == 2);  // taken from the sidecar
  CHECK(report["conditional"]["max_abs"].get<double>() < 0.01);
  CHECK(report["frequency"]["max_abs"].get<double>() < 0.01);
  CHECK(slurp(graph) == graph_before);
  CHECK(slurp(dir / "counts.csv") == counts_before);
}

TEST_CASE("compare: counts built from expected values match to rounding") {
  const auto dir = scratch("compare_analytic");
  const auto graph = write_text(dir / "path.txt", "0 1\n1 2\n");
  // 16 N pi_i P_ij for the path graph at t = 2
  const std::uint64_t N = 1000;
  const auto counts = write_text(dir / "counts.csv",
                                 counts_text({{N, 2 * N, N}, {2 * N, 4 * N, 2 * N}, {N, 2 * N, N}}));
  REQUIRE(cli({"compare", "--counts", counts.string(), "--input", graph.string(), "-t", "2", "-k",
               "1", "--out-dir", (dir / "cmp").string()})
              .code == 0);
  const auto report = read_json(dir / "cmp" / "compare.json");
  for (const char* key : {"conditional", "frequency", "sgns"}) {
    CAPTURE(key);
    CHECK(report[key]["max_abs"].get<double>() < 1e-9);
    CHECK(report[key]["compared"].get<int>() > 0);
  }
}

TEST_CASE("compare: mismatched graph") {
  const auto dir = scratch("compare_mismatch");
  const auto counts = write_text(dir / "counts.csv", counts_text({{0, 5}, {5, 0}}));
  const auto graph = write_text(dir / "path.txt", "0 1\n1 2\n");
  const auto r = cli({"compare", "--counts", counts.string(), "--input", graph.string(),
                      "--out-dir", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("nodes") != std::string::npos);
}

TEST_CASE("embed: reconstruction and Eckart-Young tail") {
  const auto dir = scratch("embed");
  const auto graph = write_text(dir / "path.txt", "0 1\n1 2\n");
  REQUIRE(cli({"embed", "--input", graph.string(), "-t", "2", "-d", "3", "--out-dir",
               (dir / "full").string()})
              .code == 0);
  const auto full = read_json(dir / "full" / "embed_report.json");
  CHECK(full["reconstruction_error"].get<double>() < 1e-8);

  const auto star = write_text(dir / "star.txt", "0 1\n0 2\n0 3\n3 4\n");
  REQUIRE(cli({"embed", "--input", star.string(), "-t", "3", "-d", "1", "--out-dir",
               (dir / "one").string()})
              .code == 0);
  const auto one = read_json(dir / "one" / "embed_report.json");
  CHECK(std::abs(one["reconstruction_error"].get<double>() - one["tail_energy"].get<double>()) <
        1e-9 * one["target_norm"].get<double>());

  // word2vec files re-read and multiplied back give the target
  REQUIRE(cli({"exact", "--input", star.string(), "-t", "3", "--out-dir", (dir / "exact").string()})
              .code == 0);
  REQUIRE(cli({"embed", "--input", star.string(), "-t", "3", "-d", "5", "--out-dir",
               (dir / "five").string()})
              .code == 0);
  const Matrix w = read_w2v(dir / "five" / "node_embeddings.txt");
  const Matrix h = read_w2v(dir / "five" / "context_embeddings.txt");
  CHECK(w.rows() == 5);
  CHECK(w.cols() == 5);
  const Matrix target = read_csv(dir / "exact" / "target.csv");
  CHECK((w * h.transpose() - target).cwiseAbs().maxCoeff() < 1e-8 * target.norm());

  CHECK(cli({"embed", "--input", graph.string(), "-d", "4", "--out-dir", dir.string()}).code == 1);
  CHECK(cli({"embed", "--input", graph.string(), "-d", "0", "--out-dir", dir.string()}).code == 1);
}

TEST_CASE("train: K3 counts, zero epochs and determinism") {
  const auto dir = scratch("train");
  const auto counts = write_text(dir / "k3.csv",
                                 counts_text({{0, 100, 100}, {100, 0, 100}, {100, 100, 0}}));
  const std::vector<std::string> base{"train", "--counts", counts.string(), "-d", "3", "-k", "1",
                                      "--epochs", "200", "--seed", "5"};
  auto a = base;
  a.insert(a.end(), {"--out-dir", (dir / "a").string()});
  auto b = base;
  b.insert(b.end(), {"--out-dir", (dir / "b").string()});
  REQUIRE(cli(a).code == 0);
  REQUIRE(cli(b).code == 0);
  const auto comparison = read_json(dir / "a" / "train_comparison.json");
  CHECK(comparison["mean_abs"].get<double>() <= 0.1);
  CHECK(comparison["compared"] == 6);
  for (const char* name : {"node_embeddings.txt", "context_embeddings.txt", "train_log.csv",
                           "train_comparison.json"}) {
    CAPTURE(name);
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }
  std::istringstream log(slurp(dir / "a" / "train_log.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(log, line)) ++lines;
  CHECK(lines == 202);

  REQUIRE(cli({"train", "--counts", counts.string(), "-d", "3", "--epochs", "0", "--seed", "5",
               "--out-dir", (dir / "zero").string()})
              .code == 0);
  dwmf::TrainConfig cfg;
  cfg.dim = 3;
  cfg.seed = 5;
  const auto init = dwmf::initial_embeddings(3, cfg);
  CHECK(read_w2v(dir / "zero" / "node_embeddings.txt") == init.node);
  CHECK(read_w2v(dir / "zero" / "context_embeddings.txt") == init.context);

  CHECK(cli({"train", "--counts", counts.string(), "--lr", "0"}).code == 1);
  const auto empty = write_text(dir / "empty.csv", "v,c,count\n");
  CHECK(cli({"train", "--counts", empty.string(), "--out-dir", dir.string()}).code == 2);
}

TEST_CASE("rerun reproduces every command byte for byte") {
  const auto dir = scratch("rerun");
  const auto graph = write_text(dir / "g.txt", "0 1\n1 2\n2 3\n3 0\n0 2\n");
  const std::string g = graph.string();
  const std::string counts = (dir / "sample" / "counts.csv").string();
  const std::vector<std::vector<std::string>> runs{
      {"sample", "--input", g, "-t", "3", "-L", "20000", "--seed", "9", "--workers", "3"},
      {"exact", "--input", g, "-t", "3", "--target", "sgns", "-k", "2", "--format", "json"},
      {"compare", "--counts", counts, "--input", g},
      {"embed", "--input", g, "-t", "3", "-d", "2", "--bias", "log2t"},
      {"train", "--counts", counts, "-d", "2", "--epochs", "5", "--seed", "1"},
  };
  for (auto args : runs) {
    const std::string command = args.front();
    CAPTURE(command);
    args.insert(args.end(), {"--out-dir", (dir / command).string()});
    REQUIRE(cli(args).code == 0);
    const auto manifest_path = dir / command / dwmf::cli::manifest_name(command);
    const auto manifest = read_json(manifest_path);
    CHECK(manifest["command"] == command);
    CHECK(manifest["started_at"].get<std::string>().size() == 20);
    CHECK(manifest["duration_seconds"].get<double>() >= 0.0);
    const auto replay = dir / (command + "_replay");
    REQUIRE(cli({"rerun", "--manifest", manifest_path.string(), "--out-dir", replay.string()}).code == 0);
    REQUIRE(!manifest["outputs"].empty());
    for (const auto& output : manifest["outputs"]) {
      const std::string name = output["path"];
      CAPTURE(name);
      CHECK(slurp(dir / command / name) == slurp(replay / name));
      CHECK(dwmf::cli::sha256_file(dir / command / name) == output["sha256"]);
    }
    for (const auto& input : manifest["inputs"]) {
      CHECK(dwmf::cli::sha256_file(input["path"].get<std::string>()) == input["sha256"]);
    }
  }

  // an edited input is detected
  write_text(graph, "0 1\n1 2\n2 3\n3 0\n");
  const auto r = cli({"rerun", "--manifest", (dir / "exact" / "exact.manifest.json").string(),
                      "--out-dir", (dir / "stale").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("changed") != std::string::npos);
  CHECK(cli({"rerun", "--manifest", (dir / "nope.json").string()}).code == 2);
}

TEST_CASE("sha256 digests") {
  CHECK(dwmf::cli::sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(dwmf::cli::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
