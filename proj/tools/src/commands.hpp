#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace dwmf::cli {

// Every flag of every subcommand. Empty strings mean "resolve per command".
struct Options {
  std::string input;
  std::string counts;
  bool directed = false;
  bool directed_given = false;
  std::size_t window = 5;
  bool window_given = false;
  std::size_t length = 1'000'000;
  std::size_t dim = 64;
  std::size_t negatives = 5;
  std::string target = "softmax";
  std::string bias = "zero";
  std::string zero_policy;
  double epsilon = 1e-12;
  std::string split = "symmetric";
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string start;
  std::uint32_t start_node = 0;
  std::size_t burn_in = 0;
  bool burn_in_given = false;
  std::size_t epochs = 200;
  double lr = 0.0005;
  std::size_t samples_per_epoch = 10000;
  double threshold = 0.01;
  std::string format = "csv";
  std::string out_dir = ".";
  std::string manifest;
};

// Collects the resolved configuration, input digests and output files of one
// command, and writes them out as the manifest.
class Run {
 public:
  Run(std::string command, const std::string& out_dir);

  // Returns the absolute path, which is what the configuration records.
  std::string input(const std::string& role, const std::string& path);
  nlohmann::ordered_json& config() { return config_; }
  void write(const std::string& name, const std::string& bytes);
  std::filesystem::path finish(std::ostream& out);

 private:
  std::string command_;
  std::filesystem::path out_dir_;
  nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
  nlohmann::ordered_json outputs_ = nlohmann::ordered_json::array();
  std::vector<std::filesystem::path> input_paths_;
  std::chrono::system_clock::time_point started_;
  std::chrono::steady_clock::time_point clock_;
};

void cmd_exact(const Options& o, Run& run);
void cmd_sample(const Options& o, Run& run);
void cmd_compare(const Options& o, Run& run);
void cmd_embed(const Options& o, Run& run);
void cmd_train(const Options& o, Run& run);

// Command-line arguments that replay a manifest into `out_dir` (the
// manifest's own directory when empty). Verifies input digests first.
std::vector<std::string> rerun_arguments(const std::string& manifest_path,
                                         const std::string& out_dir);

}  // namespace dwmf::cli
