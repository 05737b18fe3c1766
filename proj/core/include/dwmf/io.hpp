#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "dwmf/matrix.hpp"
#include "dwmf/walk_sampler.hpp"

namespace dwmf {

/// "%.17g": round-trips every double exactly.
std::string format_double(double x);

/// One matrix row per line, comma separated, full precision.
void write_matrix_csv(std::ostream& out, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);

/// One value per line.
void write_vector_csv(std::ostream& out, const Vector& v);

/// Header "v,c,count", then one line per nonzero pair in (v, c) order.
void write_counts_csv(std::ostream& out, const CooccurrenceCounts& counts);

/// Reads the CSV written above. When `num_nodes` is empty the node count is
/// 1 + the largest id seen.
CooccurrenceCounts read_counts_csv(std::istream& in,
                                   std::optional<std::size_t> num_nodes = std::nullopt);

/// JSON sidecar for a counts file: n, directed, node_counts, context_counts,
/// total and the sampler configuration. Returns the serialized document.
std::string counts_sidecar_json(const CooccurrenceCounts& counts, const SamplerConfig& cfg,
                                bool directed);

struct CountsSidecar {
  std::size_t num_nodes = 0;
  bool directed = false;
  std::uint64_t total = 0;
  // sampler.window, when the sidecar records one
  std::optional<std::size_t> window;
};

CountsSidecar parse_counts_sidecar(const std::string& json_text);

/// The "<stem>.json" sidecar of a counts CSV, if one exists.
std::optional<CountsSidecar> read_counts_sidecar(const std::string& csv_path);

/// Counts CSV plus the "<stem>.json" sidecar next to it when present. The
/// sidecar supplies n and is cross-checked against the CSV marginals.
CooccurrenceCounts read_counts_file(const std::string& csv_path);

/// word2vec text format: "n d", then "<id> x1 ... xd" per row.
void write_word2vec(std::ostream& out, const Matrix& vectors);
Matrix read_word2vec(std::istream& in);

}  // namespace dwmf
