#include "dwmf/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "dwmf/error.hpp"

namespace dwmf {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& token, std::size_t line) {
  const std::string t = trim(token);
  if (t.empty()) throw ParseError("empty numeric field", line);
  // strtod accepts "inf" and "nan", which the writers can emit.
  char* end = nullptr;
  const double value = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw ParseError("not a number: \"" + t + "\"", line);
  return value;
}

std::uint64_t parse_u64(const std::string& token, std::size_t line) {
  const std::string t = trim(token);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParseError("not a non-negative integer: \"" + t + "\"", line);
  }
  return value;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& field : split(line, ',')) row.push_back(parse_double(field, line_no));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged matrix row", line_no);
    }
    rows.push_back(std::move(row));
  }
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size());
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void write_vector_csv(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v(i)) << '\n';
}

void write_counts_csv(std::ostream& out, const CooccurrenceCounts& counts) {
  out << "v,c,count\n";
  for (const auto& [key, value] : counts.pairs()) {
    out << key.first << ',' << key.second << ',' << value << '\n';
  }
}

CooccurrenceCounts read_counts_csv(std::istream& in, std::optional<std::size_t> num_nodes) {
  CooccurrenceCounts::PairMap pairs;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_id = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t == "v,c,count") continue;
    const auto fields = split(t, ',');
    if (fields.size() != 3) throw ParseError("expected \"v,c,count\"", line_no);
    const auto v = parse_u64(fields[0], line_no);
    const auto c = parse_u64(fields[1], line_no);
    const auto count = parse_u64(fields[2], line_no);
    if (v >= 0xFFFFFFFFULL || c >= 0xFFFFFFFFULL) throw ParseError("node id out of range", line_no);
    const CooccurrenceCounts::Key key{static_cast<NodeId>(v), static_cast<NodeId>(c)};
    if (pairs.contains(key)) throw ParseError("duplicate pair", line_no);
    pairs.emplace(key, count);
    max_id = std::max<std::size_t>({max_id, v, c});
    any = true;
  }
  const std::size_t n = num_nodes.value_or(any ? max_id + 1 : 0);
  if (any && max_id >= n) {
    throw ValidationError("counts reference node " + std::to_string(max_id) +
                          " but the node count is " + std::to_string(n));
  }
  return CooccurrenceCounts(n, std::move(pairs));
}

std::string counts_sidecar_json(const CooccurrenceCounts& counts, const SamplerConfig& cfg,
                                bool directed) {
  nlohmann::ordered_json doc;
  doc["n"] = counts.num_nodes();
  doc["directed"] = directed;
  doc["total"] = counts.total();
  doc["node_counts"] = counts.node_counts();
  doc["context_counts"] = counts.context_counts();
  doc["sampler"] = {
      {"window", cfg.window},
      {"centers", cfg.centers},
      {"seed", cfg.seed},
      {"start_mode", to_string(cfg.start_mode)},
      {"start_node", cfg.start_node},
      {"burn_in", cfg.burn_in},
      {"workers", cfg.workers},
  };
  return doc.dump(2) + "\n";
}

CountsSidecar parse_counts_sidecar(const std::string& json_text) {
  try {
    const auto doc = nlohmann::json::parse(json_text);
    CountsSidecar out{doc.at("n").get<std::size_t>(), doc.at("directed").get<bool>(),
                      doc.at("total").get<std::uint64_t>(), std::nullopt};
    if (doc.contains("sampler") && doc["sampler"].contains("window")) {
      out.window = doc["sampler"]["window"].get<std::size_t>();
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid counts sidecar: ") + e.what(), 0);
  }
}

std::optional<CountsSidecar> read_counts_sidecar(const std::string& csv_path) {
  const auto sidecar_path = std::filesystem::path(csv_path).replace_extension(".json");
  if (!std::filesystem::exists(sidecar_path)) return std::nullopt;
  std::ifstream js(sidecar_path);
  std::ostringstream text;
  text << js.rdbuf();
  return parse_counts_sidecar(text.str());
}

CooccurrenceCounts read_counts_file(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw ValidationError("cannot open counts file \"" + csv_path + "\"");

  const auto sidecar = read_counts_sidecar(csv_path);
  auto counts = read_counts_csv(in, sidecar ? std::optional(sidecar->num_nodes) : std::nullopt);
  if (sidecar && sidecar->total != counts.total()) {
    throw ValidationError("counts file total " + std::to_string(counts.total()) +
                          " disagrees with sidecar total " + std::to_string(sidecar->total));
  }
  return counts;
}

void write_word2vec(std::ostream& out, const Matrix& vectors) {
  out << vectors.rows() << ' ' << vectors.cols() << '\n';
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) out << ' ' << format_double(vectors(i, j));
    out << '\n';
  }
}

Matrix read_word2vec(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing \"n d\" header", 1);
  std::istringstream header(line);
  std::size_t n = 0;
  std::size_t d = 0;
  if (!(header >> n >> d)) throw ParseError("expected \"n d\" header", 1);
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<bool> seen(n, false);
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t line_no = row + 2;
    if (!std::getline(in, line)) throw ParseError("expected " + std::to_string(n) + " rows", line_no);
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    const auto id = parse_u64(token, line_no);
    if (id >= n || seen[id]) throw ParseError("bad or repeated node id " + token, line_no);
    seen[id] = true;
    for (std::size_t j = 0; j < d; ++j) {
      if (!(fields >> token)) throw ParseError("expected " + std::to_string(d) + " values", line_no);
      out(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(j)) =
          parse_double(token, line_no);
    }
    if (fields >> token) throw ParseError("too many values", line_no);
  }
  return out;
}

}  // namespace dwmf
