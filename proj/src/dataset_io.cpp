#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "gcnalign/dataset.hpp"

namespace gcnalign {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

bool skippable(const std::vector<std::string_view>& tokens) {
  return tokens.empty() || tokens.front().starts_with('#');
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::string where(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

double parse_double(std::string_view token, const std::string& location) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw DataError(location + ": not a number '" + std::string(token) + "'");
  }
  return value;
}

bool parse_integer(std::string_view token, long long& value) {
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size();
}

// Maps raw class strings to dense indices.
std::vector<int> index_labels(const std::vector<std::string>& raw, bool numeric_if_possible, int& num_classes) {
  bool all_integers = numeric_if_possible;
  for (const auto& s : raw) {
    long long v = 0;
    if (!all_integers) break;
    all_integers = parse_integer(s, v);
  }

  std::vector<int> labels(raw.size());
  if (all_integers) {
    std::map<long long, int> index;
    for (const auto& s : raw) {
      long long v = 0;
      parse_integer(s, v);
      index.emplace(v, 0);
    }
    int next = 0;
    for (auto& [value, slot] : index) slot = next++;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      long long v = 0;
      parse_integer(raw[i], v);
      labels[i] = index.at(v);
    }
    num_classes = next;
  } else {
    std::map<std::string, int> index;
    for (const auto& s : raw) index.emplace(s, 0);
    int next = 0;
    for (auto& [value, slot] : index) slot = next++;
    for (std::size_t i = 0; i < raw.size(); ++i) labels[i] = index.at(raw[i]);
    num_classes = next;
  }
  return labels;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& edges_path, const std::filesystem::path& features_path,
                     DatasetFormat format) {
  Dataset d;
  std::vector<std::string> raw_labels;
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, Index> id_index;

  {
    auto in = open_or_throw(features_path);
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto tokens = split_ws(line);
      if (skippable(tokens)) continue;
      const auto loc = where(features_path, line_no);
      if (tokens.size() < 2) throw DataError(loc + ": label column missing");
      if (width == 0) {
        width = tokens.size();
      } else if (tokens.size() != width) {
        throw DataError(loc + ": ragged row, expected " + std::to_string(width) + " columns, got " +
                        std::to_string(tokens.size()));
      }
      std::string id(tokens.front());
      if (!id_index.emplace(id, static_cast<Index>(d.node_ids.size())).second) {
        throw DataError(loc + ": duplicate node id '" + id + "'");
      }
      std::vector<double> row;
      row.reserve(width - 2);
      for (std::size_t t = 1; t + 1 < tokens.size(); ++t) row.push_back(parse_double(tokens[t], loc));
      d.node_ids.push_back(std::move(id));
      raw_labels.emplace_back(tokens.back());
      rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(features_path.string() + ": no nodes");
  }

  const Index n = static_cast<Index>(rows.size());
  const Index c = static_cast<Index>(rows.front().size());
  d.features.resize(n, c);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < c; ++j) d.features(i, j) = rows[i][j];
  }
  d.labels = index_labels(raw_labels, format == DatasetFormat::Generic, d.num_classes);

  std::vector<Edge> edges;
  {
    auto in = open_or_throw(edges_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto tokens = split_ws(line);
      if (skippable(tokens)) continue;
      const auto loc = where(edges_path, line_no);
      if (tokens.size() != 2) throw DataError(loc + ": expected two node ids");
      Index ends[2];
      for (int k = 0; k < 2; ++k) {
        const auto it = id_index.find(std::string(tokens[k]));
        if (it == id_index.end()) throw DataError(loc + ": unknown node id '" + std::string(tokens[k]) + "'");
        ends[k] = it->second;
      }
      edges.push_back({ends[0], ends[1]});
    }
  }
  d.adjacency = adjacency_from_edges(n, edges);

  try {
    validate(d);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  return d;
}

void save_dataset(const Dataset& d, const std::filesystem::path& edges_path,
                  const std::filesystem::path& features_path) {
  {
    std::ofstream out(features_path);
    if (!out) throw DataError("cannot write " + features_path.string());
    for (Index i = 0; i < d.num_nodes(); ++i) {
      out << d.node_ids[i];
      for (Index j = 0; j < d.num_features(); ++j) out << ' ' << format_double(d.features(i, j));
      out << ' ' << d.labels[i] << '\n';
    }
  }
  std::ofstream out(edges_path);
  if (!out) throw DataError("cannot write " + edges_path.string());
  for (const Edge& e : edge_list(d.adjacency)) out << d.node_ids[e.u] << ' ' << d.node_ids[e.v] << '\n';
}

}  // namespace gcnalign
