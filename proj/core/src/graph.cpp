// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "groupcl/error.hpp"
#include "groupcl/rng.hpp"

namespace groupcl {

namespace {

Edge normalized(const Edge& e) { return e.first < e.second ? e : Edge{e.second, e.first}; }

}  // namespace

Graph::Graph(std::size_t num_nodes, Matrix features, std::vector<Edge> edges, std::optional<int> label)
    : num_nodes_(num_nodes), features_(std::move(features)), edges_(std::move(edges)), label_(label) {
  if (num_nodes_ == 0) throw ContractError("graph: node count must be positive");
  if (features_.rows() != num_nodes_) {
    throw DimensionError("graph: feature matrix " + features_.shape_string() + " for " + std::to_string(num_nodes_) + " nodes");
  }
  if (!features_.all_finite()) throw NumericError("graph: non-finite node feature");
  std::set<Edge> seen;
  for (const Edge& e : edges_) {
    if (e.first >= num_nodes_ || e.second >= num_nodes_) {
      throw ContractError("graph: edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                          ") out of range for " + std::to_string(num_nodes_) + " nodes");
    }
    if (e.first == e.second) throw ContractError("graph: self-loop on node " + std::to_string(e.first));
    if (!seen.insert(normalized(e)).second) {
      throw ContractError("graph: duplicate edge (" + std::to_string(e.first) + "," + std::to_string(e.second) + ")");
    }
  }
  if (label_ && *label_ < 0) throw ContractError("graph: negative label");
}

std::vector<std::vector<std::size_t>> Graph::neighbor_lists() const {
  std::vector<std::vector<std::size_t>> nbrs(num_nodes_);
  for (const auto& [u, v] : edges_) {
    nbrs[u].push_back(v);
    nbrs[v].push_back(u);
  }
  return nbrs;
}

bool Graph::has_edge(std::size_t u, std::size_t v) const {
  const Edge key = normalized({u, v});
  return std::any_of(edges_.begin(), edges_.end(), [&](const Edge& e) { return normalized(e) == key; });
}

Dataset make_dataset(std::vector<Graph> graphs) {
  Dataset ds;
  for (const Graph& g : graphs) {
    if (ds.feature_dim == 0) ds.feature_dim = g.feature_dim();
    if (g.feature_dim() != ds.feature_dim) {
      throw DimensionError("dataset: feature width " + std::to_string(g.feature_dim()) + " differs from " +
                           std::to_string(ds.feature_dim));
    }
    if (g.label()) ds.num_classes = std::max(ds.num_classes, *g.label() + 1);
  }
  ds.graphs = std::move(graphs);
  return ds;
}

std::vector<std::size_t> Batch::node_owner() const {
  std::vector<std::size_t> owner(total_nodes());
  for (std::size_t s = 0; s + 1 < segments.size(); ++s)
    for (std::size_t v = segments[s]; v < segments[s + 1]; ++v) owner[v] = s;
  return owner;
}

Batch batch_graphs(const std::vector<Graph>& graphs) {
  if (graphs.empty()) throw ContractError("batch_graphs: empty graph list");
  const std::size_t d = graphs.front().feature_dim();
  std::size_t total = 0;
  for (const Graph& g : graphs) {
    if (g.feature_dim() != d) throw DimensionError("batch_graphs: mixed feature widths");
    total += g.num_nodes();
  }
  Batch b;
  b.features = Matrix(total, d);
  b.segments.reserve(graphs.size() + 1);
  b.segments.push_back(0);
  std::size_t offset = 0;
  for (const Graph& g : graphs) {
    std::copy(g.features().data().begin(), g.features().data().end(), b.features.data().begin() + offset * d);
    for (const auto& [u, v] : g.edges()) b.edges.emplace_back(u + offset, v + offset);
    offset += g.num_nodes();
    b.segments.push_back(offset);
    b.labels.push_back(g.label());
  }

  std::vector<std::size_t> degree(total, 0);
  for (const auto& [u, v] : b.edges) {
    ++degree[u];
    ++degree[v];
  }
  b.adjacency.offsets.assign(total + 1, 0);
  for (std::size_t v = 0; v < total; ++v) b.adjacency.offsets[v + 1] = b.adjacency.offsets[v] + degree[v];
  b.adjacency.neighbors.resize(b.adjacency.offsets.back());
  std::vector<std::size_t> cursor(b.adjacency.offsets.begin(), b.adjacency.offsets.end() - 1);
  for (const auto& [u, v] : b.edges) {
    b.adjacency.neighbors[cursor[u]++] = v;
    b.adjacency.neighbors[cursor[v]++] = u;
  }
  return b;
}

std::vector<Graph> unbatch(const Batch& batch) {
  std::vector<Graph> out;
  const std::size_t d = batch.features.cols();
  const auto owner = batch.node_owner();
  std::vector<std::vector<Edge>> edges(batch.num_graphs());
  for (const auto& [u, v] : batch.edges) {
    const std::size_t s = owner[u];
    if (owner[v] != s) throw ContractError("unbatch: edge crosses graph segments");
    edges[s].emplace_back(u - batch.segments[s], v - batch.segments[s]);
  }
  for (std::size_t s = 0; s < batch.num_graphs(); ++s) {
    const std::size_t lo = batch.segments[s], hi = batch.segments[s + 1];
    std::vector<double> x(batch.features.data().begin() + lo * d, batch.features.data().begin() + hi * d);
    out.emplace_back(hi - lo, Matrix(hi - lo, d, std::move(x)), std::move(edges[s]), batch.labels[s]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Line-delimited file format
// ---------------------------------------------------------------------------

namespace {

std::size_t as_index(const nlohmann::json& v, std::size_t line, const char* what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParseError(line, std::string(what) + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

Graph parse_record(const std::string& text, std::size_t line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line, std::string("malformed record: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(line, "record is not an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "n" && key != "x" && key != "e" && key != "y") throw ParseError(line, "unknown field '" + key + "'");
  }
  if (!j.contains("n") || !j.contains("x") || !j.contains("e")) throw ParseError(line, "record needs fields n, x, e");
  const std::size_t n = as_index(j["n"], line, "n");
  if (n == 0) throw ParseError(line, "n must be positive");
  const auto& x = j["x"];
  const auto& e = j["e"];
  if (!x.is_array() || !e.is_array()) throw ParseError(line, "x and e must be arrays");
  if (x.size() % n != 0) throw ParseError(line, "x has " + std::to_string(x.size()) + " values, not a multiple of n");
  std::vector<double> values;
  values.reserve(x.size());
  for (const auto& v : x) {
    if (!v.is_number()) throw ParseError(line, "x holds a non-numeric value");
    values.push_back(v.get<double>());
  }
  if (e.size() % 2 != 0) throw ParseError(line, "e must hold an even number of endpoints");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < e.size(); i += 2) {
    const std::size_t u = as_index(e[i], line, "edge endpoint");
    const std::size_t v = as_index(e[i + 1], line, "edge endpoint");
    if (u >= n || v >= n) {
      throw ParseError(line, "edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range for " +
                                 std::to_string(n) + " nodes");
    }
    edges.emplace_back(u, v);
  }
  std::optional<int> label;
  if (j.contains("y") && !j["y"].is_null()) {
    if (!j["y"].is_number_integer() || j["y"].get<long long>() < 0) throw ParseError(line, "y must be a non-negative integer");
    label = j["y"].get<int>();
  }
  const std::size_t d = values.size() / n;
  try {
    return Graph(n, Matrix(n, d, std::move(values)), std::move(edges), label);
  } catch (const Error& err) {
    throw ParseError(line, err.what());
  }
}

}  // namespace

Dataset parse_dataset(std::istream& in) {
  std::vector<Graph> graphs;
  std::string text;
  std::size_t line = 0;
  std::size_t width = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) throw ParseError(line, "empty record");
    Graph g = parse_record(text, line);
    if (graphs.empty()) width = g.feature_dim();
    if (g.feature_dim() != width) {
      throw ParseError(line, "feature width " + std::to_string(g.feature_dim()) + " differs from " + std::to_string(width));
    }
    graphs.push_back(std::move(g));
  }
  return make_dataset(std::move(graphs));
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  return parse_dataset(in);
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  for (const Graph& g : dataset.graphs) {
    nlohmann::json j;
    j["n"] = g.num_nodes();
    j["x"] = g.features().data();
    auto e = nlohmann::json::array();
    for (const auto& [u, v] : g.edges()) {
      e.push_back(u);
      e.push_back(v);
    }
    j["e"] = std::move(e);
    if (g.label()) j["y"] = *g.label();
    out << j.dump() << '\n';
  }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset '" + path.string() + "'");
  write_dataset(dataset, out);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Synthetic planted-motif corpus
// ---------------------------------------------------------------------------

Dataset generate_planted_motif_dataset(const MotifDatasetOptions& o) {
  if (o.num_graphs == 0 || o.num_graphs % 2 != 0) throw ContractError("generator: num_graphs must be positive and even");
  if (o.nodes_per_graph < 8) throw ContractError("generator: nodes_per_graph must be at least 8");
  if (o.feature_dim < 4) throw ContractError("generator: feature_dim must be at least 4");

  Rng rng = Rng::derive(o.seed, "data");
  const std::size_t n = o.nodes_per_graph;
  std::vector<Graph> graphs;
  graphs.reserve(o.num_graphs);
  for (std::size_t gi = 0; gi < o.num_graphs; ++gi) {
    const int label = static_cast<int>(gi % 2);
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (rng.bernoulli(kBackgroundEdgeDensity)) adj[u][v] = adj[v][u] = true;

    if (label == 0) {
      const auto nodes = rng.sample_without_replacement(n, 4);
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b) adj[nodes[a]][nodes[b]] = adj[nodes[b]][nodes[a]] = true;
    } else {
      const auto nodes = rng.sample_without_replacement(n, 6);
      for (std::size_t a = 0; a < 6; ++a) {
        const std::size_t u = nodes[a], v = nodes[(a + 1) % 6];
        adj[u][v] = adj[v][u] = true;
      }
    }

    std::vector<Edge> edges;
    std::vector<std::size_t> degree(n, 0);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (adj[u][v]) {
          edges.emplace_back(u, v);
          ++degree[u];
          ++degree[v];
        }
    Matrix x(n, o.feature_dim);
    for (std::size_t v = 0; v < n; ++v) {
      x(v, std::min(degree[v], o.feature_dim - 1)) = 1.0;
      for (std::size_t c = 0; c < o.feature_dim; ++c) x(v, c) += kFeatureNoiseStddev * rng.normal();
    }
    graphs.emplace_back(n, std::move(x), std::move(edges), label);
  }
  return make_dataset(std::move(graphs));
}

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

DatasetSplit split_indices(std::size_t n, const SplitFractions& f, std::uint64_t seed) {
  if (!(f.train > 0.0) || !(f.validation > 0.0) || !(f.test > 0.0)) {
    throw ContractError("split: fractions must all be positive");
  }
  if (std::abs(f.train + f.validation + f.test - 1.0) > 1e-9) throw ContractError("split: fractions must sum to 1");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng = Rng::derive(seed, "split");
  rng.shuffle(order);
  const auto n_train = static_cast<std::size_t>(std::llround(f.train * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(f.validation * static_cast<double>(n)));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
    throw ContractError("split: " + std::to_string(n) + " items leave an empty split");
  }
  DatasetSplit s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.validation.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  s.test.assign(order.begin() + n_train + n_val, order.end());
  return s;
}

SplitDatasets split_dataset(const Dataset& dataset, const SplitFractions& fractions, std::uint64_t seed) {
  const DatasetSplit s = split_indices(dataset.size(), fractions, seed);
  auto pick = [&](const std::vector<std::size_t>& idx) {
    Dataset d;
    d.feature_dim = dataset.feature_dim;
    d.num_classes = dataset.num_classes;
    for (std::size_t i : idx) d.graphs.push_back(dataset.graphs[i]);
    return d;
  };
  return {pick(s.train), pick(s.validation), pick(s.test)};
}

std::vector<std::size_t> class_counts(const Dataset& dataset) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(dataset.num_classes, 0)), 0);
  for (const Graph& g : dataset.graphs)
    if (g.label()) ++counts[static_cast<std::size_t>(*g.label())];
  return counts;
}

}  // namespace groupcl
