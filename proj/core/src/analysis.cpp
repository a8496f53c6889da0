// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "groupcl/error.hpp"
#include "groupcl/optim.hpp"

namespace groupcl {

EmbeddingTable extract_embeddings(const ModelState& model, const Dataset& dataset, std::size_t chunk) {
  if (!dataset.empty() && dataset.feature_dim != model.feature_dim) {
    throw DimensionError("extract_embeddings: dataset feature width " + std::to_string(dataset.feature_dim) +
                         " but model expects " + std::to_string(model.feature_dim));
  }
  EmbeddingTable table;
  table.embeddings = Matrix(dataset.size(), model.config.d_o);
  for (std::size_t start = 0; start < dataset.size(); start += chunk) {
    const std::size_t end = std::min(dataset.size(), start + chunk);
    const std::vector<Graph> graphs(dataset.graphs.begin() + start, dataset.graphs.begin() + end);
    const Batch batch = batch_graphs(graphs);
    Tape tape;
    ParamBinder bind(tape, model.params, false);
    const Tensor nodes = branch_nodes(bind, model.config, batch, "u.");
    const Matrix& rows = concat_groups(branch_groups(bind, model.config, batch, nodes, "u.")).value();
    std::copy(rows.data().begin(), rows.data().end(), table.embeddings.data().begin() + start * model.config.d_o);
  }
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    table.ids.push_back(i);
    table.labels.push_back(dataset.graphs[i].label());
  }
  return table;
}

// ---------------------------------------------------------------------------
// Linear probe
// ---------------------------------------------------------------------------

namespace {

struct ProbeData {
  Matrix x;
  std::vector<int> y;
};

ProbeData gather(const Matrix& x, const std::vector<int>& y, const std::vector<std::size_t>& idx) {
  ProbeData d{Matrix(idx.size(), x.cols()), {}};
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::copy_n(x.row_span(idx[i]).begin(), x.cols(), d.x.row_span(i).begin());
    d.y.push_back(y[idx[i]]);
  }
  return d;
}

Matrix logits(const Matrix& x, const ParameterMap& p) {
  const Matrix& w = p.at("w");
  const Matrix& b = p.at("b");
  Matrix out(x.rows(), w.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < w.cols(); ++k) {
      double s = b[k];
      for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j) * w(j, k);
      out(i, k) = s;
    }
  return out;
}

std::vector<int> predict(const Matrix& x, const ParameterMap& p) {
  const Matrix z = logits(x, p);
  std::vector<int> out(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto row = z.row_span(i);
    out[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

ParameterMap fit(const ProbeData& train, int classes, double l2, const ProbeOptions& o) {
  const std::size_t d = train.x.cols(), n = train.x.rows(), k = static_cast<std::size_t>(classes);
  ParameterMap p{{"w", Matrix(d, k)}, {"b", Matrix(1, k)}};
  AdamOptions ao;
  ao.learning_rate = o.learning_rate;
  AdamState state = make_adam_state(p, ao);
  for (std::size_t it = 0; it < o.iterations; ++it) {
    Matrix z = logits(train.x, p);
    // softmax - onehot, averaged over rows
    for (std::size_t i = 0; i < n; ++i) {
      auto row = z.row_span(i);
      const double mx = *std::max_element(row.begin(), row.end());
      double sum = 0.0;
      for (double& v : row) sum += (v = std::exp(v - mx));
      for (double& v : row) v /= sum;
      row[static_cast<std::size_t>(train.y[i])] -= 1.0;
    }
    ParameterMap g{{"w", Matrix(d, k)}, {"b", Matrix(1, k)}};
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < k; ++c) {
        const double e = z(i, c) * inv_n;
        g["b"][c] += e;
        for (std::size_t j = 0; j < d; ++j) g["w"](j, c) += train.x(i, j) * e;
      }
    const Matrix& w = p["w"];
    for (std::size_t i = 0; i < w.size(); ++i) g["w"][i] += l2 * w[i];
    adam_step(p, g, state);
  }
  return p;
}

SplitScore score(const ProbeData& data, const ParameterMap& p, int classes) {
  SplitScore s;
  const auto k = static_cast<std::size_t>(classes);
  s.size = data.y.size();
  s.confusion.assign(k, std::vector<std::size_t>(k, 0));
  const auto pred = predict(data.x, p);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++s.confusion[static_cast<std::size_t>(data.y[i])][static_cast<std::size_t>(pred[i])];
    correct += pred[i] == data.y[i] ? 1 : 0;
  }
  s.accuracy = s.size == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(s.size);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t total = 0;
    for (std::size_t q = 0; q < k; ++q) total += s.confusion[c][q];
    s.per_class_accuracy.push_back(total == 0 ? 0.0 : static_cast<double>(s.confusion[c][c]) / static_cast<double>(total));
  }
  return s;
}

}  // namespace

ProbeResult linear_probe(const EmbeddingTable& table, std::uint64_t split_seed, const ProbeOptions& options) {
  std::vector<int> labels;
  int classes = 0;
  for (const auto& l : table.labels) {
    if (!l) throw ContractError("linear_probe: every graph needs a label");
    labels.push_back(*l);
    classes = std::max(classes, *l + 1);
  }
  const DatasetSplit split = split_indices(table.size(), options.fractions, split_seed);
  ProbeData train = gather(table.embeddings, labels, split.train);
  ProbeData val = gather(table.embeddings, labels, split.validation);
  ProbeData test = gather(table.embeddings, labels, split.test);
  std::vector<bool> present(static_cast<std::size_t>(classes), false);
  for (int y : train.y) present[static_cast<std::size_t>(y)] = true;
  if (std::count(present.begin(), present.end(), true) < 2) {
    throw ContractError("linear_probe: the training split holds fewer than 2 classes");
  }

  // Standardize with training statistics.
  const std::size_t d = train.x.cols();
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < train.x.rows(); ++i) mean += train.x(i, j);
    mean /= static_cast<double>(train.x.rows());
    for (std::size_t i = 0; i < train.x.rows(); ++i) var += (train.x(i, j) - mean) * (train.x(i, j) - mean);
    const double sd = std::max(std::sqrt(var / static_cast<double>(train.x.rows())), 1e-8);
    for (ProbeData* part : {&train, &val, &test})
      for (std::size_t i = 0; i < part->x.rows(); ++i) part->x(i, j) = (part->x(i, j) - mean) / sd;
  }

  ProbeResult best;
  best.num_classes = classes;
  double best_val = -1.0;
  for (double c : options.c_grid) {
    const double l2 = 1.0 / (c * static_cast<double>(train.y.size()));
    const ParameterMap p = fit(train, classes, l2, options);
    const SplitScore v = score(val, p, classes);
    best.validation_sweep.emplace_back(c, v.accuracy);
    if (v.accuracy > best_val) {
      best_val = v.accuracy;
      best.selected_c = c;
      best.train = score(train, p, classes);
      best.validation = v;
      best.test = score(test, p, classes);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

Matrix query_cosine_matrix(const Matrix& q) {
  const std::size_t p = q.cols();
  std::vector<double> norms(p);
  for (std::size_t k = 0; k < p; ++k) {
    double n2 = 0.0;
    for (std::size_t i = 0; i < q.rows(); ++i) n2 += q(i, k) * q(i, k);
    norms[k] = std::sqrt(n2);
    if (norms[k] < 1e-12) throw NumericError("query_cosine_matrix: query " + std::to_string(k) + " has zero norm");
  }
  Matrix out(p, p);
  for (std::size_t k = 0; k < p; ++k) {
    out(k, k) = 1.0;
    for (std::size_t l = k + 1; l < p; ++l) {
      double dot = 0.0;
      for (std::size_t i = 0; i < q.rows(); ++i) dot += q(i, k) * q(i, l);
      const double c = std::clamp(dot / (norms[k] * norms[l]), -1.0, 1.0);
      out(k, l) = out(l, k) = c;
    }
  }
  return out;
}

Matrix query_cosine_matrix(const ModelState& model) {
  auto it = model.params.find("u.rep.q");
  if (it == model.params.end()) throw ContractError("query_cosine_matrix: model has no representor queries");
  return query_cosine_matrix(it->second);
}

double mean_offdiagonal_abs(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("mean_offdiagonal_abs: matrix is " + m.shape_string());
  if (m.rows() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j) s += std::abs(m(i, j));
  return s / static_cast<double>(m.rows() * (m.rows() - 1));
}

AttentionExport export_attention(const ModelState& model, const Graph& graph) {
  if (model.config.pipeline == Pipeline::kGraphCLBaseline) {
    throw ContractError("export_attention: the baseline pipeline has no attention");
  }
  if (graph.feature_dim() != model.feature_dim) {
    throw DimensionError("export_attention: graph feature width " + std::to_string(graph.feature_dim()) +
                         " but model expects " + std::to_string(model.feature_dim));
  }
  const Batch batch = batch_graphs({graph});
  Tape tape;
  ParamBinder bind(tape, model.params, false);
  const Tensor nodes = branch_nodes(bind, model.config, batch, "u.");
  const GroupEmbeddings ge = branch_groups(bind, model.config, batch, nodes, "u.");

  AttentionExport out;
  out.weights = ge.attention.value();
  for (std::size_t k = 0; k < out.weights.cols(); ++k) {
    std::size_t best = 0;
    for (std::size_t v = 0; v < out.weights.rows(); ++v) {
      out.records.push_back({v, k, out.weights(v, k)});
      if (out.weights(v, k) > out.weights(best, k)) best = v;
    }
    out.argmax_node.push_back(best);
  }
  return out;
}

HeadParamCounts count_head_params(std::uint64_t p, std::uint64_t d_n, std::uint64_t d_k, std::uint64_t d_o) {
  if (p == 0 || d_o % p != 0) {
    throw ConfigError("count_head_params: d_o=" + std::to_string(d_o) + " is not divisible by p=" + std::to_string(p));
  }
  return {p * d_k + d_n * d_k + d_n * (d_o / p), 2 * d_o * d_o};
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

void write_embeddings_csv(const EmbeddingTable& table, std::ostream& out) {
  out << "id,label";
  for (std::size_t c = 0; c < table.embeddings.cols(); ++c) out << ",e" << c;
  out << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.ids[i] << ',';
    if (table.labels[i]) out << *table.labels[i];
    for (double v : table.embeddings.row_span(i)) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_matrix_csv(const Matrix& m, std::ostream& out) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
}

void write_attention_csv(std::size_t graph_id, const AttentionExport& attn, std::ostream& out, bool header) {
  if (header) out << "graph,node,group,weight,is_argmax\n";
  for (const auto& rec : attn.records) {
    out << graph_id << ',' << rec.node << ',' << rec.group << ',' << format_double(rec.weight) << ','
        << (attn.argmax_node[rec.group] == rec.node ? 1 : 0) << '\n';
  }
}

void write_probe_text(const ProbeResult& r, std::ostream& out) {
  out << "train_accuracy=" << format_double(r.train.accuracy) << '\n'
      << "validation_accuracy=" << format_double(r.validation.accuracy) << '\n'
      << "test_accuracy=" << format_double(r.test.accuracy) << '\n'
      << "selected_c=" << format_double(r.selected_c) << '\n'
      << "num_classes=" << r.num_classes << '\n';
  for (std::size_t c = 0; c < r.test.per_class_accuracy.size(); ++c) {
    out << "test_class_" << c << "_accuracy=" << format_double(r.test.per_class_accuracy[c]) << '\n';
  }
  auto confusion = [&](const char* name, const SplitScore& s) {
    out << name << "_confusion=";
    for (std::size_t i = 0; i < s.confusion.size(); ++i)
      for (std::size_t j = 0; j < s.confusion[i].size(); ++j) out << (i || j ? " " : "") << s.confusion[i][j];
    out << '\n';
  };
  confusion("train", r.train);
  confusion("validation", r.validation);
  confusion("test", r.test);
}

void write_probe_csv(const ProbeResult& r, std::ostream& out) {
  out << "split,size,accuracy\n"
      << "train," << r.train.size << ',' << format_double(r.train.accuracy) << '\n'
      << "validation," << r.validation.size << ',' << format_double(r.validation.accuracy) << '\n'
      << "test," << r.test.size << ',' << format_double(r.test.accuracy) << '\n';
}

}  // namespace groupcl
