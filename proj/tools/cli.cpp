// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "groupcl/analysis.hpp"
#include "groupcl/checkpoint.hpp"
#include "groupcl/config.hpp"
#include "groupcl/error.hpp"
#include "groupcl/graph.hpp"
#include "groupcl/trainer.hpp"

namespace groupcl::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
};

KeyValues gather_key_values(const Common& c) {
  KeyValues base;
  if (!c.config_path.empty()) base = load_key_values(c.config_path);
  KeyValues extra;
  for (const auto& o : c.overrides) extra.push_back(parse_override(o));
  return merge_key_values(base, extra);
}

RunConfig gather_config(const Common& c) { return RunConfig::from_key_values(gather_key_values(c)); }

fs::path output_dir(const Common& c) {
  if (c.out_dir.empty()) throw ConfigError("--out is required");
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + c.out_dir + ": " + ec.message());
  return c.out_dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  return f;
}

void finish(std::ofstream& f, const fs::path& path) {
  f.flush();
  if (!f) throw IoError("write failed for " + path.string());
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& body) {
  auto f = open_output(path);
  body(f);
  finish(f, path);
}

std::vector<std::size_t> parse_ids(const std::string& text) {
  std::vector<std::size_t> ids;
  for (const auto& item : split_list(text)) ids.push_back(parse_size("graphs", item));
  if (ids.empty()) throw ConfigError("--graphs must list at least one graph id");
  return ids;
}

void add_common(CLI::App* app, Common& c, bool needs_out) {
  app->add_option("--config", c.config_path, "key=value config file");
  app->add_option("--set", c.overrides, "override as key=value (repeatable)");
  auto* out = app->add_option("--out", c.out_dir, "output directory");
  if (needs_out) out->required();
}

ProbeOptions probe_options(const RunConfig& config) {
  ProbeOptions o;
  o.iterations = config.probe_iterations;
  o.learning_rate = config.probe_lr;
  return o;
}

// --- subcommands -----------------------------------------------------------

int cmd_gen_data(const Common& c, std::ostream& out) {
  MotifDatasetOptions o;
  for (const auto& [key, value] : gather_key_values(c)) {
    if (key == "seed") o.seed = parse_u64(key, value);
    else if (key == "graphs") o.num_graphs = parse_size(key, value);
    else if (key == "nodes") o.nodes_per_graph = parse_size(key, value);
    else if (key == "features") o.feature_dim = parse_size(key, value);
    else throw ConfigError("unknown gen-data key '" + key + "' (expected seed, graphs, nodes, features)");
  }
  const Dataset ds = generate_planted_motif_dataset(o);
  const fs::path path = output_dir(c) / "dataset.jsonl";
  save_dataset(ds, path);
  out << "wrote " << ds.size() << " graphs to " << path.string() << '\n';
  return 0;
}

void write_train_outputs(const fs::path& dir, const TrainResult& r) {
  checkpoint_save(dir / "checkpoint.bin", r.state);
  write_file(dir / "history.csv", [&](std::ostream& f) { write_history_csv(r.history, f); });
  write_file(dir / "effective_config.txt", [&](std::ostream& f) { f << r.state.config.to_text(); });
}

int cmd_train(const Common& c, const std::string& data, const std::string& resume, std::ostream& out,
              std::ostream& err) {
  const Dataset ds = load_dataset(data);
  TrainResult r;
  if (resume.empty()) {
    r = train(gather_config(c), ds);
  } else {
    ModelState state = checkpoint_load(resume);
    // Only the epoch budget may change when resuming; it is stored with the checkpoint.
    for (const auto& [key, value] : gather_key_values(c)) {
      if (key != "epochs") throw ConfigError("only 'epochs' may be overridden when resuming, got '" + key + "'");
      state.config.epochs = parse_u64(key, value);
    }
    r = continue_training(std::move(state), ds);
  }
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';
  const fs::path dir = output_dir(c);
  write_train_outputs(dir, r);
  out << "trained to epoch " << r.state.epoch << " (" << r.state.encoder_opt.step << " steps)";
  if (!r.history.empty()) out << ", final loss " << format_double(r.history.back().loss.total);
  out << '\n';
  return 0;
}

int cmd_eval(const Common& c, const std::string& checkpoint, const std::string& data, std::ostream& out) {
  const ModelState model = checkpoint_load(checkpoint);
  const Dataset ds = load_dataset(data);
  if (!c.overrides.empty() || !c.config_path.empty()) {
    throw ConfigError("eval takes its settings from the checkpoint; --config and --set are not accepted");
  }
  const EmbeddingTable table = extract_embeddings(model, ds);
  const ProbeResult probe = linear_probe(table, model.config.seed, probe_options(model.config));
  const fs::path dir = output_dir(c);
  write_file(dir / "probe.txt", [&](std::ostream& f) { write_probe_text(probe, f); });
  write_file(dir / "probe.csv", [&](std::ostream& f) { write_probe_csv(probe, f); });
  write_file(dir / "embeddings.csv", [&](std::ostream& f) { write_embeddings_csv(table, f); });
  out << "test_accuracy=" << format_double(probe.test.accuracy) << '\n';
  return 0;
}

int cmd_analyze(const Common& c, const std::string& checkpoint, std::ostream& out) {
  const ModelState model = checkpoint_load(checkpoint);
  const Matrix cos = query_cosine_matrix(model);
  write_file(output_dir(c) / "cosine.csv", [&](std::ostream& f) { write_matrix_csv(cos, f); });
  out << "mean_offdiagonal_abs_cosine=" << format_double(mean_offdiagonal_abs(cos)) << '\n';
  return 0;
}

int cmd_export_attn(const Common& c, const std::string& checkpoint, const std::string& data,
                    const std::string& graphs, std::ostream& out) {
  const ModelState model = checkpoint_load(checkpoint);
  const Dataset ds = load_dataset(data);
  const auto ids = parse_ids(graphs);
  for (auto id : ids) {
    if (id >= ds.size()) {
      throw ConfigError("graph id " + std::to_string(id) + " out of range (dataset has " + std::to_string(ds.size()) +
                        " graphs)");
    }
  }
  write_file(output_dir(c) / "attention.csv", [&](std::ostream& f) {
    bool header = true;
    for (auto id : ids) {
      write_attention_csv(id, export_attention(model, ds.graphs[id]), f, header);
      header = false;
    }
  });
  out << "exported attention for " << ids.size() << " graph(s)\n";
  return 0;
}

int cmd_count_params(const Common& c, std::ostream& out) {
  // Reference widths of the comparison table; each may be overridden.
  std::uint64_t p = 4, d_n = 160, d_k = 100, d_o = 160;
  for (const auto& [key, value] : gather_key_values(c)) {
    if (key == "p") p = parse_u64(key, value);
    else if (key == "d_n") d_n = parse_u64(key, value);
    else if (key == "d_k") d_k = parse_u64(key, value);
    else if (key == "d_o") d_o = parse_u64(key, value);
    else throw ConfigError("unknown count-params key '" + key + "' (expected p, d_n, d_k, d_o)");
  }
  const HeadParamCounts counts = count_head_params(p, d_n, d_k, d_o);
  out << "groupcl_head=" << counts.groupcl_head << '\n' << "graphcl_head=" << counts.graphcl_head << '\n';
  return 0;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  std::vector<double> v;
  for (const auto& item : split_list(text)) v.push_back(parse_double(key, item));
  return v;
}

int cmd_sweep(const Common& c, const std::string& data, const std::string& ps, const std::string& lambdas,
              const std::string& seeds, std::ostream& out, std::ostream& err) {
  const Dataset ds = load_dataset(data);
  const RunConfig base = gather_config(c);
  std::vector<std::size_t> p_values;
  for (const auto& s : split_list(ps)) p_values.push_back(parse_size("p", s));
  const auto lambda_values = parse_double_list("lambda", lambdas);
  std::vector<std::uint64_t> seed_values;
  for (const auto& s : split_list(seeds)) seed_values.push_back(parse_u64("seed", s));
  if (p_values.empty()) p_values.push_back(base.p);
  if (seed_values.empty()) seed_values.push_back(base.seed);
  const std::vector<double> lambdas_used = lambda_values.empty() ? std::vector<double>{base.lambda} : lambda_values;

  // Validate every cell before spending time on training.
  std::vector<RunConfig> cells;
  for (auto p : p_values)
    for (double lambda : lambdas_used)
      for (auto seed : seed_values) {
        RunConfig cfg = base;
        cfg.p = p;
        cfg.lambda = lambda;
        cfg.seed = seed;
        cfg.validate();
        cells.push_back(cfg);
      }

  const fs::path dir = output_dir(c);
  write_file(dir / "effective_config.txt", [&](std::ostream& f) { f << base.to_text(); });
  auto f = open_output(dir / "results.csv");
  f << "p,lambda,seed,final_loss,train_accuracy,validation_accuracy,test_accuracy\n";
  for (const auto& cfg : cells) {
    const TrainResult r = train(cfg, ds);
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    const ProbeResult probe = linear_probe(extract_embeddings(r.state, ds), cfg.seed, probe_options(cfg));
    const double final_loss = r.history.empty() ? 0.0 : r.history.back().loss.total;
    f << cfg.p << ',' << format_double(cfg.lambda) << ',' << cfg.seed << ',' << format_double(final_loss) << ','
      << format_double(probe.train.accuracy) << ',' << format_double(probe.validation.accuracy) << ','
      << format_double(probe.test.accuracy) << '\n';
    out << "p=" << cfg.p << " lambda=" << format_double(cfg.lambda) << " seed=" << cfg.seed
        << " test_accuracy=" << format_double(probe.test.accuracy) << '\n';
  }
  finish(f, dir / "results.csv");
  return 0;
}

std::string escape(const std::string& s) {
  std::string r;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') r += '\\';
    if (ch == '\n') {
      r += "\\n";
      continue;
    }
    r += ch;
  }
  return r;
}

void report(std::ostream& err, const std::string& kind, const std::string& message) {
  err << "error kind=" << kind << " message=\"" << escape(message) << "\"\n";
}

}  // namespace

int exit_code_for(const std::string& kind) {
  static const std::map<std::string, int> codes = {
      {"usage", 2},     {"config", 3},   {"parse", 4},    {"io", 5},
      {"numeric", 6},   {"dimension", 7}, {"contract", 8}, {"corrupt-checkpoint", 9},
      {"oracle-invalid", 10},
  };
  auto it = codes.find(kind);
  return it == codes.end() ? 1 : it->second;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Group contrastive graph representation learning", "groupcl"};
  app.require_subcommand(1);

  Common common;
  std::string data, checkpoint, resume, graphs, sweep_p, sweep_lambda, sweep_seeds;

  auto* gen = app.add_subcommand("gen-data", "generate the planted-motif dataset");
  add_common(gen, common, true);

  auto* tr = app.add_subcommand("train", "train a model and write checkpoint + history");
  add_common(tr, common, true);
  tr->add_option("--data", data, "dataset file")->required();
  tr->add_option("--resume", resume, "checkpoint to continue from");

  auto* ev = app.add_subcommand("eval", "linear probe on frozen embeddings");
  add_common(ev, common, true);
  ev->add_option("--checkpoint", checkpoint)->required();
  ev->add_option("--data", data)->required();

  auto* an = app.add_subcommand("analyze", "cosine similarity of group queries");
  add_common(an, common, true);
  an->add_option("--checkpoint", checkpoint)->required();

  auto* ex = app.add_subcommand("export-attn", "per-node group attention for chosen graphs");
  add_common(ex, common, true);
  ex->add_option("--checkpoint", checkpoint)->required();
  ex->add_option("--data", data)->required();
  ex->add_option("--graphs", graphs, "comma-separated graph ids")->required();

  auto* cp = app.add_subcommand("count-params", "head parameter counts");
  add_common(cp, common, false);

  auto* sw = app.add_subcommand("sweep", "grid over p, lambda and seed");
  add_common(sw, common, true);
  sw->add_option("--data", data)->required();
  sw->add_option("--p-values", sweep_p, "comma-separated p values");
  sw->add_option("--lambda-values", sweep_lambda, "comma-separated lambda values");
  sw->add_option("--seeds", sweep_seeds, "comma-separated seeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report(err, "usage", e.what());
    return exit_code_for("usage");
  }

  try {
    if (*gen) return cmd_gen_data(common, out);
    if (*tr) return cmd_train(common, data, resume, out, err);
    if (*ev) return cmd_eval(common, checkpoint, data, out);
    if (*an) return cmd_analyze(common, checkpoint, out);
    if (*ex) return cmd_export_attn(common, checkpoint, data, graphs, out);
    if (*cp) return cmd_count_params(common, out);
    if (*sw) return cmd_sweep(common, data, sweep_p, sweep_lambda, sweep_seeds, out, err);
  } catch (const Error& e) {
    report(err, e.kind(), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    report(err, "internal", e.what());
    return 1;
  }
  return 1;
}

}  // namespace groupcl::cli
