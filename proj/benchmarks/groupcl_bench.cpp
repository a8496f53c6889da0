// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <string>

#include "groupcl/analysis.hpp"
#include "groupcl/trainer.hpp"

namespace {

using namespace groupcl;

Matrix filled(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = filled(n, n, 1), b = filled(n, n, 2);
  for (auto _ : state) {
    Tape tape;
    benchmark::DoNotOptimize(matmul(tape.constant(a), tape.constant(b)).value().data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(128)->Arg(256);

void BM_EncodeAndRepresent(benchmark::State& state) {
  const Dataset ds = generate_planted_motif_dataset(MotifDatasetOptions{});
  RunConfig c;
  const ModelState m = init_model(c, ds.feature_dim);
  const Batch batch = batch_graphs({ds.graphs.begin(), ds.graphs.begin() + state.range(0)});
  for (auto _ : state) {
    Tape tape;
    ParamBinder bind(tape, m.params, false);
    const GroupEmbeddings ge = branch_groups(bind, c, batch, branch_nodes(bind, c, batch, "u."), "u.");
    benchmark::DoNotOptimize(ge.groups.value().data().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeAndRepresent)->Arg(32)->Arg(128);

void BM_TrainEpoch(benchmark::State& state) {
  const Dataset ds = generate_planted_motif_dataset(MotifDatasetOptions{});
  RunConfig c;
  c.epochs = 1;
  c.estimator = state.range(0) == 0 ? Estimator::kNonParam : Estimator::kParam;
  for (auto _ : state) benchmark::DoNotOptimize(train(c, ds).state.epoch);
  state.SetLabel(std::string(estimator_name(c.estimator)));
}
BENCHMARK(BM_TrainEpoch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LinearProbe(benchmark::State& state) {
  EmbeddingTable t;
  t.embeddings = filled(200, 160, 3);
  for (std::size_t i = 0; i < 200; ++i) {
    t.ids.push_back(i);
    t.labels.push_back(static_cast<int>(i % 2));
  }
  for (auto _ : state) benchmark::DoNotOptimize(linear_probe(t, 0).test.accuracy);
}
BENCHMARK(BM_LinearProbe)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
