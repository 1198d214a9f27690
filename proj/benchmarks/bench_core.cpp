// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

// Microbenchmarks for the hot paths: operator assembly, dense
// diagonalization, the Chebyshev exponential action and full propagation.

#include <hubwork/experiment.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace hubwork;

HubbardParams params(int L, double tau) {
    HubbardParams p;
    p.num_sites = L;
    p.interaction = 4.0;
    p.tau = tau;
    return p;
}

Eigen::VectorXd drive_diagonal(const SparseOperator& drive) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(drive.dim()));
    for (std::size_t i = 0; i < drive.dim(); ++i) d(static_cast<Eigen::Index>(i)) = drive.at(i, i);
    return d;
}

void BM_Assembly(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const auto basis = half_filled_sector(L);
    for (auto _ : state) benchmark::DoNotOptimize(build_driven(basis, params(L, 1.0)));
    state.counters["dim"] = static_cast<double>(basis.size());
}
BENCHMARK(BM_Assembly)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_Decompose(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const auto h = build_driven(half_filled_sector(L), params(L, 1.0)).final();
    for (auto _ : state) benchmark::DoNotOptimize(decompose(h));
}
BENCHMARK(BM_Decompose)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_ExpmAction(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const auto ham = build_driven(half_filled_sector(L), params(L, 1.0));
    const auto drive = drive_diagonal(ham.h_drive);
    const auto n = static_cast<Eigen::Index>(ham.h_static.dim());
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Identity(n, std::min<Eigen::Index>(n, 32));
    for (auto _ : state) benchmark::DoNotOptimize(expm_action(block, ham.h_static, drive, 0.5, 0.01, 1e-12));
}
BENCHMARK(BM_ExpmAction)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_Propagate(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const auto ham = build_driven(half_filled_sector(L), params(L, 1.0));
    const auto s0 = decompose(ham.initial());
    const auto ens = gibbs_weights(s0, 0.4);
    PropagationConfig cfg;
    cfg.refine = false;
    for (auto _ : state) benchmark::DoNotOptimize(propagate(s0, ens, ham, cfg));
}
BENCHMARK(BM_Propagate)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
