// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

// Small helpers shared by the unit tests.

#pragma once

#include <hubwork/experiment.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace hubwork::testing {

/// Everything one point needs, built step by step through the public API.
struct Pipeline {
    SectorBasis basis;
    DrivenHamiltonian ham;
    SpectralDecomposition spec0, spec_f;
    ThermalEnsemble ens0;
    PropagatedSet prop;
    TransitionTable table;
    WorkDistribution dist;
    double delta_f = 0.0;
};

inline Pipeline run_pipeline(int L, double U, double tau, double A = 10.0, double beta = 0.4,
                             PropagationConfig cfg = {}) {
    Pipeline p;
    p.basis = half_filled_sector(L);
    HubbardParams hp;
    hp.num_sites = L;
    hp.interaction = U;
    hp.tau = tau;
    hp.drive_amplitude = A;
    hp.beta = beta;
    p.ham = build_driven(p.basis, hp);
    p.spec0 = decompose(p.ham.initial());
    p.spec_f = decompose(p.ham.final());
    p.ens0 = gibbs_weights(p.spec0, beta);
    p.prop = propagate(p.spec0, p.ens0, p.ham, cfg, &p.spec_f);
    p.table = transition_matrix(p.prop, p.spec0, p.spec_f, p.ens0);
    p.dist = build_distribution(p.table);
    p.delta_f = free_energy_difference(p.spec0, p.spec_f, beta);
    return p;
}

inline std::vector<double> sorted_copy(const Eigen::VectorXd& v) {
    std::vector<double> out(v.data(), v.data() + v.size());
    std::sort(out.begin(), out.end());
    return out;
}

inline Eigen::MatrixXcd random_unitary(Eigen::Index n, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
    return Eigen::HouseholderQR<Eigen::MatrixXcd>(m).householderQ();
}

/// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("hubwork_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace hubwork::testing
