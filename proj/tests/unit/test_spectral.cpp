// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "support.hpp"

#include <hubwork/errors.hpp>
#include <hubwork/hamiltonian.hpp>
#include <hubwork/spectral.hpp>

#include <cmath>

using namespace hubwork;

namespace {

SpectralDecomposition hubbard_spec(int L, double U, bool final) {
    HubbardParams p;
    p.num_sites = L;
    p.interaction = U;
    const auto b = half_filled_sector(L);
    const auto d = build_driven(b, p);
    return decompose(final ? d.final() : d.initial());
}

} // namespace

TEST_CASE("trivial decompositions") {
    Eigen::MatrixXd one(1, 1);
    one << -3.25;
    const auto s1 = decompose(one);
    CHECK(s1.eigenvalues(0) == -3.25);
    CHECK(std::abs(s1.eigenvectors(0, 0)) == 1.0);

    const std::vector<double> d{3.0, -1.0, 2.0, 0.5};
    const auto s = decompose(SparseOperator::diagonal(d));
    CHECK(s.eigenvalues(0) == -1.0);
    CHECK(s.eigenvalues(1) == 0.5);
    CHECK(s.eigenvalues(2) == 2.0);
    CHECK(s.eigenvalues(3) == 3.0);
    const std::vector<int> perm{1, 3, 2, 0};
    for (int c = 0; c < 4; ++c) {
        CHECK(std::abs(s.eigenvectors(perm[static_cast<std::size_t>(c)], c)) == doctest::Approx(1.0));
    }
}

TEST_CASE("dimer eigenvalues at U = 0") {
    const auto s = hubbard_spec(2, 0.0, false);
    const double expected[] = {-2.0, 0.0, 0.0, 2.0};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(s.eigenvalues(i) - expected[i]) < 1e-13);
}

TEST_CASE("decomposition invariants") {
    for (int L : {2, 4, 6}) {
        for (bool fin : {false, true}) {
            HubbardParams p;
            p.num_sites = L;
            p.interaction = 2.5;
            const auto d = build_driven(half_filled_sector(L), p);
            const auto h = fin ? d.final() : d.initial();
            const auto s = decompose(h);
            for (Eigen::Index i = 1; i < s.eigenvalues.size(); ++i) CHECK(s.eigenvalues(i - 1) <= s.eigenvalues(i));
            CHECK(orthonormality_defect(s) < 1e-10);
            const Eigen::MatrixXd dense = h.to_dense();
            CHECK(reconstruction_defect(s, dense) <= 1e-9 * dense.cwiseAbs().maxCoeff());
        }
    }
    CHECK_THROWS_AS((void)decompose(SparseOperator::diagonal(std::vector<double>(10, 1.0)), 5), ConfigError);
}

TEST_CASE("Gibbs weights") {
    SUBCASE("high-temperature limit is uniform") {
        Eigen::VectorXd e(5);
        e << -3, -1, 0, 2, 7;
        const auto ens = gibbs_weights(e, 1e-12);
        for (Eigen::Index i = 0; i < 5; ++i) CHECK(ens.weights(i) == doctest::Approx(0.2).epsilon(1e-10));
    }
    SUBCASE("two levels") {
        Eigen::VectorXd e(2);
        e << 0.0, 1.7;
        const auto ens = gibbs_weights(e, 0.4);
        CHECK(ens.weights(0) == doctest::Approx(1.0 / (1.0 + std::exp(-0.4 * 1.7))).epsilon(1e-14));
        CHECK(ens.weights.sum() == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("dimer at U = 10") {
        const auto s = hubbard_spec(2, 10.0, false);
        const auto ens = gibbs_weights(s, 0.4);
        const double r = std::sqrt(100.0 + 16.0);
        std::vector<double> levels{0.5 * (10.0 - r), 0.0, 10.0, 0.5 * (10.0 + r)};
        double z = 0;
        for (double l : levels) z += std::exp(-0.4 * l);
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(ens.weights(i) - std::exp(-0.4 * levels[static_cast<std::size_t>(i)]) / z) < 1e-14);
        }
        CHECK(std::abs(ens.log_z - std::log(z)) < 1e-13);
    }
    SUBCASE("stable for large spreads") {
        Eigen::VectorXd e = Eigen::VectorXd::LinSpaced(50, -5e3, 5e3);
        const auto ens = gibbs_weights(e, 1.0);
        CHECK(ens.weights.allFinite());
        CHECK(std::isfinite(ens.log_z));
        CHECK(std::abs(ens.weights.sum() - 1.0) < 1e-12);
        CHECK((ens.weights.array() >= 0.0).all());
        CHECK(ens.log_z == doctest::Approx(5e3).epsilon(1e-12));
    }
    CHECK_THROWS_AS((void)gibbs_weights(Eigen::VectorXd::Zero(3), 0.0), ConfigError);
}

TEST_CASE("free energy difference") {
    const auto s0 = hubbard_spec(4, 3.0, false);
    CHECK(free_energy_difference(s0, s0, 0.4) == 0.0);

    SpectralDecomposition shifted = s0;
    shifted.eigenvalues.array() += 1.625;
    CHECK(free_energy_difference(s0, shifted, 0.4) == doctest::Approx(1.625).epsilon(1e-13));

    // brute-force partition functions of the 4x4 dimer problem
    const auto d0 = hubbard_spec(2, 0.0, false);
    const auto df = hubbard_spec(2, 0.0, true);
    CHECK(free_energy_difference(d0, df, 0.4) == doctest::Approx(23.573568442893365).epsilon(1e-13));
}

TEST_CASE("Hermitian eigenvalues") {
    Eigen::MatrixXcd h(2, 2);
    h << 1.0, std::complex<double>(0, 1), std::complex<double>(0, -1), 1.0;
    const auto ev = hermitian_eigenvalues(h);
    CHECK(ev(0) == doctest::Approx(0.0));
    CHECK(ev(1) == doctest::Approx(2.0));
}
