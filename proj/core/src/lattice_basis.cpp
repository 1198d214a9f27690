// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include "hubwork/lattice_basis.hpp"

#include "hubwork/errors.hpp"

#include <algorithm>
#include <string>

namespace hubwork {

namespace {

std::vector<std::uint32_t> patterns_with_popcount(int num_sites, int count) {
    std::vector<std::uint32_t> out;
    const std::uint32_t limit = std::uint32_t{1} << num_sites;
    for (std::uint32_t b = 0; b < limit; ++b) {
        if (std::popcount(b) == count) out.push_back(b);
    }
    return out;
}

std::optional<std::size_t> find_pattern(const std::vector<std::uint32_t>& sorted, std::uint32_t bits) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), bits);
    if (it == sorted.end() || *it != bits) return std::nullopt;
    return static_cast<std::size_t>(it - sorted.begin());
}

} // namespace

std::uint64_t binomial(int n, int k) noexcept {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

std::optional<HopResult> apply_transfer(const BasisState& state, int from, int to, Spin spin) {
    SpinOccupation occ = state.species(spin);
    if (!occ.occupied(from)) return std::nullopt;
    if (from != to && occ.occupied(to)) return std::nullopt;
    if (from == to) return HopResult{state, 1};

    // c_from: sign from same-species operators left of `from`; c+_to acts on
    // the depleted pattern. Their combination leaves the parity of the
    // occupations strictly between the two sites.
    const int lo = std::min(from, to);
    const int hi = std::max(from, to);
    const std::uint32_t between = ((std::uint32_t{1} << hi) - 1U) & ~((std::uint32_t{1} << (lo + 1)) - 1U);
    const int sign = (std::popcount(occ.bits & between) % 2 == 0) ? 1 : -1;

    occ.bits ^= (std::uint32_t{1} << from) | (std::uint32_t{1} << to);
    BasisState out = state;
    (spin == Spin::up ? out.up : out.down) = occ;
    return HopResult{out, sign};
}

std::optional<HopResult> apply_hop(const BasisState& state, int num_sites, int j, Spin spin,
                                   HopDirection direction) {
    if (j < 0 || j >= num_sites - 1) {
        throw ConfigError("apply_hop: bond index " + std::to_string(j) + " outside [0, L-1) for L = " +
                          std::to_string(num_sites));
    }
    return direction == HopDirection::right ? apply_transfer(state, j, j + 1, spin)
                                            : apply_transfer(state, j + 1, j, spin);
}

std::optional<std::size_t> SectorBasis::index_of(const BasisState& s) const noexcept {
    const auto iu = find_pattern(up_patterns_, s.up.bits);
    if (!iu) return std::nullopt;
    const auto id = find_pattern(down_patterns_, s.down.bits);
    if (!id) return std::nullopt;
    return *iu * down_patterns_.size() + *id;
}

SectorBasis enumerate_sector(int num_sites, int n_up, int n_down, std::size_t max_dimension) {
    if (num_sites < 1 || num_sites > kMaxSites) {
        throw ConfigError("enumerate_sector: L = " + std::to_string(num_sites) + " outside [1, " +
                          std::to_string(kMaxSites) + "]");
    }
    if (n_up < 0 || n_up > num_sites || n_down < 0 || n_down > num_sites) {
        throw ConfigError("enumerate_sector: particle numbers must lie in [0, L]");
    }
    const std::uint64_t dim = binomial(num_sites, n_up) * binomial(num_sites, n_down);
    if (dim > max_dimension) {
        throw ConfigError("enumerate_sector: sector dimension " + std::to_string(dim) + " exceeds cap " +
                          std::to_string(max_dimension));
    }

    SectorBasis basis;
    basis.num_sites_ = num_sites;
    basis.n_up_ = n_up;
    basis.n_down_ = n_down;
    basis.up_patterns_ = patterns_with_popcount(num_sites, n_up);
    basis.down_patterns_ = patterns_with_popcount(num_sites, n_down);
    basis.states_.reserve(dim);
    for (std::uint32_t u : basis.up_patterns_) {
        for (std::uint32_t d : basis.down_patterns_) basis.states_.push_back({{u}, {d}});
    }
    return basis;
}

SectorBasis half_filled_sector(int num_sites, std::size_t max_dimension) {
    if (num_sites < 2 || num_sites % 2 != 0) {
        throw ConfigError("half-filled Sz = 0 sector needs an even L >= 2, got L = " + std::to_string(num_sites));
    }
    return enumerate_sector(num_sites, num_sites / 2, num_sites / 2, max_dimension);
}

} // namespace hubwork
