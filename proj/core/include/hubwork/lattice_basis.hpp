// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file lattice_basis.hpp
 * @brief Occupation-number basis of a fixed (L, N_up, N_down) sector.
 *
 * Sites are indexed 0..L-1; physical site j = 1..L maps to bit j-1.
 * Fermionic operators are ordered site-major within each species with all
 * up-spin operators before all down-spin operators:
 *
 *   |s> = c+_{a1,up} c+_{a2,up} ... c+_{b1,dn} c+_{b2,dn} ... |0>,  a1 < a2 < ..., b1 < b2 < ...
 */

#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hubwork {

inline constexpr int kMaxSites = 14;
inline constexpr std::size_t kDefaultMaxDimension = 4900;

enum class Spin : std::uint8_t { up, down };
enum class HopDirection : std::uint8_t { left, right };

/// Occupation pattern of one spin species; bit j set <=> site j occupied.
struct SpinOccupation {
    std::uint32_t bits = 0;

    [[nodiscard]] constexpr bool occupied(int site) const noexcept { return (bits >> site) & 1U; }
    [[nodiscard]] constexpr int count() const noexcept { return std::popcount(bits); }

    friend constexpr auto operator<=>(SpinOccupation, SpinOccupation) = default;
};

struct BasisState {
    SpinOccupation up;
    SpinOccupation down;

    [[nodiscard]] constexpr SpinOccupation species(Spin s) const noexcept {
        return s == Spin::up ? up : down;
    }

    friend constexpr auto operator<=>(const BasisState&, const BasisState&) = default;
};

struct HopResult {
    BasisState state;
    int sign = 1;
};

/**
 * Applies c+_{to,s} c_{from,s} for the nearest-neighbour bond (j, j+1).
 * Direction::right moves a particle j -> j+1, Direction::left moves j+1 -> j.
 * Returns std::nullopt when the source is empty or the target occupied.
 * Requires 0 <= j < L-1.
 */
[[nodiscard]] std::optional<HopResult> apply_hop(const BasisState& state, int num_sites, int j,
                                                 Spin spin, HopDirection direction);

/**
 * General single-species transfer c+_{to,s} c_{from,s} with the Jordan-Wigner
 * sign of the ordering above. Cross-species strings cancel for this
 * number-conserving product, so only same-species occupations strictly
 * between `from` and `to` contribute.
 */
[[nodiscard]] std::optional<HopResult> apply_transfer(const BasisState& state, int from, int to,
                                                      Spin spin);

/// 1 iff site j is occupied by both species.
[[nodiscard]] constexpr int double_occupancy(const BasisState& state, int j) noexcept {
    return (state.up.occupied(j) && state.down.occupied(j)) ? 1 : 0;
}

[[nodiscard]] constexpr int total_double_occupancy(const BasisState& state) noexcept {
    return std::popcount(state.up.bits & state.down.bits);
}

/// Binomial coefficient for small arguments (exact in 64 bits for n <= 62).
[[nodiscard]] std::uint64_t binomial(int n, int k) noexcept;

class SectorBasis {
public:
    SectorBasis() = default;

    [[nodiscard]] int num_sites() const noexcept { return num_sites_; }
    [[nodiscard]] int n_up() const noexcept { return n_up_; }
    [[nodiscard]] int n_down() const noexcept { return n_down_; }
    [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
    [[nodiscard]] std::span<const BasisState> states() const noexcept { return states_; }
    [[nodiscard]] const BasisState& operator[](std::size_t i) const { return states_[i]; }

    /// Ordinal of `s` in the basis, or std::nullopt if it lies outside the sector.
    [[nodiscard]] std::optional<std::size_t> index_of(const BasisState& s) const noexcept;

private:
    friend SectorBasis enumerate_sector(int, int, int, std::size_t);

    int num_sites_ = 0;
    int n_up_ = 0;
    int n_down_ = 0;
    std::vector<BasisState> states_;
    // Species patterns in ascending order; state index = iu * |down| + id.
    std::vector<std::uint32_t> up_patterns_;
    std::vector<std::uint32_t> down_patterns_;
};

/**
 * Enumerates all states with `n_up` up and `n_down` down particles on
 * `num_sites` sites, sorted lexicographically on (up.bits, down.bits).
 * Throws ConfigError when the arguments are out of range or the sector
 * dimension exceeds `max_dimension`.
 */
[[nodiscard]] SectorBasis enumerate_sector(int num_sites, int n_up, int n_down,
                                           std::size_t max_dimension = kDefaultMaxDimension);

/// Half-filled, Sz = 0 sector: n_up = n_down = L/2 (L even).
[[nodiscard]] SectorBasis half_filled_sector(int num_sites,
                                             std::size_t max_dimension = kDefaultMaxDimension);

} // namespace hubwork
