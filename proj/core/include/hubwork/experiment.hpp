// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file experiment.hpp
 * @brief Single-point pipeline and (L, U, tau) sweeps with deterministic output.
 *
 * A sweep groups grid points by (L, U): the sector basis and operators are
 * built once per L, both endpoint decompositions once per (L, U), and every
 * tau of the group reuses them. Groups run on a worker pool; results land in
 * fixed slots so the written files do not depend on the schedule.
 */

#pragma once

#include "hubwork/hamiltonian.hpp"
#include "hubwork/lattice_basis.hpp"
#include "hubwork/propagator.hpp"
#include "hubwork/spectral.hpp"
#include "hubwork/thermo.hpp"
#include "hubwork/workstats.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hubwork {

struct PointOptions {
    PropagationConfig propagation;
    double merge_tol = kDefaultMergeTol;
    double prob_floor = kDefaultProbFloor;
    std::size_t gap_samples = 11;           ///< instantaneous-gap samples along the ramp
    std::size_t gap_max_dim = 1000;         ///< skip the gap scan above this dimension
    std::size_t max_dim = kDefaultMaxDimension;
};

/// Basis and L-dependent operators, built once per chain length.
struct SectorModel {
    int num_sites = 0;
    double hopping = 1.0;
    double drive_amplitude = 10.0;
    SectorBasis basis;
    SparseOperator hopping_op;
    std::vector<double> double_occupancy;
    SparseOperator drive_op;

    [[nodiscard]] SparseOperator static_hamiltonian(double interaction) const;
};

[[nodiscard]] SectorModel build_sector_model(int num_sites, double hopping, double drive_amplitude,
                                             std::size_t max_dim = kDefaultMaxDimension);

/// Endpoint data shared by all tau at fixed (L, U).
struct EndpointSpectra {
    double interaction = 0.0;
    double beta = 0.0;
    SparseOperator h_static;
    SparseOperator h_final;
    SpectralDecomposition initial;
    SpectralDecomposition final;
    ThermalEnsemble ensemble0;
    double delta_f = 0.0;
};

[[nodiscard]] EndpointSpectra build_endpoints(const SectorModel& model, double interaction, double beta,
                                              std::size_t max_dim = kDefaultMaxDimension);

struct PointDiagnostics {
    double discarded_weight = 0.0;
    double dropped_mass = 0.0;
    double min_gap = std::numeric_limits<double>::quiet_NaN();
    std::size_t steps = 0;
    int refinements = 0;
    double final_dt = 0.0;
    double norm_drift = 0.0;
    double observable_change = 0.0;
    double row_sum_defect = 0.0;
    double unitarity_defect = 0.0;
    double normalization_defect = 0.0;     ///< |sum P(W) - 1|
    double mean_crosscheck = 0.0;          ///< |tpm mean - unitary mean|
    double sigma_identity_defect = 0.0;    ///< |<Sigma> - beta (<W> - Delta F)|
    std::size_t support_size = 0;
    std::size_t pair_count = 0;
    std::size_t raw_pair_count = 0;
    double wall_seconds = 0.0;
};

struct PointResult {
    int num_sites = 0;
    double interaction = 0.0;
    double tau = 0.0;
    double beta = 0.0;
    double drive_amplitude = 0.0;
    ThermoRecord thermo;
    PointDiagnostics diagnostics;
    WorkDistribution distribution;
    std::string distribution_file;        ///< relative to the sweep directory; empty for single runs
    std::optional<std::string> error;     ///< set when the point failed

    [[nodiscard]] bool ok() const noexcept { return !error.has_value(); }
};

/// Full pipeline for one tau on precomputed endpoints.
[[nodiscard]] PointResult evaluate_point(const SectorModel& model, const EndpointSpectra& endpoints, double tau,
                                         const PointOptions& options);

/// Convenience: builds model and endpoints for `params` and evaluates one point.
[[nodiscard]] PointResult run_single(const HubbardParams& params, const PointOptions& options);

/// Smallest adjacent-level spacing of H(t) over `samples` equally spaced t in [0, tau].
[[nodiscard]] double min_instantaneous_gap(const SparseOperator& h_static, const SparseOperator& h_drive,
                                           std::size_t samples);

struct SweepGrid {
    std::vector<int> num_sites{4, 6, 8};
    std::vector<double> interactions;     ///< U values (J); default 49 points on [0, 12]
    std::vector<double> taus;             ///< tau values (1/J); default 0 plus 0.2 .. 10
    double beta = 0.4;
    double drive_amplitude = 10.0;
    double hopping = 1.0;
    bool dense_large_chains = false;      ///< use the full U x tau grid also for L >= 8

    [[nodiscard]] static SweepGrid defaults();
    [[nodiscard]] static std::vector<double> default_interactions();
    [[nodiscard]] static std::vector<double> default_taus();

    /// U and tau values used for chain length L (coarser for L >= 8 unless dense).
    [[nodiscard]] std::vector<double> interactions_for(int num_sites) const;
    [[nodiscard]] std::vector<double> taus_for(int num_sites) const;
    [[nodiscard]] std::size_t point_count() const;

    void validate(std::size_t max_dim = kDefaultMaxDimension) const;
};

struct SweepOptions {
    PointOptions point;
    std::size_t workers = 1;
    std::string config_echo;              ///< serialized run configuration stored in the manifest
    std::function<void(const PointResult&, std::size_t done, std::size_t total)> progress;
};

struct ManifestEntry {
    std::string path;     ///< relative to the sweep directory
    std::string sha256;
};

struct SweepManifest {
    std::filesystem::path directory;
    ManifestEntry records;
    std::vector<ManifestEntry> distributions;
    std::vector<PointResult> results;     ///< grid order: L, then U, then tau
    std::size_t failures = 0;
};

/**
 * Runs every grid point, writing records.csv, dist/<point>.csv and
 * manifest.json under `out_dir`. Point failures are recorded, not thrown.
 */
SweepManifest run_sweep(const SweepGrid& grid, const SweepOptions& options, const std::filesystem::path& out_dir);

/// A quantity over the (tau, U) plane for one L; NaN marks missing points.
struct Heatmap {
    int num_sites = 0;
    std::string quantity;
    std::vector<double> interactions;   ///< columns
    std::vector<double> taus;           ///< rows
    Eigen::MatrixXd values;             ///< taus.size() x interactions.size()
    std::size_t missing = 0;
};

/// Row of records.csv as read back from disk.
struct RecordRow {
    std::vector<std::string> header;
    std::vector<std::string> fields;

    [[nodiscard]] const std::string& at(const std::string& column) const;
    [[nodiscard]] double number(const std::string& column) const;
};

[[nodiscard]] std::vector<RecordRow> read_records(const std::filesystem::path& csv_path);

/// Names of numeric record columns usable as heatmap quantities.
[[nodiscard]] const std::vector<std::string>& heatmap_quantities();

/**
 * Extracts `quantity` for chain length L from a sweep directory (or its
 * manifest.json / records.csv). Throws ConfigError if the sweep holds no
 * points for L or the quantity is unknown.
 */
[[nodiscard]] Heatmap extract_heatmap(const std::filesystem::path& sweep, const std::string& quantity, int num_sites);
[[nodiscard]] Heatmap extract_heatmap(const std::vector<PointResult>& results, const std::string& quantity,
                                      int num_sites);

void write_heatmap_csv(const Heatmap& map, const std::filesystem::path& path);
void write_heatmap_svg(const Heatmap& map, const std::filesystem::path& path);

struct Extremum {
    double location = 0.0;   ///< parabolic vertex estimate
    double value = 0.0;
    std::size_t index = 0;   ///< grid index of the discrete extremum
};

struct ZeroCrossing {
    double location = 0.0;   ///< linear interpolation
    int direction = 0;       ///< +1 negative -> positive, -1 positive -> negative
};

struct Extrema {
    std::vector<Extremum> minima;
    std::vector<Extremum> maxima;
    std::vector<ZeroCrossing> zero_crossings;

    [[nodiscard]] std::optional<Extremum> deepest_minimum() const;
    [[nodiscard]] std::optional<Extremum> highest_maximum() const;
};

/// Interior local extrema with parabolic refinement, and sign changes. Needs >= 3 points.
[[nodiscard]] Extrema locate_extrema(std::span<const double> x, std::span<const double> y);

/// Field value of a result by record column name (see heatmap_quantities()).
[[nodiscard]] double quantity_value(const PointResult& result, const std::string& quantity);

} // namespace hubwork
