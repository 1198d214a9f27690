// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include "hubwork/workstats.hpp"

#include "hubwork/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hubwork {

namespace {

struct Pair {
    double work;
    double mass;
};

} // namespace

double WorkDistribution::total() const noexcept {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
}

WorkDistribution build_distribution(const TransitionTable& table, double merge_tol, double prob_floor) {
    if (!(merge_tol >= 0.0)) throw ConfigError("build_distribution: merge_tol must be >= 0");
    if (!(prob_floor >= 0.0)) throw ConfigError("build_distribution: prob_floor must be >= 0");
    const auto nf = table.eps_f.size();
    if (table.probs.rows() != static_cast<Eigen::Index>(table.retained.size()) || table.probs.cols() != nf) {
        throw ConfigError("build_distribution: transition table shape mismatch");
    }

    WorkDistribution dist;
    dist.merge_tol = merge_tol;
    dist.pair_count = table.pair_count();
    dist.discarded_weight = table.discarded_weight;

    std::vector<Pair> pairs;
    pairs.reserve(dist.pair_count);
    double kept_mass = 0.0;
    for (std::size_t r = 0; r < table.retained.size(); ++r) {
        const auto n = static_cast<Eigen::Index>(table.retained[r]);
        const double pn = table.weights0(n);
        for (Eigen::Index m = 0; m < nf; ++m) {
            const double mass = pn * table.probs(static_cast<Eigen::Index>(r), m);
            if (mass > prob_floor) {
                pairs.push_back({table.eps_f(m) - table.eps0(n), mass});
                kept_mass += mass;
            } else {
                dist.dropped_mass += mass;
            }
        }
    }
    dist.raw_pair_count = pairs.size();
    if (pairs.empty() || !(kept_mass > 0.0)) throw NumericalError("build_distribution: no probability mass above the floor");

    // Fixed order: work value, then mass. Makes the merge schedule-independent.
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return a.work != b.work ? a.work < b.work : a.mass < b.mass;
    });

    double cluster_mass = pairs.front().mass;
    double cluster_moment = pairs.front().mass * pairs.front().work;
    double last_work = pairs.front().work;
    auto flush = [&] {
        dist.support.push_back(cluster_moment / cluster_mass);
        dist.probs.push_back(cluster_mass / kept_mass);
    };
    for (std::size_t i = 1; i < pairs.size(); ++i) {
        if (pairs[i].work - last_work > merge_tol) {
            flush();
            cluster_mass = 0.0;
            cluster_moment = 0.0;
        }
        cluster_mass += pairs[i].mass;
        cluster_moment += pairs[i].mass * pairs[i].work;
        last_work = pairs[i].work;
    }
    flush();
    return dist;
}

double mean(const WorkDistribution& dist) noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) m += dist.probs[i] * dist.support[i];
    return m;
}

double central_moment(const WorkDistribution& dist, int k) noexcept {
    const double mu = mean(dist);
    double s = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) s += dist.probs[i] * std::pow(dist.support[i] - mu, k);
    return s;
}

double standardized_skewness(const WorkDistribution& dist) noexcept {
    const double var = central_moment(dist, 2);
    if (!(var > 0.0)) return 0.0;
    return central_moment(dist, 3) / std::pow(var, 1.5);
}

double log_jarzynski(const WorkDistribution& dist, double beta) noexcept {
    Eigen::VectorXd terms(static_cast<Eigen::Index>(dist.size()));
    for (std::size_t i = 0; i < dist.size(); ++i) {
        terms(static_cast<Eigen::Index>(i)) = std::log(dist.probs[i]) - beta * dist.support[i];
    }
    return log_sum_exp(terms);
}

double jarzynski_estimator(const WorkDistribution& dist, double beta) noexcept {
    return std::exp(log_jarzynski(dist, beta));
}

double jarzynski_residual(const WorkDistribution& dist, double beta, double delta_f) noexcept {
    return std::abs(std::expm1(log_jarzynski(dist, beta) + beta * delta_f));
}

MeanEnergyCheck mean_energy_crosscheck(const TransitionTable& table, const PropagatedSet& prop,
                                       const SparseOperator& final_hamiltonian) {
    if (prop.indices != table.retained) throw ConfigError("mean_energy_crosscheck: propagated set and table disagree");
    if (final_hamiltonian.dim() != static_cast<std::size_t>(table.eps_f.size())) {
        throw ConfigError("mean_energy_crosscheck: Hamiltonian dimension mismatch");
    }
    MeanEnergyCheck out;
    double retained_weight = 0.0;
    double initial_energy = 0.0;
    double final_tpm = 0.0;
    double final_direct = 0.0;

    Eigen::MatrixXcd hpsi(prop.vectors.rows(), prop.vectors.cols());
    final_hamiltonian.apply(prop.vectors, hpsi);
    for (std::size_t r = 0; r < table.retained.size(); ++r) {
        const auto n = static_cast<Eigen::Index>(table.retained[r]);
        const auto c = static_cast<Eigen::Index>(r);
        const double pn = table.weights0(n);
        retained_weight += pn;
        initial_energy += pn * table.eps0(n);
        final_tpm += pn * table.probs.row(c).dot(table.eps_f);
        final_direct += pn * prop.vectors.col(c).dot(hpsi.col(c)).real();
    }
    out.tpm_mean = (final_tpm - initial_energy) / retained_weight;
    out.unitary_mean = (final_direct - initial_energy) / retained_weight;
    return out;
}

SmoothedCurve smooth_distribution(const WorkDistribution& dist, double width, std::size_t points) {
    if (!(width > 0.0)) throw ConfigError("smooth_distribution: kernel width must be positive");
    if (points < 2) throw ConfigError("smooth_distribution: need at least two grid points");
    SmoothedCurve curve;
    if (dist.size() == 0) return curve;
    const double lo = dist.support.front() - 4.0 * width;
    const double hi = dist.support.back() + 4.0 * width;
    const double norm = 1.0 / (width * std::sqrt(2.0 * std::numbers::pi));
    curve.w.resize(points);
    curve.density.assign(points, 0.0);
    for (std::size_t g = 0; g < points; ++g) {
        const double w = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(points - 1);
        curve.w[g] = w;
        double d = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            const double z = (w - dist.support[i]) / width;
            d += dist.probs[i] * norm * std::exp(-0.5 * z * z);
        }
        curve.density[g] = d;
    }
    return curve;
}

} // namespace hubwork
