#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "isingps/ising_model.hpp"
#include "isingps/rng.hpp"
#include "isingps/stats.hpp"

namespace isingps {

// One closed-form draw of the link-noise solution at inverse temperature beta:
// R per site and the log of the sampling weight Lambda(R) e^{-beta M Jbar}.
struct WeightedSample {
  std::vector<double> r;
  double log_weight = 0.0;
};

// Draws every ordered link noise independently as Normal(0, beta J_ij / 2)
// and assembles R_i = beta h_i + sum_j (W_ij + W_ji). No time stepping: the
// link noises are Brownian increments evaluated at a single beta.
WeightedSample sample_direct(const CouplingGraph& graph, double beta, GaussianStream& noise);

// log Z estimate from `samples` independent draws (log-sum-exp accumulation),
// with the standard error of the log mean. Deterministic for a fixed seed
// regardless of worker count.
Estimate estimate_partition(const CouplingGraph& graph, double beta, std::int64_t samples,
                            std::uint64_t seed, int workers = 0);

struct DirectObservables {
  Estimate log_partition;                     // log Z from the same draws
  std::vector<Estimate> magnetization;        // weighted <tanh R_i>
  std::vector<Estimate> pair_correlations;    // aligned with selection.pairs
  std::optional<Estimate> nn_average;         // mean over stored edges
  std::int64_t samples = 0;
};

// Weighted ratio estimators <a Lambda>/<Lambda> with delta-method errors.
DirectObservables estimate_observables_weighted(const CouplingGraph& graph, double beta,
                                                std::int64_t samples, std::uint64_t seed,
                                                const PairSelection& selection,
                                                int workers = 0);

// Var(log Lambda) per beta; documents the weight-dispersion growth that makes
// plain weighted averaging impractical at large beta.
std::vector<std::pair<double, double>> weight_dispersion(const CouplingGraph& graph,
                                                         std::span<const double> betas,
                                                         std::int64_t samples,
                                                         std::uint64_t seed, int workers = 0);

}  // namespace isingps
