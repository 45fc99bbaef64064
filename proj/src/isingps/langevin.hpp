#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "isingps/ising_model.hpp"
#include "isingps/rng.hpp"
#include "isingps/stats.hpp"

namespace isingps {

// Fictitious-time relaxation parameters. Defaults follow the reference
// two-site run: step 0.05 with 3 midpoint iterations; burn-in of ten unit
// relaxation times; a short measurement window tuned so that 4000
// trajectories give a standard error near 5e-3 at beta J = 1.
struct LangevinConfig {
  double beta = 1.0;
  double step = 0.05;
  int iterations = 3;
  int trajectories = 4000;
  double burn_in = 10.0;
  double measure_every = 0.25;
  double total_tau = 12.5;
  std::uint64_t seed = 1;

  void validate() const;
  std::int64_t total_steps() const;
  std::int64_t burn_in_steps() const;
  std::int64_t measure_stride() const;
  std::int64_t measurements() const;
};

// Per-trajectory state: two ordered noise slots per stored edge
// (w[2e] = W_ab, w[2e+1] = W_ba) plus the cached R_i they imply.
struct LangevinState {
  std::vector<double> w;
  std::vector<double> r;
  double tau = 0.0;

  static LangevinState initial(const CouplingGraph& graph, double beta);
  void refresh_r(const CouplingGraph& graph, double beta);
};

// V = sum_slots W^2/(J beta) - sum_i log cosh(R_i). Throws std::domain_error
// for beta <= 0 (the Gaussian term degenerates).
double potential(const CouplingGraph& graph, std::span<const double> w, double beta);

// dV/dW_ij = 2 W_ij/(J_ij beta) - tanh(R_i) - tanh(R_j), per ordered slot.
std::vector<double> potential_gradient(const CouplingGraph& graph, std::span<const double> w,
                                       double beta);

// Drift of the constant-diffusion link equation, -(1/2) beta J dV/dW:
// drift_ij = -W_ij + (beta J_ij / 2)(tanh R_i + tanh R_j).
std::vector<double> link_drift(const CouplingGraph& graph, std::span<const double> w,
                               double beta);

// One midpoint semi-implicit step: with a frozen noise increment dB per slot,
// iterate  W_mid <- W_n + (dtau/2) drift(W_mid) + dB/2  a fixed number of
// times, then W_{n+1} = 2 W_mid - W_n. Owns the scratch buffers, so a single
// instance should drive a whole trajectory.
class SemiImplicitStepper {
 public:
  SemiImplicitStepper(const CouplingGraph& graph, double beta, double step, int iterations);

  void advance(LangevinState& state, GaussianStream& noise);
  // Same update with caller-supplied noise increments (dB per slot).
  void advance_with_noise(LangevinState& state, std::span<const double> noise_increments);

 private:
  const CouplingGraph& graph_;
  double beta_;
  double dt_;
  int iterations_;
  std::vector<double> noise_sd_;  // sqrt(beta J dtau) per slot
  std::vector<double> w_mid_, db_, m_;
};

struct EnsembleEstimates {
  std::vector<Estimate> magnetization;      // per site
  std::vector<Estimate> pair_correlations;  // aligned with selection.pairs
  std::optional<Estimate> nn_average;
  int replicas = 0;
  std::int64_t measurements_per_trajectory = 0;
};

// Evolves `trajectories` independent states from W = 0, discards tau <
// burn_in, records every measure_every, and reports across-trajectory means.
// Per-trajectory time averages are the independent replicas behind every
// standard error. Deterministic for fixed (config, seed) at any worker count.
EnsembleEstimates run_ensemble(const CouplingGraph& graph, const LangevinConfig& config,
                               const PairSelection& selection, int workers = 0);

// Stationary histogram of R at one site, pooled over the ensemble.
Histogram collect_stationary_r(const CouplingGraph& graph, const LangevinConfig& config,
                               int site, double lo, double hi, int bins, int workers = 0);

// Chi-square comparison of the empirical two-site stationary R histogram
// against  p(R) ~ exp(-R^2/(2 beta J)) cosh^2(R)  (h = 0).
ChiSquareResult stationary_density_check_two_site(double coupling, const LangevinConfig& config,
                                                  int bins = 80, int workers = 0);

}  // namespace isingps
