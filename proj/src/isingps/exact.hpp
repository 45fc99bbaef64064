#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "isingps/ising_model.hpp"

namespace isingps {

// Ground-truth thermodynamics. All partition values are carried as log Z.
struct ExactResult {
  double log_z = 0.0;
  std::vector<double> magnetization;                 // <sigma_i^z> per site
  std::map<std::pair<int, int>, double> correlations;  // <sigma_i^z sigma_j^z>
};

// Full enumeration of the 2^M configurations in log-stable form. Correlations
// are produced for every stored edge plus any `extra_pairs`. Throws
// CapacityError above `max_sites`.
ExactResult brute_force(const CouplingGraph& graph, double beta,
                        std::span<const std::pair<int, int>> extra_pairs = {},
                        int max_sites = 24);

// Z_2 = e^{beta(2h+J)} + 2 e^{-J beta} + e^{beta(-2h+J)} and its observables.
ExactResult two_site_closed_form(double coupling, double field, double beta);

// Row-to-row transfer matrix for a uniform width x height rectangle
// (Z = Tr T^H when periodic). `periodic` wraps both directions with the same
// degenerate-bond collapsing as CouplingGraph::rectangular. The entry
// correlations[{0,1}] holds the bond-averaged nearest-neighbour correlation,
// obtained by central differencing of log Z in the coupling (step 1e-6).
// Magnetization is likewise differenced in h (exactly zero when h == 0).
// Throws CapacityError above `max_width`.
ExactResult transfer_matrix(int width, int height, double coupling, double field,
                            double beta, bool periodic, int workers = 0,
                            int max_width = 16);

// Infinite-lattice square Ising nearest-neighbour correlation
//   (1/2) coth(2K) [1 + (2/pi)(2 tanh^2(2K) - 1) K1(k)],  K = beta J,
//   k = 2 sinh(2K)/cosh^2(2K),
// with K1 the complete elliptic integral of the first kind (AGM evaluation).
double onsager_nn_correlation(double beta, double coupling);

// Complete elliptic integral of the first kind, modulus convention.
double elliptic_k(double modulus);

}  // namespace isingps
