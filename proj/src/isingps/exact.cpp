#include "isingps/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "isingps/ensemble.hpp"
#include "isingps/errors.hpp"

namespace isingps {

namespace {

double logsumexp(std::span<const double> terms) {
  double m = -std::numeric_limits<double>::infinity();
  for (double t : terms) m = std::max(m, t);
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - m);
  return m + std::log(sum);
}

}  // namespace

ExactResult brute_force(const CouplingGraph& graph, double beta,
                        std::span<const std::pair<int, int>> extra_pairs, int max_sites) {
  const int sites = graph.sites();
  if (max_sites > 30) max_sites = 30;
  if (sites > max_sites)
    throw CapacityError("brute_force: " + std::to_string(sites) + " sites exceeds cap of " +
                        std::to_string(max_sites));

  std::set<std::pair<int, int>> pair_set;
  for (const auto& e : graph.edges()) pair_set.insert({e.a, e.b});
  for (auto [i, j] : extra_pairs) {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= sites || i == j) throw std::invalid_argument("brute_force: bad pair");
    pair_set.insert({i, j});
  }
  const std::vector<std::pair<int, int>> pairs(pair_set.begin(), pair_set.end());

  const std::uint64_t configs = std::uint64_t{1} << sites;
  const auto& edges = graph.edges();
  const auto& field = graph.field();

  auto config_energy = [&](std::uint64_t c) {
    double e = 0.0;
    for (int i = 0; i < sites; ++i) {
      const int s = ((c >> i) & 1u) ? -1 : 1;
      e -= field[static_cast<std::size_t>(i)] * s;
    }
    for (const auto& edge : edges) {
      const int sa = ((c >> edge.a) & 1u) ? -1 : 1;
      const int sb = ((c >> edge.b) & 1u) ? -1 : 1;
      e -= edge.coupling * sa * sb;
    }
    return e;
  };

  double e_min = std::numeric_limits<double>::infinity();
  for (std::uint64_t c = 0; c < configs; ++c) e_min = std::min(e_min, config_energy(c));

  double z = 0.0;
  std::vector<double> mag(static_cast<std::size_t>(sites), 0.0);
  std::vector<double> corr(pairs.size(), 0.0);
  for (std::uint64_t c = 0; c < configs; ++c) {
    const double w = std::exp(-beta * (config_energy(c) - e_min));
    z += w;
    for (int i = 0; i < sites; ++i)
      mag[static_cast<std::size_t>(i)] += (((c >> i) & 1u) ? -1.0 : 1.0) * w;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const double sa = ((c >> pairs[p].first) & 1u) ? -1.0 : 1.0;
      const double sb = ((c >> pairs[p].second) & 1u) ? -1.0 : 1.0;
      corr[p] += sa * sb * w;
    }
  }

  ExactResult result;
  result.log_z = -beta * e_min + std::log(z);
  result.magnetization.resize(static_cast<std::size_t>(sites));
  for (int i = 0; i < sites; ++i)
    result.magnetization[static_cast<std::size_t>(i)] = mag[static_cast<std::size_t>(i)] / z;
  for (std::size_t p = 0; p < pairs.size(); ++p) result.correlations[pairs[p]] = corr[p] / z;
  return result;
}

ExactResult two_site_closed_form(double coupling, double field, double beta) {
  // Four configurations: ++, +-, -+, --.
  const double l_pp = beta * (2.0 * field + coupling);
  const double l_mix = -beta * coupling;
  const double l_mm = beta * (-2.0 * field + coupling);
  const double terms[4] = {l_pp, l_mix, l_mix, l_mm};
  const double log_z = logsumexp(terms);

  const double w_pp = std::exp(l_pp - log_z);
  const double w_mix = std::exp(l_mix - log_z);
  const double w_mm = std::exp(l_mm - log_z);

  ExactResult result;
  result.log_z = log_z;
  const double m = w_pp - w_mm;
  result.magnetization = {m, m};
  result.correlations[{0, 1}] = w_pp - 2.0 * w_mix + w_mm;
  return result;
}

namespace {

// Row-to-row transfer operator for one uniform rectangle. States are rows of
// `width` spins; bit i of the index is site i's spin (0 -> +1, 1 -> -1). The
// operator is kept symmetric, T = B^{1/2} C B^{1/2}, with B the diagonal of
// intra-row Boltzmann factors and C the product of per-column bond factors.
// B^{1/2} is stored with the row ground-state energy factored out so that
// entries stay in [0, 1]; each application of T then contributes the constant
// `log_shift_per_apply` to log Z.
class TransferOperator {
 public:
  TransferOperator(int width, double coupling, double field, double beta, bool periodic_row)
      : width_(width), dim_(std::size_t{1} << width) {
    // Intra-row bonds with wrap collapsing (width 2 wrap doubles the bond).
    std::vector<std::pair<std::pair<int, int>, double>> bonds;
    for (int x = 0; x + 1 < width; ++x) bonds.push_back({{x, x + 1}, coupling});
    if (periodic_row && width == 2) bonds[0].second += coupling;
    if (periodic_row && width > 2) bonds.push_back({{0, width - 1}, coupling});

    row_energy_.resize(dim_);
    double e_min = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < dim_; ++m) {
      double e = 0.0;
      for (int i = 0; i < width; ++i) e -= field * spin(m, i);
      for (const auto& [ij, J] : bonds) e -= J * spin(m, ij.first) * spin(m, ij.second);
      row_energy_[m] = e;
      e_min = std::min(e_min, e);
    }
    b_half_.resize(dim_);
    for (std::size_t m = 0; m < dim_; ++m)
      b_half_[m] = std::exp(-0.5 * beta * (row_energy_[m] - e_min));
    log_shift_apply_ = -beta * e_min;
    log_shift_b_half_ = -0.5 * beta * e_min;

    couple_same_ = std::exp(beta * coupling);
    couple_diff_ = std::exp(-beta * coupling);
    beta_ = beta;
  }

  std::size_t dim() const { return dim_; }
  int width() const { return width_; }
  double log_shift_per_apply() const { return log_shift_apply_; }
  double log_shift_b_half() const { return log_shift_b_half_; }
  double row_log_boltzmann(std::size_t m) const { return -beta_ * row_energy_[m]; }
  const std::vector<double>& b_half() const { return b_half_; }

  void apply(std::vector<double>& v) const {
    for (std::size_t k = 0; k < dim_; ++k) v[k] *= b_half_[k];
    for (int i = 0; i < width_; ++i) {
      const std::size_t bit = std::size_t{1} << i;
      for (std::size_t base = 0; base < dim_; base += 2 * bit) {
        for (std::size_t k = base; k < base + bit; ++k) {
          const double x0 = v[k];
          const double x1 = v[k + bit];
          v[k] = couple_same_ * x0 + couple_diff_ * x1;
          v[k + bit] = couple_diff_ * x0 + couple_same_ * x1;
        }
      }
    }
    for (std::size_t k = 0; k < dim_; ++k) v[k] *= b_half_[k];
  }

 private:
  static int spin(std::size_t m, int i) { return ((m >> i) & 1u) ? -1 : 1; }

  int width_;
  std::size_t dim_;
  std::vector<double> row_energy_;
  std::vector<double> b_half_;
  double couple_same_ = 1.0, couple_diff_ = 1.0;
  double log_shift_apply_ = 0.0, log_shift_b_half_ = 0.0;
  double beta_ = 0.0;
};

std::uint32_t rotate_row(std::uint32_t m, int k, int width, std::uint32_t mask) {
  if (k == 0) return m & mask;
  return ((m << k) | (m >> (width - k))) & mask;
}

std::uint32_t reverse_row(std::uint32_t m, int width) {
  std::uint32_t r = 0;
  for (int i = 0; i < width; ++i)
    if ((m >> i) & 1u) r |= 1u << (width - 1 - i);
  return r;
}

// Orbit representatives of the row states under the symmetries that commute
// with T: cyclic rotation and reflection of the periodic ring, and global
// spin flip when there is no field. Each representative carries its orbit
// size, so sums over all 2^W states collapse to sums over representatives.
std::vector<std::pair<std::uint32_t, double>> orbit_representatives(int width, bool use_flip) {
  const std::uint32_t count = std::uint32_t{1} << width;
  const std::uint32_t mask = count - 1;
  std::vector<std::uint32_t> orbit_size(count, 0);

  for (std::uint32_t m = 0; m < count; ++m) {
    std::uint32_t canon = m;
    const std::uint32_t rev = reverse_row(m, width);
    const std::uint32_t flip = (~m) & mask;
    const std::uint32_t flip_rev = reverse_row(flip, width);
    for (int k = 0; k < width; ++k) {
      canon = std::min(canon, rotate_row(m, k, width, mask));
      canon = std::min(canon, rotate_row(rev, k, width, mask));
      if (use_flip) {
        canon = std::min(canon, rotate_row(flip, k, width, mask));
        canon = std::min(canon, rotate_row(flip_rev, k, width, mask));
      }
    }
    ++orbit_size[canon];
  }

  std::vector<std::pair<std::uint32_t, double>> reps;
  for (std::uint32_t m = 0; m < count; ++m)
    if (orbit_size[m] > 0) reps.push_back({m, static_cast<double>(orbit_size[m])});
  return reps;
}

double rescale_accumulate(std::vector<double>& v) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  const double norm = std::sqrt(norm2);
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw std::runtime_error("transfer_matrix: vector norm left the finite range");
  const double inv = 1.0 / norm;
  for (double& x : v) x *= inv;
  return std::log(norm);
}

double tm_log_z(int width, int height, double coupling, double field, double beta,
                bool periodic, int workers) {
  const TransferOperator op(width, coupling, field, beta, periodic);
  const std::size_t dim = op.dim();

  if (height == 1) {
    // Single row: no vertical bonds (a periodic wrap would be a self bond).
    std::vector<double> terms(dim);
    for (std::size_t m = 0; m < dim; ++m) terms[m] = op.row_log_boltzmann(m);
    return logsumexp(terms);
  }

  if (!periodic) {
    // Z = (B^{1/2} 1)^T T^{H-1} (B^{1/2} 1)
    std::vector<double> v = op.b_half();
    double lg = 2.0 * op.log_shift_b_half();
    lg += rescale_accumulate(v);
    for (int step = 0; step < height - 1; ++step) {
      op.apply(v);
      lg += op.log_shift_per_apply();
      lg += rescale_accumulate(v);
    }
    double dot = 0.0;
    for (std::size_t k = 0; k < dim; ++k) dot += op.b_half()[k] * v[k];
    return lg + std::log(dot);
  }

  // Periodic: Z = Tr T^H, evaluated per symmetry-orbit representative. For
  // even H the trace is the Frobenius norm of T^{H/2} columns; for odd H the
  // diagonal entries are taken directly.
  const bool even = height % 2 == 0;
  const int applications = even ? height / 2 : height;
  const auto reps = orbit_representatives(width, field == 0.0);
  std::vector<double> terms(reps.size());

  parallel_for_indexed(static_cast<std::int64_t>(reps.size()), workers, [&](std::int64_t idx) {
    thread_local std::vector<double> v;
    v.assign(dim, 0.0);
    const auto [state, weight] = reps[static_cast<std::size_t>(idx)];
    v[state] = 1.0;
    double lg = 0.0;
    for (int step = 0; step < applications; ++step) {
      op.apply(v);
      lg += op.log_shift_per_apply();
      lg += rescale_accumulate(v);
    }
    double contribution;
    if (even) {
      contribution = 2.0 * lg;  // squared column norm
    } else {
      contribution = lg + std::log(v[state]);
    }
    terms[static_cast<std::size_t>(idx)] = std::log(weight) + contribution;
  });

  return logsumexp(terms);
}

}  // namespace

ExactResult transfer_matrix(int width, int height, double coupling, double field,
                            double beta, bool periodic, int workers, int max_width) {
  if (width < 1 || height < 1) throw std::invalid_argument("transfer_matrix: extents must be >= 1");
  if (!(coupling > 0.0)) throw std::invalid_argument("transfer_matrix: coupling must be > 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("transfer_matrix: beta must be >= 0");

  // The row dimension is exponential in the width, so always contract along
  // the smaller extent.
  if (width > height) std::swap(width, height);
  if (width > max_width)
    throw CapacityError("transfer_matrix: width " + std::to_string(width) +
                        " exceeds cap of " + std::to_string(max_width));

  ExactResult result;
  result.log_z = tm_log_z(width, height, coupling, field, beta, periodic, workers);

  const auto graph = CouplingGraph::rectangular(width, height, coupling, field, periodic);
  const int sites = graph.sites();

  if (!graph.edges().empty() && beta > 0.0) {
    double total_coupling = 0.0;
    for (const auto& e : graph.edges()) total_coupling += e.coupling;
    const double dj = 1e-6;
    const double lz_plus = tm_log_z(width, height, coupling + dj, field, beta, periodic, workers);
    const double lz_minus = tm_log_z(width, height, coupling - dj, field, beta, periodic, workers);
    const double dlogz_dj = (lz_plus - lz_minus) / (2.0 * dj);
    result.correlations[{0, 1}] = dlogz_dj / (beta * total_coupling / coupling);
  } else if (!graph.edges().empty()) {
    result.correlations[{0, 1}] = 0.0;
  }

  if (field == 0.0 || beta == 0.0) {
    result.magnetization.assign(static_cast<std::size_t>(sites), 0.0);
  } else {
    const double dh = 1e-6;
    const double lz_plus = tm_log_z(width, height, coupling, field + dh, beta, periodic, workers);
    const double lz_minus = tm_log_z(width, height, coupling, field - dh, beta, periodic, workers);
    const double m = (lz_plus - lz_minus) / (2.0 * dh) / (beta * sites);
    result.magnetization.assign(static_cast<std::size_t>(sites), m);
  }
  return result;
}

double elliptic_k(double modulus) {
  if (!(modulus >= 0.0) || modulus >= 1.0)
    throw std::domain_error("elliptic_k: modulus must lie in [0, 1)");
  const double complement = std::sqrt((1.0 - modulus) * (1.0 + modulus));
  double a = 1.0, b = complement;
  while (std::abs(a - b) > 1e-15 * a) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return std::numbers::pi / (2.0 * a);
}

double onsager_nn_correlation(double beta, double coupling) {
  if (!(beta > 0.0)) throw std::domain_error("onsager_nn_correlation: beta must be > 0");
  if (!(coupling > 0.0)) throw std::domain_error("onsager_nn_correlation: coupling must be > 0");

  const double K = beta * coupling;
  const double s = std::sinh(2.0 * K);
  const double c = std::cosh(2.0 * K);
  const double coefficient = (s * s - 1.0) / (1.0 + s * s);  // 2 tanh^2(2K) - 1
  // Cancellation-free complementary modulus: k' = |1 - sinh^2| / cosh^2.
  const double complement = std::abs(1.0 - s * s) / (c * c);

  double elliptic_term = 0.0;
  if (complement > 0.0) {
    double a = 1.0, b = complement;
    while (std::abs(a - b) > 1e-15 * a) {
      const double an = 0.5 * (a + b);
      b = std::sqrt(a * b);
      a = an;
    }
    const double k1 = std::numbers::pi / (2.0 * a);
    elliptic_term = (2.0 / std::numbers::pi) * coefficient * k1;
  }
  // Exactly at the critical point the coefficient vanishes with k' -> the
  // product limit is zero, which the branch above already realizes.

  return 0.5 * (c / s) * (1.0 + elliptic_term);
}

}  // namespace isingps
