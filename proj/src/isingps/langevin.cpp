#include "isingps/langevin.hpp"

#include <cmath>
#include <stdexcept>

#include "isingps/ensemble.hpp"
#include "isingps/errors.hpp"

namespace isingps {

namespace {

double log_cosh(double x) {
  return std::abs(x) + std::log1p(std::exp(-2.0 * std::abs(x))) - std::log(2.0);
}

std::int64_t round_steps(double interval, double step) {
  return static_cast<std::int64_t>(std::llround(interval / step));
}

}  // namespace

void LangevinConfig::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("LangevinConfig: beta must be > 0");
  if (!(step > 0.0)) throw std::invalid_argument("LangevinConfig: step must be > 0");
  if (iterations < 1) throw std::invalid_argument("LangevinConfig: iterations must be >= 1");
  if (trajectories < 1) throw std::invalid_argument("LangevinConfig: trajectories must be >= 1");
  if (!(measure_every > 0.0)) throw std::invalid_argument("LangevinConfig: measure_every must be > 0");
  if (!(burn_in >= 0.0) || !(burn_in < total_tau))
    throw std::invalid_argument("LangevinConfig: need 0 <= burn_in < total_tau");
  if (measurements() < 1)
    throw std::invalid_argument("LangevinConfig: window too short for one measurement");
}

std::int64_t LangevinConfig::total_steps() const { return round_steps(total_tau, step); }
std::int64_t LangevinConfig::burn_in_steps() const { return round_steps(burn_in, step); }
std::int64_t LangevinConfig::measure_stride() const {
  return std::max<std::int64_t>(1, round_steps(measure_every, step));
}
std::int64_t LangevinConfig::measurements() const {
  return (total_steps() - burn_in_steps()) / measure_stride();
}

LangevinState LangevinState::initial(const CouplingGraph& graph, double beta) {
  LangevinState st;
  st.w.assign(2 * graph.edges().size(), 0.0);
  st.refresh_r(graph, beta);
  return st;
}

void LangevinState::refresh_r(const CouplingGraph& graph, double beta) {
  const int sites = graph.sites();
  r.resize(static_cast<std::size_t>(sites));
  for (int i = 0; i < sites; ++i)
    r[static_cast<std::size_t>(i)] = beta * graph.field()[static_cast<std::size_t>(i)];
  const auto& edges = graph.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double w_plus = w[2 * e] + w[2 * e + 1];
    r[static_cast<std::size_t>(edges[e].a)] += w_plus;
    r[static_cast<std::size_t>(edges[e].b)] += w_plus;
  }
}

namespace {

std::vector<double> r_from_w(const CouplingGraph& graph, std::span<const double> w, double beta) {
  if (w.size() != 2 * graph.edges().size())
    throw std::invalid_argument("link noise vector must have two slots per edge");
  std::vector<double> r(static_cast<std::size_t>(graph.sites()));
  for (int i = 0; i < graph.sites(); ++i)
    r[static_cast<std::size_t>(i)] = beta * graph.field()[static_cast<std::size_t>(i)];
  const auto& edges = graph.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double w_plus = w[2 * e] + w[2 * e + 1];
    r[static_cast<std::size_t>(edges[e].a)] += w_plus;
    r[static_cast<std::size_t>(edges[e].b)] += w_plus;
  }
  return r;
}

}  // namespace

double potential(const CouplingGraph& graph, std::span<const double> w, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("potential: beta must be > 0");
  const auto r = r_from_w(graph, w, beta);
  double v = 0.0;
  const auto& edges = graph.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double inv = 1.0 / (edges[e].coupling * beta);
    v += (w[2 * e] * w[2 * e] + w[2 * e + 1] * w[2 * e + 1]) * inv;
  }
  for (double ri : r) v -= log_cosh(ri);
  return v;
}

std::vector<double> potential_gradient(const CouplingGraph& graph, std::span<const double> w,
                                       double beta) {
  if (!(beta > 0.0)) throw std::domain_error("potential_gradient: beta must be > 0");
  const auto r = r_from_w(graph, w, beta);
  const auto& edges = graph.edges();
  std::vector<double> grad(w.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double tanh_sum = std::tanh(r[static_cast<std::size_t>(edges[e].a)]) +
                            std::tanh(r[static_cast<std::size_t>(edges[e].b)]);
    const double inv = 2.0 / (edges[e].coupling * beta);
    grad[2 * e] = w[2 * e] * inv - tanh_sum;
    grad[2 * e + 1] = w[2 * e + 1] * inv - tanh_sum;
  }
  return grad;
}

std::vector<double> link_drift(const CouplingGraph& graph, std::span<const double> w,
                               double beta) {
  const auto r = r_from_w(graph, w, beta);
  const auto& edges = graph.edges();
  std::vector<double> drift(w.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double gain = 0.5 * beta * edges[e].coupling *
                        (std::tanh(r[static_cast<std::size_t>(edges[e].a)]) +
                         std::tanh(r[static_cast<std::size_t>(edges[e].b)]));
    drift[2 * e] = -w[2 * e] + gain;
    drift[2 * e + 1] = -w[2 * e + 1] + gain;
  }
  return drift;
}

SemiImplicitStepper::SemiImplicitStepper(const CouplingGraph& graph, double beta, double step,
                                         int iterations)
    : graph_(graph), beta_(beta), dt_(step), iterations_(iterations) {
  if (!(beta > 0.0)) throw std::domain_error("SemiImplicitStepper: beta must be > 0");
  if (!(step > 0.0) || iterations < 1)
    throw std::invalid_argument("SemiImplicitStepper: bad step or iteration count");
  const auto& edges = graph.edges();
  noise_sd_.resize(2 * edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double sd = std::sqrt(beta * edges[e].coupling * step);
    noise_sd_[2 * e] = sd;
    noise_sd_[2 * e + 1] = sd;
  }
  w_mid_.resize(2 * edges.size());
  db_.resize(2 * edges.size());
  m_.resize(static_cast<std::size_t>(graph.sites()));
}

void SemiImplicitStepper::advance(LangevinState& state, GaussianStream& noise) {
  for (std::size_t s = 0; s < db_.size(); ++s) db_[s] = noise.next_scaled(noise_sd_[s]);
  advance_with_noise(state, db_);
}

void SemiImplicitStepper::advance_with_noise(LangevinState& state,
                                             std::span<const double> noise_increments) {
  const auto& edges = graph_.edges();
  if (state.w.size() != 2 * edges.size() || noise_increments.size() != state.w.size())
    throw std::invalid_argument("advance_with_noise: slot count mismatch");

  const double half_dt = 0.5 * dt_;
  w_mid_ = state.w;
  for (int it = 0; it < iterations_; ++it) {
    // R and tanh R at the current midpoint iterate.
    for (int i = 0; i < graph_.sites(); ++i)
      m_[static_cast<std::size_t>(i)] = beta_ * graph_.field()[static_cast<std::size_t>(i)];
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double w_plus = w_mid_[2 * e] + w_mid_[2 * e + 1];
      m_[static_cast<std::size_t>(edges[e].a)] += w_plus;
      m_[static_cast<std::size_t>(edges[e].b)] += w_plus;
    }
    for (auto& mi : m_) mi = std::tanh(mi);

    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double gain = 0.5 * beta_ * edges[e].coupling *
                          (m_[static_cast<std::size_t>(edges[e].a)] +
                           m_[static_cast<std::size_t>(edges[e].b)]);
      w_mid_[2 * e] =
          state.w[2 * e] + half_dt * (gain - w_mid_[2 * e]) + 0.5 * noise_increments[2 * e];
      w_mid_[2 * e + 1] = state.w[2 * e + 1] + half_dt * (gain - w_mid_[2 * e + 1]) +
                          0.5 * noise_increments[2 * e + 1];
    }
  }

  for (std::size_t s = 0; s < state.w.size(); ++s)
    state.w[s] = 2.0 * w_mid_[s] - state.w[s];
  state.tau += dt_;
  state.refresh_r(graph_, beta_);
  for (double ri : state.r)
    if (!std::isfinite(ri)) throw DivergenceError(state.tau);
}

namespace {

// Shared trajectory driver: calls `measure(state)` at each retained sample.
template <typename Measure>
void drive_trajectory(const CouplingGraph& graph, const LangevinConfig& config,
                      std::int64_t trajectory, Measure&& measure) {
  LangevinState state = LangevinState::initial(graph, config.beta);
  SemiImplicitStepper stepper(graph, config.beta, config.step, config.iterations);
  GaussianStream noise(config.seed, static_cast<std::uint64_t>(trajectory),
                       StreamKind::kLangevinTrajectory);
  const std::int64_t total = config.total_steps();
  const std::int64_t burn = config.burn_in_steps();
  const std::int64_t stride = config.measure_stride();
  try {
    for (std::int64_t s = 1; s <= total; ++s) {
      stepper.advance(state, noise);
      if (s > burn && (s - burn) % stride == 0) measure(state);
    }
  } catch (DivergenceError& err) {
    err.set_trajectory(trajectory);
    throw;
  }
}

}  // namespace

EnsembleEstimates run_ensemble(const CouplingGraph& graph, const LangevinConfig& config,
                               const PairSelection& selection, int workers) {
  config.validate();
  selection.validate(graph);

  const int sites = graph.sites();
  const int n_pairs = static_cast<int>(selection.pairs.size());
  const int channels = sites + n_pairs + (selection.nn_average ? 1 : 0);
  const std::int64_t trajectories = config.trajectories;

  // Per-trajectory time averages, written by index: the reduction below is
  // then independent of worker scheduling.
  std::vector<double> replica_means(static_cast<std::size_t>(trajectories * channels));

  parallel_for_indexed(trajectories, workers, [&](std::int64_t t) {
    std::vector<double> sums(static_cast<std::size_t>(channels), 0.0);
    std::vector<double> m(static_cast<std::size_t>(sites));
    std::int64_t n_meas = 0;
    drive_trajectory(graph, config, t, [&](const LangevinState& state) {
      for (int i = 0; i < sites; ++i)
        m[static_cast<std::size_t>(i)] = std::tanh(state.r[static_cast<std::size_t>(i)]);
      for (int i = 0; i < sites; ++i) sums[static_cast<std::size_t>(i)] += m[static_cast<std::size_t>(i)];
      for (int p = 0; p < n_pairs; ++p) {
        const auto [i, j] = selection.pairs[static_cast<std::size_t>(p)];
        sums[static_cast<std::size_t>(sites + p)] +=
            m[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(j)];
      }
      if (selection.nn_average) {
        double bond_sum = 0.0;
        for (const auto& e : graph.edges())
          bond_sum += m[static_cast<std::size_t>(e.a)] * m[static_cast<std::size_t>(e.b)];
        sums[static_cast<std::size_t>(channels - 1)] +=
            bond_sum / static_cast<double>(graph.edges().size());
      }
      ++n_meas;
    });
    for (int k = 0; k < channels; ++k)
      replica_means[static_cast<std::size_t>(t * channels + k)] =
          sums[static_cast<std::size_t>(k)] / static_cast<double>(n_meas);
  });

  std::vector<RunningStats> stats(static_cast<std::size_t>(channels));
  for (std::int64_t t = 0; t < trajectories; ++t)
    for (int k = 0; k < channels; ++k)
      stats[static_cast<std::size_t>(k)].push(replica_means[static_cast<std::size_t>(t * channels + k)]);

  EnsembleEstimates out;
  out.replicas = static_cast<int>(trajectories);
  out.measurements_per_trajectory = config.measurements();
  out.magnetization.resize(static_cast<std::size_t>(sites));
  for (int i = 0; i < sites; ++i) out.magnetization[static_cast<std::size_t>(i)] = stats[static_cast<std::size_t>(i)].estimate();
  out.pair_correlations.resize(static_cast<std::size_t>(n_pairs));
  for (int p = 0; p < n_pairs; ++p)
    out.pair_correlations[static_cast<std::size_t>(p)] = stats[static_cast<std::size_t>(sites + p)].estimate();
  if (selection.nn_average) out.nn_average = stats[static_cast<std::size_t>(channels - 1)].estimate();
  return out;
}

Histogram collect_stationary_r(const CouplingGraph& graph, const LangevinConfig& config,
                               int site, double lo, double hi, int bins, int workers) {
  config.validate();
  if (site < 0 || site >= graph.sites())
    throw std::invalid_argument("collect_stationary_r: site out of range");

  const std::int64_t trajectories = config.trajectories;
  std::vector<Histogram> partial(static_cast<std::size_t>(trajectories), Histogram(lo, hi, bins));
  parallel_for_indexed(trajectories, workers, [&](std::int64_t t) {
    auto& hist = partial[static_cast<std::size_t>(t)];
    drive_trajectory(graph, config, t, [&](const LangevinState& state) {
      hist.add(state.r[static_cast<std::size_t>(site)]);
    });
  });

  Histogram total(lo, hi, bins);
  for (const auto& h : partial) total.merge(h);
  return total;
}

ChiSquareResult stationary_density_check_two_site(double coupling, const LangevinConfig& config,
                                                  int bins, int workers) {
  const auto graph = CouplingGraph::rectangular(2, 1, coupling, 0.0, false);
  const double bj = config.beta * coupling;
  // Wells sit near |R| ~ 2 beta J; add a wide Gaussian margin.
  const double range = 2.0 * bj + 8.0 * std::sqrt(bj) + 1.0;
  const Histogram hist = collect_stationary_r(graph, config, 0, -range, range, bins, workers);

  // exp(-R^2/(2 beta J)) cosh^2(R), evaluated with a fixed shift so that the
  // density stays representable for any beta J.
  double peak = 0.0;
  auto log_density = [bj](double r) {
    return -r * r / (2.0 * bj) + 2.0 * (std::abs(r) + std::log1p(std::exp(-2.0 * std::abs(r))));
  };
  for (int b = 0; b < bins; ++b) {
    const double mid = 0.5 * (hist.bin_lo(b) + hist.bin_hi(b));
    peak = std::max(peak, log_density(mid));
  }
  auto density = [log_density, peak](double r) { return std::exp(log_density(r) - peak); };
  return chi_square_fit(hist, density);
}

}  // namespace isingps
