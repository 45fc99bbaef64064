#include "isingps/direct_sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "isingps/ensemble.hpp"

namespace isingps {

namespace {

constexpr std::int64_t kChunk = 4096;

double log_2cosh(double x) { return std::abs(x) + std::log1p(std::exp(-2.0 * std::abs(x))); }

}  // namespace

WeightedSample sample_direct(const CouplingGraph& graph, double beta, GaussianStream& noise) {
  if (!(beta >= 0.0)) throw std::invalid_argument("sample_direct: beta must be >= 0");
  const int sites = graph.sites();
  WeightedSample out;
  out.r.resize(static_cast<std::size_t>(sites));
  for (int i = 0; i < sites; ++i)
    out.r[static_cast<std::size_t>(i)] = beta * graph.field()[static_cast<std::size_t>(i)];

  // Two ordered slots per stored edge, each with variance beta J / 2; only
  // their sum enters R, and it lands on both endpoints.
  for (const auto& edge : graph.edges()) {
    const double sd = std::sqrt(0.5 * beta * edge.coupling);
    const double w_ab = noise.next_scaled(sd);
    const double w_ba = noise.next_scaled(sd);
    const double w_plus = w_ab + w_ba;
    out.r[static_cast<std::size_t>(edge.a)] += w_plus;
    out.r[static_cast<std::size_t>(edge.b)] += w_plus;
  }

  double log_lambda = 0.0;
  for (double r : out.r) log_lambda += log_2cosh(r);
  out.log_weight = log_lambda - beta * sites * graph.mean_coupling();
  return out;
}

namespace {

// Chunked deterministic reduction: samples are produced from per-index
// streams, accumulated into fixed [c*kChunk, (c+1)*kChunk) chunks in
// parallel, then merged in chunk order. The result is bit-identical for any
// worker count.
template <typename FillChannels>
LogWeightMoments accumulate_samples(const CouplingGraph& graph, double beta,
                                    std::int64_t samples, std::uint64_t seed, int workers,
                                    int channels, FillChannels&& fill) {
  if (samples < 2) throw std::invalid_argument("direct sampler: need at least 2 samples");
  const std::int64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<LogWeightMoments> partial(static_cast<std::size_t>(chunks),
                                        LogWeightMoments(channels));

  parallel_for_indexed(chunks, workers, [&](std::int64_t c) {
    auto& acc = partial[static_cast<std::size_t>(c)];
    std::vector<double> values(static_cast<std::size_t>(channels));
    const std::int64_t begin = c * kChunk;
    const std::int64_t end = std::min(samples, begin + kChunk);
    for (std::int64_t t = begin; t < end; ++t) {
      GaussianStream noise(seed, static_cast<std::uint64_t>(t), StreamKind::kDirectSample);
      const WeightedSample sample = sample_direct(graph, beta, noise);
      fill(sample, values);
      acc.push(sample.log_weight, values);
    }
  });

  LogWeightMoments total(channels);
  for (const auto& part : partial) total.merge(part);
  return total;
}

}  // namespace

Estimate estimate_partition(const CouplingGraph& graph, double beta, std::int64_t samples,
                            std::uint64_t seed, int workers) {
  const auto acc = accumulate_samples(graph, beta, samples, seed, workers, 0,
                                      [](const WeightedSample&, std::vector<double>&) {});
  return acc.log_mean_weight_estimate();
}

DirectObservables estimate_observables_weighted(const CouplingGraph& graph, double beta,
                                                std::int64_t samples, std::uint64_t seed,
                                                const PairSelection& selection, int workers) {
  selection.validate(graph);
  const int sites = graph.sites();
  const int n_pairs = static_cast<int>(selection.pairs.size());
  const int channels = sites + n_pairs + (selection.nn_average ? 1 : 0);

  auto fill = [&](const WeightedSample& sample, std::vector<double>& values) {
    for (int i = 0; i < sites; ++i)
      values[static_cast<std::size_t>(i)] = std::tanh(sample.r[static_cast<std::size_t>(i)]);
    for (int p = 0; p < n_pairs; ++p) {
      const auto [i, j] = selection.pairs[static_cast<std::size_t>(p)];
      values[static_cast<std::size_t>(sites + p)] =
          values[static_cast<std::size_t>(i)] * values[static_cast<std::size_t>(j)];
    }
    if (selection.nn_average) {
      double sum = 0.0;
      for (const auto& e : graph.edges())
        sum += values[static_cast<std::size_t>(e.a)] * values[static_cast<std::size_t>(e.b)];
      values[static_cast<std::size_t>(channels - 1)] =
          sum / static_cast<double>(graph.edges().size());
    }
  };

  const auto acc = accumulate_samples(graph, beta, samples, seed, workers, channels, fill);

  DirectObservables out;
  out.samples = acc.count();
  out.log_partition = acc.log_mean_weight_estimate();
  out.magnetization.resize(static_cast<std::size_t>(sites));
  for (int i = 0; i < sites; ++i) out.magnetization[static_cast<std::size_t>(i)] = acc.channel_ratio(i);
  out.pair_correlations.resize(static_cast<std::size_t>(n_pairs));
  for (int p = 0; p < n_pairs; ++p)
    out.pair_correlations[static_cast<std::size_t>(p)] = acc.channel_ratio(sites + p);
  if (selection.nn_average) out.nn_average = acc.channel_ratio(channels - 1);
  return out;
}

std::vector<std::pair<double, double>> weight_dispersion(const CouplingGraph& graph,
                                                         std::span<const double> betas,
                                                         std::int64_t samples,
                                                         std::uint64_t seed, int workers) {
  if (samples < 100) throw std::invalid_argument("weight_dispersion: need at least 100 samples");
  std::vector<std::pair<double, double>> report;
  report.reserve(betas.size());
  const double offset_scale = graph.sites() * graph.mean_coupling();

  for (double beta : betas) {
    const std::int64_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<RunningStats> partial(static_cast<std::size_t>(chunks));
    parallel_for_indexed(chunks, workers, [&](std::int64_t c) {
      auto& acc = partial[static_cast<std::size_t>(c)];
      const std::int64_t begin = c * kChunk;
      const std::int64_t end = std::min(samples, begin + kChunk);
      for (std::int64_t t = begin; t < end; ++t) {
        GaussianStream noise(seed, static_cast<std::uint64_t>(t), StreamKind::kDirectSample);
        const WeightedSample sample = sample_direct(graph, beta, noise);
        acc.push(sample.log_weight + beta * offset_scale);  // log Lambda itself
      }
    });
    RunningStats total;
    for (const auto& part : partial) total.merge(part);
    report.push_back({beta, total.count() > 1 ? total.variance() : 0.0});
  }
  return report;
}

}  // namespace isingps
