#include "isingps/cli.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isingps/direct_sampler.hpp"
#include "isingps/errors.hpp"
#include "isingps/exact.hpp"
#include "isingps/ising_model.hpp"
#include "isingps/langevin.hpp"
#include "isingps/results.hpp"
#include "isingps/rng.hpp"
#include "isingps/spin_algebra.hpp"

namespace isingps {

namespace {

struct ModelOptions {
  std::string model_path;
  std::string lattice;  // "WxH"
  bool periodic = false;
  double coupling = 1.0;
  double field = 0.0;

  bool has_lattice() const { return !lattice.empty(); }
  std::pair<int, int> lattice_extents() const {
    const auto sep = lattice.find_first_of("xX");
    if (sep == std::string::npos) throw ParseError("lattice spec must look like WxH");
    int w = 0, h = 0;
    try {
      w = std::stoi(lattice.substr(0, sep));
      h = std::stoi(lattice.substr(sep + 1));
    } catch (const std::exception&) {
      throw ParseError("lattice spec must look like WxH");
    }
    if (w < 1 || h < 1) throw ParseError("lattice extents must be >= 1");
    return {w, h};
  }

  CouplingGraph build() const {
    if (!model_path.empty() && has_lattice())
      throw ParseError("give either --model or --lattice, not both");
    if (!model_path.empty()) return parse_model_file(model_path);
    if (has_lattice()) {
      const auto [w, h] = lattice_extents();
      return CouplingGraph::rectangular(w, h, coupling, field, periodic);
    }
    throw ParseError("a model source is required (--model or --lattice)");
  }
};

void add_model_options(CLI::App& cmd, ModelOptions& opts) {
  cmd.add_option("--model", opts.model_path, "model file (sites/edge/field lines)");
  cmd.add_option("--lattice", opts.lattice, "rectangular lattice spec WxH");
  cmd.add_flag("--periodic", opts.periodic, "wrap the lattice in both directions");
  cmd.add_option("--J", opts.coupling, "uniform coupling for --lattice")->capture_default_str();
  cmd.add_option("--field", opts.field, "uniform field for --lattice")->capture_default_str();
}

PairSelection parse_pairs(const std::vector<std::string>& specs, const CouplingGraph& graph) {
  PairSelection sel;
  if (specs.empty()) {
    sel.nn_average = !graph.edges().empty();
    return sel;
  }
  for (const auto& spec : specs) {
    if (spec == "nn") {
      sel.nn_average = true;
      continue;
    }
    const auto comma = spec.find(',');
    if (comma == std::string::npos)
      throw ParseError("pair spec must be 'nn' or 'i,j', got '" + spec + "'");
    try {
      const int i = std::stoi(spec.substr(0, comma));
      const int j = std::stoi(spec.substr(comma + 1));
      sel.pairs.push_back({i, j});
    } catch (const std::exception&) {
      throw ParseError("pair spec must be 'nn' or 'i,j', got '" + spec + "'");
    }
  }
  sel.validate(graph);
  return sel;
}

std::string pair_label(int i, int j) { return std::to_string(i) + "-" + std::to_string(j); }

// Single-edge 2-site model check; returns (J, h) for the closed form.
std::pair<double, double> require_two_site(const CouplingGraph& graph) {
  if (graph.sites() != 2 || graph.edges().size() != 1)
    throw ParseError("the two-site oracle needs a 2-site single-edge model");
  if (graph.field()[0] != graph.field()[1])
    throw ParseError("the two-site oracle needs a uniform field");
  return {graph.edges()[0].coupling, graph.field()[0]};
}

// ---------------------------------------------------------------------------
// verify subcommand

struct VerifyCheck {
  std::string name;
  double error;
  double threshold;
  bool passed() const { return error <= threshold; }
};

// Dense oracles local to the verification report: an independent Kronecker
// build of the product state and a basis-sum kernel trace.
Eigen::VectorXcd kron_state(std::span<const std::complex<double>> z) {
  Eigen::VectorXcd state = Eigen::VectorXcd::Ones(1);
  for (std::size_t m = 0; m < z.size(); ++m) {
    Eigen::VectorXcd site(2);
    site << std::exp(-0.5 * z[m]), std::exp(0.5 * z[m]);
    Eigen::VectorXcd next(state.size() * 2);
    for (Eigen::Index level = 0; level < 2; ++level)
      for (Eigen::Index k = 0; k < state.size(); ++k)
        next[level * state.size() + k] = site[level] * state[k];
    state.swap(next);
  }
  return state;
}

double dense_kernel_trace(std::span<const double> r) {
  const int sites = static_cast<int>(r.size());
  double trace = 0.0;
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << sites); ++k) {
    double term = 1.0;
    for (int m = 0; m < sites; ++m)
      term *= std::exp(((k >> m) & 1u) ? r[static_cast<std::size_t>(m)]
                                       : -r[static_cast<std::size_t>(m)]);
    trace += term;
  }
  return trace;
}

int run_verify(double fd_step) {
  using Complex = std::complex<double>;
  std::vector<VerifyCheck> checks;

  {
    const std::vector<Complex> z{{0.3, 0.7}, {-0.2, 1.1}};
    checks.push_back({"su2 ladder identities (finite difference)",
                      spin::verify_su2_differential_identities(z, fd_step), 1e-8});
    checks.push_back({"cauchy equivalence d/dz = d/dr = -i d/dphi",
                      spin::verify_cauchy_equivalence({1.0, 1.0}, fd_step), 1e-8});
  }
  {
    Xoshiro256 rng(12345);
    auto unit = [&rng]() { return (static_cast<double>(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0; };
    double worst = 0.0;
    const std::vector<Complex> psi2{{1.0, 0.0}, {1.0, 0.0}};
    worst = std::max(worst, spin::verify_sun_identity(psi2, 1, 0, 1, fd_step));
    std::vector<Complex> psi3(3);
    for (auto& a : psi3) a = Complex{unit(), unit()};
    for (int mu = 0; mu < 3; ++mu)
      for (int nu = 0; nu < 3; ++nu)
        worst = std::max(worst, spin::verify_sun_identity(psi3, mu, nu, 1, fd_step));
    checks.push_back({"su(n) generator identity (n=2,3)", worst, 1e-8});
  }
  {
    double worst = 0.0;
    worst = std::max(worst, spin::verify_completeness(2, 128));
    worst = std::max(worst, spin::verify_completeness(3, 64));
    worst = std::max(worst, spin::verify_completeness(4, 32));
    checks.push_back({"phase-quadrature completeness (n=2,3,4)", worst, 1e-12});
  }
  {
    const auto bell = spin::verify_bell_expansion();
    checks.push_back({"bell projector expansion", bell.max_entry_error, 1e-14});
    checks.push_back({"bell trace", std::abs(bell.trace - 1.0), 1e-14});
    checks.push_back({"bell partial transpose eigenvalue",
                      std::abs(bell.min_partial_transpose_eigenvalue + 0.5), 1e-12});
  }
  {
    Xoshiro256 rng(777);
    auto unit = [&rng]() { return (static_cast<double>(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0; };
    double worst_inner = 0.0, worst_trace = 0.0;
    for (int sites = 1; sites <= 6; ++sites) {
      std::vector<Complex> za(static_cast<std::size_t>(sites)), zb(za);
      std::vector<double> r(static_cast<std::size_t>(sites));
      for (int m = 0; m < sites; ++m) {
        za[static_cast<std::size_t>(m)] = Complex{unit(), unit()};
        zb[static_cast<std::size_t>(m)] = Complex{unit(), unit()};
        r[static_cast<std::size_t>(m)] = 2.0 * unit();
      }
      const Complex formula = spin::inner_product_su2(za, zb);
      const Complex dense = kron_state(za).dot(kron_state(zb));
      worst_inner = std::max(worst_inner, std::abs(formula - dense) / std::abs(dense));
      const double trace = spin::kernel_trace(r);
      worst_trace = std::max(worst_trace, std::abs(trace - dense_kernel_trace(r)) / trace);
    }
    checks.push_back({"inner product formula vs dense dot (M<=6)", worst_inner, 1e-12});
    checks.push_back({"kernel trace vs dense trace (M<=6)", worst_trace, 1e-12});
  }

  bool all_passed = true;
  for (const auto& c : checks) {
    all_passed = all_passed && c.passed();
    std::printf("%-48s max_error=%-12.3e threshold=%-8.0e %s\n", c.name.c_str(), c.error,
                c.threshold, c.passed() ? "PASS" : "FAIL");
  }
  return all_passed ? 0 : 1;
}

// ---------------------------------------------------------------------------
// exact subcommand

void append_exact_records(std::vector<ResultRecord>& records, double beta,
                          const ExactResult& exact, std::int64_t replicas) {
  records.push_back({beta, "log_Z", "", exact.log_z, 0.0, replicas, "", std::nullopt});
  for (std::size_t i = 0; i < exact.magnetization.size(); ++i)
    records.push_back({beta, "magnetization", std::to_string(i), exact.magnetization[i], 0.0,
                       replicas, "", std::nullopt});
  for (const auto& [pair, value] : exact.correlations)
    records.push_back({beta, "correlation", pair_label(pair.first, pair.second), value, 0.0,
                       replicas, "", std::nullopt});
}

int run_exact(const ModelOptions& model, const std::string& method,
              const std::vector<double>& betas, const std::vector<std::string>& pair_specs,
              int workers, const std::string& output, OutputFormat format) {
  std::vector<ResultRecord> records;

  for (double beta : betas) {
    if (method == "brute") {
      const auto graph = model.build();
      const auto sel = parse_pairs(pair_specs, graph);
      const auto exact = brute_force(graph, beta, sel.pairs);
      append_exact_records(records, beta, exact, 1);
    } else if (method == "two-site") {
      const auto graph = model.build();
      const auto [J, h] = require_two_site(graph);
      append_exact_records(records, beta, two_site_closed_form(J, h, beta), 1);
    } else if (method == "transfer") {
      if (!model.has_lattice())
        throw ParseError("--method transfer needs --lattice (uniform rectangle)");
      const auto [w, h] = model.lattice_extents();
      const auto exact =
          transfer_matrix(w, h, model.coupling, model.field, beta, model.periodic, workers);
      records.push_back({beta, "log_Z", "", exact.log_z, 0.0, 1, "", std::nullopt});
      if (auto it = exact.correlations.find({0, 1}); it != exact.correlations.end())
        records.push_back({beta, "correlation", "nn", it->second, 0.0, 1, "", std::nullopt});
      if (!exact.magnetization.empty())
        records.push_back({beta, "magnetization", "avg", exact.magnetization[0], 0.0, 1, "",
                           std::nullopt});
    } else if (method == "onsager") {
      records.push_back({beta, "correlation", "nn",
                         onsager_nn_correlation(beta, model.coupling), 0.0, 1, "", std::nullopt});
    } else {
      throw ParseError("unknown --method '" + method + "'");
    }
  }

  write_results(output, format, records);
  return 0;
}

// ---------------------------------------------------------------------------
// sampler subcommands

struct OracleColumn {
  std::string name;
  std::optional<double> value;
};

OracleColumn correlation_oracle(const std::string& oracle, const ModelOptions& model,
                                const CouplingGraph& graph, double beta, int workers) {
  if (oracle.empty() || oracle == "none") return {"", std::nullopt};
  if (oracle == "two-site") {
    const auto [J, h] = require_two_site(graph);
    return {"two-site", two_site_closed_form(J, h, beta).correlations.at({0, 1})};
  }
  if (oracle == "transfer") {
    if (!model.has_lattice()) throw ParseError("--oracle transfer needs --lattice");
    const auto [w, h] = model.lattice_extents();
    const auto exact =
        transfer_matrix(w, h, model.coupling, model.field, beta, model.periodic, workers);
    return {"transfer", exact.correlations.at({0, 1})};
  }
  if (oracle == "onsager")
    return {"onsager", onsager_nn_correlation(beta, model.coupling)};
  throw ParseError("unknown --oracle '" + oracle + "'");
}

int run_direct(const ModelOptions& model, const std::vector<double>& betas,
               std::int64_t trajectories, std::uint64_t seed,
               const std::vector<std::string>& pair_specs, int workers,
               const std::string& output, OutputFormat format) {
  const auto graph = model.build();
  const auto sel = parse_pairs(pair_specs, graph);
  std::vector<ResultRecord> records;

  for (double beta : betas) {
    const auto obs = estimate_observables_weighted(graph, beta, trajectories, seed, sel, workers);
    records.push_back({beta, "log_Z", "", obs.log_partition.value, obs.log_partition.err,
                       obs.samples, "", std::nullopt});
    for (std::size_t i = 0; i < obs.magnetization.size(); ++i)
      records.push_back({beta, "magnetization", std::to_string(i), obs.magnetization[i].value,
                         obs.magnetization[i].err, obs.samples, "", std::nullopt});
    for (std::size_t p = 0; p < sel.pairs.size(); ++p)
      records.push_back({beta, "correlation", pair_label(sel.pairs[p].first, sel.pairs[p].second),
                         obs.pair_correlations[p].value, obs.pair_correlations[p].err, obs.samples,
                         "", std::nullopt});
    if (obs.nn_average)
      records.push_back({beta, "correlation", "nn", obs.nn_average->value, obs.nn_average->err,
                         obs.samples, "", std::nullopt});
  }

  write_results(output, format, records);
  return 0;
}

int run_langevin(const ModelOptions& model, const std::vector<double>& betas,
                 LangevinConfig config, const std::vector<std::string>& pair_specs,
                 const std::string& oracle, int workers, const std::string& output,
                 OutputFormat format) {
  const auto graph = model.build();
  const auto sel = parse_pairs(pair_specs, graph);
  std::vector<ResultRecord> records;

  for (double beta : betas) {
    config.beta = beta;
    const auto est = run_ensemble(graph, config, sel, workers);
    const auto oracle_col = correlation_oracle(oracle, model, graph, beta, workers);

    for (std::size_t i = 0; i < est.magnetization.size(); ++i)
      records.push_back({beta, "magnetization", std::to_string(i), est.magnetization[i].value,
                         est.magnetization[i].err, est.replicas, "", std::nullopt});
    for (std::size_t p = 0; p < sel.pairs.size(); ++p)
      records.push_back({beta, "correlation", pair_label(sel.pairs[p].first, sel.pairs[p].second),
                         est.pair_correlations[p].value, est.pair_correlations[p].err,
                         est.replicas, oracle_col.name, oracle_col.value});
    if (est.nn_average)
      records.push_back({beta, "correlation", "nn", est.nn_average->value, est.nn_average->err,
                         est.replicas, oracle_col.name, oracle_col.value});
  }

  write_results(output, format, records);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Finite-temperature Ising observables via coherent-state phase space"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand("verify", "run the spin-algebra identity checks");
  double fd_step = 1e-5;
  verify->add_option("--fd-step", fd_step, "finite-difference step")->capture_default_str();
  verify->set_config("--config");

  // shared sampler/exact state
  ModelOptions exact_model, direct_model, langevin_model;
  std::vector<double> exact_betas, direct_betas, langevin_betas;
  std::vector<std::string> exact_pairs, direct_pairs, langevin_pairs;
  std::string exact_output = "-", direct_output = "-", langevin_output = "-";
  std::string exact_format = "csv", direct_format = "csv", langevin_format = "csv";
  int exact_workers = 0, direct_workers = 0, langevin_workers = 0;

  // exact
  auto* exact = app.add_subcommand("exact", "exact oracles");
  add_model_options(*exact, exact_model);
  std::string method;
  exact->add_option("--method", method, "brute|transfer|onsager|two-site")->required();
  exact->add_option("--beta", exact_betas, "inverse temperature (repeatable)")->required();
  exact->add_option("--pairs", exact_pairs, "extra pairs i,j for brute");
  exact->add_option("--workers", exact_workers, "worker threads (0 = all cores)");
  exact->add_option("--output,-o", exact_output, "output path or -")->capture_default_str();
  exact->add_option("--format", exact_format, "csv|json")->capture_default_str();
  exact->set_config("--config");

  // direct
  auto* direct = app.add_subcommand("direct", "closed-form weighted sampler");
  add_model_options(*direct, direct_model);
  std::int64_t direct_trajectories = 10000;
  std::uint64_t direct_seed = 1;
  direct->add_option("--beta", direct_betas, "inverse temperature (repeatable)")->required();
  direct->add_option("--trajectories", direct_trajectories, "number of independent samples")
      ->capture_default_str();
  direct->add_option("--seed", direct_seed, "master seed")->capture_default_str();
  direct->add_option("--pairs", direct_pairs, "nn or i,j (repeatable)");
  direct->add_option("--workers", direct_workers, "worker threads (0 = all cores)");
  direct->add_option("--output,-o", direct_output, "output path or -")->capture_default_str();
  direct->add_option("--format", direct_format, "csv|json")->capture_default_str();
  direct->set_config("--config");

  // langevin
  auto* langevin = app.add_subcommand("langevin", "unweighted fictitious-time sampler");
  add_model_options(*langevin, langevin_model);
  LangevinConfig config;
  std::string oracle = "none";
  langevin->add_option("--beta", langevin_betas, "inverse temperature (repeatable)")->required();
  langevin->add_option("--trajectories", config.trajectories, "ensemble size")
      ->capture_default_str();
  langevin->add_option("--step", config.step, "fictitious-time step")->capture_default_str();
  langevin->add_option("--iterations", config.iterations, "midpoint iterations per step")
      ->capture_default_str();
  langevin->add_option("--burn-in", config.burn_in, "tau discarded before measurement")
      ->capture_default_str();
  langevin->add_option("--total-tau", config.total_tau, "trajectory length")
      ->capture_default_str();
  langevin->add_option("--measure-every", config.measure_every, "tau between retained samples")
      ->capture_default_str();
  langevin->add_option("--seed", config.seed, "master seed")->capture_default_str();
  langevin->add_option("--pairs", langevin_pairs, "nn or i,j (repeatable)");
  langevin->add_option("--oracle", oracle, "two-site|transfer|onsager|none")
      ->capture_default_str();
  langevin->add_option("--workers", langevin_workers, "worker threads (0 = all cores)");
  langevin->add_option("--output,-o", langevin_output, "output path or -")
      ->capture_default_str();
  langevin->add_option("--format", langevin_format, "csv|json")->capture_default_str();
  langevin->set_config("--config");

  try {
    app.parse(argc, argv);

    if (verify->parsed()) return run_verify(fd_step);
    if (exact->parsed())
      return run_exact(exact_model, method, exact_betas, exact_pairs, exact_workers,
                       exact_output, parse_output_format(exact_format));
    if (direct->parsed())
      return run_direct(direct_model, direct_betas, direct_trajectories, direct_seed,
                        direct_pairs, direct_workers, direct_output,
                        parse_output_format(direct_format));
    if (langevin->parsed())
      return run_langevin(langevin_model, langevin_betas, config, langevin_pairs, oracle,
                          langevin_workers, langevin_output,
                          parse_output_format(langevin_format));
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << R"({"kind":"parse","error":")" << e.what() << "\"}\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << R"({"kind":"parse","error":")" << e.what() << "\"}\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << R"({"kind":"capacity","error":")" << e.what() << "\"}\n";
    return 3;
  } catch (const DivergenceError& e) {
    std::cerr << R"({"kind":"divergence","error":")" << e.what() << "\"}\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << R"({"kind":"parse","error":")" << e.what() << "\"}\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << R"({"kind":"internal","error":")" << e.what() << "\"}\n";
    return 1;
  }
}

}  // namespace isingps
