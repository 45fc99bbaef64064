#include "isingps/spin_algebra.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "isingps/errors.hpp"

namespace isingps::spin {

namespace {

double log_2cosh(double x) { return std::abs(x) + std::log1p(std::exp(-2.0 * std::abs(x))); }

void check_site_cap(int sites, int site_cap, int levels) {
  if (sites < 1) throw std::invalid_argument("need at least one site");
  double dim = 1.0;
  for (int m = 0; m < sites; ++m) dim *= levels;
  double cap_dim = 1.0;
  for (int m = 0; m < site_cap; ++m) cap_dim *= 2.0;
  if (sites > site_cap || dim > cap_dim)
    throw CapacityError("dense state exceeds the configured cap of 2^" +
                        std::to_string(site_cap) + " amplitudes");
}

}  // namespace

CoherentAmplitudes::CoherentAmplitudes(std::vector<Complex> z_in, std::vector<Complex> z_prime_in)
    : z(std::move(z_in)), z_prime(std::move(z_prime_in)) {
  if (z.empty() || z.size() != z_prime.size())
    throw std::invalid_argument("CoherentAmplitudes: branches must have equal length >= 1");
  for (std::size_t m = 0; m < z.size(); ++m) {
    const Complex rm = 0.5 * (std::conj(z[m]) + z_prime[m]);
    if (!std::isfinite(rm.real()) || !std::isfinite(rm.imag()))
      throw std::invalid_argument("CoherentAmplitudes: non-finite R");
  }
}

std::vector<double> CoherentAmplitudes::r() const {
  std::vector<double> out(z.size());
  for (std::size_t m = 0; m < z.size(); ++m)
    out[m] = 0.5 * (std::conj(z[m]) + z_prime[m]).real();
  return out;
}

SunAmplitudes::SunAmplitudes(Eigen::MatrixXcd psi_in, Eigen::MatrixXcd phi_in)
    : psi(std::move(psi_in)), phi(std::move(phi_in)) {
  if (psi.rows() < 1 || psi.cols() < 2 || psi.rows() != phi.rows() || psi.cols() != phi.cols())
    throw std::invalid_argument("SunAmplitudes: branches must be equal M x n with n >= 2");
  for (int m = 0; m < psi.rows(); ++m) {
    if (psi.row(m).norm() == 0.0 || phi.row(m).norm() == 0.0)
      throw std::invalid_argument("SunAmplitudes: zero amplitude row");
  }
}

Eigen::VectorXcd build_su2_state(std::span<const Complex> z, int site_cap) {
  const int sites = static_cast<int>(z.size());
  check_site_cap(sites, site_cap, 2);
  const Eigen::Index dim = Eigen::Index{1} << sites;
  Eigen::VectorXcd state(dim);
  // Build by repeated doubling: after handling site m the first 2^(m+1)
  // entries hold the product state of sites 0..m.
  state[0] = 1.0;
  Eigen::Index filled = 1;
  for (int m = 0; m < sites; ++m) {
    const Complex down = std::exp(-0.5 * z[static_cast<std::size_t>(m)]);
    const Complex up = std::exp(0.5 * z[static_cast<std::size_t>(m)]);
    for (Eigen::Index k = 0; k < filled; ++k) {
      state[filled + k] = state[k] * up;
      state[k] *= down;
    }
    filled *= 2;
  }
  return state;
}

Eigen::VectorXcd build_sun_state(const Eigen::MatrixXcd& psi, int site_cap) {
  const int sites = static_cast<int>(psi.rows());
  const int levels = static_cast<int>(psi.cols());
  if (levels < 2) throw std::invalid_argument("build_sun_state: need n >= 2 levels");
  check_site_cap(sites, site_cap, levels);
  Eigen::Index dim = 1;
  for (int m = 0; m < sites; ++m) dim *= levels;
  Eigen::VectorXcd state(dim);
  state[0] = 1.0;
  Eigen::Index filled = 1;
  for (int m = 0; m < sites; ++m) {
    for (int mu = levels - 1; mu >= 0; --mu) {
      const Complex amp = psi(m, mu);
      for (Eigen::Index k = 0; k < filled; ++k) state[mu * filled + k] = state[k] * amp;
    }
    filled *= levels;
  }
  return state;
}

Complex inner_product_su2(std::span<const Complex> za, std::span<const Complex> zb) {
  if (za.size() != zb.size() || za.empty())
    throw std::invalid_argument("inner_product_su2: branch length mismatch");
  Complex product = 1.0;
  for (std::size_t m = 0; m < za.size(); ++m)
    product *= 2.0 * std::cosh(0.5 * (zb[m] + std::conj(za[m])));
  return product;
}

Complex inner_product_sun(const Eigen::MatrixXcd& phi, const Eigen::MatrixXcd& psi) {
  if (phi.rows() != psi.rows() || phi.cols() != psi.cols())
    throw std::invalid_argument("inner_product_sun: shape mismatch");
  Complex product = 1.0;
  // Eigen's dot conjugates its first operand, which is exactly phi_m* . psi_m.
  for (int m = 0; m < phi.rows(); ++m) product *= phi.row(m).dot(psi.row(m));
  return product;
}

double kernel_trace(std::span<const double> r) { return std::exp(log_kernel_trace(r)); }

double log_kernel_trace(std::span<const double> r) {
  if (r.empty()) throw std::invalid_argument("kernel_trace: empty R");
  double sum = 0.0;
  for (double x : r) {
    if (!std::isfinite(x)) throw std::invalid_argument("kernel_trace: non-finite R");
    sum += log_2cosh(x);
  }
  return sum;
}

double sigma_z_weighted_trace(std::span<const double> r, int site) {
  if (site < 0 || site >= static_cast<int>(r.size()))
    throw std::out_of_range("sigma_z_weighted_trace: site index");
  return std::tanh(r[static_cast<std::size_t>(site)]) * kernel_trace(r);
}

namespace {

template <typename Map>
Eigen::VectorXcd apply_site_map(const Eigen::VectorXcd& state, int site, Map&& map) {
  const Eigen::Index dim = state.size();
  if (dim < 2 || (dim & (dim - 1)) != 0) throw std::invalid_argument("state dimension must be 2^M");
  const Eigen::Index bit = Eigen::Index{1} << site;
  if (bit >= dim) throw std::out_of_range("site index out of range");
  Eigen::VectorXcd out(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const bool up = (k & bit) != 0;
    out[k] = map(up, state[k], state[k ^ bit]);
  }
  return out;
}

}  // namespace

Eigen::VectorXcd apply_sigma_z(const Eigen::VectorXcd& state, int site) {
  return apply_site_map(state, site,
                        [](bool up, Complex same, Complex) { return up ? same : -same; });
}

Eigen::VectorXcd apply_sigma_plus(const Eigen::VectorXcd& state, int site) {
  return apply_site_map(state, site,
                        [](bool up, Complex, Complex other) { return up ? other : Complex{0.0}; });
}

Eigen::VectorXcd apply_sigma_minus(const Eigen::VectorXcd& state, int site) {
  return apply_site_map(state, site,
                        [](bool up, Complex, Complex other) { return up ? Complex{0.0} : other; });
}

namespace {

double relative_error(const Eigen::VectorXcd& got, const Eigen::VectorXcd& want) {
  const double scale = want.norm();
  if (scale == 0.0) return got.norm();
  return (got - want).norm() / scale;
}

}  // namespace

double verify_su2_differential_identities(std::span<const Complex> z, double step) {
  if (!(step > 0.0) || step > 0.5)
    throw std::invalid_argument("verify_su2_differential_identities: step must be in (0, 0.5]");
  const int sites = static_cast<int>(z.size());
  const Eigen::VectorXcd base = build_su2_state(z);
  std::vector<Complex> shifted(z.begin(), z.end());

  double worst = 0.0;
  for (int m = 0; m < sites; ++m) {
    shifted[static_cast<std::size_t>(m)] = z[static_cast<std::size_t>(m)] + step;
    const Eigen::VectorXcd plus = build_su2_state(shifted);
    shifted[static_cast<std::size_t>(m)] = z[static_cast<std::size_t>(m)] - step;
    const Eigen::VectorXcd minus = build_su2_state(shifted);
    shifted[static_cast<std::size_t>(m)] = z[static_cast<std::size_t>(m)];

    const Eigen::VectorXcd derivative = (plus - minus) / (2.0 * step);
    worst = std::max(worst, relative_error(derivative, 0.5 * apply_sigma_z(base, m)));

    const Complex zm = z[static_cast<std::size_t>(m)];
    const Eigen::VectorXcd raise = std::exp(-zm) * (0.5 * base + derivative);
    worst = std::max(worst, relative_error(raise, apply_sigma_plus(base, m)));
    const Eigen::VectorXcd lower = std::exp(zm) * (0.5 * base - derivative);
    worst = std::max(worst, relative_error(lower, apply_sigma_minus(base, m)));
  }
  return worst;
}

double verify_cauchy_equivalence(Complex z, double step) {
  if (!(step > 0.0) || step > 0.5)
    throw std::invalid_argument("verify_cauchy_equivalence: step must be in (0, 0.5]");
  const Complex i{0.0, 1.0};
  auto state = [](Complex w) {
    return build_su2_state(std::span<const Complex>(&w, 1));
  };
  const Eigen::VectorXcd target = 0.5 * apply_sigma_z(state(z), 0);
  const Eigen::VectorXcd d_real = (state(z + step) - state(z - step)) / (2.0 * step);
  const Eigen::VectorXcd d_imag = (state(z + i * step) - state(z - i * step)) / (2.0 * step);
  double worst = relative_error(d_real, target);
  worst = std::max(worst, relative_error(-i * d_imag, target));
  worst = std::max(worst, relative_error(d_real, -i * d_imag));
  return worst;
}

double verify_sun_identity(std::span<const Complex> psi, int mu, int nu,
                           int multiplicity, double step) {
  if (multiplicity != 1)
    throw std::invalid_argument("verify_sun_identity: only multiplicity N=1 is supported");
  const int levels = static_cast<int>(psi.size());
  if (levels < 2) throw std::invalid_argument("verify_sun_identity: need n >= 2");
  if (mu < 0 || nu < 0 || mu >= levels || nu >= levels)
    throw std::out_of_range("verify_sun_identity: generator index");
  if (!(step > 0.0) || step > 0.5)
    throw std::invalid_argument("verify_sun_identity: step must be in (0, 0.5]");

  Eigen::MatrixXcd row(1, levels);
  for (int k = 0; k < levels; ++k) row(0, k) = psi[static_cast<std::size_t>(k)];
  const Eigen::VectorXcd base = build_sun_state(row);

  // R^{mu nu} = |mu><nu| for a single multiplicity-1 site.
  Eigen::VectorXcd generator_applied = Eigen::VectorXcd::Zero(levels);
  generator_applied[mu] = base[nu];

  Eigen::MatrixXcd shifted = row;
  shifted(0, mu) = row(0, mu) + step;
  const Eigen::VectorXcd plus = build_sun_state(shifted);
  shifted(0, mu) = row(0, mu) - step;
  const Eigen::VectorXcd minus = build_sun_state(shifted);
  const Eigen::VectorXcd derivative =
      psi[static_cast<std::size_t>(nu)] * (plus - minus) / (2.0 * step);

  const double scale = std::max(base.norm(), 1e-300);
  return (derivative - generator_applied).norm() / scale;
}

double verify_completeness(int levels, int points_per_angle) {
  if (levels < 2) throw std::invalid_argument("verify_completeness: need n >= 2");
  if (points_per_angle < 2) throw std::invalid_argument("verify_completeness: need K >= 2");

  const int angles = levels - 1;
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(levels, levels);
  std::vector<int> idx(static_cast<std::size_t>(angles), 0);
  Eigen::VectorXcd psi(levels);
  const double two_pi = 2.0 * std::numbers::pi;

  std::int64_t points = 1;
  for (int a = 0; a < angles; ++a) points *= points_per_angle;

  for (std::int64_t p = 0; p < points; ++p) {
    psi[0] = 1.0;  // theta_0 = 0 by convention
    for (int a = 0; a < angles; ++a) {
      const double theta = two_pi * idx[static_cast<std::size_t>(a)] / points_per_angle;
      psi[a + 1] = Complex{std::cos(theta), std::sin(theta)};
    }
    sum += psi * psi.adjoint();
    for (int a = 0; a < angles; ++a) {
      if (++idx[static_cast<std::size_t>(a)] < points_per_angle) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
  }
  sum /= static_cast<double>(points);
  return (sum - Eigen::MatrixXcd::Identity(levels, levels)).cwiseAbs().maxCoeff();
}

BellReport verify_bell_expansion() {
  // Singlet across two sites: (|0,1> - |1,0>)/sqrt(2) with site 0 the fastest
  // index. |0,1> has site 0 down, site 1 up -> index 2; |1,0> -> index 1.
  Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
  bell[2] = 1.0 / std::sqrt(2.0);
  bell[1] = -1.0 / std::sqrt(2.0);
  const Eigen::MatrixXcd rho = bell * bell.adjoint();

  Eigen::MatrixXcd psi_plus(2, 2), psi_minus(2, 2);
  psi_plus << 1.0, 0.0,  // site 0 in |0>
      0.0, 1.0;          // site 1 in |1>
  psi_minus << 0.0, 1.0, 1.0, 0.0;
  const Eigen::VectorXcd a = build_sun_state(psi_plus);
  const Eigen::VectorXcd b = build_sun_state(psi_minus);
  const Eigen::VectorXcd diff = a - b;
  const Eigen::MatrixXcd candidate = 0.5 * (diff * diff.adjoint());

  BellReport report;
  report.max_entry_error = (candidate - rho).cwiseAbs().maxCoeff();
  report.trace = rho.trace().real();

  // Partial transpose on site 1 (blocks of the 2x2 outer site swap).
  Eigen::MatrixXcd pt(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const int r0 = r & 1, r1 = r >> 1;
      const int c0 = c & 1, c1 = c >> 1;
      pt(r0 + 2 * r1, c0 + 2 * c1) = rho(r0 + 2 * c1, c0 + 2 * r1);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(pt);
  report.min_partial_transpose_eigenvalue = solver.eigenvalues().minCoeff();
  report.consistent = report.max_entry_error <= 1e-14;
  return report;
}

double q_function(const Eigen::MatrixXcd& rho, std::span<const Complex> z) {
  const int sites = static_cast<int>(z.size());
  const Eigen::Index dim = Eigen::Index{1} << sites;
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("q_function: rho dimension must be 2^M");
  const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("q_function: rho must be Hermitian");

  Eigen::VectorXcd state = build_su2_state(z);
  double log_norm2 = 0.0;  // log <z|| ||z> = sum log 2 cosh r_m
  for (const Complex& zm : z) log_norm2 += log_2cosh(zm.real());
  state *= std::exp(-0.5 * log_norm2);
  return (state.adjoint() * rho * state)(0, 0).real();
}

}  // namespace isingps::spin
