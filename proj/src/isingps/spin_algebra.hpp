#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace isingps::spin {

using Complex = std::complex<double>;

// Dense state cap for the verification operations: 2^20 amplitudes.
inline constexpr int kDenseSiteCap = 20;

// Phase-space coordinates of an off-diagonal kernel: per-site z on the ket
// branch and z' on the bra branch. R_i = (conj(z_i) + z'_i)/2 drives every
// trace formula.
struct CoherentAmplitudes {
  std::vector<Complex> z;
  std::vector<Complex> z_prime;

  CoherentAmplitudes(std::vector<Complex> z_in, std::vector<Complex> z_prime_in);
  int sites() const { return static_cast<int>(z.size()); }
  std::vector<double> r() const;  // real part of (z* + z')/2
};

// Per-site SU(n) amplitudes, one row per site, n columns; psi is the ket
// branch, phi the bra branch. Multiplicity is fixed to 1 (qubit-type rows).
struct SunAmplitudes {
  Eigen::MatrixXcd psi;
  Eigen::MatrixXcd phi;

  SunAmplitudes(Eigen::MatrixXcd psi_in, Eigen::MatrixXcd phi_in);
  int sites() const { return static_cast<int>(psi.rows()); }
  int levels() const { return static_cast<int>(psi.cols()); }
};

// Dense product state  prod_m (e^{-z_m/2} |0>_m + e^{+z_m/2} |1>_m).
// Amplitude ordering: index k encodes site m's level in bit m, site 0 is the
// fastest-varying (k=0 is |0...0>). Throws CapacityError beyond `site_cap`.
Eigen::VectorXcd build_su2_state(std::span<const Complex> z, int site_cap = kDenseSiteCap);

// Same ordering for n levels per site: digit m of k (base n) is site m's level.
Eigen::VectorXcd build_sun_state(const Eigen::MatrixXcd& psi, int site_cap = kDenseSiteCap);

// <za|| ||zb> = 2^M prod_m cosh((zb_m + conj(za_m))/2).
Complex inner_product_su2(std::span<const Complex> za, std::span<const Complex> zb);

// prod_m (phi_m* . psi_m) for multiplicity 1.
Complex inner_product_sun(const Eigen::MatrixXcd& phi, const Eigen::MatrixXcd& psi);

// Kernel trace Lambda(R) = prod_m 2 cosh(R_m). The linear form is defined only
// where it is representable; the log form is the canonical internal one.
double kernel_trace(std::span<const double> r);
double log_kernel_trace(std::span<const double> r);

// Tr(sigma_i^z Lambda_z(R)) = tanh(R_i) * prod_m 2 cosh(R_m).
double sigma_z_weighted_trace(std::span<const double> r, int site);

// Pauli actions on dense states in the ordering above (site-local).
Eigen::VectorXcd apply_sigma_z(const Eigen::VectorXcd& state, int site);
Eigen::VectorXcd apply_sigma_plus(const Eigen::VectorXcd& state, int site);
Eigen::VectorXcd apply_sigma_minus(const Eigen::VectorXcd& state, int site);

// Central finite-difference checks of the ladder identities
//   d/dz_m ||z> = (1/2) sigma_m^z ||z>
//   e^{-+z_m} [1/2 +- d/dz_m] ||z> = sigma_m^{+-} ||z>
// Returns the worst relative error over sites and identities. The default
// step keeps the truncation error near 1e-12; steps up to ~0.5 are accepted
// so the O(h^2) scaling itself can be probed.
double verify_su2_differential_identities(std::span<const Complex> z, double step = 1e-5);

// Checks d/dz = d/dr = -i d/dphi on ||z> by differencing along the real and
// imaginary axes; returns the worst relative error against (1/2) sigma^z ||z>.
double verify_cauchy_equivalence(Complex z, double step = 1e-5);

// Checks R^{mu nu} ||psi> = psi^nu d/dpsi^mu ||psi> for a single site with n
// levels by finite difference. Multiplicity != 1 is unsupported.
double verify_sun_identity(std::span<const Complex> psi, int mu, int nu,
                           int multiplicity = 1, double step = 1e-5);

// Quadrature of the (n-1)-fold phase resolution of the identity with K points
// per angle; returns max |result - I|.
double verify_completeness(int levels, int points_per_angle);

struct BellReport {
  double max_entry_error = 0.0;              // candidate expansion vs projector
  double trace = 0.0;                        // of the Bell density matrix
  double min_partial_transpose_eigenvalue = 0.0;
  bool consistent = false;                   // entry error <= 1e-14
};

// Expands the singlet Bell projector over the two product states that the
// off-diagonal kernel basis provides and compares entrywise.
BellReport verify_bell_expansion();

// Husimi-style Q(z) = <z| rho |z> with normalized coherent states. Requires a
// Hermitian rho of dimension 2^M.
double q_function(const Eigen::MatrixXcd& rho, std::span<const Complex> z);

}  // namespace isingps::spin
