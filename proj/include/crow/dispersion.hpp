#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace crow {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

// Tight-binding parameters of the coupled-cavity chain.
//
// Frequencies are stored dimensionless in units of 4*pi*c/D; `period` (meters)
// enters only when converting to SI quantities.  The imaginary parts encode
// the intrinsic out-of-plane loss of the cavity mode and of the coupling.
struct CrowParams {
  cplx omega_F{0.305, -7.71e-6};
  cplx beta1{9.87e-3, -1.97e-5};
  double period = 0.9e-6;  // meters
  // Time unit tau expressed in units of 1/(4*pi*c/D).  Zero selects the
  // default one-cavity transit time 1/(Re beta1 * Re omega_F).
  double tau = 0.0;

  void validate() const {
    if (!(omega_F.real() > 0.0))
      throw std::invalid_argument("CrowParams: Re(omega_F) must be positive");
    if (omega_F.imag() > 0.0)
      throw std::invalid_argument("CrowParams: Im(omega_F) must be <= 0 (no gain)");
    if (!(std::abs(beta1) < 0.1))
      throw std::invalid_argument("CrowParams: |beta1| must be < 0.1 (weak coupling)");
    if (!(period > 0.0))
      throw std::invalid_argument("CrowParams: period must be positive");
    if (tau < 0.0)
      throw std::invalid_argument("CrowParams: tau must be nonnegative");
  }

  double tau_unit() const {
    return tau > 0.0 ? tau : 1.0 / (beta1.real() * omega_F.real());
  }
};

// Complex Bloch-mode frequency omega_F * (1 - beta1 * cos(kD)), in units of
// 4*pi*c/D.  `kD` is the Bloch vector times the period, restricted to the
// first Brillouin zone.
inline cplx complex_frequency(const CrowParams& params, double kD) {
  if (std::abs(kD) > kPi * (1.0 + 1e-12))
    throw std::domain_error("complex_frequency: kD outside the first Brillouin zone");
  return params.omega_F * (1.0 - params.beta1 * std::cos(kD));
}

// Loss rate gamma_Fk = -Im(omega_Fk) >= 0 for physical parameters.
inline double loss_rate(const CrowParams& params, double kD) {
  return -complex_frequency(params, kD).imag();
}

// Q_k = omega_Fk / (2 gamma_Fk); infinity for a lossless mode.
inline double quality_factor(const CrowParams& params, double kD) {
  const cplx w = complex_frequency(params, kD);
  const double gamma = -w.imag();
  if (gamma <= 0.0) return std::numeric_limits<double>::infinity();
  return w.real() / (2.0 * gamma);
}

// Group velocity d(Re omega_Fk)/dk in units of c.
inline double group_velocity(const CrowParams& params, double kD) {
  if (std::abs(kD) > kPi * (1.0 + 1e-12))
    throw std::domain_error("group_velocity: kD outside the first Brillouin zone");
  return 4.0 * kPi * std::real(params.omega_F * params.beta1) * std::sin(kD);
}

// Inverts omega_P = 2 omega_F (1 - beta1 cos(k0 D)) for k0; real parts only.
// `omega_P` in units of 4*pi*c/D; returns k0*D in (0, pi).
inline double k0_from_pump(const CrowParams& params, double omega_P) {
  const double wR = params.omega_F.real();
  const double bR = params.beta1.real();
  const double arg = (2.0 * wR - omega_P) / (2.0 * bR * wR);
  if (std::abs(arg) > 1.0)
    throw std::domain_error("k0_from_pump: omega_P/2 lies outside the CROW band");
  return std::acos(arg);
}

}  // namespace crow
