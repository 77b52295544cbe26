#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "crow/dispersion.hpp"

namespace crow {

inline constexpr double kSpeedOfLight = 2.99792458e8;       // m/s
inline constexpr double kHbar = 1.054571817e-34;            // J s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m

// SI inputs for the pump-photon and pulse-energy estimates.
struct PhysicalPump {
  double lambda_P;  // pump vacuum wavelength, meters
  double chi2;      // bulk second-order susceptibility, m/V
  double n_index;   // refractive index at the generated frequency
};

struct PumpConfig {
  double k0D = kPi / 2.0;      // pump-selected Bloch vector times D
  double sigma_plus_D = 0.28;  // dimensionless anti-diagonal width
  double sigma_minus_D = 0.28; // dimensionless diagonal width
  double beta_squeeze = 2.2;   // global squeeze normalization
  std::optional<PhysicalPump> physical;

  void validate() const {
    if (!(sigma_plus_D > 0.0))
      throw std::invalid_argument("PumpConfig: sigma_plus_D must be positive");
    if (!(sigma_minus_D > 0.0))
      throw std::invalid_argument("PumpConfig: sigma_minus_D must be positive");
    if (!(beta_squeeze > 0.0))
      throw std::invalid_argument("PumpConfig: beta_squeeze must be positive");
    if (!(k0D > 0.0 && k0D < kPi))
      throw std::invalid_argument("PumpConfig: k0*D must lie in (0, pi)");
  }

  // Width of the Gaussian in (k1 + k2), times D.
  double e_plus_D() const { return sigma_plus_D; }
  // Width of the Gaussian in the cosine sum (dimensionless).
  double e_minus() const { return sigma_minus_D * std::sin(k0D); }
};

// Midpoint discretization of the two Brillouin-zone halves.  k1 samples
// (0, pi/D], k2 samples [-pi/D, 0); neither half touches k = 0 or the zone
// edge, so the counterpropagating restriction is structural.
struct KGrid {
  int n_half = 0;
  double dkD = 0.0;
  Eigen::VectorXd k1D;  // positive half, ascending
  Eigen::VectorXd k2D;  // negative half, descending from -dkD/2
};

inline KGrid build_grid(int n_half) {
  if (n_half < 2)
    throw std::invalid_argument("build_grid: n_half must be >= 2");
  KGrid g;
  g.n_half = n_half;
  g.dkD = kPi / n_half;
  g.k1D.resize(n_half);
  g.k2D.resize(n_half);
  for (int i = 0; i < n_half; ++i) {
    g.k1D[i] = (i + 0.5) * g.dkD;
    g.k2D[i] = -(i + 0.5) * g.dkD;
  }
  return g;
}

// Discretized biphoton amplitude Phi(k1, k2) on the half-grids, stored
// unit-normalized: sum |values|^2 dk^2 = 1.  The physical amplitude scale
// lives in q0_raw and the squeeze normalization beta.
struct BiphotonMatrix {
  KGrid grid;
  Eigen::MatrixXcd values;  // [i over k1][j over k2]
  cplx q0_raw{0.0, 0.0};
};

// Unnormalized amplitude with the full cosine phase-matching factor.
inline double biphoton_amplitude_full(double k1D, double k2D, const PumpConfig& pump) {
  const double ep = pump.e_plus_D();
  const double em = pump.e_minus();
  const double s = k1D + k2D;
  const double c = std::cos(k1D) + std::cos(k2D) - 2.0 * std::cos(pump.k0D);
  return std::exp(-s * s / (2.0 * ep * ep)) * std::exp(-c * c / (2.0 * em * em));
}

// Unnormalized amplitude with each cosine expanded to first order about its
// own sign of k0: +k0 for k1, -k0 for k2.
inline double biphoton_amplitude_linearized(double k1D, double k2D, const PumpConfig& pump) {
  const double ep = pump.e_plus_D();
  const double em = pump.e_minus();
  const double ck0 = std::cos(pump.k0D);
  const double sk0 = std::sin(pump.k0D);
  const double c1 = ck0 - (k1D - pump.k0D) * sk0;
  const double c2 = ck0 + (k2D + pump.k0D) * sk0;
  const double s = k1D + k2D;
  const double c = c1 + c2 - 2.0 * ck0;
  return std::exp(-s * s / (2.0 * ep * ep)) * std::exp(-c * c / (2.0 * em * em));
}

namespace detail {

template <typename Amplitude>
BiphotonMatrix build_biphoton(const KGrid& grid, const CrowParams& params,
                              const PumpConfig& pump, Amplitude&& amp) {
  params.validate();
  pump.validate();
  if (grid.n_half < 2)
    throw std::invalid_argument("biphoton: invalid grid");
  BiphotonMatrix phi;
  phi.grid = grid;
  phi.values.resize(grid.n_half, grid.n_half);
  for (int i = 0; i < grid.n_half; ++i)
    for (int j = 0; j < grid.n_half; ++j)
      phi.values(i, j) = amp(grid.k1D[i], grid.k2D[j], pump);
  const double norm2 = phi.values.squaredNorm() * grid.dkD * grid.dkD;
  phi.values /= std::sqrt(norm2);
  phi.q0_raw = std::sqrt(2.0 / (kPi * pump.sigma_minus_D * pump.sigma_plus_D));
  return phi;
}

}  // namespace detail

inline BiphotonMatrix biphoton_full(const KGrid& grid, const CrowParams& params,
                                    const PumpConfig& pump) {
  return detail::build_biphoton(grid, params, pump,
      [](double a, double b, const PumpConfig& p) { return biphoton_amplitude_full(a, b, p); });
}

inline BiphotonMatrix biphoton_linearized(const KGrid& grid, const CrowParams& params,
                                          const PumpConfig& pump) {
  return detail::build_biphoton(grid, params, pump,
      [](double a, double b, const PumpConfig& p) { return biphoton_amplitude_linearized(a, b, p); });
}

// SI frequency scale.  With a physical pump present the period is derived
// from the pump wavelength so that omega_P sits exactly on 2 omega_Fk0;
// otherwise CrowParams::period is taken as given.
struct SiScale {
  double D;     // meters
  double unit;  // 4*pi*c/D, rad/s
};

inline SiScale si_scale(const CrowParams& params, const PumpConfig& pump) {
  if (pump.physical) {
    const double omega_P = 2.0 * kPi * kSpeedOfLight / pump.physical->lambda_P;
    const double band = std::real(complex_frequency(params, pump.k0D));
    const double unit = omega_P / (2.0 * band);
    return {4.0 * kPi * kSpeedOfLight / unit, unit};
  }
  return {params.period, 4.0 * kPi * kSpeedOfLight / params.period};
}

struct PumpWidths {
  double W_S;  // spatial width parameter, meters
  double W_T;  // temporal width parameter, seconds
};

inline PumpWidths widths_from_sigma(const CrowParams& params, const PumpConfig& pump) {
  pump.validate();
  const double sk0 = std::sin(pump.k0D);
  if (!(sk0 > 1e-12))
    throw std::domain_error("widths_from_sigma: sin(k0 D) vanishes at the band edge");
  const SiScale si = si_scale(params, pump);
  const double omega_F = params.omega_F.real() * si.unit;
  const double beta1 = params.beta1.real();
  PumpWidths w;
  w.W_S = std::sqrt(2.0) * si.D / pump.sigma_plus_D;
  w.W_T = std::sqrt(2.0) / (beta1 * omega_F * pump.e_minus());
  return w;
}

struct PumpPhotonEstimate {
  double alpha_sq;      // mean pump photon number
  double pulse_energy;  // joules
};

// Inverts the pump-amplitude relation for |alpha|^2 given the unit-normalized
// biphoton convention |Q0| = sqrt(2/(pi sigma- sigma+)).
inline PumpPhotonEstimate pump_photon_number(const CrowParams& params, const PumpConfig& pump) {
  if (!pump.physical)
    throw std::invalid_argument("pump_photon_number: physical pump record required");
  pump.validate();
  const SiScale si = si_scale(params, pump);
  const double omega_F = params.omega_F.real() * si.unit;
  const double omega_P = 2.0 * std::real(complex_frequency(params, pump.k0D)) * si.unit;
  const double chi2_eff = pump.physical->chi2 / (pump.physical->n_index * pump.physical->n_index);
  const double sigma_p = pump.sigma_plus_D / si.D;
  const double sigma_m = pump.sigma_minus_D / si.D;
  const double q0_sq = 2.0 / (kPi * sigma_m * sigma_p);
  const double w_t_len = kSpeedOfLight * widths_from_sigma(params, pump).W_T;
  const double beta = pump.beta_squeeze;
  const double num = q0_sq * beta * beta * kSpeedOfLight * kSpeedOfLight *
                     kVacuumPermittivity * std::pow(2.0 * kPi, 1.5);
  const double den = chi2_eff * chi2_eff * kHbar * omega_F * omega_F * omega_P * w_t_len;
  PumpPhotonEstimate est;
  est.alpha_sq = num / den;
  est.pulse_energy = est.alpha_sq * kHbar * omega_P;
  return est;
}

}  // namespace crow
