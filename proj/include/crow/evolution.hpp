#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "crow/schmidt.hpp"

namespace crow {

// Bloch-mode correlator blocks at t = 0.  Nplus/Nminus are the normal
// correlators on the positive/negative half-grids; M is the anomalous
// (+,-) block.  The normal cross block vanishes identically.
struct CorrelatorSet {
  KGrid grid;
  Eigen::MatrixXcd Nplus;   // <b+^dag b+> on k1 x k1
  Eigen::MatrixXcd Nminus;  // <b-^dag b-> on k2 x k2
  Eigen::MatrixXcd M;       // <b+ b-> on k1 x k2
  double dkD = 0.0;
  int sign = +1;            // calibrated sign of the anomalous block
};

inline CorrelatorSet normal_correlator(const SchmidtDecomposition& dec, const KGrid& grid) {
  CorrelatorSet corr;
  corr.grid = grid;
  corr.dkD = dec.dkD;
  Eigen::VectorXd s2(dec.r.size());
  for (long i = 0; i < dec.r.size(); ++i) s2[i] = std::sinh(dec.r[i]) * std::sinh(dec.r[i]);
  corr.Nplus = dec.mu.conjugate() * s2.asDiagonal() * dec.mu.transpose();
  corr.Nminus = dec.nu.conjugate() * s2.asDiagonal() * dec.nu.transpose();
  corr.M.setZero(grid.n_half, grid.n_half);
  return corr;
}

// Anomalous block with the oracle-calibrated overall sign.
inline void add_anomalous(CorrelatorSet& corr, const SchmidtDecomposition& dec, int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("add_anomalous: sign must be +1 or -1");
  Eigen::VectorXd cs(dec.r.size());
  for (long i = 0; i < dec.r.size(); ++i) cs[i] = std::cosh(dec.r[i]) * std::sinh(dec.r[i]);
  corr.M = double(sign) * (dec.mu * cs.asDiagonal() * dec.nu.transpose());
  corr.sign = sign;
}

inline CorrelatorSet anomalous_correlator(const SchmidtDecomposition& dec, const KGrid& grid,
                                          int sign) {
  CorrelatorSet corr;
  corr.grid = grid;
  corr.dkD = dec.dkD;
  corr.Nplus.setZero(grid.n_half, grid.n_half);
  corr.Nminus.setZero(grid.n_half, grid.n_half);
  add_anomalous(corr, dec, sign);
  return corr;
}

inline CorrelatorSet assemble_correlators(const SchmidtDecomposition& dec, const KGrid& grid,
                                          int sign) {
  CorrelatorSet corr = normal_correlator(dec, grid);
  add_anomalous(corr, dec, sign);
  return corr;
}

namespace detail {

// Propagated phase vector exp(i k p D - i omega_k t) on one half-grid;
// loss enters through Im(omega_k) < 0.
inline Eigen::VectorXcd phase_vector(const Eigen::VectorXd& kD, const CrowParams& params,
                                     int p, double t_tau) {
  const double t = t_tau * params.tau_unit();
  Eigen::VectorXcd v(kD.size());
  for (long i = 0; i < kD.size(); ++i) {
    const cplx w = params.omega_F * (1.0 - params.beta1 * std::cos(kD[i]));
    v[i] = std::exp(cplx(0.0, 1.0) * (kD[i] * double(p)) - cplx(0.0, 1.0) * w * t);
  }
  return v;
}

}  // namespace detail

// Average photon number in cavity p at time t (units of tau).
inline double photon_number(const CorrelatorSet& corr, const CrowParams& params, int p,
                            double t_tau) {
  if (t_tau < 0.0) throw std::domain_error("photon_number: t must be >= 0");
  const Eigen::VectorXcd v1 = detail::phase_vector(corr.grid.k1D, params, p, t_tau);
  const Eigen::VectorXcd v2 = detail::phase_vector(corr.grid.k2D, params, p, t_tau);
  const cplx total = v1.dot(corr.Nplus * v1) + v2.dot(corr.Nminus * v2);
  const double scale = corr.dkD * corr.dkD / (2.0 * kPi);
  const double n = scale * total.real();
  // roundoff in the Hermitian form scales with the total photon number, not
  // with the (possibly tiny) local value, hence the absolute floor
  if (std::abs(scale * total.imag()) > 1e-9 * std::abs(n) + 1e-12)
    throw std::runtime_error("photon_number: imaginary residue exceeds tolerance");
  return n;
}

// Pair correlator <a_p(t) a_p'(t)>; both orderings of the (+,-) halves
// contribute, the second as the transpose term.
inline cplx pair_correlator(const CorrelatorSet& corr, const CrowParams& params, int p,
                            int p_prime, double t_tau) {
  if (t_tau < 0.0) throw std::domain_error("pair_correlator: t must be >= 0");
  const Eigen::VectorXcd u1p = detail::phase_vector(corr.grid.k1D, params, p, t_tau);
  const Eigen::VectorXcd u1q = detail::phase_vector(corr.grid.k1D, params, p_prime, t_tau);
  const Eigen::VectorXcd u2p = detail::phase_vector(corr.grid.k2D, params, p, t_tau);
  const Eigen::VectorXcd u2q = detail::phase_vector(corr.grid.k2D, params, p_prime, t_tau);
  const double scale = corr.dkD * corr.dkD / (2.0 * kPi);
  return scale * (u1p.transpose() * corr.M * u2q + u1q.transpose() * corr.M * u2p).value();
}

// Normal cross-cavity correlator <a_p^dag(t) a_p'(t)>.
inline cplx normal_cross(const CorrelatorSet& corr, const CrowParams& params, int p, int p_prime,
                         double t_tau) {
  const Eigen::VectorXcd v1p = detail::phase_vector(corr.grid.k1D, params, p, t_tau);
  const Eigen::VectorXcd v1q = detail::phase_vector(corr.grid.k1D, params, p_prime, t_tau);
  const Eigen::VectorXcd v2p = detail::phase_vector(corr.grid.k2D, params, p, t_tau);
  const Eigen::VectorXcd v2q = detail::phase_vector(corr.grid.k2D, params, p_prime, t_tau);
  const double scale = corr.dkD * corr.dkD / (2.0 * kPi);
  return scale * (v1p.dot(corr.Nplus * v1q) + v2p.dot(corr.Nminus * v2q));
}

// Duan correlation variance at quadrature phase theta; entangled when < 4.
inline double correlation_variance(const CorrelatorSet& corr, const CrowParams& params, int p,
                                   int p_prime, double t_tau, double theta = 0.0) {
  const double n_p = photon_number(corr, params, p, t_tau);
  const double n_q = photon_number(corr, params, p_prime, t_tau);
  const cplx a = pair_correlator(corr, params, p, p_prime, t_tau);
  return 4.0 + 4.0 * (n_p + n_q - 2.0 * std::real(std::exp(cplx(0.0, theta)) * a));
}

// Minimum of the correlation variance over the fast optical phase.
inline double variance_envelope(const CorrelatorSet& corr, const CrowParams& params, int p,
                                int p_prime, double t_tau) {
  const double n_p = photon_number(corr, params, p, t_tau);
  const double n_q = photon_number(corr, params, p_prime, t_tau);
  const cplx a = pair_correlator(corr, params, p, p_prime, t_tau);
  return 4.0 + 4.0 * (n_p + n_q - 2.0 * std::abs(a));
}

struct SeriesMeta {
  int p = 0;
  int p_prime = 0;
  double k0D = 0.0;
  double sigma_plus_D = 0.0;
  double sigma_minus_D = 0.0;
  double beta = 0.0;
};

struct TimeSeries {
  Eigen::VectorXd t;       // samples in units of tau, strictly increasing
  Eigen::VectorXd values;  // n_p, Delta^2, or envelope
  SeriesMeta meta;
};

namespace detail {

inline Eigen::VectorXd time_axis(double t_max_tau, int n_steps) {
  if (n_steps < 2 || !(t_max_tau > 0.0))
    throw std::invalid_argument("time series: need n_steps >= 2 and t_max > 0");
  Eigen::VectorXd t(n_steps);
  for (int i = 0; i < n_steps; ++i) t[i] = t_max_tau * double(i) / double(n_steps - 1);
  return t;
}

}  // namespace detail

inline TimeSeries photon_series(const CorrelatorSet& corr, const CrowParams& params, int p,
                                double t_max_tau, int n_steps) {
  TimeSeries s;
  s.t = detail::time_axis(t_max_tau, n_steps);
  s.values.resize(n_steps);
  for (int i = 0; i < n_steps; ++i) s.values[i] = photon_number(corr, params, p, s.t[i]);
  s.meta.p = p;
  return s;
}

inline TimeSeries envelope_series(const CorrelatorSet& corr, const CrowParams& params, int p,
                                  int p_prime, double t_max_tau, int n_steps) {
  TimeSeries s;
  s.t = detail::time_axis(t_max_tau, n_steps);
  s.values.resize(n_steps);
  for (int i = 0; i < n_steps; ++i)
    s.values[i] = variance_envelope(corr, params, p, p_prime, s.t[i]);
  s.meta.p = p;
  s.meta.p_prime = p_prime;
  return s;
}

inline TimeSeries variance_series(const CorrelatorSet& corr, const CrowParams& params, int p,
                                  int p_prime, double t_max_tau, int n_steps,
                                  double theta = 0.0) {
  TimeSeries s;
  s.t = detail::time_axis(t_max_tau, n_steps);
  s.values.resize(n_steps);
  for (int i = 0; i < n_steps; ++i)
    s.values[i] = correlation_variance(corr, params, p, p_prime, s.t[i], theta);
  s.meta.p = p;
  s.meta.p_prime = p_prime;
  return s;
}

struct EntanglementMetrics {
  double n_max = 0.0;    // peak photon number
  double fwhm_tau = 0.0; // FWHM of n_p(t), units of tau
  double dev = 0.0;      // 4 - min envelope
  double t_peak = 0.0;   // arrival time of the peak, units of tau
};

// Peak height, interpolated FWHM and envelope deviation from the
// inseparability threshold.  The peak position is refined by a parabolic fit
// through the three samples around the maximum.
inline EntanglementMetrics metrics(const TimeSeries& n_series, const TimeSeries& env_series) {
  const Eigen::VectorXd& t = n_series.t;
  const Eigen::VectorXd& y = n_series.values;
  if (t.size() < 3) throw std::invalid_argument("metrics: series too short");
  long imax = 0;
  const double n_max = y.maxCoeff(&imax);
  if (n_max <= y.minCoeff() + 1e-15)
    throw std::runtime_error("metrics: flat series, no peak");

  EntanglementMetrics m;
  m.n_max = n_max;
  m.t_peak = t[imax];
  if (imax > 0 && imax + 1 < t.size()) {
    const double a = y[imax - 1], b = y[imax], c = y[imax + 1];
    const double den = a - 2.0 * b + c;
    if (std::abs(den) > 1e-300) {
      const double off = 0.5 * (a - c) / den;
      m.t_peak = t[imax] + off * (t[1] - t[0]);
    }
  }

  const double half = n_max / 2.0;
  long lo = imax, hi = imax;
  while (lo > 0 && y[lo - 1] >= half) --lo;
  while (hi + 1 < t.size() && y[hi + 1] >= half) ++hi;
  auto cross = [&](long a, long b) {
    return t[a] + (half - y[a]) * (t[b] - t[a]) / (y[b] - y[a]);
  };
  const double t_lo = lo > 0 ? cross(lo - 1, lo) : t[0];
  const double t_hi = hi + 1 < t.size() ? cross(hi + 1, hi) : t[t.size() - 1];
  m.fwhm_tau = t_hi - t_lo;
  m.dev = 4.0 - env_series.values.minCoeff();
  return m;
}

// Pumping configurations of the summary table: sigma widths in units of 1/D.
struct SweepConfig {
  std::string name;
  double sigma_plus_D;
  double sigma_minus_D;
};

inline std::vector<SweepConfig> standard_configs() {
  return {{"A", 0.28, 0.28}, {"B", 0.14, 0.28}, {"C", 0.28, 0.14}};
}

struct SweepOptions {
  int n_half = 512;
  double t_max_tau = 100.0;
  int n_steps = 2048;
  double beta = 2.2;
  double trunc_tol = 1e-12;
  int p = 40;
  int p_prime = -40;
};

struct SweepRow {
  std::string config;
  double k0D = 0.0;
  EntanglementMetrics metrics;
};

inline std::vector<SweepRow> table_sweep(const CrowParams& params,
                                         const std::vector<SweepConfig>& configs,
                                         const std::vector<double>& k0D_list, int sign,
                                         const SweepOptions& opt) {
  params.validate();
  const KGrid grid = build_grid(opt.n_half);
  std::vector<SweepRow> rows;
  for (double k0D : k0D_list) {
    for (const SweepConfig& cfg : configs) {
      PumpConfig pump;
      pump.k0D = k0D;
      pump.sigma_plus_D = cfg.sigma_plus_D;
      pump.sigma_minus_D = cfg.sigma_minus_D;
      pump.beta_squeeze = opt.beta;
      const BiphotonMatrix phi = biphoton_full(grid, params, pump);
      const SchmidtDecomposition dec = schmidt_decompose(phi, opt.beta, opt.trunc_tol);
      const CorrelatorSet corr = assemble_correlators(dec, grid, sign);
      const TimeSeries n = photon_series(corr, params, opt.p, opt.t_max_tau, opt.n_steps);
      const TimeSeries env =
          envelope_series(corr, params, opt.p, opt.p_prime, opt.t_max_tau, opt.n_steps);
      rows.push_back({cfg.name, k0D, metrics(n, env)});
    }
  }
  return rows;
}

}  // namespace crow
