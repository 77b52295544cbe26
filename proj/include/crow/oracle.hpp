#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "crow/evolution.hpp"

namespace crow::oracle {

// Truncated Fock-space two-mode squeezed vacuum over the pair basis |n,n>.
struct FockTmsv {
  double r = 0.0;
  int n_max = 0;
  Eigen::VectorXd c;  // amplitudes c_n
};

namespace detail {

// exp(G) by scaling and squaring with a truncated Taylor series; G here is
// small (<= ~100 x 100) and antisymmetric.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& G) {
  const double norm = G.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  const Eigen::MatrixXd A = G * scale;
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(G.rows(), G.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 20; ++k) {
    term = (term * A) / double(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace detail

// Builds the state by exponentiating the generator r (B^dag C^dag - B C)
// restricted to the pair-number ladder.
inline FockTmsv fock_build(double r, int n_max) {
  if (n_max < 10) throw std::invalid_argument("fock_build: n_max must be >= 10");
  if (r < 0.0) throw std::invalid_argument("fock_build: r must be >= 0");
  const int dim = n_max + 1;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n < n_max; ++n) {
    G(n + 1, n) = r * double(n + 1);  // B^dag C^dag |n,n> = (n+1)|n+1,n+1>
    G(n, n + 1) = -r * double(n + 1); // B C |n+1,n+1> = (n+1)|n,n>
  }
  FockTmsv state;
  state.r = r;
  state.n_max = n_max;
  state.c = detail::expm(G).col(0);
  const double leak = state.c[n_max] * state.c[n_max];
  if (leak > 1e-8)
    throw std::runtime_error("fock_build: truncation leakage exceeds 1e-8; raise n_max");
  return state;
}

struct FockExpectations {
  double n_B = 0.0;
  double n_C = 0.0;
  cplx BC{0.0, 0.0};
  double duan_min = 0.0;  // Duan sum minimized over quadrature phase
};

inline FockExpectations fock_expectations(const FockTmsv& state) {
  FockExpectations e;
  double bc = 0.0;
  for (int n = 0; n <= state.n_max; ++n) {
    e.n_B += double(n) * state.c[n] * state.c[n];
    if (n > 0) bc += state.c[n - 1] * double(n) * state.c[n];
  }
  e.n_C = e.n_B;  // pair creation keeps both modes equal
  e.BC = bc;
  e.duan_min = 4.0 + 4.0 * (e.n_B + e.n_C - 2.0 * std::abs(e.BC));
  return e;
}

// Overall sign of the anomalous correlator, fixed so the single-mode Duan
// variance reaches 4 exp(-2r).  The squeeze generator's Bogoliubov sign is a
// convention trap; the Fock build settles it operationally.
inline int calibrate_anomalous_sign() {
  const FockExpectations e = fock_expectations(fock_build(0.5, 40));
  return e.BC.real() >= 0.0 ? +1 : -1;
}

// Relative error of the analytic group velocity against a centered finite
// difference of Re(omega_k); absolute error where v_g vanishes.
inline double vg_fd_check(const CrowParams& params, double kD, double hD) {
  if (!(hD > 0.0)) throw std::invalid_argument("vg_fd_check: h must be positive");
  const double fd = 4.0 * kPi *
                    (std::real(complex_frequency(params, kD + hD)) -
                     std::real(complex_frequency(params, kD - hD))) /
                    (2.0 * hD);
  const double vg = group_velocity(params, kD);
  const double err = std::abs(fd - vg);
  if (std::abs(vg) < 1e-12) return err;
  return err / std::abs(vg);
}

// Literal Duan-criterion evaluation through the 4x4 covariance matrix of
// (X_p, Y_p, X_p', Y_p'), assembled from all ten second moments.  Must agree
// with the reduced correlation_variance expression to roundoff.
inline double covariance_route_delta2(const CorrelatorSet& corr, const CrowParams& params, int p,
                                      int p_prime, double t_tau) {
  const double n_p = photon_number(corr, params, p, t_tau);
  const double n_q = photon_number(corr, params, p_prime, t_tau);
  const cplx a_pq = pair_correlator(corr, params, p, p_prime, t_tau);
  const cplx a_pp = pair_correlator(corr, params, p, p, t_tau);
  const cplx a_qq = pair_correlator(corr, params, p_prime, p_prime, t_tau);
  const cplx n_pq = normal_cross(corr, params, p, p_prime, t_tau);

  Eigen::Matrix4d V;  // symmetrized second moments, order (X_p, Y_p, X_q, Y_q)
  V(0, 0) = 1.0 + 2.0 * n_p + 2.0 * a_pp.real();
  V(1, 1) = 1.0 + 2.0 * n_p - 2.0 * a_pp.real();
  V(0, 1) = V(1, 0) = 2.0 * a_pp.imag();
  V(2, 2) = 1.0 + 2.0 * n_q + 2.0 * a_qq.real();
  V(3, 3) = 1.0 + 2.0 * n_q - 2.0 * a_qq.real();
  V(2, 3) = V(3, 2) = 2.0 * a_qq.imag();
  V(0, 2) = V(2, 0) = 2.0 * a_pq.real() + 2.0 * n_pq.real();
  V(1, 3) = V(3, 1) = -2.0 * a_pq.real() + 2.0 * n_pq.real();
  V(0, 3) = V(3, 0) = 2.0 * a_pq.imag() + 2.0 * n_pq.imag();
  V(1, 2) = V(2, 1) = 2.0 * a_pq.imag() - 2.0 * n_pq.imag();

  // <(X_p - X_q)^2> + <(Y_p + Y_q)^2>
  return V(0, 0) + V(2, 2) - 2.0 * V(0, 2) + V(1, 1) + V(3, 3) + 2.0 * V(1, 3);
}

}  // namespace crow::oracle
