#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crow/evolution.hpp"
#include "crow/oracle.hpp"

using namespace crow;

namespace {

struct System {
  CrowParams params;
  KGrid grid;
  SchmidtDecomposition dec;
  CorrelatorSet corr;
};

System make_system(double k0_over_pi = 0.5, double sigma_plus_D = 0.28,
                   double sigma_minus_D = 0.28, int n_half = 96, double beta = 2.2,
                   bool lossless = false) {
  System s;
  if (lossless) {
    s.params.omega_F = cplx(0.305, 0.0);
    s.params.beta1 = cplx(9.87e-3, 0.0);
  }
  s.grid = build_grid(n_half);
  PumpConfig pump;
  pump.k0D = k0_over_pi * kPi;
  pump.sigma_plus_D = sigma_plus_D;
  pump.sigma_minus_D = sigma_minus_D;
  pump.beta_squeeze = beta;
  const BiphotonMatrix phi = biphoton_full(s.grid, s.params, pump);
  s.dec = schmidt_decompose(phi, beta);
  s.corr = assemble_correlators(s.dec, s.grid, oracle::calibrate_anomalous_sign());
  return s;
}

double total_sinh2(const SchmidtDecomposition& dec) {
  double total = 0.0;
  for (long i = 0; i < dec.r.size(); ++i) total += std::sinh(dec.r[i]) * std::sinh(dec.r[i]);
  return total;
}

// Summing one full periodization cell of the discrete transform captures the
// photon total exactly.
double total_photons(const System& s, double t_tau) {
  double total = 0.0;
  for (int p = -s.grid.n_half; p < s.grid.n_half; ++p)
    total += photon_number(s.corr, s.params, p, t_tau);
  return total;
}

}  // namespace

TEST_CASE("vacuum input gives zero correlators and Duan variance 4") {
  const System s = make_system(0.5, 0.28, 0.28, 48, 1e-300);
  CHECK(s.corr.Nplus.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(s.corr.M.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(correlation_variance(s.corr, s.params, 3, -3, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(std::abs(pair_correlator(s.corr, s.params, 3, -3, 1.0)) < 1e-14);
}

TEST_CASE("normal correlator blocks are conjugate-symmetric with equal traces") {
  const System s = make_system();
  CHECK((s.corr.Nplus - s.corr.Nplus.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s.corr.Nminus - s.corr.Nminus.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  const double expected = total_sinh2(s.dec);
  CHECK(s.corr.Nplus.trace().real() * s.grid.dkD == doctest::Approx(expected).epsilon(1e-8));
  CHECK(s.corr.Nminus.trace().real() * s.grid.dkD == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("anomalous block magnitude follows cosh sinh") {
  // Single-mode decomposition concentrated in one cell per half-zone.
  const KGrid grid = build_grid(4);
  SchmidtDecomposition dec;
  dec.dkD = grid.dkD;
  dec.beta = 1.0;
  dec.p = Eigen::VectorXd::Ones(1);
  dec.r = Eigen::VectorXd::Constant(1, 0.5);
  dec.mu = Eigen::MatrixXcd::Zero(4, 1);
  dec.nu = Eigen::MatrixXcd::Zero(4, 1);
  dec.mu(1, 0) = 1.0 / std::sqrt(grid.dkD);
  dec.nu(2, 0) = 1.0 / std::sqrt(grid.dkD);
  const CorrelatorSet corr = assemble_correlators(dec, grid, +1);
  CHECK(std::abs(corr.M(1, 2)) * grid.dkD ==
        doctest::Approx(std::cosh(0.5) * std::sinh(0.5)).epsilon(1e-12));
  CHECK(std::abs(corr.M(0, 0)) < 1e-15);
}

TEST_CASE("anomalous block mirrors the exchange symmetry of phi") {
  const System s = make_system(0.61, 0.22, 0.31, 64);
  // Phi(k1,k2) = Phi(-k2,-k1) maps to M being symmetric under the same
  // half-grid index exchange.
  CHECK((s.corr.M - s.corr.M.transpose()).cwiseAbs().maxCoeff() /
            s.corr.M.cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("photon total at t = 0 equals twice the squeezed-mode total") {
  const System s = make_system();
  CHECK(total_photons(s, 0.0) ==
        doctest::Approx(2.0 * total_sinh2(s.dec)).epsilon(1e-3));
}

TEST_CASE("lossless evolution conserves the photon total") {
  const System s = make_system(0.5, 0.28, 0.28, 96, 2.2, /*lossless=*/true);
  const double expected = 2.0 * total_sinh2(s.dec);
  for (double t : {0.0, 8.0, 16.0}) {
    CHECK(total_photons(s, t) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("lossy evolution monotonically drains the photon total") {
  const System s = make_system();
  double prev = total_photons(s, 0.0);
  for (double t : {5.0, 15.0, 30.0}) {
    const double now = total_photons(s, t);
    CHECK(now < prev);
    prev = now;
  }
}

TEST_CASE("mirror symmetry of the cavity photon number") {
  const System s = make_system();
  for (double t : {0.0, 7.0, 19.0}) {
    for (int p : {5, 12, 25}) {
      const double a = photon_number(s.corr, s.params, p, t);
      const double b = photon_number(s.corr, s.params, -p, t);
      CHECK(std::abs(a - b) <= 1e-8 * std::max(a, 1e-12));
    }
  }
}

TEST_CASE("photon numbers stay nonnegative") {
  const System s = make_system();
  const TimeSeries n = photon_series(s.corr, s.params, 20, 60.0, 257);
  CHECK(n.values.minCoeff() >= -1e-9);
}

TEST_CASE("negative time rejected") {
  const System s = make_system(0.5, 0.28, 0.28, 32);
  CHECK_THROWS_AS(photon_number(s.corr, s.params, 0, -0.1), std::domain_error);
  CHECK_THROWS_AS(pair_correlator(s.corr, s.params, 0, 0, -1.0), std::domain_error);
}

TEST_CASE("envelope lower-bounds the phase-resolved variance") {
  const System s = make_system();
  for (double t : {2.0, 11.0, 23.0}) {
    const double env = variance_envelope(s.corr, s.params, 10, -10, t);
    const cplx a = pair_correlator(s.corr, s.params, 10, -10, t);
    double min_theta = 1e300;
    for (int i = 0; i < 256; ++i) {
      const double theta = 2.0 * kPi * i / 256.0;
      const double v = correlation_variance(s.corr, s.params, 10, -10, t, theta);
      CHECK(v >= env - 1e-10);
      min_theta = std::min(min_theta, v);
    }
    // 256 phase samples resolve the cosine minimum to second order
    const double slack = 8.0 * std::abs(a) * std::pow(kPi / 256.0, 2) + 1e-10;
    CHECK(min_theta - env <= slack);
  }
}

TEST_CASE("no cavity pair beats the strongest Schmidt mode's squeezing") {
  const System s = make_system();
  const double floor = 4.0 * std::exp(-2.0 * s.dec.r.maxCoeff()) - 1e-6;
  const TimeSeries env = envelope_series(s.corr, s.params, 25, -25, 60.0, 121);
  CHECK(env.values.minCoeff() >= floor);
}

TEST_CASE("covariance-matrix route reproduces the reduced variance expression") {
  const System s = make_system();
  for (double t : {0.0, 6.5, 14.0, 33.0}) {
    for (auto [p, q] : {std::pair{10, -10}, std::pair{25, -25}, std::pair{7, -12}}) {
      const double direct = correlation_variance(s.corr, s.params, p, q, t);
      const double routed = oracle::covariance_route_delta2(s.corr, s.params, p, q, t);
      CHECK(std::abs(direct - routed) <= 1e-8 * std::abs(direct));
    }
  }
}

TEST_CASE("pair correlator decays at the combined Bloch loss rate") {
  // Narrowband pump, so the loss rate is flat across the occupied modes;
  // dividing out the lossless evolution isolates the decay.
  const System lossy = make_system(0.5, 0.28, 0.05, 96);
  const System ideal = make_system(0.5, 0.28, 0.05, 96, 2.2, /*lossless=*/true);
  const double t = 300.0;
  const double a0 = std::abs(pair_correlator(ideal.corr, ideal.params, 10, -10, t));
  const double a1 = std::abs(pair_correlator(lossy.corr, lossy.params, 10, -10, t));
  const double rate = -std::log(a1 / a0) / t;
  const double expected = 2.0 * loss_rate(lossy.params, kPi / 2.0) * lossy.params.tau_unit();
  CHECK(rate == doctest::Approx(expected).epsilon(0.10));
}

TEST_CASE("pair correlator peaks with the photon-number arrival") {
  const System s = make_system(0.5, 0.28, 0.28, 128);
  const TimeSeries n = photon_series(s.corr, s.params, 40, 100.0, 512);
  long imax = 0;
  n.values.maxCoeff(&imax);
  Eigen::VectorXd absA(n.t.size());
  for (long i = 0; i < n.t.size(); ++i)
    absA[i] = std::abs(pair_correlator(s.corr, s.params, 40, -40, n.t[i]));
  long amax = 0;
  absA.maxCoeff(&amax);
  CHECK(std::abs(n.t[amax] - n.t[imax]) < 5.0);
}

TEST_CASE("arrival time follows the group velocity") {
  const System s = make_system(0.5, 0.28, 0.28, 128);
  const TimeSeries n = photon_series(s.corr, s.params, 40, 100.0, 1024);
  const TimeSeries env = envelope_series(s.corr, s.params, 40, -40, 100.0, 1024);
  const EntanglementMetrics m = metrics(n, env);
  // transit time p D / v_g equals p / sin(k0 D) in tau units
  CHECK(m.t_peak == doctest::Approx(40.0).epsilon(0.10));
}

TEST_CASE("off-center pumps arrive together and broadened") {
  const System a = make_system(0.35, 0.28, 0.28, 128);
  const System b = make_system(0.65, 0.28, 0.28, 128);
  const System c = make_system(0.5, 0.28, 0.28, 128);
  auto measure = [](const System& s) {
    const TimeSeries n = photon_series(s.corr, s.params, 40, 100.0, 1024);
    const TimeSeries env = envelope_series(s.corr, s.params, 40, -40, 100.0, 1024);
    return metrics(n, env);
  };
  const EntanglementMetrics ma = measure(a), mb = measure(b), mc = measure(c);
  CHECK(std::abs(ma.t_peak - mb.t_peak) < 0.02 * ma.t_peak);
  CHECK(mb.fwhm_tau > mc.fwhm_tau);
}

TEST_CASE("metrics of a triangular pulse") {
  TimeSeries n, env;
  const int steps = 101;
  n.t.resize(steps);
  n.values.resize(steps);
  env.t = n.t;
  env.values = Eigen::VectorXd::Constant(steps, 3.4);
  for (int i = 0; i < steps; ++i) {
    n.t[i] = 10.0 * i / double(steps - 1);
    n.values[i] = 2.0 * (1.0 - std::abs(n.t[i] - 5.0) / 5.0);
  }
  env.t = n.t;
  const EntanglementMetrics m = metrics(n, env);
  CHECK(m.n_max == doctest::Approx(2.0));
  CHECK(m.fwhm_tau == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(m.t_peak == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(m.dev == doctest::Approx(0.6).epsilon(1e-12));

  TimeSeries flat = n;
  flat.values.setConstant(1.0);
  CHECK_THROWS_AS(metrics(flat, env), std::runtime_error);
}
