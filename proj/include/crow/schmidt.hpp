#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "crow/biphoton.hpp"

namespace crow {

struct SvdResult {
  Eigen::MatrixXcd U;  // m x r, orthonormal columns
  Eigen::VectorXd d;   // descending positive singular values
  Eigen::MatrixXcd V;  // n x r, orthonormal columns; A = U diag(d) V^H
};

// Deterministic thin SVD.  Phase convention: the largest-magnitude entry of
// each U column is made real positive, with the compensating phase applied to
// the matching V column.  Near-degenerate singular values are tie-ordered by
// the phase of the first significant U entry so reruns are bitwise stable.
inline SvdResult svd(const Eigen::MatrixXcd& A) {
  if (!A.allFinite())
    throw std::invalid_argument("svd: input contains non-finite entries");
  Eigen::BDCSVD<Eigen::MatrixXcd> solver(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out;
  out.U = solver.matrixU();
  out.V = solver.matrixV();
  out.d = solver.singularValues();

  const long r = out.d.size();
  for (long c = 0; c < r; ++c) {
    long imax = 0;
    out.U.col(c).cwiseAbs().maxCoeff(&imax);
    const cplx pivot = out.U(imax, c);
    if (std::abs(pivot) > 0.0) {
      const cplx phase = std::conj(pivot) / std::abs(pivot);
      out.U.col(c) *= phase;
      out.V.col(c) *= phase;
    }
  }

  // Tie-break near-degenerate pairs (within 1e-12 of the leading value).
  if (r > 1) {
    const double tol = 1e-12 * out.d[0];
    for (long c = 0; c + 1 < r; ++c) {
      if (std::abs(out.d[c] - out.d[c + 1]) < tol) {
        auto first_phase = [&](long col) {
          for (long i = 0; i < out.U.rows(); ++i)
            if (std::abs(out.U(i, col)) > 1e-14) return std::arg(out.U(i, col));
          return 0.0;
        };
        if (first_phase(c) > first_phase(c + 1)) {
          out.U.col(c).swap(out.U.col(c + 1));
          out.V.col(c).swap(out.V.col(c + 1));
          std::swap(out.d[c], out.d[c + 1]);
        }
      }
    }
  }
  return out;
}

// Schmidt weights, sampled mode functions and squeezing parameters obtained
// from the discretized biphoton amplitude.
struct SchmidtDecomposition {
  Eigen::VectorXd p;    // descending weights, sum = 1 before truncation
  Eigen::MatrixXcd mu;  // column lambda = mu_lambda on the k1 grid
  Eigen::MatrixXcd nu;  // column lambda = nu_lambda on the k2 grid
  Eigen::VectorXd r;    // squeezing parameters beta * sqrt(p)
  double dkD = 0.0;
  double trunc_tol = 1e-12;
  double beta = 0.0;
};

inline SchmidtDecomposition schmidt_decompose(const BiphotonMatrix& phi, double beta_squeeze,
                                              double trunc_tol = 1e-12) {
  const double dk = phi.grid.dkD;
  const double norm2 = phi.values.squaredNorm() * dk * dk;
  if (std::abs(norm2 - 1.0) > 1e-9)
    throw std::invalid_argument("schmidt_decompose: biphoton matrix is not unit-normalized");

  const SvdResult s = svd(phi.values);
  const long r_full = s.d.size();
  const double p0 = s.d[0] * s.d[0] * dk * dk;
  long keep = 0;
  for (long i = 0; i < r_full; ++i) {
    const double pi_ = s.d[i] * s.d[i] * dk * dk;
    if (pi_ >= trunc_tol * p0 && s.d[i] > 0.0) ++keep; else break;
  }

  SchmidtDecomposition dec;
  dec.dkD = dk;
  dec.trunc_tol = trunc_tol;
  dec.beta = beta_squeeze;
  dec.p.resize(keep);
  dec.r.resize(keep);
  dec.mu = s.U.leftCols(keep) / std::sqrt(dk);
  dec.nu = s.V.leftCols(keep).conjugate() / std::sqrt(dk);
  for (long i = 0; i < keep; ++i) {
    dec.p[i] = s.d[i] * s.d[i] * dk * dk;
    dec.r[i] = beta_squeeze * std::sqrt(dec.p[i]);
  }
  return dec;
}

// Re-samples sum_lambda sqrt(p) mu (x) nu back to matrix form.
inline Eigen::MatrixXcd reconstruct(const SchmidtDecomposition& dec) {
  const Eigen::VectorXd amp = dec.p.cwiseSqrt();
  return dec.mu * amp.asDiagonal() * dec.nu.transpose();
}

}  // namespace crow
