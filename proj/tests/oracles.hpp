// Reference implementations used as independent oracles by the test suites.
// Everything here is deliberately naive and kept apart from the library code
// paths it is checking.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "contracta/linalg.hpp"

namespace oracles {

using contracta::Complex;
using contracta::Matrix;

// Eigenvalues of a 2x2 Hermitian matrix from the characteristic polynomial.
inline std::vector<double> eig2_charpoly(const Matrix& h) {
  const double tr = h.trace().real();
  const double det = (h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0)).real();
  const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
  return {tr / 2.0 + disc, tr / 2.0 - disc};
}

// Eigenvalues of a 3x3 Hermitian matrix via the trigonometric solution of the
// cubic characteristic polynomial.
inline std::vector<double> eig3_charpoly(const Matrix& h) {
  const double q = h.trace().real() / 3.0;
  Matrix b = h - q * Matrix::Identity(3, 3);
  const double p2 = (b * b).trace().real() / 6.0;
  const double p = std::sqrt(std::max(p2, 0.0));
  std::vector<double> out;
  if (p < 1e-300) {
    out = {q, q, q};
    return out;
  }
  const double detb = (b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                       b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                       b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0)))
                          .real();
  double r = detb / (2.0 * p * p * p);
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double pi = std::acos(-1.0);
  out.push_back(q + 2.0 * p * std::cos(phi));
  out.push_back(q + 2.0 * p * std::cos(phi + 4.0 * pi / 3.0));
  out.push_back(q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0));
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

// Index-by-index partial trace, written independently of the library loops.
inline Matrix naive_trace_out_second(const Matrix& m, int d1, int d2) {
  Matrix out = Matrix::Zero(d1, d1);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j)
      for (int k = 0; k < d2; ++k) out(i, j) += m(i * d2 + k, j * d2 + k);
  return out;
}

inline Matrix naive_trace_out_first(const Matrix& m, int d1, int d2) {
  Matrix out = Matrix::Zero(d2, d2);
  for (int i = 0; i < d2; ++i)
    for (int j = 0; j < d2; ++j)
      for (int k = 0; k < d1; ++k) out(i, j) += m(k * d2 + i, k * d2 + j);
  return out;
}

// Trace norm of a Hermitian matrix from its eigenvalues only.
inline double herm_trace_norm(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace oracles
