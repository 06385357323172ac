#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "contracta/linalg.hpp"

namespace contracta {

// All heuristic randomness in the library flows through one of these, seeded
// from a single 64-bit value, so runs are reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ULL) : gen_(seed) {}

  double gaussian() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }
  std::uint64_t raw() { return gen_(); }

  Complex cgaussian() { return Complex(gaussian(), gaussian()); }

  Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cgaussian();
    return m;
  }

  CVector unit_vector(Eigen::Index n) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cgaussian();
    v.normalize();
    return v;
  }

  // Orthonormal pair via QR of a Gaussian d x 2 matrix.
  std::pair<CVector, CVector> haar_pair(Eigen::Index d) {
    Matrix g = gaussian_matrix(d, 2);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, 2);
    return {q.col(0), q.col(1)};
  }

  Matrix random_hermitian(Eigen::Index n) {
    Matrix g = gaussian_matrix(n, n);
    return 0.5 * (g + g.adjoint());
  }

  Matrix random_density(Eigen::Index n) {
    Matrix g = gaussian_matrix(n, n);
    Matrix rho = g * g.adjoint();
    return rho / rho.trace().real();
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace contracta
