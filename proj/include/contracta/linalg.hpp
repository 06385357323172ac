#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace contracta {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Absolute tolerance on eigenvalues for Hermiticity / PSD checks. Desk-scale
// dimensions (<= a few hundred) keep conditioning mild enough for a single
// global value.
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kHermTolPerDim = 1e-12;

namespace la {

bool is_finite(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol);

// Hilbert-Schmidt inner product tr(a^* b).
Complex hs_inner(const Matrix& a, const Matrix& b);

Matrix kron(const Matrix& a, const Matrix& b);

Matrix identity(Eigen::Index n);

struct EigResult {
  RVector eigenvalues;  // descending
  Matrix eigenvectors;  // orthonormal columns, matching order
};

// Spectral decomposition of a Hermitian matrix. Throws std::invalid_argument
// if the input is not Hermitian within kHermTolPerDim * dim.
EigResult eig_hermitian(const Matrix& h);

double min_eigenvalue(const Matrix& h);
double max_eigenvalue(const Matrix& h);

// Schatten 1-norm (sum of singular values).
double trace_norm(const Matrix& m);

// Schatten infinity-norm (largest singular value).
double operator_norm(const Matrix& m);

// Trace out the subsystem `traced` of a square operator on a tensor product
// with factor dimensions `dims` (ordered left to right).
Matrix partial_trace(const Matrix& m, const std::vector<int>& dims, int traced);

// Transpose the subsystems listed in `transposed` (indices into `dims`).
Matrix partial_transpose(const Matrix& m, const std::vector<int>& dims,
                         const std::vector<int>& transposed);

// Uhlmann fidelity ||sqrt(rho) sqrt(sigma)||_1^2 for PSD unit-trace inputs.
double fidelity(const Matrix& rho, const Matrix& sigma);

// Row-major vectorization over the canonical basis: vec(E_{ij}) = e_i (x) e_j.
// All modules share this ordering.
CVector vec(const Matrix& m);
Matrix unvec(const CVector& v, Eigen::Index p, Eigen::Index q);

// PSD square root via spectral decomposition; negative eigenvalues within
// -tol are clamped to zero, below that the input is rejected.
Matrix sqrt_psd(const Matrix& m, double tol = kPsdTol);

// Spectral sign P_+ - P_- of a Hermitian matrix; eigenvalues in [-zero_tol,
// zero_tol] are assigned +1.
Matrix sign_hermitian(const Matrix& h, double zero_tol = 0.0);

// Canonical orthonormal Hermitian basis of B(C^n): diagonal units, then
// (E_pq + E_qp)/sqrt(2) and i(E_pq - E_qp)/sqrt(2) for p < q.
std::vector<Matrix> hermitian_basis(int n);

// Same with the trace-zero elements only (diagonal part uses differences).
std::vector<Matrix> traceless_hermitian_basis(int n);

}  // namespace la

// Hermitian operator with validated symmetry.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m);
  const Matrix& matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  Matrix mat_;
};

// PSD, unit-trace operator.
class DensityOperator {
 public:
  explicit DensityOperator(Matrix m);
  const Matrix& matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  Matrix mat_;
};

}  // namespace contracta
