#include "contracta/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace contracta {
namespace la {

bool is_finite(const Matrix& m) {
  return m.allFinite();
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Complex hs_inner(const Matrix& a, const Matrix& b) {
  return (a.adjoint() * b).trace();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix identity(Eigen::Index n) {
  return Matrix::Identity(n, n);
}

EigResult eig_hermitian(const Matrix& h) {
  const double tol = kHermTolPerDim * static_cast<double>(std::max<Eigen::Index>(h.rows(), 1)) *
                     std::max(1.0, h.cwiseAbs().maxCoeff());
  if (!is_finite(h) || !is_hermitian(h, tol))
    throw std::invalid_argument("eig_hermitian: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver failed");
  const Eigen::Index n = h.rows();
  EigResult r;
  r.eigenvalues = es.eigenvalues().reverse();
  r.eigenvectors = es.eigenvectors().rowwise().reverse();
  (void)n;
  return r;
}

double min_eigenvalue(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double trace_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().maxCoeff();
}

namespace {

Eigen::Index total_dim(const std::vector<int>& dims) {
  Eigen::Index n = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("subsystem dimensions must be positive");
    n *= d;
  }
  return n;
}

}  // namespace

Matrix partial_trace(const Matrix& m, const std::vector<int>& dims, int traced) {
  const Eigen::Index n = total_dim(dims);
  if (m.rows() != n || m.cols() != n)
    throw std::invalid_argument("partial_trace: dimension mismatch");
  if (traced < 0 || traced >= static_cast<int>(dims.size()))
    throw std::invalid_argument("partial_trace: traced index out of range");

  Eigen::Index left = 1, right = 1;
  for (int s = 0; s < traced; ++s) left *= dims[s];
  for (int s = traced + 1; s < static_cast<int>(dims.size()); ++s) right *= dims[s];
  const Eigen::Index t = dims[traced];

  Matrix out = Matrix::Zero(left * right, left * right);
  for (Eigen::Index l = 0; l < left; ++l)
    for (Eigen::Index lp = 0; lp < left; ++lp)
      for (Eigen::Index r = 0; r < right; ++r)
        for (Eigen::Index rp = 0; rp < right; ++rp) {
          Complex acc = 0.0;
          for (Eigen::Index k = 0; k < t; ++k)
            acc += m((l * t + k) * right + r, (lp * t + k) * right + rp);
          out(l * right + r, lp * right + rp) = acc;
        }
  return out;
}

Matrix partial_transpose(const Matrix& m, const std::vector<int>& dims,
                         const std::vector<int>& transposed) {
  const Eigen::Index n = total_dim(dims);
  if (m.rows() != n || m.cols() != n)
    throw std::invalid_argument("partial_transpose: dimension mismatch");
  const int s = static_cast<int>(dims.size());
  std::vector<bool> flip(s, false);
  for (int t : transposed) {
    if (t < 0 || t >= s)
      throw std::invalid_argument("partial_transpose: subsystem index out of range");
    flip[t] = true;
  }

  std::vector<Eigen::Index> stride(s, 1);
  for (int i = s - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  Matrix out(n, n);
  std::vector<Eigen::Index> ri(s, 0), ci(s, 0);
  for (Eigen::Index row = 0; row < n; ++row) {
    Eigen::Index rr = row;
    for (int i = 0; i < s; ++i) { ri[i] = rr / stride[i]; rr %= stride[i]; }
    for (Eigen::Index col = 0; col < n; ++col) {
      Eigen::Index cc = col;
      for (int i = 0; i < s; ++i) { ci[i] = cc / stride[i]; cc %= stride[i]; }
      Eigen::Index srow = 0, scol = 0;
      for (int i = 0; i < s; ++i) {
        const Eigen::Index a = flip[i] ? ci[i] : ri[i];
        const Eigen::Index b = flip[i] ? ri[i] : ci[i];
        srow += a * stride[i];
        scol += b * stride[i];
      }
      out(row, col) = m(srow, scol);
    }
  }
  return out;
}

double fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.rows() != rho.cols() ||
      sigma.rows() != sigma.cols())
    throw std::invalid_argument("fidelity: dimension mismatch");
  const Matrix sr = sqrt_psd(rho);
  const Matrix ss = sqrt_psd(sigma);
  const double t = trace_norm(sr * ss);
  return t * t;
}

CVector vec(const Matrix& m) {
  CVector v(m.rows() * m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

Matrix unvec(const CVector& v, Eigen::Index p, Eigen::Index q) {
  if (v.size() != p * q) throw std::invalid_argument("unvec: length mismatch");
  Matrix m(p, q);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < q; ++j) m(i, j) = v(i * q + j);
  return m;
}

Matrix sqrt_psd(const Matrix& m, double tol) {
  EigResult e = eig_hermitian(m);
  const double scale = std::max(1.0, e.eigenvalues.cwiseAbs().maxCoeff());
  RVector s(e.eigenvalues.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    double lam = e.eigenvalues(i);
    if (lam < -tol * scale)
      throw std::invalid_argument("sqrt_psd: input is not PSD");
    s(i) = std::sqrt(std::max (lam, 0.0));
  }
  return e.eigenvectors * s.asDiagonal() * e.eigenvectors.adjoint();
}

Matrix sign_hermitian(const Matrix& h, double zero_tol) {
  EigResult e = eig_hermitian(h);
  RVector s(e.eigenvalues.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    s(i) = e.eigenvalues(i) < -zero_tol ? -1.0 : 1.0;
  return e.eigenvectors * s.asDiagonal() * e.eigenvectors.adjoint();
}

std::vector<Matrix> hermitian_basis(int n) {
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(n) * n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int p = 0; p < n; ++p) {
    Matrix m = Matrix::Zero(n, n);
    m(p, p) = 1.0;
    basis.push_back(m);
  }
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      Matrix re = Matrix::Zero(n, n);
      re(p, q) = inv_sqrt2;
      re(q, p) = inv_sqrt2;
      basis.push_back(re);
      Matrix im = Matrix::Zero(n, n);
      im(p, q) = Complex(0.0, -inv_sqrt2);
      im(q, p) = Complex(0.0, inv_sqrt2);
      basis.push_back(im);
    }
  return basis;
}

std::vector<Matrix> traceless_hermitian_basis(int n) {
  std::vector<Matrix> basis;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int p = 0; p + 1 < n; ++p) {
    // Normalized diag(1,...,1,-(p+1),0,...)/norm over the first p+2 entries.
    Matrix m = Matrix::Zero(n, n);
    const double norm = std::sqrt(static_cast<double>(p + 1) * (p + 2));
    for (int q = 0; q <= p; ++q) m(q, q) = 1.0 / norm;
    m(p + 1, p + 1) = -static_cast<double>(p + 1) / norm;
    basis.push_back(m);
  }
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      Matrix re = Matrix::Zero(n, n);
      re(p, q) = inv_sqrt2;
      re(q, p) = inv_sqrt2;
      basis.push_back(re);
      Matrix im = Matrix::Zero(n, n);
      im(p, q) = Complex(0.0, -inv_sqrt2);
      im(q, p) = Complex(0.0, inv_sqrt2);
      basis.push_back(im);
    }
  return basis;
}

}  // namespace la

HermitianOperator::HermitianOperator(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols())
    throw std::invalid_argument("HermitianOperator: matrix must be square");
  const double tol = kHermTolPerDim * static_cast<double>(mat_.rows()) *
                     std::max(1.0, mat_.cwiseAbs().maxCoeff());
  if (!la::is_finite(mat_) || !la::is_hermitian(mat_, tol))
    throw std::invalid_argument("HermitianOperator: matrix is not Hermitian");
}

DensityOperator::DensityOperator(Matrix m) : mat_(std::move(m)) {
  HermitianOperator check(mat_);  // validates shape and symmetry
  if (la::min_eigenvalue(mat_) < -kPsdTol)
    throw std::invalid_argument("DensityOperator: matrix is not PSD");
  if (std::abs(mat_.trace().real() - 1.0) > 1e-10 ||
      std::abs(mat_.trace().imag()) > 1e-10)
    throw std::invalid_argument("DensityOperator: trace must be 1");
}

}  // namespace contracta
