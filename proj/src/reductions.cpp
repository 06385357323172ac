#include "contracta/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "contracta/rng.hpp"

namespace contracta {
namespace reductions {

int GrothendieckInstance::n() const {
  return variant == Variant::Hermitian ? static_cast<int>(operators.size())
                                       : static_cast<int>(vectors.size());
}

int GrothendieckInstance::d() const {
  if (variant == Variant::Hermitian)
    return operators.empty() ? 0 : static_cast<int>(operators[0].rows());
  return vectors.empty() ? 0 : static_cast<int>(vectors[0].size());
}

namespace {

void validate(const GrothendieckInstance& inst) {
  if (inst.n() < 1 || inst.d() < 1)
    throw std::invalid_argument("instance needs n >= 1 and d >= 1");
  if (inst.variant == Variant::Hermitian) {
    for (const Matrix& f : inst.operators) {
      if (f.rows() != inst.d() || f.cols() != inst.d())
        throw std::invalid_argument("instance operators must share one dimension");
      if (!la::is_hermitian(f, 1e-10 * std::max(1.0, f.cwiseAbs().maxCoeff()) * f.rows()))
        throw std::invalid_argument("instance operators must be Hermitian");
    }
  } else {
    for (const RVector& f : inst.vectors)
      if (f.size() != inst.d())
        throw std::invalid_argument("instance vectors must share one dimension");
  }
}

}  // namespace

std::vector<Matrix> doubled_coefficients(const GrothendieckInstance& inst) {
  validate(inst);
  const int d = inst.d();
  std::vector<Matrix> out;
  for (int i = 0; i < inst.n(); ++i) {
    Matrix f;
    if (inst.variant == Variant::Hermitian) {
      f = inst.operators[static_cast<std::size_t>(i)];
    } else {
      f = Matrix::Zero(d, d);
      for (int r = 0; r < d; ++r) f(r, r) = inst.vectors[static_cast<std::size_t>(i)](r);
    }
    Matrix dbl = Matrix::Zero(2 * d, 2 * d);
    dbl.topLeftCorner(d, d) = f;
    dbl.bottomRightCorner(d, d) = -f;
    out.push_back(dbl);
  }
  return out;
}

Matrix psi_apply(const std::vector<Matrix>& doubled, const Matrix& y) {
  const int n = static_cast<int>(doubled.size());
  CVector b(n);
  for (int i = 0; i < n; ++i) b(i) = (doubled[static_cast<std::size_t>(i)] * y).trace();
  Matrix out = Matrix::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    out(i, n) = b(i);
    out(n, i) = b(i);  // plain transpose; b is real for Hermitian inputs
  }
  return out;
}

Superoperator build_adjoint_superoperator(const GrothendieckInstance& inst,
                                          double alpha) {
  validate(inst);
  const int d2 = 2 * inst.d();
  const int n1 = inst.n() + 1;
  const std::vector<Matrix> dbl = doubled_coefficients(inst);
  Superoperator s;
  s.d_in = d2;
  s.d_out = n1;
  s.matrix = Matrix::Zero(n1 * n1, d2 * d2);
  for (int a = 0; a < d2; ++a)
    for (int b = 0; b < d2; ++b) {
      Matrix e = Matrix::Zero(d2, d2);
      e(a, b) = 1.0;
      Matrix img = alpha * psi_apply(dbl, e);
      if (a == b) img += Matrix::Identity(n1, n1) / static_cast<double>(d2);
      s.matrix.col(a * d2 + b) = la::vec(img);
    }
  return s;
}

double max_cp_alpha(const GrothendieckInstance& inst) {
  validate(inst);
  // channel_from_adjoint_superoperator rejects non-CP maps, so probe the Choi
  // matrix directly from the adjoint images; it is affine in alpha.
  auto choi_direct = [&](double alpha) {
    const Superoperator adj = build_adjoint_superoperator(inst, alpha);
    const int dain = adj.d_out;   // n + 1
    const int dbout = adj.d_in;   // 2d
    Matrix j = Matrix::Zero(dain * dbout, dain * dbout);
    for (int a = 0; a < dbout; ++a)
      for (int b = 0; b < dbout; ++b) {
        Matrix e = Matrix::Zero(dbout, dbout);
        e(a, b) = 1.0;
        const Matrix img = la::unvec(adj.matrix * la::vec(e), dain, dain);
        for (int i = 0; i < dain; ++i)
          for (int jj = 0; jj < dain; ++jj)
            j(i * dbout + a, jj * dbout + b) += std::conj(img(i, jj)) / static_cast<double>(dain);
      }
    return Matrix(0.5 * (j + j.adjoint()));
  };
  const Matrix j0 = choi_direct(0.0);
  const Matrix jslope = choi_direct(1.0) - j0;

  if (jslope.cwiseAbs().maxCoeff() < 1e-14) return 1e6;  // Psi vanishes identically

  auto cp_at = [&](double alpha) {
    return la::min_eigenvalue(j0 + alpha * jslope) >= -kPsdTol;
  };
  double lo = 0.0, hi = 1.0;
  while (cp_at(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return 1e6;
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (cp_at(mid) ? lo : hi) = mid;
  }
  return lo;
}

ReductionOutput build_phi_alpha(const GrothendieckInstance& inst,
                                std::optional<double> alpha) {
  validate(inst);
  ReductionOutput out;
  out.alpha_max = max_cp_alpha(inst);
  out.alpha = alpha.value_or(0.9 * out.alpha_max);
  if (out.alpha > out.alpha_max)
    throw std::invalid_argument("alpha exceeds the completely positive range");
  out.adjoint = build_adjoint_superoperator(inst, out.alpha);
  out.channel = channels::channel_from_adjoint_superoperator(out.adjoint);
  return out;
}

double commutative_norm_enumerated(const GrothendieckInstance& inst) {
  validate(inst);
  if (inst.variant != Variant::Commutative)
    throw std::invalid_argument("enumeration applies to commutative instances");
  const int d = inst.d();
  if (d > 20) throw std::invalid_argument("enumeration limited to d <= 20");
  const int n = inst.n();
  double best = 0.0;
  for (long long mask = 0; mask < (1LL << d); ++mask) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double dot = 0.0;
      for (int r = 0; r < d; ++r)
        dot += ((mask >> r) & 1 ? 1.0 : -1.0) * inst.vectors[static_cast<std::size_t>(i)](r);
      acc += dot * dot;
    }
    best = std::max(best, acc);
  }
  return std::sqrt(best);
}

double hermitian_norm_seesaw(const GrothendieckInstance& inst, int restarts,
                             int iterations, std::uint64_t seed) {
  validate(inst);
  const int d = inst.d();
  const int n = inst.n();
  std::vector<Matrix> fs;
  if (inst.variant == Variant::Hermitian) {
    fs = inst.operators;
  } else {
    for (const RVector& f : inst.vectors) {
      Matrix m = Matrix::Zero(d, d);
      for (int r = 0; r < d; ++r) m(r, r) = f(r);
      fs.push_back(m);
    }
  }
  Rng rng(seed);
  double best = 0.0;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    RVector g(n);
    for (int i = 0; i < n; ++i) g(i) = rng.gaussian();
    g.normalize();
    double val = 0.0;
    for (int it = 0; it < iterations; ++it) {
      Matrix combo = Matrix::Zero(d, d);
      for (int i = 0; i < n; ++i) combo += g(i) * fs[static_cast<std::size_t>(i)];
      const Matrix y = la::sign_hermitian(combo);
      RVector img(n);
      for (int i = 0; i < n; ++i)
        img(i) = (fs[static_cast<std::size_t>(i)] * y).trace().real();
      const double next = img.norm();
      if (next <= val + 1e-12) {
        val = std::max(val, next);
        break;
      }
      val = next;
      g = img / next;
    }
    best = std::max(best, val);
  }
  return best;
}

NormIdentityReport norm_identity_check(const GrothendieckInstance& inst,
                                       const ReductionOutput& out,
                                       double eta_lower, double eta_upper) {
  NormIdentityReport rep;
  rep.norm_independent = inst.variant == Variant::Commutative
                             ? commutative_norm_enumerated(inst)
                             : hermitian_norm_seesaw(inst);
  rep.eta_lower = eta_lower;
  rep.eta_upper = eta_upper;
  rep.scaled_norm = 2.0 * out.alpha * rep.norm_independent;
  rep.bracket_violation = std::max(
      {0.0, eta_lower - rep.scaled_norm, rep.scaled_norm - eta_upper});
  return rep;
}

}  // namespace reductions
}  // namespace contracta
