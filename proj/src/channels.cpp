#include "contracta/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace contracta {
namespace channels {

namespace {

void check_shapes(const KrausChannel& ch) {
  if (ch.d_in <= 0 || ch.d_out <= 0)
    throw std::invalid_argument("channel dimensions must be positive");
  if (ch.kraus.empty())
    throw std::invalid_argument("channel needs at least one Kraus operator");
  for (const Matrix& k : ch.kraus)
    if (k.rows() != ch.d_out || k.cols() != ch.d_in)
      throw std::invalid_argument("Kraus operator shape mismatch");
}

}  // namespace

Diagnostics validate(const KrausChannel& ch) {
  check_shapes(ch);
  Matrix acc = Matrix::Zero(ch.d_in, ch.d_in);
  for (const Matrix& k : ch.kraus) acc += k.adjoint() * k;
  Diagnostics d;
  d.tp_residual = (acc - Matrix::Identity(ch.d_in, ch.d_in)).cwiseAbs().maxCoeff();
  d.choi_min_eigenvalue = la::min_eigenvalue(choi(ch));
  d.trace_preserving = d.tp_residual <= 1e-9;
  d.completely_positive = d.choi_min_eigenvalue >= -kPsdTol;
  return d;
}

void require_valid(const KrausChannel& ch) {
  check_shapes(ch);
  Matrix acc = Matrix::Zero(ch.d_in, ch.d_in);
  for (const Matrix& k : ch.kraus) acc += k.adjoint() * k;
  const double res = (acc - Matrix::Identity(ch.d_in, ch.d_in)).cwiseAbs().maxCoeff();
  if (res > 1e-9)
    throw std::invalid_argument("channel is not trace preserving (residual " +
                                std::to_string(res) + ")");
}

Matrix choi(const KrausChannel& ch) {
  check_shapes(ch);
  const int da = ch.d_in, db = ch.d_out;
  Matrix j = Matrix::Zero(da * db, da * db);
  for (const Matrix& k : ch.kraus) {
    // v = sum_i |i> (x) K|i>, so that sum_k v v^* = d_A J.
    CVector v(da * db);
    for (int i = 0; i < da; ++i) v.segment(i * db, db) = k.col(i);
    j.noalias() += v * v.adjoint();
  }
  return j / static_cast<double>(da);
}

Matrix apply(const KrausChannel& ch, const Matrix& x) {
  check_shapes(ch);
  if (x.rows() != ch.d_in || x.cols() != ch.d_in)
    throw std::invalid_argument("apply: operator dimension mismatch");
  Matrix out = Matrix::Zero(ch.d_out, ch.d_out);
  for (const Matrix& k : ch.kraus) out.noalias() += k * x * k.adjoint();
  return out;
}

Matrix apply_via_choi(const Matrix& choi_state, int d_in, int d_out, const Matrix& x) {
  if (choi_state.rows() != d_in * d_out || choi_state.cols() != d_in * d_out)
    throw std::invalid_argument("apply_via_choi: Choi dimension mismatch");
  if (x.rows() != d_in || x.cols() != d_in)
    throw std::invalid_argument("apply_via_choi: operator dimension mismatch");
  const Matrix m = choi_state * la::kron(x.transpose(), Matrix::Identity(d_out, d_out));
  return static_cast<double>(d_in) * la::partial_trace(m, {d_in, d_out}, 0);
}

Matrix adjoint_apply(const KrausChannel& ch, const Matrix& y) {
  check_shapes(ch);
  if (y.rows() != ch.d_out || y.cols() != ch.d_out)
    throw std::invalid_argument("adjoint_apply: operator dimension mismatch");
  Matrix out = Matrix::Zero(ch.d_in, ch.d_in);
  for (const Matrix& k : ch.kraus) out.noalias() += k.adjoint() * y * k;
  return out;
}

Superoperator superoperator(const KrausChannel& ch) {
  check_shapes(ch);
  Superoperator s;
  s.d_in = ch.d_in;
  s.d_out = ch.d_out;
  s.matrix = Matrix::Zero(ch.d_out * ch.d_out, ch.d_in * ch.d_in);
  for (int i = 0; i < ch.d_in; ++i)
    for (int j = 0; j < ch.d_in; ++j) {
      Matrix e = Matrix::Zero(ch.d_in, ch.d_in);
      e(i, j) = 1.0;
      s.matrix.col(i * ch.d_in + j) = la::vec(channels::apply(ch, e));
    }
  return s;
}

Superoperator adjoint_superoperator(const KrausChannel& ch) {
  check_shapes(ch);
  Superoperator s;
  s.d_in = ch.d_out;
  s.d_out = ch.d_in;
  s.matrix = Matrix::Zero(ch.d_in * ch.d_in, ch.d_out * ch.d_out);
  for (int a = 0; a < ch.d_out; ++a)
    for (int b = 0; b < ch.d_out; ++b) {
      Matrix e = Matrix::Zero(ch.d_out, ch.d_out);
      e(a, b) = 1.0;
      s.matrix.col(a * ch.d_out + b) = la::vec(adjoint_apply(ch, e));
    }
  return s;
}

KrausChannel tensor(const KrausChannel& a, const KrausChannel& b) {
  check_shapes(a);
  check_shapes(b);
  KrausChannel out;
  out.d_in = a.d_in * b.d_in;
  out.d_out = a.d_out * b.d_out;
  out.kraus.reserve(a.kraus.size() * b.kraus.size());
  for (const Matrix& ka : a.kraus)
    for (const Matrix& kb : b.kraus) out.kraus.push_back(la::kron(ka, kb));
  return out;
}

KrausChannel tensor_power(const KrausChannel& ch, int copies) {
  if (copies < 1) throw std::invalid_argument("tensor_power: copies must be >= 1");
  KrausChannel out = ch;
  for (int c = 1; c < copies; ++c) out = tensor(out, ch);
  return out;
}

std::vector<Matrix> kraus_from_choi(const Matrix& choi_state, int d_in, int d_out,
                                    double cutoff) {
  la::EigResult e = la::eig_hermitian(static_cast<double>(d_in) * choi_state);
  std::vector<Matrix> ks;
  for (Eigen::Index idx = 0; idx < e.eigenvalues.size(); ++idx) {
    const double lam = e.eigenvalues(idx);
    if (lam <= cutoff) continue;
    const CVector w = std::sqrt(lam) * e.eigenvectors.col(idx);
    // w[(i,b)] = K(b,i): unvec as d_in x d_out, then transpose.
    ks.push_back(la::unvec(w, d_in, d_out).transpose());
  }
  return ks;
}

KrausChannel channel_from_adjoint_superoperator(const Superoperator& adj) {
  // adj maps B(C^{adj.d_in}) -> B(C^{adj.d_out}); the channel runs the other
  // way: d_in = adj.d_out, d_out = adj.d_in.
  const int da = adj.d_out;
  const int db = adj.d_in;
  if (adj.matrix.rows() != da * da || adj.matrix.cols() != db * db)
    throw std::invalid_argument("adjoint superoperator shape mismatch");

  const CVector unital = adj.matrix * la::vec(Matrix::Identity(db, db));
  const double unital_res =
      (la::unvec(unital, da, da) - Matrix::Identity(da, da)).cwiseAbs().maxCoeff();
  if (unital_res > 1e-8)
    throw std::invalid_argument("adjoint map is not unital (residual " +
                                std::to_string(unital_res) + ")");

  // J(Phi)[(i,a),(j,b)] = <a|Phi(E_ij)|b>/d_A = conj(Phi^*(E_ab)(i,j))/d_A.
  Matrix j = Matrix::Zero(da * db, da * db);
  for (int a = 0; a < db; ++a)
    for (int b = 0; b < db; ++b) {
      Matrix e = Matrix::Zero(db, db);
      e(a, b) = 1.0;
      const Matrix img = la::unvec(adj.matrix * la::vec(e), da, da);
      for (int i = 0; i < da; ++i)
        for (int jj = 0; jj < da; ++jj)
          j(i * db + a, jj * db + b) = std::conj(img(i, jj)) / static_cast<double>(da);
    }
  j = 0.5 * (j + j.adjoint()).eval();

  const double min_eig = la::min_eigenvalue(j);
  if (min_eig < -1e-8)
    throw std::invalid_argument("adjoint map is not completely positive (Choi min " +
                                std::to_string(min_eig) + ")");

  KrausChannel ch;
  ch.d_in = da;
  ch.d_out = db;
  ch.kraus = kraus_from_choi(j, da, db);
  if (ch.kraus.empty()) ch.kraus.push_back(Matrix::Zero(db, da));
  return ch;
}

KrausChannel gallery_amplitude_damping(double p, double eta) {
  if (p < 0.0 || p > 1.0 || eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("amplitude damping parameters must lie in [0,1]");
  const double sp = std::sqrt(p), sq = std::sqrt(1.0 - p);
  const double se = std::sqrt(eta), sl = std::sqrt(1.0 - eta);
  Matrix a1(2, 2), a2(2, 2), a3(2, 2), a4(2, 2);
  a1 << 1, 0, 0, se;
  a2 << 0, sl, 0, 0;
  a3 << se, 0, 0, 1;
  a4 << 0, 0, sl, 0;
  KrausChannel ch;
  ch.d_in = ch.d_out = 2;
  ch.kraus = {sp * a1, sp * a2, sq * a3, sq * a4};
  return ch;
}

KrausChannel gallery_depolarizing(double p) {
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("depolarizing parameter must lie in [0,1]");
  Matrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  z << 1, 0, 0, -1;
  KrausChannel ch;
  ch.d_in = ch.d_out = 2;
  ch.kraus = {std::sqrt(1.0 - 0.75 * p) * Matrix::Identity(2, 2),
              std::sqrt(0.25 * p) * x, std::sqrt(0.25 * p) * y,
              std::sqrt(0.25 * p) * z};
  return ch;
}

KrausChannel gallery_counterexample(int d) {
  if (d <= 2) throw std::invalid_argument("counterexample channel requires d > 2");
  KrausChannel ch;
  ch.d_in = ch.d_out = d;
  const double c = 1.0 / std::sqrt(static_cast<double>(d - 1));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      Matrix k = Matrix::Zero(d, d);
      k(i, j) = c;
      ch.kraus.push_back(k);
    }
  return ch;
}

KrausChannel random_channel(Rng& rng, int d_in, int d_out, int kraus_count) {
  if (d_in <= 0 || d_out <= 0 || kraus_count <= 0)
    throw std::invalid_argument("random_channel: bad dimensions");
  if (kraus_count * d_out < d_in)
    throw std::invalid_argument("random_channel: isometry needs kraus_count*d_out >= d_in");
  Matrix g = rng.gaussian_matrix(kraus_count * d_out, d_in);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix v = qr.householderQ() * Matrix::Identity(kraus_count * d_out, d_in);
  KrausChannel ch;
  ch.d_in = d_in;
  ch.d_out = d_out;
  for (int k = 0; k < kraus_count; ++k)
    ch.kraus.push_back(v.block(k * d_out, 0, d_out, d_in));
  return ch;
}

}  // namespace channels
}  // namespace contracta
