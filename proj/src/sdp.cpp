#include "contracta/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

namespace contracta {
namespace sdp {

void Coeff::add(int r, int c, Complex v) { entries.push_back({r, c, v}); }

void Coeff::add_herm(int r, int c, Complex v) {
  entries.push_back({r, c, v});
  if (r != c) entries.push_back({c, r, std::conj(v)});
}

Matrix Coeff::dense(int dim) const {
  Matrix m = Matrix::Zero(dim, dim);
  for (const CoeffEntry& e : entries) m(e.row, e.col) += e.value;
  return m;
}

int Problem::add_psd_block(const std::string& label, int dim) {
  if (dim <= 0) throw std::invalid_argument("block dimension must be positive");
  blocks.push_back({label, dim, BlockKind::HermitianPsd});
  return static_cast<int>(blocks.size()) - 1;
}

int Problem::add_free_block(const std::string& label, int dim) {
  if (dim <= 0) throw std::invalid_argument("block dimension must be positive");
  blocks.push_back({label, dim, BlockKind::FreeScalar});
  return static_cast<int>(blocks.size()) - 1;
}

Constraint& Problem::new_constraint(double rhs) {
  constraints.push_back({});
  constraints.back().rhs = rhs;
  return constraints.back();
}

Coeff coeff_from_dense(int block, const Matrix& m, double drop_tol) {
  Coeff c;
  c.block = block;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > drop_tol)
        c.entries.push_back({static_cast<int>(i), static_cast<int>(j), m(i, j)});
  return c;
}

namespace {

struct SparseTerm {
  int pb = -1;  // index into the psd block list
  std::vector<CoeffEntry> entries;
};

struct Row {
  std::vector<SparseTerm> terms;
  std::vector<std::pair<int, double>> free_terms;  // (free offset, value)
  double rhs = 0.0;
  int original = -1;
  double scale = 1.0;  // stored row = original / scale
};

struct Prepped {
  std::vector<int> psd_dims;
  std::vector<int> psd_to_block;       // psd position -> problem block index
  std::vector<int> block_to_psd;       // -1 when free
  std::vector<int> block_free_offset;  // -1 when psd
  int nf = 0;
  int n_total = 0;
  std::vector<Matrix> C;
  RVector cf;
  std::vector<Row> rows;  // kept, scaled rows
  RVector b;
  Eigen::MatrixXd F;      // kept rows x nf
  int original_m = 0;
  double b_norm = 0.0;
  double coeff_scale = 1.0;  // max |A|,|C| magnitude, for tolerances
};

void consolidate(std::vector<CoeffEntry>& entries) {
  std::map<std::pair<int, int>, Complex> acc;
  for (const CoeffEntry& e : entries) acc[{e.row, e.col}] += e.value;
  entries.clear();
  for (const auto& [rc, v] : acc)
    if (std::abs(v) > 0.0) entries.push_back({rc.first, rc.second, v});
}

// Real coordinates of a Hermitian matrix over the canonical orthonormal
// Hermitian basis; inner products are preserved.
void herm_coords(const Matrix& a, double* out) {
  const Eigen::Index n = a.rows();
  Eigen::Index k = 0;
  const double s = std::sqrt(2.0);
  for (Eigen::Index p = 0; p < n; ++p) out[k++] = a(p, p).real();
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = p + 1; q < n; ++q) {
      out[k++] = s * a(p, q).real();
      out[k++] = s * a(p, q).imag();
    }
}

Prepped preprocess(const Problem& p) {
  Prepped pp;
  const int nb = static_cast<int>(p.blocks.size());
  pp.block_to_psd.assign(nb, -1);
  pp.block_free_offset.assign(nb, -1);
  for (int bi = 0; bi < nb; ++bi) {
    const Block& blk = p.blocks[bi];
    if (blk.dim <= 0) throw std::invalid_argument("block dimension must be positive");
    if (blk.kind == BlockKind::HermitianPsd) {
      pp.block_to_psd[bi] = static_cast<int>(pp.psd_dims.size());
      pp.psd_to_block.push_back(bi);
      pp.psd_dims.push_back(blk.dim);
      pp.n_total += blk.dim;
    } else {
      pp.block_free_offset[bi] = pp.nf;
      pp.nf += blk.dim;
    }
  }
  if (pp.psd_dims.empty())
    throw std::invalid_argument("problem needs at least one PSD block");

  pp.C.resize(pp.psd_dims.size());
  for (std::size_t i = 0; i < pp.C.size(); ++i)
    pp.C[i] = Matrix::Zero(pp.psd_dims[i], pp.psd_dims[i]);
  pp.cf = RVector::Zero(pp.nf);

  auto check_herm = [&](const Matrix& m, const char* what) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() >
        1e-12 * scale * static_cast<double>(m.rows()))
      throw std::invalid_argument(std::string(what) + ": coefficient is not Hermitian");
  };

  for (const Coeff& c : p.objective) {
    if (c.block < 0 || c.block >= nb)
      throw std::invalid_argument("objective: bad block index");
    const Block& blk = p.blocks[c.block];
    if (blk.kind == BlockKind::HermitianPsd) {
      Matrix m = c.dense(blk.dim);
      check_herm(m, "objective");
      pp.C[pp.block_to_psd[c.block]] += m;
    } else {
      for (const CoeffEntry& e : c.entries) {
        if (e.row < 0 || e.row >= blk.dim || e.col != 0 ||
            std::abs(e.value.imag()) > 1e-12)
          throw std::invalid_argument("objective: free entries must be (i, 0, real)");
        pp.cf(pp.block_free_offset[c.block] + e.row) += e.value.real();
      }
    }
  }

  pp.coeff_scale = 1.0;
  for (const Matrix& c : pp.C)
    if (c.size() > 0) pp.coeff_scale = std::max(pp.coeff_scale, c.cwiseAbs().maxCoeff());

  // Assemble rows; validate Hermiticity of every coefficient.
  pp.original_m = static_cast<int>(p.constraints.size());
  std::vector<Row> raw;
  raw.reserve(p.constraints.size());
  int n_params = pp.nf;
  for (std::size_t i = 0; i < pp.psd_dims.size(); ++i)
    n_params += pp.psd_dims[i] * pp.psd_dims[i];

  Eigen::MatrixXd coords(n_params, static_cast<Eigen::Index>(p.constraints.size()));
  std::vector<double> tmp;
  int col = 0;
  for (int ci = 0; ci < pp.original_m; ++ci) {
    const Constraint& con = p.constraints[ci];
    Row row;
    row.original = ci;
    row.rhs = con.rhs;
    std::map<int, Matrix> dense_terms;
    std::vector<double> free_dense(pp.nf, 0.0);
    for (const Coeff& c : con.terms) {
      if (c.block < 0 || c.block >= nb)
        throw std::invalid_argument("constraint: bad block index");
      const Block& blk = p.blocks[c.block];
      if (blk.kind == BlockKind::HermitianPsd) {
        auto it = dense_terms.find(c.block);
        if (it == dense_terms.end())
          it = dense_terms.emplace(c.block, Matrix::Zero(blk.dim, blk.dim)).first;
        it->second += c.dense(blk.dim);
      } else {
        for (const CoeffEntry& e : c.entries) {
          if (e.row < 0 || e.row >= blk.dim || e.col != 0 ||
              std::abs(e.value.imag()) > 1e-12)
            throw std::invalid_argument("constraint: free entries must be (i, 0, real)");
          free_dense[pp.block_free_offset[c.block] + e.row] += e.value.real();
        }
      }
    }

    Eigen::VectorXd coord = Eigen::VectorXd::Zero(n_params);
    int offset = 0;
    for (std::size_t pb = 0; pb < pp.psd_dims.size(); ++pb) {
      const int dim = pp.psd_dims[pb];
      auto it = dense_terms.find(pp.psd_to_block[pb]);
      if (it != dense_terms.end()) {
        check_herm(it->second, "constraint");
        pp.coeff_scale = std::max(pp.coeff_scale, it->second.cwiseAbs().maxCoeff());
        tmp.assign(static_cast<std::size_t>(dim) * dim, 0.0);
        herm_coords(it->second, tmp.data());
        for (int k = 0; k < dim * dim; ++k) coord(offset + k) = tmp[static_cast<std::size_t>(k)];
        SparseTerm st;
        st.pb = static_cast<int>(pb);
        st.entries = coeff_from_dense(0, it->second).entries;
        consolidate(st.entries);
        row.terms.push_back(std::move(st));
      }
      offset += dim * dim;
    }
    for (int f = 0; f < pp.nf; ++f) {
      coord(offset + f) = free_dense[static_cast<std::size_t>(f)];
      if (free_dense[static_cast<std::size_t>(f)] != 0.0)
        row.free_terms.push_back({f, free_dense[static_cast<std::size_t>(f)]});
    }

    const double norm = coord.norm();
    if (norm < 1e-14) {
      if (std::abs(row.rhs) > 1e-10)
        throw std::invalid_argument("constraint with zero coefficients and nonzero rhs");
      coords.col(col).setZero();
      row.scale = 1.0;
    } else {
      coords.col(col) = coord / norm;
      row.scale = norm;
      row.rhs /= norm;
      for (SparseTerm& st : row.terms)
        for (CoeffEntry& e : st.entries) e.value /= norm;
      for (auto& ft : row.free_terms) ft.second /= norm;
    }
    raw.push_back(std::move(row));
    ++col;
  }

  // Rank-revealing selection of independent rows (threshold 1e-10).
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(coords);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  std::vector<int> kept;
  {
    const auto& perm = qr.colsPermutation().indices();
    for (int i = 0; i < rank; ++i) kept.push_back(perm(i));
    std::sort(kept.begin(), kept.end());
  }

  // Consistency of the dropped rows: appending the rhs as an extra coordinate
  // must not raise the rank.
  {
    Eigen::MatrixXd aug(n_params + 1, pp.original_m);
    aug.topRows(n_params) = coords;
    for (int i = 0; i < pp.original_m; ++i) aug(n_params, i) = raw[static_cast<std::size_t>(i)].rhs;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr2(aug);
    qr2.setThreshold(1e-10);
    if (static_cast<int>(qr2.rank()) > rank)
      throw std::invalid_argument("equality constraints are inconsistent");
  }

  pp.rows.reserve(kept.size());
  pp.b = RVector::Zero(static_cast<Eigen::Index>(kept.size()));
  pp.F = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kept.size()), pp.nf);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    Row& r = raw[static_cast<std::size_t>(kept[i])];
    pp.b(static_cast<Eigen::Index>(i)) = r.rhs;
    for (const auto& ft : r.free_terms) pp.F(static_cast<Eigen::Index>(i), ft.first) = ft.second;
    pp.rows.push_back(std::move(r));
  }
  pp.b_norm = pp.b.size() > 0 ? pp.b.cwiseAbs().maxCoeff() : 0.0;
  return pp;
}

double sparse_inner(const std::vector<CoeffEntry>& a, const Matrix& x) {
  double acc = 0.0;
  for (const CoeffEntry& e : a)
    acc += (std::conj(e.value) * x(e.row, e.col)).real();
  return acc;
}

// W A W for sparse Hermitian A: sum of v * W.col(p) W.row(q) over entries.
Matrix scaled_sparse(const std::vector<CoeffEntry>& a, const Matrix& w) {
  Matrix t = Matrix::Zero(w.rows(), w.cols());
  for (const CoeffEntry& e : a)
    t.noalias() += e.value * w.col(e.row) * w.row(e.col);
  return t;
}

struct Iterate {
  std::vector<Matrix> X;
  std::vector<Matrix> Z;
  RVector y;
  RVector xf;
};

double max_step(const Eigen::LLT<Matrix>& lltx, const Matrix& dx) {
  const Matrix l = lltx.matrixL();
  Matrix t1 = l.triangularView<Eigen::Lower>().solve(dx);
  Matrix t2 = l.triangularView<Eigen::Lower>().solve(Matrix(t1.adjoint()));
  Matrix s = 0.5 * (t2 + t2.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

bool llt_with_ridge(Matrix m, Eigen::LLT<Matrix>& out) {
  double ridge = 0.0;
  const double base = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  for (int attempt = 0; attempt < 6; ++attempt) {
    Eigen::LLT<Matrix> llt(m + ridge * Matrix::Identity(m.rows(), m.cols()));
    if (llt.info() == Eigen::Success) {
      out = llt;
      return true;
    }
    ridge = ridge == 0.0 ? 1e-14 * base : ridge * 100.0;
  }
  return false;
}

}  // namespace

Solution solve(const Problem& p, const Options& opts) {
  Prepped pp = preprocess(p);
  const int m = static_cast<int>(pp.rows.size());
  const int nblocks = static_cast<int>(pp.psd_dims.size());
  const int nf = pp.nf;

  Solution sol;
  sol.x.psd.resize(static_cast<std::size_t>(nblocks));
  sol.z.psd.resize(static_cast<std::size_t>(nblocks));
  sol.y = RVector::Zero(pp.original_m);

  // Initial point: scaled identities, zero multipliers.
  double a_scale = 1.0;
  for (const Row& r : pp.rows) {
    double fn2 = 0.0;
    for (const SparseTerm& st : r.terms)
      for (const CoeffEntry& e : st.entries) fn2 += std::norm(e.value);
    a_scale = std::max(a_scale, std::sqrt(fn2));
  }
  double c_scale = 1.0;
  for (const Matrix& c : pp.C) c_scale = std::max(c_scale, c.norm());
  const int nmax = *std::max_element(pp.psd_dims.begin(), pp.psd_dims.end());
  const double tau_p =
      std::max({1.0, std::sqrt(static_cast<double>(nmax)), pp.b_norm / (1.0 + a_scale)});
  const double tau_d =
      std::max({1.0, std::sqrt(static_cast<double>(nmax)), c_scale, a_scale});

  Iterate it;
  it.X.resize(static_cast<std::size_t>(nblocks));
  it.Z.resize(static_cast<std::size_t>(nblocks));
  for (int bidx = 0; bidx < nblocks; ++bidx) {
    it.X[static_cast<std::size_t>(bidx)] = tau_p * Matrix::Identity(pp.psd_dims[bidx], pp.psd_dims[bidx]);
    it.Z[static_cast<std::size_t>(bidx)] = tau_d * Matrix::Identity(pp.psd_dims[bidx], pp.psd_dims[bidx]);
  }
  it.y = RVector::Zero(m);
  it.xf = RVector::Zero(nf);

  auto eval_metrics = [&](const Iterate& cur, RVector& rp, std::vector<Matrix>& rd,
                          RVector& rf, double& pobj, double& dobj, double& pinf,
                          double& dinf, double& gap) {
    rp = pp.b;
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (const SparseTerm& st : pp.rows[static_cast<std::size_t>(i)].terms)
        acc += sparse_inner(st.entries, cur.X[static_cast<std::size_t>(st.pb)]);
      rp(i) -= acc;
    }
    if (nf > 0) rp -= pp.F * cur.xf;

    rd.resize(static_cast<std::size_t>(nblocks));
    for (int bidx = 0; bidx < nblocks; ++bidx)
      rd[static_cast<std::size_t>(bidx)] = pp.C[static_cast<std::size_t>(bidx)] + cur.Z[static_cast<std::size_t>(bidx)];
    for (int i = 0; i < m; ++i)
      for (const SparseTerm& st : pp.rows[static_cast<std::size_t>(i)].terms)
        for (const CoeffEntry& e : st.entries)
          rd[static_cast<std::size_t>(st.pb)](e.row, e.col) -= cur.y(i) * e.value;

    rf = pp.cf;
    if (nf > 0) rf -= pp.F.transpose() * cur.y;

    pobj = cur.xf.dot(pp.cf);
    for (int bidx = 0; bidx < nblocks; ++bidx)
      pobj += (pp.C[static_cast<std::size_t>(bidx)].adjoint() * cur.X[static_cast<std::size_t>(bidx)]).trace().real();
    dobj = pp.b.dot(cur.y);

    pinf = (m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0) / (1.0 + pp.b_norm);
    dinf = 0.0;
    for (const Matrix& r : rd)
      dinf = std::max(dinf, r.cwiseAbs().maxCoeff());
    if (nf > 0 && rf.size() > 0) dinf = std::max(dinf, rf.cwiseAbs().maxCoeff());
    dinf /= (1.0 + pp.coeff_scale);
    gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  };

  double best_merit = std::numeric_limits<double>::infinity();
  Iterate best = it;
  double best_pobj = 0.0, best_dobj = 0.0, best_gap = 1.0, best_pinf = 1.0, best_dinf = 1.0;

  SolveStatus status = SolveStatus::MaxIterations;
  int iter = 0;
  int stalls = 0;

  for (iter = 0; iter < opts.max_iterations; ++iter) {
    RVector rp, rf;
    std::vector<Matrix> rd;
    double pobj, dobj, pinf, dinf, gap;
    eval_metrics(it, rp, rd, rf, pobj, dobj, pinf, dinf, gap);

    const double merit = std::max({pinf, dinf, gap});
    if (merit < best_merit) {
      best_merit = merit;
      best = it;
      best_pobj = pobj;
      best_dobj = dobj;
      best_gap = gap;
      best_pinf = pinf;
      best_dinf = dinf;
    }
    if (pinf <= opts.feas_tol && dinf <= opts.feas_tol && gap <= opts.gap_tol) {
      status = SolveStatus::Optimal;
      break;
    }

    double mu = 0.0;
    for (int bidx = 0; bidx < nblocks; ++bidx)
      mu += (it.X[static_cast<std::size_t>(bidx)].adjoint() * it.Z[static_cast<std::size_t>(bidx)]).trace().real();
    mu /= static_cast<double>(pp.n_total);

    // NT scaling per block.
    std::vector<Eigen::LLT<Matrix>> lltx(static_cast<std::size_t>(nblocks)),
        lltz(static_cast<std::size_t>(nblocks));
    std::vector<Matrix> W(static_cast<std::size_t>(nblocks)), Zinv(static_cast<std::size_t>(nblocks));
    bool scaling_ok = true;
    for (int bidx = 0; bidx < nblocks; ++bidx) {
      auto& X = it.X[static_cast<std::size_t>(bidx)];
      auto& Z = it.Z[static_cast<std::size_t>(bidx)];
      X = 0.5 * (X + X.adjoint()).eval();
      Z = 0.5 * (Z + Z.adjoint()).eval();
      if (!llt_with_ridge(X, lltx[static_cast<std::size_t>(bidx)]) ||
          !llt_with_ridge(Z, lltz[static_cast<std::size_t>(bidx)])) {
        scaling_ok = false;
        break;
      }
      const Matrix lx = lltx[static_cast<std::size_t>(bidx)].matrixL();
      const Matrix lz = lltz[static_cast<std::size_t>(bidx)].matrixL();
      Eigen::JacobiSVD<Matrix> svd(lz.adjoint() * lx,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
      RVector sv = svd.singularValues();
      for (Eigen::Index k = 0; k < sv.size(); ++k) sv(k) = 1.0 / std::sqrt(std::max(sv(k), 1e-300));
      const Matrix g = lx * svd.matrixV() * sv.asDiagonal();
      W[static_cast<std::size_t>(bidx)] = g * g.adjoint();
      Zinv[static_cast<std::size_t>(bidx)] =
          lltz[static_cast<std::size_t>(bidx)].solve(Matrix::Identity(X.rows(), X.cols()));
    }
    if (!scaling_ok) {
      status = SolveStatus::NumericalFailure;
      break;
    }

    // Schur complement over the kept constraints.
    Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      for (const SparseTerm& st : pp.rows[static_cast<std::size_t>(j)].terms) {
        const Matrix t = scaled_sparse(st.entries, W[static_cast<std::size_t>(st.pb)]);
        for (int i = 0; i <= j; ++i)
          for (const SparseTerm& sti : pp.rows[static_cast<std::size_t>(i)].terms)
            if (sti.pb == st.pb) schur(i, j) += sparse_inner(sti.entries, t);
      }
    }
    schur = schur.selfadjointView<Eigen::Upper>();

    Eigen::LLT<Eigen::MatrixXd> schur_llt;
    {
      bool ok = false;
      double ridge = 0.0;
      const double base = std::max(schur.diagonal().maxCoeff(), 1e-300);
      for (int attempt = 0; attempt < 6 && !ok; ++attempt) {
        schur_llt.compute(schur + ridge * Eigen::MatrixXd::Identity(m, m));
        ok = schur_llt.info() == Eigen::Success;
        ridge = ridge == 0.0 ? 1e-14 * base : ridge * 100.0;
      }
      if (!ok) {
        status = SolveStatus::NumericalFailure;
        break;
      }
    }

    Eigen::MatrixXd uf;
    Eigen::LLT<Eigen::MatrixXd> sff_llt;
    if (nf > 0) {
      uf = schur_llt.solve(pp.F);
      Eigen::MatrixXd sff = pp.F.transpose() * uf;
      sff_llt.compute(sff);
      if (sff_llt.info() != Eigen::Success) {
        status = SolveStatus::NumericalFailure;
        break;
      }
    }

    auto direction = [&](double sigma_mu, const std::vector<Matrix>& rd_in,
                         const RVector& rp_in, const RVector& rf_in,
                         std::vector<Matrix>& dX, RVector& dy,
                         std::vector<Matrix>& dZ, RVector& dxf) {
      std::vector<Matrix> rc(static_cast<std::size_t>(nblocks));
      RVector q = RVector::Zero(m);
      for (int bidx = 0; bidx < nblocks; ++bidx) {
        const std::size_t bs = static_cast<std::size_t>(bidx);
        rc[bs] = sigma_mu * Zinv[bs] - it.X[bs];
        const Matrix inner = rc[bs] + W[bs] * rd_in[bs] * W[bs];
        for (int i = 0; i < m; ++i)
          for (const SparseTerm& st : pp.rows[static_cast<std::size_t>(i)].terms)
            if (st.pb == bidx) q(i) += sparse_inner(st.entries, inner);
      }
      const RVector g = q - rp_in;
      const RVector u0 = schur_llt.solve(g);
      if (nf > 0) {
        dxf = sff_llt.solve(rf_in - pp.F.transpose() * u0);
        dy = u0 + uf * dxf;
      } else {
        dxf = RVector::Zero(0);
        dy = u0;
      }
      dZ.assign(static_cast<std::size_t>(nblocks), Matrix());
      for (int bidx = 0; bidx < nblocks; ++bidx)
        dZ[static_cast<std::size_t>(bidx)] = -rd_in[static_cast<std::size_t>(bidx)];
      for (int i = 0; i < m; ++i)
        for (const SparseTerm& st : pp.rows[static_cast<std::size_t>(i)].terms)
          for (const CoeffEntry& e : st.entries)
            dZ[static_cast<std::size_t>(st.pb)](e.row, e.col) += dy(i) * e.value;
      dX.assign(static_cast<std::size_t>(nblocks), Matrix());
      for (int bidx = 0; bidx < nblocks; ++bidx) {
        const std::size_t bs = static_cast<std::size_t>(bidx);
        dZ[bs] = 0.5 * (dZ[bs] + dZ[bs].adjoint()).eval();
        dX[bs] = rc[bs] - W[bs] * dZ[bs] * W[bs];
        dX[bs] = 0.5 * (dX[bs] + dX[bs].adjoint()).eval();
      }
    };

    std::vector<Matrix> dX, dZ;
    RVector dy, dxf;

    // Affine probe chooses the centering weight.
    direction(0.0, rd, rp, rf, dX, dy, dZ, dxf);
    double ap = 1.0, ad = 1.0;
    for (int bidx = 0; bidx < nblocks; ++bidx) {
      ap = std::min(ap, max_step(lltx[static_cast<std::size_t>(bidx)], dX[static_cast<std::size_t>(bidx)]));
      ad = std::min(ad, max_step(lltz[static_cast<std::size_t>(bidx)], dZ[static_cast<std::size_t>(bidx)]));
    }
    double mu_aff = 0.0;
    for (int bidx = 0; bidx < nblocks; ++bidx) {
      const std::size_t bs = static_cast<std::size_t>(bidx);
      mu_aff += ((it.X[bs] + ap * dX[bs]).adjoint() * (it.Z[bs] + ad * dZ[bs]))
                    .trace()
                    .real();
    }
    mu_aff = std::max(mu_aff / static_cast<double>(pp.n_total), 0.0);
    double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
    sigma = std::min(std::max(sigma, 1e-8), 1.0);

    direction(sigma * mu, rd, rp, rf, dX, dy, dZ, dxf);
    ap = std::numeric_limits<double>::infinity();
    ad = std::numeric_limits<double>::infinity();
    for (int bidx = 0; bidx < nblocks; ++bidx) {
      ap = std::min(ap, max_step(lltx[static_cast<std::size_t>(bidx)], dX[static_cast<std::size_t>(bidx)]));
      ad = std::min(ad, max_step(lltz[static_cast<std::size_t>(bidx)], dZ[static_cast<std::size_t>(bidx)]));
    }
    ap = std::min(1.0, opts.step_fraction * ap);
    ad = std::min(1.0, opts.step_fraction * ad);

    if (ap < 1e-12 && ad < 1e-12) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }

    for (int bidx = 0; bidx < nblocks; ++bidx) {
      const std::size_t bs = static_cast<std::size_t>(bidx);
      it.X[bs] += ap * dX[bs];
      it.Z[bs] += ad * dZ[bs];
    }
    it.y += ad * dy;
    if (nf > 0) it.xf += ap * dxf;

    if (opts.verbose) {
      // One line per iteration keeps failures debuggable.
      std::fprintf(stderr, "iter %3d  mu %.3e  gap %.3e  pinf %.3e  dinf %.3e  ap %.2f ad %.2f sig %.2f\n",
                   iter, mu, gap, pinf, dinf, ap, ad, sigma);
    }
  }

  const Iterate& out = status == SolveStatus::Optimal ? it : best;
  if (status == SolveStatus::Optimal) {
    RVector rp, rf;
    std::vector<Matrix> rd;
    eval_metrics(it, rp, rd, rf, best_pobj, best_dobj, best_pinf, best_dinf, best_gap);
  }

  for (int bidx = 0; bidx < nblocks; ++bidx) {
    sol.x.psd[static_cast<std::size_t>(bidx)] = out.X[static_cast<std::size_t>(bidx)];
    sol.z.psd[static_cast<std::size_t>(bidx)] = out.Z[static_cast<std::size_t>(bidx)];
  }
  sol.x.free = out.xf;
  for (int i = 0; i < m; ++i)
    sol.y(pp.rows[static_cast<std::size_t>(i)].original) =
        out.y(i) / pp.rows[static_cast<std::size_t>(i)].scale;
  sol.status = status;
  sol.primal_value = best_pobj;
  sol.dual_value = best_dobj;
  sol.relative_gap = best_gap;
  sol.primal_residual = best_pinf;
  sol.dual_residual = best_dinf;
  sol.iterations = iter;
  if (status == SolveStatus::Optimal) {
    sol.primal_value = 0.0;
    for (int bidx = 0; bidx < nblocks; ++bidx)
      sol.primal_value +=
          (pp.C[static_cast<std::size_t>(bidx)].adjoint() * out.X[static_cast<std::size_t>(bidx)]).trace().real();
    sol.primal_value += out.xf.dot(pp.cf);
    sol.dual_value = pp.b.dot(out.y);
  }
  return sol;
}

const Matrix& Solution::psd_block(const Problem& p, int block) const {
  if (block < 0 || block >= static_cast<int>(p.blocks.size()) ||
      p.blocks[static_cast<std::size_t>(block)].kind != BlockKind::HermitianPsd)
    throw std::invalid_argument("psd_block: not a PSD block");
  int pb = 0;
  for (int bi = 0; bi < block; ++bi)
    if (p.blocks[static_cast<std::size_t>(bi)].kind == BlockKind::HermitianPsd) ++pb;
  return x.psd[static_cast<std::size_t>(pb)];
}

RVector Solution::free_block(const Problem& p, int block) const {
  if (block < 0 || block >= static_cast<int>(p.blocks.size()) ||
      p.blocks[static_cast<std::size_t>(block)].kind != BlockKind::FreeScalar)
    throw std::invalid_argument("free_block: not a free block");
  int offset = 0;
  for (int bi = 0; bi < block; ++bi)
    if (p.blocks[static_cast<std::size_t>(bi)].kind == BlockKind::FreeScalar)
      offset += p.blocks[static_cast<std::size_t>(bi)].dim;
  return x.free.segment(offset, p.blocks[static_cast<std::size_t>(block)].dim);
}

double Solution::free_value(const Problem& p, int block, int index) const {
  return free_block(p, block)(index);
}

Problem embed_hermitian(const Problem& p) {
  Problem out;
  auto embed = [](const Matrix& m) {
    const Eigen::Index n = m.rows();
    Matrix e = Matrix::Zero(2 * n, 2 * n);
    e.topLeftCorner(n, n) = m.real().cast<Complex>();
    e.bottomRightCorner(n, n) = m.real().cast<Complex>();
    e.topRightCorner(n, n) = (-m.imag()).cast<Complex>();
    e.bottomLeftCorner(n, n) = m.imag().cast<Complex>();
    return e;
  };
  for (const Block& b : p.blocks) {
    if (b.kind == BlockKind::HermitianPsd)
      out.blocks.push_back({b.label, 2 * b.dim, b.kind});
    else
      out.blocks.push_back(b);
  }
  auto convert = [&](const Coeff& c) {
    const Block& b = p.blocks[static_cast<std::size_t>(c.block)];
    if (b.kind == BlockKind::FreeScalar) return c;
    // Halve the embedded coefficient so <emb(A)/2, emb(X)> = <A, X>.
    return coeff_from_dense(c.block, 0.5 * embed(c.dense(b.dim)));
  };
  for (const Coeff& c : p.objective) out.objective.push_back(convert(c));
  for (const Constraint& con : p.constraints) {
    Constraint& nc = out.new_constraint(con.rhs);
    for (const Coeff& c : con.terms) nc.terms.push_back(convert(c));
  }
  return out;
}

namespace {

double eval_terms(const Problem& p, const std::vector<Coeff>& terms,
                  const BlockValues& x) {
  std::vector<int> block_psd(p.blocks.size(), -1), block_f(p.blocks.size(), -1);
  int pb = 0, foff = 0;
  for (std::size_t bi = 0; bi < p.blocks.size(); ++bi) {
    if (p.blocks[bi].kind == BlockKind::HermitianPsd)
      block_psd[bi] = pb++;
    else {
      block_f[bi] = foff;
      foff += p.blocks[bi].dim;
    }
  }
  double acc = 0.0;
  for (const Coeff& c : terms) {
    const Block& b = p.blocks[static_cast<std::size_t>(c.block)];
    if (b.kind == BlockKind::HermitianPsd) {
      const Matrix& xb = x.psd[static_cast<std::size_t>(block_psd[static_cast<std::size_t>(c.block)])];
      for (const CoeffEntry& e : c.entries)
        acc += (std::conj(e.value) * xb(e.row, e.col)).real();
    } else {
      for (const CoeffEntry& e : c.entries)
        acc += e.value.real() * x.free(block_f[static_cast<std::size_t>(c.block)] + e.row);
    }
  }
  return acc;
}

}  // namespace

double constraint_value(const Problem& p, const Constraint& c, const BlockValues& x) {
  return eval_terms(p, c.terms, x);
}

double objective_value(const Problem& p, const BlockValues& x) {
  return eval_terms(p, p.objective, x);
}

Certificate certify(const Solution& s, const Problem& p) {
  Certificate cert;
  int pb = 0, foff = 0;
  std::vector<int> block_psd(p.blocks.size(), -1), block_f(p.blocks.size(), -1);
  for (std::size_t bi = 0; bi < p.blocks.size(); ++bi) {
    if (p.blocks[bi].kind == BlockKind::HermitianPsd)
      block_psd[bi] = pb++;
    else {
      block_f[bi] = foff;
      foff += p.blocks[bi].dim;
    }
  }

  double b_norm = 0.0;
  for (const Constraint& c : p.constraints) b_norm = std::max(b_norm, std::abs(c.rhs));

  cert.primal_value = 0.0;
  for (const Coeff& c : p.objective) {
    const Block& b = p.blocks[static_cast<std::size_t>(c.block)];
    if (b.kind == BlockKind::HermitianPsd) {
      cert.primal_value +=
          (c.dense(b.dim).adjoint() * s.x.psd[static_cast<std::size_t>(block_psd[static_cast<std::size_t>(c.block)])])
              .trace()
              .real();
    } else {
      for (const CoeffEntry& e : c.entries)
        cert.primal_value += e.value.real() * s.x.free(block_f[static_cast<std::size_t>(c.block)] + e.row);
    }
  }
  for (std::size_t ci = 0; ci < p.constraints.size(); ++ci) {
    double acc = 0.0;
    for (const Coeff& c : p.constraints[ci].terms) {
      const Block& b = p.blocks[static_cast<std::size_t>(c.block)];
      if (b.kind == BlockKind::HermitianPsd) {
        acc += (c.dense(b.dim).adjoint() *
                s.x.psd[static_cast<std::size_t>(block_psd[static_cast<std::size_t>(c.block)])])
                   .trace()
                   .real();
      } else {
        for (const CoeffEntry& e : c.entries)
          acc += e.value.real() * s.x.free(block_f[static_cast<std::size_t>(c.block)] + e.row);
      }
    }
    cert.max_equality_residual =
        std::max(cert.max_equality_residual, std::abs(acc - p.constraints[ci].rhs));
    cert.dual_value += s.y(static_cast<Eigen::Index>(ci)) * p.constraints[ci].rhs;
  }

  cert.min_x_eigenvalue = std::numeric_limits<double>::infinity();
  cert.min_z_eigenvalue = std::numeric_limits<double>::infinity();
  for (const Matrix& x : s.x.psd)
    cert.min_x_eigenvalue = std::min(cert.min_x_eigenvalue, la::min_eigenvalue(x));
  for (const Matrix& z : s.z.psd)
    cert.min_z_eigenvalue = std::min(cert.min_z_eigenvalue, la::min_eigenvalue(z));

  // Dual slack residual per PSD block.
  for (std::size_t bi = 0; bi < p.blocks.size(); ++bi) {
    if (p.blocks[bi].kind != BlockKind::HermitianPsd) continue;
    Matrix acc = -s.z.psd[static_cast<std::size_t>(block_psd[bi])];
    for (std::size_t ci = 0; ci < p.constraints.size(); ++ci)
      for (const Coeff& c : p.constraints[ci].terms)
        if (c.block == static_cast<int>(bi))
          acc += s.y(static_cast<Eigen::Index>(ci)) * c.dense(p.blocks[bi].dim);
    for (const Coeff& c : p.objective)
      if (c.block == static_cast<int>(bi)) acc -= c.dense(p.blocks[bi].dim);
    cert.max_dual_residual = std::max(cert.max_dual_residual, acc.cwiseAbs().maxCoeff());
  }
  // Free-scalar dual equalities F^T y = c_f.
  if (foff > 0) {
    RVector racc = RVector::Zero(foff);
    for (std::size_t ci = 0; ci < p.constraints.size(); ++ci)
      for (const Coeff& c : p.constraints[ci].terms)
        if (p.blocks[static_cast<std::size_t>(c.block)].kind == BlockKind::FreeScalar)
          for (const CoeffEntry& e : c.entries)
            racc(block_f[static_cast<std::size_t>(c.block)] + e.row) +=
                s.y(static_cast<Eigen::Index>(ci)) * e.value.real();
    for (const Coeff& c : p.objective)
      if (p.blocks[static_cast<std::size_t>(c.block)].kind == BlockKind::FreeScalar)
        for (const CoeffEntry& e : c.entries)
          racc(block_f[static_cast<std::size_t>(c.block)] + e.row) -= e.value.real();
    if (racc.size() > 0)
      cert.max_dual_residual = std::max(cert.max_dual_residual, racc.cwiseAbs().maxCoeff());
  }

  cert.relative_gap = std::abs(cert.primal_value - cert.dual_value) /
                      (1.0 + std::abs(cert.primal_value) + std::abs(cert.dual_value));
  cert.weak_duality_margin = cert.dual_value - cert.primal_value;
  const double scale = 1.0 + b_norm;
  cert.feasible_primal =
      cert.max_equality_residual <= 1e-7 * scale && cert.min_x_eigenvalue >= -1e-7;
  cert.feasible_dual = cert.max_dual_residual <= 1e-6 && cert.min_z_eigenvalue >= -1e-7;
  return cert;
}

void dump_sdpa(const Problem& p, std::ostream& os) {
  const Problem emb = embed_hermitian(p);
  // Collect block layout: PSD blocks verbatim, all free scalars as one
  // diagonal block with paired +/- entries.
  int nf = 0;
  for (const Block& b : emb.blocks)
    if (b.kind == BlockKind::FreeScalar) nf += b.dim;
  std::vector<int> sdpa_block(emb.blocks.size(), 0);
  std::vector<int> free_off(emb.blocks.size(), 0);
  int nb = 0;
  {
    int foff = 0;
    for (std::size_t bi = 0; bi < emb.blocks.size(); ++bi) {
      if (emb.blocks[bi].kind == BlockKind::HermitianPsd)
        sdpa_block[bi] = ++nb;
      else {
        free_off[bi] = foff;
        foff += emb.blocks[bi].dim;
      }
    }
  }
  const int diag_block = nf > 0 ? nb + 1 : 0;

  os << emb.constraints.size() << "\n";
  os << (nf > 0 ? nb + 1 : nb) << "\n";
  for (const Block& b : emb.blocks)
    if (b.kind == BlockKind::HermitianPsd) os << b.dim << " ";
  if (nf > 0) os << -(2 * nf);
  os << "\n";
  for (const Constraint& c : emb.constraints) os << c.rhs << " ";
  os << "\n";

  auto write_coeff = [&](int k, const Coeff& c) {
    const Block& b = emb.blocks[static_cast<std::size_t>(c.block)];
    if (b.kind == BlockKind::HermitianPsd) {
      const Matrix m = c.dense(b.dim);
      for (int i = 0; i < b.dim; ++i)
        for (int j = i; j < b.dim; ++j)
          if (std::abs(m(i, j)) > 0.0)
            os << k << " " << sdpa_block[static_cast<std::size_t>(c.block)] << " " << i + 1 << " "
               << j + 1 << " " << m(i, j).real() << "\n";
    } else {
      for (const CoeffEntry& e : c.entries) {
        const int idx = 2 * (free_off[static_cast<std::size_t>(c.block)] + e.row);
        os << k << " " << diag_block << " " << idx + 1 << " " << idx + 1 << " "
           << e.value.real() << "\n";
        os << k << " " << diag_block << " " << idx + 2 << " " << idx + 2 << " "
           << -e.value.real() << "\n";
      }
    }
  };
  for (const Coeff& c : emb.objective) write_coeff(0, c);
  for (std::size_t ci = 0; ci < emb.constraints.size(); ++ci)
    for (const Coeff& c : emb.constraints[ci].terms)
      write_coeff(static_cast<int>(ci) + 1, c);
}

}  // namespace sdp
}  // namespace contracta
