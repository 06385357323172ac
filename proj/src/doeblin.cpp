#include "contracta/doeblin.hpp"

#include <cmath>

namespace contracta {
namespace doeblin {

namespace {

// Equivalent pair of programs (strong duality, both strictly feasible):
//   max tr(X_B)  s.t.  I_A (x) X_B <= S_J          (X_B Hermitian)
//   min <S_J, Y> s.t.  tr_A(Y) = I_B, Y >= 0
// where S_J is d_A J(Phi) by default. The compact second form is solved; the
// witness X_B is read off the equality multipliers.
DoeblinResult solve_compact(const Matrix& scaled_choi, int da, int db,
                            const sdp::Options& solver_opts) {
  sdp::Problem prob;
  const int y = prob.add_psd_block("Y", da * db);
  sdp::Coeff obj = sdp::coeff_from_dense(y, -scaled_choi, 1e-14);
  prob.add_objective(obj);

  const std::vector<Matrix> basis = la::hermitian_basis(db);
  for (const Matrix& h : basis) {
    sdp::Constraint& con = prob.new_constraint(h.trace().real());
    sdp::Coeff c;
    c.block = y;
    // I_A (x) H has one copy of H per diagonal A index.
    for (int a = 0; a < da; ++a)
      for (int r = 0; r < db; ++r)
        for (int q = 0; q < db; ++q)
          if (std::abs(h(r, q)) > 0.0) c.add(a * db + r, a * db + q, h(r, q));
    con.terms.push_back(c);
  }

  sdp::Solution sol = sdp::solve(prob, solver_opts);

  DoeblinResult res;
  res.status = sol.status;
  res.certificate = sdp::certify(sol, prob);
  Matrix xb = Matrix::Zero(db, db);
  for (std::size_t q = 0; q < basis.size(); ++q)
    xb -= sol.y(static_cast<Eigen::Index>(q)) * basis[q];
  res.witness = 0.5 * (xb + xb.adjoint());
  res.alpha = res.witness.trace().real();
  res.eta_upper = 1.0 - res.alpha;
  Matrix slack = scaled_choi - la::kron(Matrix::Identity(da, da), res.witness);
  res.witness_slack = la::min_eigenvalue(slack);
  return res;
}

}  // namespace

DoeblinResult doeblin_alpha(const KrausChannel& ch, const Options& opts) {
  channels::require_valid(ch);
  Matrix j = channels::choi(ch);
  const double scale = opts.strict_choi_state ? 1.0 : static_cast<double>(ch.d_in);
  return solve_compact(scale * j, ch.d_in, ch.d_out, opts.solver);
}

double doeblin_bound_eta(const KrausChannel& ch, const Options& opts) {
  return doeblin_alpha(ch, opts).eta_upper;
}

bool choi_is_a_blockdiagonal(const Matrix& choi_state, int d_in, int d_out,
                             double tol) {
  for (int i = 0; i < d_in; ++i)
    for (int j = 0; j < d_in; ++j) {
      if (i == j) continue;
      if (choi_state.block(i * d_out, j * d_out, d_out, d_out).cwiseAbs().maxCoeff() >
          tol)
        return false;
    }
  return true;
}

std::optional<double> induced_doeblin_blockdiag(const KrausChannel& ch,
                                                const Options& opts) {
  channels::require_valid(ch);
  const Matrix j = channels::choi(ch);
  if (!choi_is_a_blockdiagonal(j, ch.d_in, ch.d_out)) return std::nullopt;
  // Block-diagonal d_A J - I (x) X_B: block-positivity equals positivity, so
  // the induced coefficient is the plain Doeblin SDP.
  return doeblin_alpha(ch, opts).alpha;
}

DoeblinResult doeblin_alpha_primal_form(const KrausChannel& ch, const Options& opts) {
  channels::require_valid(ch);
  const int da = ch.d_in, db = ch.d_out;
  const Matrix scaled_choi =
      (opts.strict_choi_state ? 1.0 : static_cast<double>(da)) * channels::choi(ch);

  sdp::Problem prob;
  const int slack = prob.add_psd_block("S", da * db);
  const int xb = prob.add_free_block("x", db * db);
  const std::vector<Matrix> basis = la::hermitian_basis(db);

  {
    sdp::Coeff obj;
    obj.block = xb;
    for (std::size_t q = 0; q < basis.size(); ++q) {
      const double t = basis[q].trace().real();
      if (std::abs(t) > 0.0) obj.add(static_cast<int>(q), 0, t);
    }
    prob.add_objective(obj);
  }

  // S + sum_q x_q (I (x) H_q) = scaled_choi, entrywise over a Hermitian basis
  // of the joint space.
  const std::vector<Matrix> joint = la::hermitian_basis(da * db);
  for (const Matrix& g : joint) {
    sdp::Constraint& con =
        prob.new_constraint(la::hs_inner(g, scaled_choi).real());
    con.terms.push_back(sdp::coeff_from_dense(slack, g, 1e-14));
    sdp::Coeff cf;
    cf.block = xb;
    for (std::size_t q = 0; q < basis.size(); ++q) {
      const Matrix ixh = la::kron(Matrix::Identity(da, da), basis[q]);
      const double v = la::hs_inner(g, ixh).real();
      if (std::abs(v) > 1e-14) cf.add(static_cast<int>(q), 0, v);
    }
    if (!cf.entries.empty()) con.terms.push_back(cf);
  }

  sdp::Solution sol = sdp::solve(prob, opts.solver);
  DoeblinResult res;
  res.status = sol.status;
  res.certificate = sdp::certify(sol, prob);
  Matrix w = Matrix::Zero(db, db);
  const RVector xs = sol.free_block(prob, xb);
  for (std::size_t q = 0; q < basis.size(); ++q)
    w += xs(static_cast<Eigen::Index>(q)) * basis[q];
  res.witness = 0.5 * (w + w.adjoint());
  res.alpha = res.witness.trace().real();
  res.eta_upper = 1.0 - res.alpha;
  res.witness_slack = la::min_eigenvalue(
      scaled_choi - la::kron(Matrix::Identity(da, da), res.witness));
  return res;
}

}  // namespace doeblin
}  // namespace contracta
