#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "contracta/linalg.hpp"

namespace contracta {
namespace sdp {

enum class BlockKind { HermitianPsd, FreeScalar };

struct Block {
  std::string label;
  int dim = 1;
  BlockKind kind = BlockKind::HermitianPsd;
};

struct CoeffEntry {
  int row = 0;
  int col = 0;
  Complex value{0.0, 0.0};
};

// Sparse Hermitian coefficient on one block. The assembled matrix must be
// Hermitian; for FreeScalar blocks entries use (index, 0, real value).
struct Coeff {
  int block = -1;
  std::vector<CoeffEntry> entries;

  void add(int r, int c, Complex v);
  // Adds (r,c,v) together with the mirrored conjugate entry when r != c.
  void add_herm(int r, int c, Complex v);
  Matrix dense(int dim) const;
};

struct Constraint {
  std::vector<Coeff> terms;
  double rhs = 0.0;
};

// Block-diagonal SDP in primal form:
//   maximize   sum_b <C_b, X_b> + c_f . x_f
//   subject to sum_b <A_{i,b}, X_b> + F_i . x_f = b_i
//              X_b PSD for HermitianPsd blocks, x_f unconstrained reals.
struct Problem {
  std::vector<Block> blocks;
  std::vector<Coeff> objective;
  std::vector<Constraint> constraints;

  int add_psd_block(const std::string& label, int dim);
  int add_free_block(const std::string& label, int dim);
  void add_objective(const Coeff& c) { objective.push_back(c); }
  Constraint& new_constraint(double rhs);
};

// Collects nonzeros of a dense Hermitian matrix into a Coeff.
Coeff coeff_from_dense(int block, const Matrix& m, double drop_tol = 0.0);

enum class SolveStatus { Optimal, MaxIterations, NumericalFailure };

struct Options {
  int max_iterations = 200;
  double gap_tol = 1e-9;
  double feas_tol = 1e-9;
  double step_fraction = 0.98;
  bool verbose = false;
};

struct BlockValues {
  std::vector<Matrix> psd;   // one per HermitianPsd block, problem order
  RVector free;              // concatenated FreeScalar values
};

struct Solution {
  SolveStatus status = SolveStatus::NumericalFailure;
  BlockValues x;             // primal
  RVector y;                 // one multiplier per original constraint
  BlockValues z;             // dual slack blocks (free part empty)
  double primal_value = 0.0;
  double dual_value = 0.0;
  double relative_gap = 1.0;
  double primal_residual = 1.0;
  double dual_residual = 1.0;
  int iterations = 0;

  const Matrix& psd_block(const Problem& p, int block) const;
  double free_value(const Problem& p, int block, int index) const;
  // Reassembled Hermitian matrix of a FreeScalar block interpreted through a
  // basis is left to callers; this returns the raw scalar span.
  RVector free_block(const Problem& p, int block) const;
};

Solution solve(const Problem& p, const Options& opts = {});

// Real embedding H = R + iS -> [[R, -S], [S, R]] with the factor-2 inner
// product compensation folded into the coefficients, so optimal values agree.
Problem embed_hermitian(const Problem& p);

struct Certificate {
  double primal_value = 0.0;
  double dual_value = 0.0;
  double relative_gap = 1.0;
  double max_equality_residual = 0.0;     // over original constraints
  double min_x_eigenvalue = 0.0;
  double min_z_eigenvalue = 0.0;
  double max_dual_residual = 0.0;         // || sum y A - C - Z ||_inf per block
  double weak_duality_margin = 0.0;       // dual - primal (>= -tol when clean)
  bool feasible_primal = false;
  bool feasible_dual = false;
};

// Residuals recomputed from problem data alone, independent of the solver's
// internal bookkeeping.
Certificate certify(const Solution& s, const Problem& p);

// <A_i, X> + F_i . x_f for one constraint, given values for every block
// (BlockValues.psd in PSD-declaration order).
double constraint_value(const Problem& p, const Constraint& c, const BlockValues& x);

// sum_b <C_b, X_b> + c_f . x_f.
double objective_value(const Problem& p, const BlockValues& x);

// Text dump mirroring the sparse SDPA convention (the LMI/dual view:
// min b.y s.t. sum_i y_i A_i - C >= 0), on the real embedding. Free scalars
// appear as paired 1x1 diagonal blocks encoding the equality two-sided.
void dump_sdpa(const Problem& p, std::ostream& os);

}  // namespace sdp
}  // namespace contracta
