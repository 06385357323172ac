#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contracta/channels.hpp"
#include "contracta/sdp.hpp"

namespace contracta {
namespace structure {

// Subspace of p x q matrices held as an orthonormal basis.
struct OperatorSubspace {
  int p = 0, q = 0;
  std::vector<Matrix> basis;

  int dim() const { return static_cast<int>(basis.size()); }
  // Orthogonal projection onto the subspace.
  Matrix project(const Matrix& x) const;
  double distance(const Matrix& x) const;  // Frobenius distance to the subspace
  bool is_selfadjoint(double tol = 1e-8) const;
  bool contains_identity(double tol = 1e-8) const;
};

// Orthonormalize a spanning set (rank threshold 1e-10).
OperatorSubspace subspace_from_span(int p, int q, const std::vector<Matrix>& span);

// Span{K_i^* K_j} of the channel's Kraus operators.
OperatorSubspace confusability_graph(const KrausChannel& ch);

OperatorSubspace orthogonal_complement(const OperatorSubspace& s);

// Distance between two subspaces as the operator norm of the projector gap.
double projector_distance(const OperatorSubspace& a, const OperatorSubspace& b);

// Channel with G_Phi = S for a self-adjoint, unital subspace S, built from a
// Hermitian basis {M_i} so that K_i^* K_j = delta_ij N_i.
KrausChannel channel_from_operator_system(const OperatorSubspace& s);

// S = Wvec^{-1}(ker Pi) for an orthogonal projector Pi on C^n (x) C^n.
OperatorSubspace kernel_subspace_from_projector(const Matrix& pi, int n);

struct HatExtension {
  OperatorSubspace hat;             // E01 (x) S + E10 (x) S^* inside B(C^{p+q})
  std::vector<Matrix> perp_basis;   // Hermitian orthonormal basis of hat^perp
};

HatExtension hat_extension(const OperatorSubspace& s);

struct RankOneSearchResult {
  double distance = 0.0;
  CVector u, v;
  bool converged = false;
};

// Alternating minimization of || P_{S^perp}(u v^*) ||_2 over unit u, v.
RankOneSearchResult rank_one_distance(const OperatorSubspace& s, int restarts = 16,
                                      int iterations = 100, std::uint64_t seed = 1);

struct SepBound {
  double value = 0.0;
  CVector u, v;  // witness (upper bound only)
};

// See-saw upper bound on l_SEP(A) = min <A, uu* (x) vv*>.
SepBound l_sep_upper(const Matrix& a, int d1, int d2, int restarts = 16,
                     int iterations = 200, std::uint64_t seed = 1);

// PPT relaxation: min <A, X> over X PSD, X^{T_B} PSD, tr X = 1.
double l_sep_lower_ppt(const Matrix& a, int d1, int d2,
                       const sdp::Options& solver = {});

struct EtaOneReport {
  double rank_one_dist = 1.0;
  CVector witness_u, witness_v;
  double witness_trace_distance = 0.0;  // || Phi(uu*) - Phi(vv*) ||_1
  double l_sep_upper_value = 0.0;       // on the composed-map Choi
  double l_sep_lower_value = 0.0;
  double seesaw_lower = 0.0;
  bool certified = false;
  std::string verdict;  // "eta=1 certified" or "eta<1 evidence"
};

// Runs the rank-one test on G_Phi^perp, the separability bounds on the Choi
// matrix of Phi^* o Phi, and a see-saw lower bound, then certifies eta = 1
// when a zero-distance witness reproduces orthogonal outputs.
EtaOneReport eta_one_report(const KrausChannel& ch, int restarts = 24,
                            std::uint64_t seed = 1);

}  // namespace structure
}  // namespace contracta
