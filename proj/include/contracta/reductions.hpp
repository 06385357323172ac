#pragma once

#include <optional>
#include <vector>

#include "contracta/channels.hpp"

namespace contracta {
namespace reductions {

enum class Variant { Hermitian, Commutative };

struct GrothendieckInstance {
  Variant variant = Variant::Commutative;
  // Hermitian: n operators F_i, each d x d Hermitian.
  std::vector<Matrix> operators;
  // Commutative: n vectors f_i in R^d.
  std::vector<RVector> vectors;

  int n() const;
  int d() const;
};

struct ReductionOutput {
  KrausChannel channel;  // d_in = n + 1, d_out = 2d
  double alpha = 0.0;
  double alpha_max = 0.0;
  Superoperator adjoint;  // the map Phi_alpha^* on B(C^{2d})
};

// Doubled coefficients F_i (+) (-F_i) as 2d x 2d matrices.
std::vector<Matrix> doubled_coefficients(const GrothendieckInstance& inst);

// Psi(Y) = (sum_i tr(Ftilde_i Y) e_i) e_{n+1}^T + transpose; trace-free on the
// identity, which makes the shifted map unital.
Matrix psi_apply(const std::vector<Matrix>& doubled, const Matrix& y);

// Superoperator of Phi_alpha^*(Y) = alpha Psi(Y) + tr(Y)/(2d) I_{n+1}.
Superoperator build_adjoint_superoperator(const GrothendieckInstance& inst,
                                          double alpha);

// Largest alpha keeping the Choi matrix PSD (bisection to 1e-9); instances
// with Psi = 0 report the surrogate cap 1e6.
double max_cp_alpha(const GrothendieckInstance& inst);

// Builds Phi_alpha; alpha defaults to 0.9 * alpha_max.
ReductionOutput build_phi_alpha(const GrothendieckInstance& inst,
                                std::optional<double> alpha = std::nullopt);

// Exact ||F|| for commutative instances by enumerating the +-1 hypercube
// (the maximum of a convex function over the ball sits at a vertex).
double commutative_norm_enumerated(const GrothendieckInstance& inst);

// Heuristic sup of ||F^*(Y)||_2 over Hermitian ||Y||_inf <= 1 for the
// Hermitian variant: see-saw ascent plus random sampling.
double hermitian_norm_seesaw(const GrothendieckInstance& inst, int restarts = 32,
                             int iterations = 200, std::uint64_t seed = 1);

struct NormIdentityReport {
  double norm_independent = 0.0;  // enumerated (commutative) or see-saw value
  double eta_lower = 0.0;
  double eta_upper = 0.0;
  double scaled_norm = 0.0;       // 2 alpha * ||F||, the value eta_tr must take
  double bracket_violation = 0.0; // max(0, lower - scaled, scaled - upper)
};

// Checks eta_lower <= 2 alpha ||F|| <= eta_upper for the emitted channel,
// with the norm computed independently of the channel pipeline.
NormIdentityReport norm_identity_check(const GrothendieckInstance& inst,
                                       const ReductionOutput& out,
                                       double eta_lower, double eta_upper);

}  // namespace reductions
}  // namespace contracta
