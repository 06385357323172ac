#pragma once

#include <vector>

#include "contracta/linalg.hpp"
#include "contracta/rng.hpp"

namespace contracta {

// Completely positive trace-preserving map in Kraus form. Kraus operators map
// the input space into the output space (d_out x d_in matrices).
struct KrausChannel {
  int d_in = 0;
  int d_out = 0;
  std::vector<Matrix> kraus;
};

// Matrix of a linear map B(C^{d_in}) -> B(C^{d_out}) acting on row-major
// vectorized operators: vec(L(X)) = matrix * vec(X).
struct Superoperator {
  int d_in = 0;
  int d_out = 0;
  Matrix matrix;  // (d_out^2) x (d_in^2)
};

namespace channels {

struct Diagnostics {
  double tp_residual = 0.0;       // ||sum K^* K - I||_inf
  double choi_min_eigenvalue = 0.0;
  bool trace_preserving = false;  // tp_residual <= 1e-9
  bool completely_positive = false;
};

Diagnostics validate(const KrausChannel& ch);
void require_valid(const KrausChannel& ch);

// Choi state J = (Id (x) Phi)(|psi+><psi+|), unit trace, A system first.
Matrix choi(const KrausChannel& ch);

Matrix apply(const KrausChannel& ch, const Matrix& x);
// Phi(X) = d_A tr_A( J (X^T (x) I_B) ).
Matrix apply_via_choi(const Matrix& choi_state, int d_in, int d_out, const Matrix& x);

// Adjoint map Phi^*(Y) = sum K^* Y K.
Matrix adjoint_apply(const KrausChannel& ch, const Matrix& y);

Superoperator superoperator(const KrausChannel& ch);
Superoperator adjoint_superoperator(const KrausChannel& ch);

KrausChannel tensor(const KrausChannel& a, const KrausChannel& b);
KrausChannel tensor_power(const KrausChannel& ch, int copies);

// Kraus operators recovered from a (trace-d_A scaled) Choi matrix; eigenvalues
// below `cutoff` are dropped, which canonicalizes the Kraus rank.
std::vector<Matrix> kraus_from_choi(const Matrix& choi_state, int d_in, int d_out,
                                    double cutoff = 1e-10);

// Rebuild a channel whose adjoint is the given unital completely positive
// map. Throws if the Choi matrix has an eigenvalue below -1e-8 or the
// unitality residual exceeds 1e-8.
KrausChannel channel_from_adjoint_superoperator(const Superoperator& adj);

KrausChannel gallery_amplitude_damping(double p, double eta);
KrausChannel gallery_depolarizing(double p);
// Kraus set {|i><j|/sqrt(d-1) : i != j}; requires d > 2.
KrausChannel gallery_counterexample(int d);

// Haar-style random channel: QR of a Gaussian (kraus_count*d_out) x d_in block
// gives an exact isometry, sliced into Kraus operators.
KrausChannel random_channel(Rng& rng, int d_in, int d_out, int kraus_count);

}  // namespace channels
}  // namespace contracta
