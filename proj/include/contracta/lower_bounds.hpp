#pragma once

#include <cstdint>
#include <vector>

#include "contracta/channels.hpp"
#include "contracta/sdp.hpp"

namespace contracta {
namespace lb {

struct SeesawWitness {
  CVector u, v;        // orthonormal input pair
  Matrix x;            // Hermitian, ||X||_inf <= 1
  double value = 0.0;  // 0.5 <uu* - vv*, Phi^*(X)>, re-verified
  int iterations = 0;
  int restarts_used = 0;
};

struct SeesawOptions {
  int restarts = 32;
  int max_iterations = 200;
  double stall_tolerance = 1e-10;
  std::uint64_t seed = 1;
};

// Success probability of discriminating Phi(rho1) and Phi(rho2) with the
// optimal two-outcome measurement: 1/2 + ||Phi(rho1) - Phi(rho2)||_1 / 4.
double helstrom_value(const KrausChannel& ch, const Matrix& rho1, const Matrix& rho2);

// Alternating ascent over orthogonal pure input pairs and the dual operator:
// given (u, v) set X = sign(Phi(uu* - vv*)); given X take the extreme
// eigenvectors of Phi^*(X). Returns a verified lower-bound witness.
SeesawWitness seesaw_eta(const KrausChannel& ch, const SeesawOptions& opts = {});

// 0.5 (lambda_max - lambda_min)(Phi^*(X)).
double dual_eigen_gap(const KrausChannel& ch, const Matrix& x);

struct PsuccWitness {
  double value = 0.0;
  std::vector<Matrix> states;
  std::vector<Matrix> povm;
  double povm_residual = 0.0;  // || sum M - I ||_inf
  int iterations = 0;
};

// Alternating lower bound on the k-message success probability. States fixed:
// the optimal POVM (Helstrom pair for k = 2, an SDP otherwise); POVM fixed:
// each state is a top eigenvector of Phi^*(M_i).
PsuccWitness psucc_seesaw(const KrausChannel& ch, int k,
                          const SeesawOptions& opts = {});

// Optimal POVM for fixed output states, by value (1/k) sum tr(M_i sigma_i).
std::vector<Matrix> optimal_povm(const std::vector<Matrix>& outputs);

struct RuskaiReport {
  int samples = 0;
  int violations = 0;
  double max_ratio = 0.0;
  double reference = 0.0;  // best orthogonal-pure value of the see-saw
};

// Checks ||Phi(rho) - Phi(sigma)||_1 / ||rho - sigma||_1 against the best
// orthogonal-pure-pair value on random mixed pairs.
RuskaiReport ruskai_sample_check(const KrausChannel& ch, int samples,
                                 const SeesawOptions& opts = {});

}  // namespace lb
}  // namespace contracta
