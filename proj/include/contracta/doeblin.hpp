#pragma once

#include <optional>

#include "contracta/channels.hpp"
#include "contracta/sdp.hpp"

namespace contracta {
namespace doeblin {

struct DoeblinResult {
  double alpha = 0.0;
  double eta_upper = 1.0;          // 1 - alpha
  Matrix witness;                  // Hermitian X_B with I (x) X_B <= scale * J
  double witness_slack = 0.0;      // min eigenvalue of scale*J - I (x) X_B
  sdp::Certificate certificate;
  sdp::SolveStatus status = sdp::SolveStatus::NumericalFailure;
};

struct Options {
  // The program maximizes tr(X_B) subject to I (x) X_B <= d_A J(Phi). With
  // strict_choi_state the unit-trace Choi state replaces d_A J, which caps the
  // value at 1/d_A.
  bool strict_choi_state = false;
  sdp::Options solver;
};

DoeblinResult doeblin_alpha(const KrausChannel& ch, const Options& opts = {});

double doeblin_bound_eta(const KrausChannel& ch, const Options& opts = {});

// The induced coefficient over the block-positive cone coincides with the
// Doeblin coefficient when the Choi matrix is block-diagonal in the canonical
// A basis; returns nullopt otherwise.
std::optional<double> induced_doeblin_blockdiag(const KrausChannel& ch,
                                                const Options& opts = {});

bool choi_is_a_blockdiagonal(const Matrix& choi_state, int d_in, int d_out,
                             double tol = 1e-10);

// Direct transcription with X_B as free scalars and a PSD slack block; used to
// cross-check the compact formulation.
DoeblinResult doeblin_alpha_primal_form(const KrausChannel& ch,
                                        const Options& opts = {});

}  // namespace doeblin
}  // namespace contracta
