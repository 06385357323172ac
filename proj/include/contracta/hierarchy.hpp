#pragma once

#include <cstddef>
#include <vector>

#include "contracta/channels.hpp"
#include "contracta/sdp.hpp"

namespace contracta {
namespace hierarchy {

struct LevelSpec {
  int k = 2;   // number of messages
  int m = 1;   // hierarchy level
  bool ppt = false;
  // Keep one representative PSD block per multiset of (j_1..j_m), rewriting
  // constraints through the permutation unitaries.
  bool symmetry_reduction = true;
  // Additionally merge blocks related by simultaneously relabeling messages.
  bool label_symmetry = true;
  // Average the first-system marginal over the message index l in [k]
  // (default). When false, uses the index range l in [m] verbatim, which is
  // inconsistent for m != k and kept only for comparison.
  bool first_marginal_over_messages = true;
  std::size_t memory_budget = 10'000'000;  // real entries across PSD blocks
};

struct BuiltLevel {
  sdp::Problem problem;
  LevelSpec spec;
  int d_a = 0;
  int d_b = 0;
  int block_dim = 0;                        // d_A * d_B^m
  std::vector<std::vector<int>> reps;       // representative tuples (i, j_1..j_m)
  std::vector<int> rep_sdp_block;           // sdp block index per representative
  std::vector<int> full_to_rep;             // encoded tuple -> representative id
  std::vector<std::vector<int>> full_perm;  // position permutation rep -> full
};

BuiltLevel build_sdp(const KrausChannel& ch, const LevelSpec& spec);

struct LevelResult {
  double psucc = 0.0;
  double eta = 0.0;      // 2 psucc - 1 for k = 2, clipped into [0,1]
  double eta_raw = 0.0;  // before clipping
  bool clipped = false;
  sdp::SolveStatus status = sdp::SolveStatus::NumericalFailure;
  sdp::Certificate certificate;
  LevelSpec spec;
};

LevelResult solve_level(const KrausChannel& ch, const LevelSpec& spec,
                        const sdp::Options& solver = {});

// 2 * SDP_m(ch, 2) - 1, clipped into [0,1].
double eta_upper_bound(const KrausChannel& ch, int m = 1, bool ppt = false);

struct BilinearCheck {
  double sdp_value = 0.0;    // SDP_1(ch, k)
  double tilde_value = 0.0;  // combined-variable form
  double difference = 0.0;
};

// Solves the level-1 program both in per-index-block form and in the combined
// single-variable form and reports the value difference.
BilinearCheck bilinear_form_check(const KrausChannel& ch, int k = 2,
                                  const sdp::Options& solver = {});

// Encoded tuple helpers shared with tests.
int encode_tuple(const std::vector<int>& tuple, int k);
std::vector<int> decode_tuple(int index, int k, int m);

}  // namespace hierarchy
}  // namespace contracta
