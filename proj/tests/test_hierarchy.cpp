#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "contracta/hierarchy.hpp"
#include "contracta/lower_bounds.hpp"
#include "contracta/rng.hpp"

using namespace contracta;

namespace {

KrausChannel identity_channel(int d) {
  KrausChannel ch;
  ch.d_in = ch.d_out = d;
  ch.kraus = {Matrix::Identity(d, d)};
  return ch;
}

hierarchy::LevelSpec spec_of(int k, int m, bool ppt = false, bool reduce = true) {
  hierarchy::LevelSpec s;
  s.k = k;
  s.m = m;
  s.ppt = ppt;
  s.symmetry_reduction = reduce;
  s.label_symmetry = reduce;
  return s;
}

// Product point rho_i^T (x) M_{j_1} (x) ... (x) M_{j_m} on the unreduced
// program; returns the largest constraint violation.
double product_point_residual(const KrausChannel& ch, int k, int m,
                              const std::vector<Matrix>& states,
                              const std::vector<Matrix>& povm,
                              bool first_marginal_over_messages = true,
                              double* objective = nullptr) {
  hierarchy::LevelSpec spec = spec_of(k, m, false, false);
  spec.first_marginal_over_messages = first_marginal_over_messages;
  hierarchy::BuiltLevel built = hierarchy::build_sdp(ch, spec);
  sdp::BlockValues vals;
  vals.psd.resize(built.problem.blocks.size());
  vals.free = RVector::Zero(0);
  for (std::size_t r = 0; r < built.reps.size(); ++r) {
    const std::vector<int>& t = built.reps[r];
    Matrix w = states[static_cast<std::size_t>(t[0])].transpose();
    for (int p = 1; p <= m; ++p)
      w = la::kron(w, povm[static_cast<std::size_t>(t[static_cast<std::size_t>(p)])]);
    vals.psd[static_cast<std::size_t>(built.rep_sdp_block[r])] = w;
  }
  double worst = 0.0;
  for (const sdp::Constraint& c : built.problem.constraints)
    worst = std::max(worst,
                     std::abs(sdp::constraint_value(built.problem, c, vals) - c.rhs));
  if (objective) *objective = sdp::objective_value(built.problem, vals);
  return worst;
}

}  // namespace

TEST_CASE("block counts at levels one and two") {
  auto ch = channels::gallery_depolarizing(0.3);
  {
    hierarchy::BuiltLevel b = hierarchy::build_sdp(ch, spec_of(2, 1, false, false));
    CHECK(b.reps.size() == 4);
    CHECK(b.block_dim == 4);
    for (const auto& blk : b.problem.blocks) CHECK(blk.dim == 4);
  }
  {
    hierarchy::BuiltLevel b = hierarchy::build_sdp(ch, spec_of(2, 2, false, false));
    CHECK(b.reps.size() == 8);
    CHECK(b.block_dim == 8);
  }
  {
    // Combined message/position reduction at level two leaves three orbits.
    hierarchy::BuiltLevel b = hierarchy::build_sdp(ch, spec_of(2, 2, true, true));
    CHECK(b.reps.size() == 3);
  }
}

TEST_CASE("tuple encoding round trip") {
  for (int idx = 0; idx < 2 * 2 * 2; ++idx) {
    auto t = hierarchy::decode_tuple(idx, 2, 2);
    CHECK(hierarchy::encode_tuple(t, 2) == idx);
  }
}

TEST_CASE("product points satisfy every constraint") {
  Rng rng(33);
  auto ch = channels::random_channel(rng, 2, 2, 3);
  auto p1 = rng.haar_pair(2);
  std::vector<Matrix> states = {p1.first * p1.first.adjoint(),
                                p1.second * p1.second.adjoint()};
  // A generic (non-projective) POVM pair.
  Matrix m0 = rng.random_density(2);
  m0 /= 1.7 * la::operator_norm(m0);
  std::vector<Matrix> povm = {m0, Matrix::Identity(2, 2) - m0};

  double obj1 = 0.0, obj2 = 0.0;
  CHECK(product_point_residual(ch, 2, 1, states, povm, true, &obj1) < 1e-10);
  CHECK(product_point_residual(ch, 2, 2, states, povm, true, &obj2) < 1e-10);
  // Both levels evaluate the product point to the same success probability.
  CHECK(obj1 == doctest::Approx(obj2).epsilon(1e-10));

  // The verbatim first-marginal variant (sum over l in [m]) is violated by
  // the same product point at m = 1.
  CHECK(product_point_residual(ch, 2, 1, states, povm, false) > 0.05);
}

TEST_CASE("depolarizing first level is tight") {
  for (double p : {0.25, 0.6}) {
    auto r = hierarchy::solve_level(channels::gallery_depolarizing(p), spec_of(2, 1));
    REQUIRE(r.status == sdp::SolveStatus::Optimal);
    CHECK(r.eta == doctest::Approx(1.0 - p).epsilon(2e-5));
  }
}

TEST_CASE("counterexample first level detects eta <= 1/2") {
  auto r = hierarchy::solve_level(channels::gallery_counterexample(3), spec_of(2, 1));
  REQUIRE(r.status == sdp::SolveStatus::Optimal);
  CHECK(r.eta == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("amplitude damping first level equals sqrt(eta)") {
  for (double eta : {0.5, 0.8}) {
    auto r = hierarchy::solve_level(channels::gallery_amplitude_damping(0.35, eta),
                                    spec_of(2, 1));
    REQUIRE(r.status == sdp::SolveStatus::Optimal);
    CHECK(r.eta == doctest::Approx(std::sqrt(eta)).epsilon(1e-3));
  }
}

TEST_CASE("identity channel saturates at one") {
  CHECK(hierarchy::eta_upper_bound(identity_channel(2), 1) ==
        doctest::Approx(1.0).epsilon(1e-6));
  auto r = hierarchy::solve_level(identity_channel(2), spec_of(2, 1));
  CHECK(r.psucc == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.eta >= 0.0);
  CHECK(r.eta <= 1.0);
}

TEST_CASE("fully depolarizing channel drops to zero") {
  auto r = hierarchy::solve_level(channels::gallery_depolarizing(1.0), spec_of(2, 1));
  CHECK(r.eta == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(std::abs(r.eta - std::max(0.0, r.eta_raw)) < 1e-12);
}

TEST_CASE("levels are monotone and PPT only strengthens") {
  std::vector<KrausChannel> gallery = {channels::gallery_depolarizing(0.5),
                                       channels::gallery_amplitude_damping(0.4, 0.7)};
  for (const auto& ch : gallery) {
    const double m1 = hierarchy::solve_level(ch, spec_of(2, 1)).psucc;
    const double m2 = hierarchy::solve_level(ch, spec_of(2, 2)).psucc;
    const double m1ppt = hierarchy::solve_level(ch, spec_of(2, 1, true)).psucc;
    CHECK(m2 <= m1 + 1e-6);
    CHECK(m1ppt <= m1 + 1e-6);
  }
}

TEST_CASE("symmetry reduction does not move the optimum") {
  Rng rng(55);
  for (int t = 0; t < 3; ++t) {
    auto ch = channels::random_channel(rng, 2, 2, 3);
    const double full1 = hierarchy::solve_level(ch, spec_of(2, 1, false, false)).psucc;
    const double red1 = hierarchy::solve_level(ch, spec_of(2, 1, false, true)).psucc;
    CHECK(full1 == doctest::Approx(red1).epsilon(1e-6));

    const double full2 = hierarchy::solve_level(ch, spec_of(2, 2, false, false)).psucc;
    const double red2 = hierarchy::solve_level(ch, spec_of(2, 2, false, true)).psucc;
    CHECK(full2 == doctest::Approx(red2).epsilon(1e-6));
  }
  // Also with PPT blocks in play.
  auto ch = channels::random_channel(rng, 2, 2, 2);
  const double fullp = hierarchy::solve_level(ch, spec_of(2, 2, true, false)).psucc;
  const double redp = hierarchy::solve_level(ch, spec_of(2, 2, true, true)).psucc;
  CHECK(fullp == doctest::Approx(redp).epsilon(1e-6));
}

TEST_CASE("position-only reduction matches the combined one") {
  Rng rng(56);
  auto ch = channels::random_channel(rng, 2, 2, 3);
  hierarchy::LevelSpec pos_only = spec_of(2, 2, false, true);
  pos_only.label_symmetry = false;
  const double a = hierarchy::solve_level(ch, pos_only).psucc;
  const double b = hierarchy::solve_level(ch, spec_of(2, 2, false, true)).psucc;
  CHECK(a == doctest::Approx(b).epsilon(1e-6));
}

TEST_CASE("upper bound dominates the see-saw lower bound") {
  Rng rng(57);
  lb::SeesawOptions sopts;
  sopts.restarts = 12;
  for (int t = 0; t < 8; ++t) {
    auto ch = channels::random_channel(rng, 2, 2, 3);
    sopts.seed = 100 + static_cast<std::uint64_t>(t);
    const double lower = 0.5 + 0.5 * lb::seesaw_eta(ch, sopts).value;
    const double upper = hierarchy::solve_level(ch, spec_of(2, 1)).psucc;
    CHECK(lower <= upper + 1e-6);
  }
}

TEST_CASE("bilinear combined form agrees with the block form") {
  auto check = [](const KrausChannel& ch) {
    auto bc = hierarchy::bilinear_form_check(ch, 2);
    CHECK(bc.difference <= 1e-6);
  };
  check(channels::gallery_depolarizing(0.3));
  check(channels::gallery_counterexample(3));
  Rng rng(58);
  check(channels::random_channel(rng, 2, 2, 3));
}

TEST_CASE("spec validation") {
  auto ch = channels::gallery_depolarizing(0.2);
  CHECK_THROWS_AS(hierarchy::build_sdp(ch, spec_of(1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(hierarchy::build_sdp(ch, spec_of(2, 0)), std::invalid_argument);
  CHECK_THROWS_AS(hierarchy::build_sdp(ch, spec_of(2, 4)), std::invalid_argument);
  hierarchy::LevelSpec tiny = spec_of(2, 2);
  tiny.memory_budget = 16;
  CHECK_THROWS_AS(hierarchy::build_sdp(ch, tiny), std::invalid_argument);
  hierarchy::LevelSpec bad_variant = spec_of(2, 3);
  bad_variant.first_marginal_over_messages = false;
  CHECK_THROWS_AS(hierarchy::build_sdp(ch, bad_variant), std::invalid_argument);
}

TEST_CASE("k = 3 level solves and stays within probability range") {
  auto r = hierarchy::solve_level(channels::gallery_depolarizing(0.4),
                                  spec_of(3, 1));
  REQUIRE(r.status == sdp::SolveStatus::Optimal);
  CHECK(r.psucc >= 1.0 / 3.0 - 1e-6);
  CHECK(r.psucc <= 1.0 + 1e-6);
  CHECK(std::isnan(r.eta));
}
