#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "contracta/hierarchy.hpp"
#include "contracta/lower_bounds.hpp"
#include "contracta/reductions.hpp"
#include "contracta/rng.hpp"

using namespace contracta;
using reductions::GrothendieckInstance;
using reductions::Variant;

namespace {

GrothendieckInstance commutative(std::vector<RVector> vecs) {
  GrothendieckInstance inst;
  inst.variant = Variant::Commutative;
  inst.vectors = std::move(vecs);
  return inst;
}

GrothendieckInstance hermitian(std::vector<Matrix> ops) {
  GrothendieckInstance inst;
  inst.variant = Variant::Hermitian;
  inst.operators = std::move(ops);
  return inst;
}

RVector rvec(std::initializer_list<double> xs) {
  RVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("doubling and Psi structure") {
  auto inst = hermitian({Matrix::Identity(2, 2)});
  auto dbl = reductions::doubled_coefficients(inst);
  REQUIRE(dbl.size() == 1);
  CHECK(dbl[0].rows() == 4);
  CHECK(std::abs(dbl[0].trace()) < 1e-14);

  // Psi annihilates the identity for every instance, which makes the shifted
  // adjoint unital.
  Rng rng(3);
  auto rnd = hermitian({rng.random_hermitian(2), rng.random_hermitian(2)});
  auto dbl2 = reductions::doubled_coefficients(rnd);
  CHECK(reductions::psi_apply(dbl2, Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("unitality of the adjoint is exact") {
  Rng rng(5);
  auto inst = commutative({rvec({0.3, -1.2, 0.5}), rvec({1.0, 0.0, 2.0})});
  const Superoperator adj = reductions::build_adjoint_superoperator(inst, 0.05);
  const Matrix img = la::unvec(
      adj.matrix * la::vec(Matrix::Identity(adj.d_in, adj.d_in)), adj.d_out, adj.d_out);
  CHECK((img - Matrix::Identity(adj.d_out, adj.d_out)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("one-dimensional instance against a direct eigenvalue scan") {
  auto inst = hermitian({Matrix::Identity(1, 1)});
  const double amax = reductions::max_cp_alpha(inst);
  // Scan the Choi minimum eigenvalue directly over alpha.
  auto min_eig_at = [&](double alpha) {
    auto out = reductions::build_phi_alpha(inst, alpha);
    return la::min_eigenvalue(channels::choi(out.channel));
  };
  CHECK(min_eig_at(amax * 0.999) > -1e-9);
  // Bisection bracketed the boundary: nudging past alpha_max must fail CP.
  CHECK_THROWS_AS(reductions::build_phi_alpha(inst, amax * 1.01),
                  std::invalid_argument);

  auto out = reductions::build_phi_alpha(inst);
  CHECK(out.alpha == doctest::Approx(0.9 * amax));
  CHECK(out.channel.d_in == 2);
  CHECK(out.channel.d_out == 2);
  CHECK(channels::validate(out.channel).tp_residual < 1e-9);
}

TEST_CASE("commutative instances give quantum-classical channels") {
  auto inst = commutative({rvec({1, 0}), rvec({0, 1})});
  auto out = reductions::build_phi_alpha(inst);
  CHECK(out.channel.d_in == 3);
  CHECK(out.channel.d_out == 4);
  // Outputs are diagonal on a spanning set of inputs.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Matrix e = Matrix::Zero(3, 3);
      e(i, j) = 1.0;
      const Matrix img = channels::apply(out.channel, e);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          if (r != c) CHECK(std::abs(img(r, c)) < 1e-9);
    }
}

TEST_CASE("scaling the instance halves alpha_max") {
  auto inst = commutative({rvec({0.7, -0.4}), rvec({1.1, 0.2})});
  auto doubled = commutative({rvec({1.4, -0.8}), rvec({2.2, 0.4})});
  const double a1 = reductions::max_cp_alpha(inst);
  const double a2 = reductions::max_cp_alpha(doubled);
  CHECK(a2 == doctest::Approx(0.5 * a1).epsilon(1e-6));
}

TEST_CASE("zero instance degenerates to a replacer") {
  auto inst = commutative({rvec({0.0, 0.0})});
  CHECK(reductions::max_cp_alpha(inst) == doctest::Approx(1e6));
  auto out = reductions::build_phi_alpha(inst, 1.0);
  Rng rng(7);
  const Matrix x = rng.random_density(2);
  const Matrix y = rng.random_density(2);
  CHECK((channels::apply(out.channel, x) - channels::apply(out.channel, y))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("eigenvalue gap identity for block-antisymmetric duals") {
  Rng rng(11);
  auto inst = hermitian({rng.random_hermitian(2), rng.random_hermitian(2)});
  auto out = reductions::build_phi_alpha(inst);
  auto dbl = reductions::doubled_coefficients(inst);
  const int d = inst.d();
  for (int t = 0; t < 20; ++t) {
    Matrix y0 = rng.random_hermitian(d);
    y0 /= la::operator_norm(y0);
    Matrix y = Matrix::Zero(2 * d, 2 * d);
    y.topLeftCorner(d, d) = y0;
    y.bottomRightCorner(d, d) = -y0;

    const Matrix dual = la::unvec(out.adjoint.matrix * la::vec(y), inst.n() + 1,
                                  inst.n() + 1);
    la::EigResult e = la::eig_hermitian(dual);
    const double gap = e.eigenvalues(0) - e.eigenvalues(e.eigenvalues.size() - 1);

    RVector img(inst.n());
    for (int i = 0; i < inst.n(); ++i)
      img(i) = (inst.operators[static_cast<std::size_t>(i)] * y0).trace().real();
    CHECK(gap == doctest::Approx(4.0 * out.alpha * img.norm()).epsilon(1e-9));

    // General form: the gap equals 2 alpha || (tr Ftilde_i Y)_i ||_2 for any
    // Hermitian contraction Y.
    Matrix yg = rng.random_hermitian(2 * d);
    yg /= la::operator_norm(yg);
    const Matrix dual_g =
        la::unvec(out.adjoint.matrix * la::vec(yg), inst.n() + 1, inst.n() + 1);
    la::EigResult eg = la::eig_hermitian(dual_g);
    RVector bg(inst.n());
    for (int i = 0; i < inst.n(); ++i)
      bg(i) = (dbl[static_cast<std::size_t>(i)] * yg).trace().real();
    CHECK(eg.eigenvalues(0) - eg.eigenvalues(eg.eigenvalues.size() - 1) ==
          doctest::Approx(2.0 * out.alpha * bg.norm()).epsilon(1e-9));
  }
}

TEST_CASE("enumerated commutative norm") {
  CHECK(reductions::commutative_norm_enumerated(commutative({rvec({1, 1})})) ==
        doctest::Approx(2.0));
  CHECK(reductions::commutative_norm_enumerated(
            commutative({rvec({1, 0}), rvec({0, 1})})) ==
        doctest::Approx(std::sqrt(2.0)));
  CHECK(reductions::commutative_norm_enumerated(commutative({rvec({0, 0})})) ==
        doctest::Approx(0.0));
}

TEST_CASE("hermitian norm see-saw agrees with enumeration on diagonal instances") {
  Rng rng(13);
  for (int t = 0; t < 3; ++t) {
    std::vector<RVector> vecs;
    for (int i = 0; i < 2; ++i) {
      RVector v(3);
      for (int r = 0; r < 3; ++r) v(r) = rng.gaussian();
      vecs.push_back(v);
    }
    auto inst = commutative(vecs);
    const double exact = reductions::commutative_norm_enumerated(inst);
    const double heur = reductions::hermitian_norm_seesaw(inst, 24, 200, 17 + t);
    CHECK(heur <= exact + 1e-9);
    CHECK(heur >= exact - 1e-6);
  }
}

TEST_CASE("norm identity bracket at toy scale") {
  Rng rng(19);
  lb::SeesawOptions sopts;
  sopts.restarts = 24;

  SUBCASE("hand instance") {
    auto inst = commutative({rvec({1, 1})});
    auto out = reductions::build_phi_alpha(inst);
    const double lower = lb::seesaw_eta(out.channel, sopts).value;
    const double upper = hierarchy::eta_upper_bound(out.channel, 1, false);
    auto rep = reductions::norm_identity_check(inst, out, lower, upper);
    CHECK(rep.norm_independent == doctest::Approx(2.0));
    CHECK(rep.bracket_violation < 1e-4);
  }

  SUBCASE("all-zero instance is trivially bracketed") {
    auto inst = commutative({rvec({0, 0, 0})});
    auto out = reductions::build_phi_alpha(inst, 1.0);
    const double lower = lb::seesaw_eta(out.channel, sopts).value;
    const double upper = hierarchy::eta_upper_bound(out.channel, 1, false);
    auto rep = reductions::norm_identity_check(inst, out, lower, upper);
    CHECK(rep.norm_independent == doctest::Approx(0.0));
    CHECK(rep.scaled_norm == doctest::Approx(0.0));
    CHECK(lower <= 1e-6);
    CHECK(rep.bracket_violation < 1e-6);
  }

  SUBCASE("random n=2 d=3 instances") {
    for (int t = 0; t < 3; ++t) {
      std::vector<RVector> vecs;
      for (int i = 0; i < 2; ++i) {
        RVector v(3);
        for (int r = 0; r < 3; ++r) v(r) = rng.gaussian();
        vecs.push_back(v);
      }
      auto inst = commutative(vecs);
      auto out = reductions::build_phi_alpha(inst);
      sopts.seed = 300 + static_cast<std::uint64_t>(t);
      const double lower = lb::seesaw_eta(out.channel, sopts).value;
      const double upper = hierarchy::eta_upper_bound(out.channel, 1, false);
      auto rep = reductions::norm_identity_check(inst, out, lower, upper);
      CHECK(rep.bracket_violation < 1e-4);
    }
  }
}

TEST_CASE("input validation") {
  GrothendieckInstance empty;
  CHECK_THROWS_AS(reductions::build_phi_alpha(empty), std::invalid_argument);
  auto bad = hermitian({Matrix::Identity(2, 2)});
  bad.operators.push_back(Matrix::Identity(3, 3));
  CHECK_THROWS_AS(reductions::max_cp_alpha(bad), std::invalid_argument);
}
