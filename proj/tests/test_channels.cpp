#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "contracta/channels.hpp"
#include "contracta/rng.hpp"

using namespace contracta;

namespace {

KrausChannel identity_channel(int d) {
  KrausChannel ch;
  ch.d_in = ch.d_out = d;
  ch.kraus = {Matrix::Identity(d, d)};
  return ch;
}

Matrix bell_state(int d) {
  CVector psi = CVector::Zero(d * d);
  for (int i = 0; i < d; ++i) psi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return psi * psi.adjoint();
}

}  // namespace

TEST_CASE("validate") {
  auto diag = channels::validate(identity_channel(2));
  CHECK(diag.tp_residual == doctest::Approx(0.0));
  CHECK(diag.trace_preserving);
  CHECK(diag.completely_positive);

  auto ad = channels::gallery_amplitude_damping(0.5, 0.5);
  CHECK(channels::validate(ad).tp_residual < 1e-12);

  // Deliberately scaled Kraus set gets flagged.
  KrausChannel bad = identity_channel(2);
  bad.kraus[0] *= 1.1;
  CHECK_FALSE(channels::validate(bad).trace_preserving);
  CHECK_THROWS_AS(channels::require_valid(bad), std::invalid_argument);
}

TEST_CASE("choi of the identity channel is the maximally entangled state") {
  const Matrix j = channels::choi(identity_channel(2));
  CHECK((j - bell_state(2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("choi of the counterexample channel") {
  const int d = 3;
  const Matrix j = channels::choi(channels::gallery_counterexample(d));
  Matrix expected = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int jj = 0; jj < d; ++jj) {
      if (i == jj) continue;
      expected(i * d + jj, i * d + jj) = 1.0 / (d * (d - 1.0));
    }
  CHECK((j - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("choi of the depolarizing channel") {
  const double p = 0.37;
  const Matrix j = channels::choi(channels::gallery_depolarizing(p));
  const Matrix expected =
      (1.0 - p) * bell_state(2) + p * Matrix::Identity(4, 4) / 4.0;
  CHECK((j - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("choi invariants across the gallery") {
  Rng rng(101);
  std::vector<KrausChannel> chs = {
      channels::gallery_amplitude_damping(0.3, 0.7),
      channels::gallery_depolarizing(0.4),
      channels::gallery_counterexample(3),
      channels::random_channel(rng, 2, 3, 3),
  };
  for (const auto& ch : chs) {
    const Matrix j = channels::choi(ch);
    CHECK(std::abs(j.trace().real() - 1.0) < 1e-12);
    CHECK(la::min_eigenvalue(j) > -kPsdTol);
    CHECK((la::partial_trace(j, {ch.d_in, ch.d_out}, 1) -
           Matrix::Identity(ch.d_in, ch.d_in) / ch.d_in)
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("apply agrees with the Choi route") {
  Rng rng(7);
  const Matrix x0 = rng.random_density(2);
  CHECK((channels::apply(identity_channel(2), x0) - x0).cwiseAbs().maxCoeff() < 1e-14);

  // D_1 sends everything to I/2.
  auto d1 = channels::gallery_depolarizing(1.0);
  const Matrix out = channels::apply(d1, rng.random_density(2));
  CHECK((out - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  for (int t = 0; t < 5; ++t) {
    auto ch = channels::random_channel(rng, 3, 2, 4);
    const Matrix j = channels::choi(ch);
    const Matrix x = rng.random_density(3);
    const Matrix via_kraus = channels::apply(ch, x);
    const Matrix via_choi = channels::apply_via_choi(j, 3, 2, x);
    CHECK((via_kraus - via_choi).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(via_kraus.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("adjoint duality and unitality") {
  Rng rng(15);
  auto ch = channels::random_channel(rng, 2, 3, 3);
  CHECK((channels::adjoint_apply(ch, Matrix::Identity(3, 3)) -
         Matrix::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-9);
  for (int t = 0; t < 10; ++t) {
    const Matrix x = rng.random_hermitian(2);
    const Matrix y = rng.random_hermitian(3);
    const Complex lhs = la::hs_inner(channels::apply(ch, x), y);
    const Complex rhs = la::hs_inner(x, channels::adjoint_apply(ch, y));
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
  const Matrix y0 = rng.random_hermitian(2);
  CHECK((channels::adjoint_apply(identity_channel(2), y0) - y0).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("tensor") {
  auto id2 = identity_channel(2);
  auto both = channels::tensor(id2, id2);
  CHECK(both.d_in == 4);
  CHECK((channels::choi(both) - bell_state(4)).cwiseAbs().maxCoeff() < 1e-12);

  auto dp = channels::gallery_depolarizing(0.5);
  CHECK(std::abs(channels::choi(channels::tensor(dp, dp)).trace().real() - 1.0) < 1e-12);

  auto ad = channels::gallery_amplitude_damping(0.4, 0.6);
  CHECK(channels::tensor_power(ad, 2).kraus.size() == 16);
  CHECK(channels::validate(channels::tensor_power(ad, 2)).tp_residual < 1e-9);
}

TEST_CASE("tensor is associative at the Choi level") {
  Rng rng(77);
  auto a = channels::random_channel(rng, 2, 2, 2);
  auto b = channels::random_channel(rng, 2, 2, 2);
  auto c = channels::random_channel(rng, 2, 2, 2);
  const Matrix left = channels::choi(channels::tensor(channels::tensor(a, b), c));
  const Matrix right = channels::choi(channels::tensor(a, channels::tensor(b, c)));
  CHECK((left - right).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("amplitude damping gallery") {
  CHECK_THROWS_AS(channels::gallery_amplitude_damping(-0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(channels::gallery_amplitude_damping(0.5, 1.5), std::invalid_argument);
  CHECK(channels::validate(channels::gallery_amplitude_damping(0.5, 0.5)).tp_residual <
        1e-12);

  // eta = 1 collapses A_2 and A_4, leaving a mixture of identities.
  auto full = channels::gallery_amplitude_damping(0.3, 1.0);
  Rng rng(5);
  const Matrix x = rng.random_density(2);
  CHECK((channels::apply(full, x) - x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("depolarizing gallery") {
  Rng rng(3);
  const Matrix x = rng.random_density(2);
  CHECK((channels::apply(channels::gallery_depolarizing(0.0), x) - x)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK((channels::apply(channels::gallery_depolarizing(1.0), x) -
         0.5 * Matrix::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  const double p = 0.62;
  Matrix e00 = Matrix::Zero(2, 2);
  e00(0, 0) = 1.0;
  const Matrix out = channels::apply(channels::gallery_depolarizing(p), e00);
  CHECK(out(0, 0).real() == doctest::Approx(1.0 - p / 2).epsilon(1e-12));
  CHECK(out(1, 1).real() == doctest::Approx(p / 2).epsilon(1e-12));
}

TEST_CASE("counterexample gallery") {
  CHECK_THROWS_AS(channels::gallery_counterexample(2), std::invalid_argument);
  auto ch = channels::gallery_counterexample(3);
  CHECK(ch.kraus.size() == 6);
  CHECK(channels::validate(ch).tp_residual < 1e-12);
}

TEST_CASE("Choi to Kraus round trip") {
  Rng rng(31);
  for (int t = 0; t < 5; ++t) {
    auto ch = channels::random_channel(rng, 2, 2, 3);
    const Matrix j = channels::choi(ch);
    KrausChannel rebuilt;
    rebuilt.d_in = ch.d_in;
    rebuilt.d_out = ch.d_out;
    rebuilt.kraus = channels::kraus_from_choi(j, ch.d_in, ch.d_out);
    CHECK(rebuilt.kraus.size() <= static_cast<std::size_t>(ch.d_in * ch.d_out));
    CHECK((channels::choi(rebuilt) - j).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(channels::validate(rebuilt).tp_residual < 1e-8);
  }
}

TEST_CASE("channel_from_adjoint_superoperator round trips") {
  auto id2 = identity_channel(2);
  auto rebuilt = channels::channel_from_adjoint_superoperator(
      channels::adjoint_superoperator(id2));
  CHECK((channels::choi(rebuilt) - channels::choi(id2)).cwiseAbs().maxCoeff() < 1e-10);

  auto dp = channels::gallery_depolarizing(0.35);
  auto dp2 = channels::channel_from_adjoint_superoperator(
      channels::adjoint_superoperator(dp));
  CHECK((channels::choi(dp2) - channels::choi(dp)).cwiseAbs().maxCoeff() < 1e-10);

  // A non-unital map is rejected.
  Superoperator bad = channels::adjoint_superoperator(dp);
  bad.matrix *= 0.9;
  CHECK_THROWS_AS(channels::channel_from_adjoint_superoperator(bad),
                  std::invalid_argument);
}

TEST_CASE("superoperator matches direct application") {
  Rng rng(41);
  auto ch = channels::random_channel(rng, 3, 2, 2);
  const Superoperator s = channels::superoperator(ch);
  const Matrix x = rng.random_hermitian(3);
  const Matrix via = la::unvec(s.matrix * la::vec(x), 2, 2);
  CHECK((via - channels::apply(ch, x)).cwiseAbs().maxCoeff() < 1e-11);
}
