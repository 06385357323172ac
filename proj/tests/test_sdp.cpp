#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "contracta/rng.hpp"
#include "contracta/sdp.hpp"

using namespace contracta;

namespace {

// max <C, X> s.t. tr X = 1, X PSD: the top eigenvalue of C.
sdp::Problem trace_one_problem(const Matrix& c) {
  sdp::Problem p;
  const int b = p.add_psd_block("X", static_cast<int>(c.rows()));
  p.add_objective(sdp::coeff_from_dense(b, c, 1e-15));
  p.new_constraint(1.0).terms.push_back(
      sdp::coeff_from_dense(b, Matrix::Identity(c.rows(), c.cols())));
  return p;
}

}  // namespace

TEST_CASE("trace-normalized trivia") {
  {
    sdp::Problem p = trace_one_problem(Matrix::Identity(2, 2));
    sdp::Solution s = sdp::solve(p);
    CHECK(s.status == sdp::SolveStatus::Optimal);
    CHECK(s.primal_value == doctest::Approx(1.0).epsilon(1e-8));
  }
  {
    Matrix c = Matrix::Zero(2, 2);
    c(0, 0) = 1.0;
    c(1, 1) = -1.0;
    sdp::Solution s = sdp::solve(trace_one_problem(c));
    CHECK(s.status == sdp::SolveStatus::Optimal);
    CHECK(s.primal_value == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("top eigenvalue against the closed form, grid of random problems") {
  Rng rng(2024);
  for (int t = 0; t < 25; ++t) {
    const int n = 2 + static_cast<int>(rng.raw() % 3);
    const Matrix c = rng.random_hermitian(n);
    sdp::Solution s = sdp::solve(trace_one_problem(c));
    CHECK(s.status == sdp::SolveStatus::Optimal);
    CHECK(s.primal_value == doctest::Approx(la::max_eigenvalue(c)).epsilon(1e-8));
    CHECK(s.relative_gap < 1e-7);
  }
}

TEST_CASE("solution invariants and certificate") {
  Rng rng(5);
  const Matrix c = rng.random_hermitian(4);
  sdp::Problem p = trace_one_problem(c);
  sdp::Solution s = sdp::solve(p);
  REQUIRE(s.status == sdp::SolveStatus::Optimal);
  sdp::Certificate cert = sdp::certify(s, p);
  CHECK(cert.feasible_primal);
  CHECK(cert.feasible_dual);
  CHECK(cert.min_x_eigenvalue > -1e-8);
  CHECK(cert.min_z_eigenvalue > -1e-8);
  CHECK(cert.max_equality_residual < 1e-8 * 2.0);
  CHECK(cert.relative_gap < 1e-7);
  // Weak duality for maximization.
  CHECK(cert.weak_duality_margin > -1e-7);

  // Perturbing the primal is flagged by the certifier.
  sdp::Solution tampered = s;
  tampered.x.psd[0](0, 0) += 0.1;
  sdp::Certificate bad = sdp::certify(tampered, p);
  CHECK(bad.max_equality_residual > 0.05);
  CHECK_FALSE(bad.feasible_primal);
}

TEST_CASE("weak duality also on truncated runs") {
  Rng rng(6);
  const Matrix c = rng.random_hermitian(4);
  sdp::Problem p = trace_one_problem(c);
  sdp::Options opts;
  opts.max_iterations = 3;
  sdp::Solution s = sdp::solve(p, opts);
  CHECK(s.status == sdp::SolveStatus::MaxIterations);
  sdp::Certificate cert = sdp::certify(s, p);
  // The dual iterate stays PSD along the path, so its value plus the residual
  // slack still sits above the primal value.
  CHECK(cert.min_z_eigenvalue > -1e-9);
  CHECK(cert.dual_value + cert.max_dual_residual * 4.0 + 1e-7 > cert.primal_value);
}

TEST_CASE("scaling invariance of the objective") {
  Rng rng(7);
  const Matrix c = rng.random_hermitian(3);
  const double base = sdp::solve(trace_one_problem(c)).primal_value;
  const double scaled = sdp::solve(trace_one_problem(5.0 * c)).primal_value;
  CHECK(scaled == doctest::Approx(5.0 * base).epsilon(1e-8));
}

TEST_CASE("multi-block problem with cross constraints") {
  // maximize tr(X1) + tr(X2) with tr(X1) + 2 tr(X2) = 2, tr(X2) <= trace cap
  // realized through equality with a slack block.
  sdp::Problem p;
  const int x1 = p.add_psd_block("X1", 2);
  const int x2 = p.add_psd_block("X2", 3);
  p.add_objective(sdp::coeff_from_dense(x1, Matrix::Identity(2, 2)));
  p.add_objective(sdp::coeff_from_dense(x2, Matrix::Identity(3, 3)));
  sdp::Constraint& c1 = p.new_constraint(2.0);
  c1.terms.push_back(sdp::coeff_from_dense(x1, Matrix::Identity(2, 2)));
  c1.terms.push_back(sdp::coeff_from_dense(x2, 2.0 * Matrix::Identity(3, 3)));
  sdp::Solution s = sdp::solve(p);
  REQUIRE(s.status == sdp::SolveStatus::Optimal);
  // All mass goes to X1: value 2.
  CHECK(s.primal_value == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("free scalars: box through slack blocks") {
  // maximize x s.t. S1 = 1 - x >= 0, S2 = 1 + x >= 0  ->  x* = 1.
  sdp::Problem p;
  const int s1 = p.add_psd_block("S1", 1);
  const int s2 = p.add_psd_block("S2", 1);
  const int xf = p.add_free_block("x", 1);
  {
    sdp::Coeff obj;
    obj.block = xf;
    obj.add(0, 0, 1.0);
    p.add_objective(obj);
  }
  {
    sdp::Constraint& c = p.new_constraint(1.0);
    c.terms.push_back(sdp::coeff_from_dense(s1, Matrix::Identity(1, 1)));
    sdp::Coeff cf;
    cf.block = xf;
    cf.add(0, 0, 1.0);
    c.terms.push_back(cf);
  }
  {
    sdp::Constraint& c = p.new_constraint(1.0);
    c.terms.push_back(sdp::coeff_from_dense(s2, Matrix::Identity(1, 1)));
    sdp::Coeff cf;
    cf.block = xf;
    cf.add(0, 0, -1.0);
    c.terms.push_back(cf);
  }
  sdp::Solution s = sdp::solve(p);
  REQUIRE(s.status == sdp::SolveStatus::Optimal);
  CHECK(s.primal_value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(s.free_value(p, xf, 0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("embed_hermitian preserves values") {
  // Identity block embeds to twice the dimension with duplicated spectrum.
  Rng rng(11);
  const Matrix c = rng.random_hermitian(3);
  sdp::Problem p = trace_one_problem(c);
  sdp::Problem emb = sdp::embed_hermitian(p);
  CHECK(emb.blocks[0].dim == 6);

  // The embedded coefficient of C has the duplicated spectrum at half weight.
  const Matrix ec = emb.objective[0].dense(6);
  la::EigResult e = la::eig_hermitian(2.0 * ec);
  la::EigResult eref = la::eig_hermitian(c);
  CHECK(e.eigenvalues(0) == doctest::Approx(eref.eigenvalues(0)).epsilon(1e-10));
  CHECK(e.eigenvalues(1) == doctest::Approx(eref.eigenvalues(0)).epsilon(1e-10));

  const double v0 = sdp::solve(p).primal_value;
  const double v1 = sdp::solve(emb).primal_value;
  CHECK(v0 == doctest::Approx(v1).epsilon(1e-9));
}

TEST_CASE("embed_hermitian on a random equality-constrained problem") {
  Rng rng(13);
  sdp::Problem p;
  const int b = p.add_psd_block("X", 3);
  p.add_objective(sdp::coeff_from_dense(b, rng.random_hermitian(3)));
  p.new_constraint(1.0).terms.push_back(
      sdp::coeff_from_dense(b, Matrix::Identity(3, 3)));
  p.new_constraint(0.1).terms.push_back(
      sdp::coeff_from_dense(b, rng.random_hermitian(3) / 3.0));
  sdp::Solution s0 = sdp::solve(p);
  sdp::Solution s1 = sdp::solve(sdp::embed_hermitian(p));
  REQUIRE(s0.status == sdp::SolveStatus::Optimal);
  REQUIRE(s1.status == sdp::SolveStatus::Optimal);
  CHECK(s0.primal_value == doctest::Approx(s1.primal_value).epsilon(1e-8));
}

TEST_CASE("redundant and inconsistent rows") {
  Rng rng(17);
  sdp::Problem p = trace_one_problem(rng.random_hermitian(2));
  // Duplicate the trace row; the preprocessor must drop it silently.
  p.new_constraint(1.0).terms.push_back(
      sdp::coeff_from_dense(0, Matrix::Identity(2, 2)));
  sdp::Solution s = sdp::solve(p);
  CHECK(s.status == sdp::SolveStatus::Optimal);

  // A contradictory duplicate is rejected.
  sdp::Problem bad = trace_one_problem(rng.random_hermitian(2));
  bad.new_constraint(2.0).terms.push_back(
      sdp::coeff_from_dense(0, Matrix::Identity(2, 2)));
  CHECK_THROWS_AS(sdp::solve(bad), std::invalid_argument);
}

TEST_CASE("non-Hermitian coefficients are rejected") {
  sdp::Problem p;
  const int b = p.add_psd_block("X", 2);
  sdp::Coeff c;
  c.block = b;
  c.add(0, 1, 1.0);  // missing the mirrored conjugate entry
  p.add_objective(c);
  p.new_constraint(1.0).terms.push_back(
      sdp::coeff_from_dense(b, Matrix::Identity(2, 2)));
  CHECK_THROWS_AS(sdp::solve(p), std::invalid_argument);
}

TEST_CASE("sdpa dump shape") {
  Rng rng(19);
  sdp::Problem p = trace_one_problem(rng.random_hermitian(2));
  std::ostringstream os;
  sdp::dump_sdpa(p, os);
  std::istringstream is(os.str());
  int m = -1, nblocks = -1;
  is >> m >> nblocks;
  CHECK(m == 1);
  CHECK(nblocks == 1);
  int dim = 0;
  is >> dim;
  CHECK(dim == 4);  // embedded
  double rhs = 0;
  is >> rhs;
  CHECK(rhs == doctest::Approx(1.0));
}
