#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "framefield/analytic.hpp"
#include "framefield/lie.hpp"

using namespace framefield;

TEST_CASE("frozen Lie coefficients match the derivation") {
  const LieCoeffs& frozen = lie_coeffs();
  const LieCoeffs derived = build_lie_coeffs();
  double err = 0;
  for (size_t i = 0; i < frozen.c.size(); ++i) err = std::max(err, std::abs(frozen.c[i] - derived.c[i]));
  CHECK(err < 1e-14);
  int nonzero = 0;
  for (double v : frozen.c) nonzero += std::abs(v) > 1e-14 ? 1 : 0;
  CHECK(nonzero == 42);
}

TEST_CASE("bracket vanishes without spatial variation") {
  const QVecd q = q_from_frame(Frame2{0.4, 1.7, 0.8});
  CHECK(lie_bracket(lie_coeffs(), q, QGradd::Zero().eval()).norm() == 0.0);
  CHECK(lie_bracket(lie_coeffs(), QVecd::Zero().eval(), QGradd::Zero().eval()).norm() == 0.0);
}

TEST_CASE("bracket is bilinear and degree-two under scaling") {
  std::mt19937 rng(2);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 30; ++i) {
    QVecd q1, q2;
    QGradd g1, g2;
    for (int c = 0; c < 5; ++c) {
      q1[c] = normal(rng);
      q2[c] = normal(rng);
      for (int a = 0; a < 2; ++a) {
        g1(c, a) = normal(rng);
        g2(c, a) = normal(rng);
      }
    }
    const auto& C = lie_coeffs();
    CHECK((lie_bracket<double>(C, q1 + q2, g1) -
           lie_bracket(C, q1, g1) - lie_bracket(C, q2, g1)).norm() < 1e-12);
    CHECK((lie_bracket<double>(C, q1, g1 + g2) -
           lie_bracket(C, q1, g1) - lie_bracket(C, q1, g2)).norm() < 1e-12);
    const double al = 1.7;
    CHECK((lie_bracket<double>(C, al * q1, (al * g1).eval()) -
           al * al * lie_bracket(C, q1, g1)).norm() < 1e-10);
    // normalized integrand is scale invariant
    const double a0 = area(q1);
    if (std::abs(a0) > 1e-6) {
      const double h0 = lie_bracket(C, q1, g1).squaredNorm() / (a0 * a0);
      const double h1 = lie_bracket<double>(C, al * q1, (al * g1).eval()).squaredNorm() /
                        (area<double>(al * q1) * area<double>(al * q1));
      CHECK(h0 == doctest::Approx(h1).epsilon(1e-9));
    }
  }
}

TEST_CASE("bracket partials are consistent with the bilinear form") {
  std::mt19937 rng(4);
  std::normal_distribution<double> normal;
  QVecd q;
  QGradd g;
  for (int c = 0; c < 5; ++c) {
    q[c] = normal(rng);
    for (int a = 0; a < 2; ++a) g(c, a) = normal(rng);
  }
  const auto& C = lie_coeffs();
  const Vec2d base = lie_bracket(C, q, g);
  const Eigen::Matrix<double, 2, 5> jq = lie_dq(C, g);
  CHECK((jq * q - base).norm() < 1e-13);  // linear in q
  const auto jg = lie_dgrad(C, q);
  double recon0 = 0, recon1 = 0;
  for (int j = 0; j < 5; ++j)
    for (int a = 0; a < 2; ++a) {
      recon0 += jg[0](j, a) * g(j, a);
      recon1 += jg[1](j, a) * g(j, a);
    }
  CHECK(recon0 == doctest::Approx(base[0]).epsilon(1e-12));
  CHECK(recon1 == doctest::Approx(base[1]).epsilon(1e-12));
}

TEST_CASE("hand-derived fields") {
  // phi = 0, lambda = 1 + y, mu = 1: bracket (-1, 0) at y = 0
  auto field_a = [](const Vec2d& p) { return Frame2{0, 1 + p.y(), 1}; };
  const Vec2d p(0.3, 0.0);
  const Vec2d oracle_a = lie_oracle(field_a, p, 1e-5);
  CHECK(oracle_a.x() == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(oracle_a.y() == doctest::Approx(0.0).epsilon(1e-8));

  QGradd g = QGradd::Zero();
  {
    const double h = 1e-6;
    const QVecd qp = q_from_frame(field_a(p + Vec2d(0, h)));
    const QVecd qm = q_from_frame(field_a(p - Vec2d(0, h)));
    g.col(1) = (qp - qm) / (2 * h);
  }
  const Vec2d formula_a = lie_bracket(lie_coeffs(), q_from_frame(field_a(p)), g);
  CHECK(formula_a.x() == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(formula_a.y() == doctest::Approx(0.0).epsilon(1e-8));

  // u = (1+x) e1, v = (1+x) e2: bracket (0, 1+x)
  auto field_b = [](const Vec2d& pt) { return Frame2{0, 1 + pt.x(), 1 + pt.x()}; };
  const Vec2d pb(0.3, 0.1);
  const Vec2d oracle_b = lie_oracle(field_b, pb, 1e-5);
  CHECK(oracle_b.x() == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(oracle_b.y() == doctest::Approx(1.3).epsilon(1e-8));
}

TEST_CASE("oracle zero on constant and rigid-rotation fields") {
  const AnalyticField c = make_constant_field(Frame2{0.6, 1.3, 0.9});
  CHECK(lie_oracle(c.frame, Vec2d(0.2, 0.4), 1e-5).norm() < 1e-10);
  const AnalyticField r = make_rigid_rotation_field(1.1);
  CHECK(lie_oracle(r.frame, Vec2d(-0.3, 0.8), 1e-5).norm() < 1e-10);
}

TEST_CASE("bracket matches the finite-difference oracle on random smooth fields") {
  int accepted = 0;
  double worst = 0;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> uni(0.05, 0.95);
  for (unsigned seed = 0; accepted < 100 && seed < 500; ++seed) {
    const AnalyticField f = make_random_smooth_field(seed);
    const Vec2d p(uni(rng), uni(rng));
    const Vec2d oracle = lie_oracle(f.frame, p, 1e-5);
    if (oracle.norm() < 2e-2) continue;  // keep the FD error model valid
    const Vec2d formula = lie_bracket(lie_coeffs(), f.q(p), f.grad_q(p));
    worst = std::max(worst, (formula - oracle).norm() / oracle.norm());
    ++accepted;
  }
  REQUIRE(accepted >= 100);
  CHECK(worst < 1e-6);
}

TEST_CASE("polar singular fields have vanishing bracket away from the origin") {
  for (double index : {0.25, -0.25}) {
    const AnalyticField f = make_polar_field(index);
    for (const Vec2d& p : {Vec2d(0.5, 0.3), Vec2d(-0.4, 0.2), Vec2d(0.1, -0.6)}) {
      CHECK(lie_oracle(f.frame, p, 1e-5).norm() < 1e-6);
      CHECK(lie_bracket(lie_coeffs(), f.q(p), f.grad_q(p)).norm() < 1e-9);
    }
  }
}

TEST_CASE("oracle refuses near branch ambiguity") {
  const AnalyticField f = make_polar_field(0.25);
  // stencil spanning the singularity flips branches by more than pi/8
  CHECK_THROWS_AS((void)lie_oracle(f.frame, Vec2d(1e-5, 0), 1e-4), std::runtime_error);
}
