#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "framefield/tensor.hpp"

using namespace framefield;

namespace {

// Fourier projection of an explicit frame polynomial onto the harmonics
// basis by dense quadrature; independent of the closed-form construction.
QVecd q_by_quadrature(double phi, double lambda, double mu) {
  const int n = 4096;
  QVecd q = QVecd::Zero();
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) * 2 * kPi / n;
    const double c = std::cos(t - phi), s = std::sin(t - phi);
    const double p = lambda * c * c * c * c + mu * s * s * s * s;
    q[0] += p / sqrt_two_pi<double>();
    q[1] += p * std::cos(2 * t) / sqrt_pi<double>();
    q[2] += p * std::sin(2 * t) / sqrt_pi<double>();
    q[3] += p * std::cos(4 * t) / sqrt_pi<double>();
    q[4] += p * std::sin(4 * t) / sqrt_pi<double>();
  }
  return q * (2 * kPi / n);
}

std::mt19937 rng_with(unsigned seed) { return std::mt19937(seed); }

Frame2 random_frame(std::mt19937& rng) {
  std::uniform_real_distribution<double> ang(0, kHalfPi);
  std::uniform_real_distribution<double> len(0.2, 3.0);
  return Frame2{ang(rng), len(rng), len(rng)};
}

}  // namespace

TEST_CASE("q_from_frame matches the quadrature oracle") {
  const QVecd id = q_from_frame(Frame2{0, 1, 1});
  const QVecd id_oracle = q_by_quadrature(0, 1, 1);
  CHECK((id - id_oracle).norm() < 1e-12);
  CHECK(id[0] == doctest::Approx(0.75 * sqrt_two_pi<double>()).epsilon(1e-12));
  CHECK(id[3] == doctest::Approx(0.25 * sqrt_pi<double>()).epsilon(1e-12));
  CHECK(id[0] == doctest::Approx(1.8800).epsilon(1e-4));
  CHECK(id[3] == doctest::Approx(0.4431).epsilon(1e-4));
  CHECK(std::abs(id[1]) < 1e-14);
  CHECK(std::abs(id[2]) < 1e-14);
  CHECK(std::abs(id[4]) < 1e-14);

  const QVecd two = q_from_frame(Frame2{0, 2, 1});
  CHECK((two - q_by_quadrature(0, 2, 1)).norm() < 1e-12);
  CHECK(two[0] == doctest::Approx(2.8200).epsilon(1e-4));
  CHECK(two[1] == doctest::Approx(0.8862).epsilon(1e-4));
  CHECK(two[3] == doctest::Approx(0.6647).epsilon(1e-4));

  auto rng = rng_with(11);
  for (int i = 0; i < 50; ++i) {
    const Frame2 f = random_frame(rng);
    CHECK((q_from_frame(f) - q_by_quadrature(f.phi, f.lambda, f.mu)).norm() < 1e-11);
  }
}

TEST_CASE("q_from_frame is invariant under quarter rotations") {
  auto rng = rng_with(5);
  for (int i = 0; i < 50; ++i) {
    const Frame2 f = random_frame(rng);
    const QVecd q = q_from_frame(f);
    for (int k = 1; k < 4; ++k) {
      const Frame2 rot = Frame2::canonical(f.phi + k * kHalfPi, (k % 2) ? f.mu : f.lambda,
                                           (k % 2) ? f.lambda : f.mu);
      CHECK((q_from_frame(rot) - q).norm() < 1e-12);
    }
  }
  const QVecd a = q_from_frame(Frame2::canonical(0.3, 2.0, 0.7));
  const QVecd b = q_from_frame(Frame2::canonical(0.3 + kHalfPi, 0.7, 2.0));
  CHECK((a - b).norm() < 1e-13);
}

TEST_CASE("q_from_frame rejects non-positive sizes") {
  CHECK_THROWS_AS((void)q_from_frame(Frame2{0, -1, 1}), std::invalid_argument);
  CHECK_THROWS_AS((void)q_from_frame(Frame2{0, 1, 0}), std::invalid_argument);
}

TEST_CASE("tensor basis change is invertible and value-preserving") {
  CHECK(tensor_from_q<double>(QVecd::Zero()).comp.norm() == 0.0);

  auto rng = rng_with(3);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 100; ++i) {
    QVecd q;
    for (int c = 0; c < 5; ++c) q[c] = normal(rng);
    const SymTensor4d t = tensor_from_q(q);
    CHECK((q_from_tensor(t) - q).norm() < 1e-12);
    for (double theta : {0.1, 1.3, 2.9}) {
      const Vec2d d(std::cos(theta), std::sin(theta));
      CHECK(contract4(t, d) == doctest::Approx(eval_poly(q, theta)).epsilon(1e-10));
    }
  }

  const SymTensor4d id = tensor_from_q(q_from_frame(Frame2{0, 1, 1}));
  CHECK(id.comp[0] == doctest::Approx(1.0));
  CHECK(id.comp[4] == doctest::Approx(1.0));
  CHECK(std::abs(id.comp[1]) < 1e-14);
  CHECK(std::abs(id.comp[2]) < 1e-14);
  CHECK(std::abs(id.comp[3]) < 1e-14);
}

TEST_CASE("eval_poly values and periodicity") {
  const QVecd q = q_from_frame(Frame2{0, 3, 1});
  CHECK(eval_poly(q, 0.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(eval_poly(q, kHalfPi) == doctest::Approx(1.0).epsilon(1e-12));

  auto rng = rng_with(7);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 20; ++i) {
    QVecd r;
    for (int c = 0; c < 5; ++c) r[c] = normal(rng);
    const double t = normal(rng);
    CHECK(eval_poly(r, t) == doctest::Approx(eval_poly(r, t + kPi)).epsilon(1e-12));
    CHECK(eval_poly<double>(2.5 * r, t) == doctest::Approx(2.5 * eval_poly(r, t)).epsilon(1e-12));
  }

  QVecd ball = QVecd::Zero();
  ball[0] = sqrt_two_pi<double>();
  for (double t : {0.0, 0.7, 2.0}) CHECK(eval_poly(ball, t) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("odeco residuals vanish exactly on frames") {
  QVecd e0 = QVecd::Zero();
  e0[0] = 1;
  const Vec3<double> r0 = odeco_residuals(e0);
  CHECK(r0[0] == doctest::Approx(1.0));
  CHECK(r0[1] == 0.0);
  CHECK(r0[2] == 0.0);

  QVecd e1 = QVecd::Zero();
  e1[1] = 1;
  CHECK(odeco_residuals(e1).norm() == 0.0);  // the zero set contains non-frames too

  auto rng = rng_with(13);
  for (int i = 0; i < 100; ++i) {
    const Frame2 f = random_frame(rng);
    CHECK(odeco_residuals(q_from_frame(f)).norm() < 1e-12);
  }
}

TEST_CASE("area equals the size product on the variety") {
  CHECK(area(q_from_frame(Frame2{0.2, 1, 1})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(area(q_from_frame(Frame2{1.1, 2, 1})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(area<double>(QVecd::Zero()) == 0.0);
  auto rng = rng_with(17);
  for (int i = 0; i < 100; ++i) {
    const Frame2 f = random_frame(rng);
    CHECK(area(q_from_frame(f)) == doctest::Approx(f.lambda * f.mu).epsilon(1e-12));
  }
}

TEST_CASE("area gradient matches finite differences") {
  auto rng = rng_with(19);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 20; ++i) {
    QVecd q;
    for (int c = 0; c < 5; ++c) q[c] = normal(rng);
    const QVecd g = area_gradient(q);
    for (int c = 0; c < 5; ++c) {
      QVecd qp = q, qm = q;
      qp[c] += 1e-6;
      qm[c] -= 1e-6;
      CHECK(g[c] == doctest::Approx((area(qp) - area(qm)) / 2e-6).epsilon(1e-6));
    }
  }
}

TEST_CASE("projection is idempotent and lands on the variety") {
  auto rng = rng_with(23);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 100; ++i) {
    const Frame2 f = random_frame(rng);
    QVecd q = q_from_frame(f);
    const Projection<double> onv = project_odeco(q);
    REQUIRE(onv.status == TensorClass::kRegular);
    CHECK((onv.q - q).norm() < 1e-12 * q.norm());

    QVecd noisy = q;
    for (int c = 0; c < 5; ++c) noisy[c] += 0.05 * normal(rng);
    const Projection<double> p = project_odeco(noisy);
    if (p.status != TensorClass::kRegular) continue;
    CHECK(odeco_residuals(p.q).norm() < 1e-10 * std::max(1.0, p.q.squaredNorm()));
    const Projection<double> p2 = project_odeco(p.q);
    CHECK((p2.q - p.q).norm() < 1e-12 * p.q.norm());
    CHECK(std::remainder(std::atan2(p.q[4], p.q[3]) - std::atan2(noisy[4], noisy[3]), 2 * kPi) ==
          doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("projection of an isotropic non-odeco tensor keeps the phase") {
  QVecd q = q_from_frame(Frame2{0.4, 1, 1});
  q[0] *= 1.5;  // too spherical: c1 != 0, q1 = q2 = 0
  REQUIRE(odeco_residuals(q)[0] != doctest::Approx(0.0));
  const Projection<double> p = project_odeco(q);
  REQUIRE(p.status == TensorClass::kRegular);
  CHECK(odeco_residuals(p.q).norm() < 1e-10);
  CHECK(std::abs(p.q[1]) < 1e-14);  // isotropy closure
  CHECK(std::abs(p.q[2]) < 1e-14);
  CHECK(std::remainder(std::atan2(p.q[4], p.q[3]) - std::atan2(q[4], q[3]), 2 * kPi) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("projection reports degenerate and inverted tensors") {
  QVecd ball = QVecd::Zero();
  ball[0] = 1.0;
  CHECK(project_odeco(ball).status == TensorClass::kDegenerate);
  QVecd negative_area = QVecd::Zero();
  negative_area[1] = 1.0;
  CHECK(project_odeco(negative_area).status == TensorClass::kDegenerate);
  const QVecd inverted = -q_from_frame(Frame2{0.3, 1, 1});
  CHECK(project_odeco(inverted).status == TensorClass::kNonPositive);
}

TEST_CASE("closed-form projection is near-optimal against brute force") {
  auto brute = [](const QVecd& q) {
    double best = 1e300;
    double lo_p = 0, hi_p = kHalfPi, lo_s = 0.05, hi_s = 8, lo_d = -6, hi_d = 6;
    for (int level = 0; level < 6; ++level) {
      double bp = lo_p, bs = lo_s, bd = lo_d;
      const int n = level == 0 ? 24 : 9;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            const double p = lo_p + (hi_p - lo_p) * i / (n - 1.0);
            const double s = lo_s + (hi_s - lo_s) * j / (n - 1.0);
            const double d = lo_d + (hi_d - lo_d) * k / (n - 1.0);
            const double dist = (q_from_sum_diff(p, s, d) - q).squaredNorm();
            if (dist < best) {
              best = dist;
              bp = p;
              bs = s;
              bd = d;
            }
          }
      const double wp = (hi_p - lo_p) / (n - 1.0), ws = (hi_s - lo_s) / (n - 1.0),
                   wd = (hi_d - lo_d) / (n - 1.0);
      lo_p = bp - wp;
      hi_p = bp + wp;
      lo_s = std::max(0.01, bs - ws);
      hi_s = bs + ws;
      lo_d = bd - wd;
      hi_d = bd + wd;
    }
    return std::sqrt(best);
  };

  auto rng = rng_with(29);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> mag(1e-6, 1e-1);
  for (int i = 0; i < 100; ++i) {
    const Frame2 f = random_frame(rng);
    QVecd q = q_from_frame(f);
    QVecd delta;
    for (int c = 0; c < 5; ++c) delta[c] = normal(rng);
    q += delta * (mag(rng) / delta.norm());
    const Projection<double> p = project_odeco(q);
    REQUIRE(p.status == TensorClass::kRegular);
    const double closed = (p.q - q).norm();
    CHECK(closed <= 2.0 * brute(q) + 1e-10);
  }
}

TEST_CASE("frame extraction round trip and perturbation recovery") {
  const auto rec = extract_frame(q_from_frame(Frame2{kPi / 6, 2, 1}));
  REQUIRE(!rec.degenerate);
  CHECK(rec.frame.phi == doctest::Approx(kPi / 6).epsilon(1e-10));
  CHECK(rec.frame.lambda == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(rec.frame.mu == doctest::Approx(1.0).epsilon(1e-10));

  const auto iso = extract_frame(q_from_frame(Frame2{0.77, 1, 1}));
  CHECK(iso.frame.lambda == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(iso.frame.mu == doctest::Approx(1.0).epsilon(1e-10));

  const QVecd q = q_from_frame(Frame2{0.2, 1.5, 0.6});
  const auto scaled = extract_frame<double>(3.0 * q);
  CHECK(scaled.frame.phi == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(scaled.frame.lambda == doctest::Approx(4.5).epsilon(1e-9));
  CHECK(scaled.frame.mu == doctest::Approx(1.8).epsilon(1e-9));

  auto rng = rng_with(31);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 100; ++i) {
    const Frame2 f = random_frame(rng);
    QVecd delta;
    for (int c = 0; c < 5; ++c) delta[c] = normal(rng);
    std::uniform_real_distribution<double> mag(1e-6, 1e-2);
    const double eps = mag(rng);
    const auto rec2 = extract_frame<double>(q_from_frame(f) + eps * delta / delta.norm());
    REQUIRE(!rec2.degenerate);
    CHECK(std::abs(std::remainder(rec2.frame.phi - f.phi, kHalfPi)) < 10 * eps);
    CHECK(std::abs(rec2.frame.lambda - f.lambda) < 10 * eps);
    CHECK(std::abs(rec2.frame.mu - f.mu) < 10 * eps);
  }
}

TEST_CASE("eigen-contraction chain for frames") {
  auto rng = rng_with(37);
  for (int i = 0; i < 50; ++i) {
    const Frame2 f = random_frame(rng);
    const SymTensor4d t = tensor_from_q(q_from_frame(f));
    const Vec2d u(std::cos(f.phi), std::sin(f.phi));
    const Vec2d v(-std::sin(f.phi), std::cos(f.phi));
    CHECK((contract3(t, u) - f.lambda * u).norm() < 1e-12);
    CHECK((contract3(t, v) - f.mu * v).norm() < 1e-12);
    CHECK((contract2(t, u) - f.lambda * u * u.transpose()).norm() < 1e-12);
    CHECK(contract4(t, u) == doctest::Approx(f.lambda).epsilon(1e-12));
  }
}

TEST_CASE("eigenvector sensitivity") {
  SymTensor4d zero;
  CHECK(sensitivity_delta_w(zero, Vec2d(1, 0)).norm() == 0.0);

  // dt = s * w^x4 gives delta_w = s * w; build it as the frame pair
  // (s+tiny, tiny) and subtract the perpendicular part analytically
  const double phi = 0.9;
  const Vec2d w(std::cos(phi), std::sin(phi));
  SymTensor4d rank1;
  for (int c = 0; c < 5; ++c) {
    auto count = [&](int ones) {
      double v = 1;
      for (int k = 0; k < 4; ++k) v *= (k < ones) ? w.y() : w.x();
      return v;
    };
    rank1.comp[c] = 0.7 * count(c);
  }
  const Vec2d dw = sensitivity_delta_w(rank1, w);
  CHECK((dw - 0.7 * w).norm() < 1e-12);

  // finite-difference eigenpair tracking agrees at second order
  auto rng = rng_with(41);
  std::normal_distribution<double> normal;
  auto eigpair = [](const QVecd& q, double guess) {
    double th = guess;
    for (int it = 0; it < 80; ++it) {
      const double sp = sqrt_pi<double>();
      const double d1 = (-2 * q[1] * std::sin(2 * th) + 2 * q[2] * std::cos(2 * th) -
                         4 * q[3] * std::sin(4 * th) + 4 * q[4] * std::cos(4 * th)) / sp;
      const double d2 = (-4 * q[1] * std::cos(2 * th) - 4 * q[2] * std::sin(2 * th) -
                         16 * q[3] * std::cos(4 * th) - 16 * q[4] * std::sin(4 * th)) / sp;
      th -= d1 / d2;
    }
    return std::make_pair(th, eval_poly(q, th));
  };
  double min_order = 10;
  for (int i = 0; i < 20; ++i) {
    std::uniform_real_distribution<double> ang(0, kHalfPi);
    std::uniform_real_distribution<double> len(0.5, 2.0);
    const Frame2 f{ang(rng), len(rng), len(rng)};
    const QVecd q0 = q_from_frame(f);
    QVecd dq;
    for (int c = 0; c < 5; ++c) dq[c] = normal(rng);
    const Vec2d w0(std::cos(f.phi), std::sin(f.phi));
    const Vec2d predicted = sensitivity_delta_w(tensor_from_q(dq), w0);
    std::vector<double> errs;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
      Vec2d fd = Vec2d::Zero();
      for (double sgn : {1.0, -1.0}) {
        const auto [th, lam] = eigpair(q0 + sgn * h * dq, f.phi);
        fd += sgn * lam * Vec2d(std::cos(th), std::sin(th));
      }
      fd /= 2 * h;
      errs.push_back((fd - predicted).norm());
    }
    if (errs[0] < 1e-11) continue;
    const double order = 0.5 * (std::log2(errs[0] / errs[1]) + std::log2(errs[1] / errs[2]));
    min_order = std::min(min_order, order);
  }
  CHECK(min_order >= 1.9);
}

TEST_CASE("canonical frame representative") {
  const Frame2 a = Frame2::canonical(kHalfPi + 0.2, 2.0, 1.0);
  CHECK(a.phi == doctest::Approx(0.2));
  CHECK(a.lambda == doctest::Approx(1.0));  // odd quarter turn swaps sizes
  CHECK(a.mu == doctest::Approx(2.0));
  const Frame2 b = Frame2::canonical(-0.1, 2.0, 1.0);
  CHECK(b.phi == doctest::Approx(kHalfPi - 0.1));
  CHECK(b.lambda == doctest::Approx(1.0));
  const Frame2 c = Frame2::canonical(2 * kPi + 0.3, 2.0, 1.0);
  CHECK(c.phi == doctest::Approx(0.3));
  CHECK(c.lambda == doctest::Approx(2.0));
}
