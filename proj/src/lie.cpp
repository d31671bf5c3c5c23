#include "framefield/lie.hpp"

#include <cmath>
#include <stdexcept>

namespace framefield {

namespace {

struct Entry {
  int i, j, k, a;
  double v;  // coefficient times pi
};

constexpr double kS2h = 0.70710678118654752440;  // sqrt(2)/2

// 42 nonzero entries of C (times pi).
constexpr Entry kTable[] = {
    {0, 0, 0, 1, -2.0 / 3}, {0, 0, 1, 1, kS2h},     {0, 0, 2, 0, -kS2h},
    {0, 1, 0, 1, -kS2h},    {0, 1, 1, 1, 1},        {0, 1, 2, 0, -0.5},
    {0, 1, 3, 1, -1},       {0, 1, 4, 0, 1},        {0, 2, 0, 0, kS2h},
    {0, 2, 1, 0, 0.5},      {0, 2, 2, 1, 1},        {0, 2, 3, 0, -1},
    {0, 2, 4, 1, -1},       {0, 3, 1, 1, 1},        {0, 3, 2, 0, 1},
    {0, 3, 3, 1, -4},       {0, 3, 4, 0, 4},        {0, 4, 1, 0, -1},
    {0, 4, 2, 1, 1},        {0, 4, 3, 0, -4},       {0, 4, 4, 1, -4},
    {1, 0, 0, 0, 2.0 / 3},  {1, 0, 1, 0, kS2h},     {1, 0, 2, 1, kS2h},
    {1, 1, 0, 0, -kS2h},    {1, 1, 1, 0, -1},       {1, 1, 2, 1, -0.5},
    {1, 1, 3, 0, -1},       {1, 1, 4, 1, -1},       {1, 2, 0, 1, -kS2h},
    {1, 2, 1, 1, 0.5},      {1, 2, 2, 0, -1},       {1, 2, 3, 1, 1},
    {1, 2, 4, 0, -1},       {1, 3, 1, 0, 1},        {1, 3, 2, 1, -1},
    {1, 3, 3, 0, 4},        {1, 3, 4, 1, 4},        {1, 4, 1, 1, 1},
    {1, 4, 2, 0, 1},        {1, 4, 3, 1, -4},       {1, 4, 4, 0, 4},
};

}  // namespace

const LieCoeffs& lie_coeffs() {
  static const LieCoeffs table = [] {
    LieCoeffs c;
    for (const Entry& e : kTable) c.at(e.i, e.j, e.k, e.a) = e.v / kPi;
    return c;
  }();
  return table;
}

LieCoeffs build_lie_coeffs() {
  // +90-degree rotation: v_hat = eps * u_hat.
  const double eps[2][2] = {{0, -1}, {1, 0}};
  const Eigen::Matrix<double, 5, 5> tq = tensor_from_q_matrix<double>();

  auto full = [](const Eigen::Matrix<double, 5, 1>& comp, int i, int j, int k, int l) {
    return comp[i + j + k + l];
  };

  LieCoeffs out;
  for (int k = 0; k < 5; ++k) {
    const Eigen::Matrix<double, 5, 1> tk = tq.col(k);
    for (int j = 0; j < 5; ++j) {
      const Eigen::Matrix<double, 5, 1> gj = tq.col(j);
      for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i) {
          double acc = 0;
          for (int j2 = 0; j2 < 2; ++j2)
            for (int j3 = 0; j3 < 2; ++j3)
              for (int j4 = 0; j4 < 2; ++j4) {
                const double g = full(gj, i, j2, j3, j4);
                if (g == 0) continue;
                for (int k2 = 0; k2 < 2; ++k2)
                  for (int k3 = 0; k3 < 2; ++k3)
                    for (int k4 = 0; k4 < 2; ++k4) {
                      const double e = eps[j2][k2] * eps[j3][k3] * eps[j4][k4];
                      if (e == 0) continue;
                      acc += e * full(tk, a, k2, k3, k4) * g;
                    }
              }
          out.at(i, j, k, a) = acc;
        }
    }
  }
  return out;
}

Vec2d lie_oracle(const std::function<Frame2(const Vec2d&)>& field, const Vec2d& p, double h) {
  const Frame2 f0 = field(p);
  const auto [u0, v0] = frame_vectors(f0, 0);

  auto branched = [&](const Vec2d& ps) {
    const Frame2 f = field(ps);
    int best_b = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int b = 0; b < 4; ++b) {
      double d = f.phi + b * kHalfPi - f0.phi;
      d = std::remainder(d, 2 * kPi);
      if (std::abs(d) < std::abs(best_d)) {
        best_d = d;
        best_b = b;
      }
    }
    if (std::abs(best_d) > kPi / 8)
      throw std::runtime_error("lie_oracle: branch ambiguity near a singularity");
    return frame_vectors(f, best_b);
  };

  Vec2d du[2], dv[2];
  for (int a = 0; a < 2; ++a) {
    Vec2d step = Vec2d::Zero();
    step[a] = h;
    const auto [up, vp] = branched(p + step);
    const auto [um, vm] = branched(p - step);
    du[a] = (up - um) / (2 * h);
    dv[a] = (vp - vm) / (2 * h);
  }
  return u0[0] * dv[0] + u0[1] * dv[1] - v0[0] * du[0] - v0[1] * du[1];
}

}  // namespace framefield
