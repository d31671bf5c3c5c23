#pragma once

// Lie bracket of a frame field evaluated directly on the circular-harmonics
// coefficients:  Lie(q)_i = C_ijka * q_k * dq_j/dx_a.  The constant tensor C
// comes from contracting the odeco tensor with its spatial derivative through
// the eigenvector sensitivity relation; a frozen closed-form table is shipped
// and the numeric derivation is kept for regression.

#include <array>
#include <functional>

#include "framefield/tensor.hpp"

namespace framefield {

struct LieCoeffs {
  std::array<double, 100> c{};  // [i][j][k][alpha], i,alpha in 0..1, j,k in 0..4

  double operator()(int i, int j, int k, int a) const { return c[((i * 5 + j) * 5 + k) * 2 + a]; }
  double& at(int i, int j, int k, int a) { return c[((i * 5 + j) * 5 + k) * 2 + a]; }
};

// Frozen coefficients (exact closed forms).
const LieCoeffs& lie_coeffs();

// Re-derivation from basis evaluations of the tensor-space contraction
//   Lie(T)_i = e_{j2k2} e_{j3k3} e_{j4k4} T_{a k2 k3 k4} dT_{i j2 j3 j4}/dx_a,
// with e the +90-degree rotation pairing v_hat = e * u_hat.
LieCoeffs build_lie_coeffs();

template <typename S>
Vec2<S> lie_bracket(const LieCoeffs& C, const QVec<S>& q, const QGrad<S>& gradq) {
  Vec2<S> out = Vec2<S>::Zero();
  for (int i = 0; i < 2; ++i) {
    S acc{0};
    for (int j = 0; j < 5; ++j)
      for (int a = 0; a < 2; ++a) {
        const S g = gradq(j, a);
        if (g == S(0)) continue;
        S inner{0};
        for (int k = 0; k < 5; ++k) inner += S(C(i, j, k, a)) * q[k];
        acc += inner * g;
      }
    out[i] = acc;
  }
  return out;
}

// Partials of the bracket for gradient assembly:
//   dLie_i/dq_k   (at fixed gradq)  and  dLie_i/dgradq_(j,a)  (at fixed q).
template <typename S>
Eigen::Matrix<S, 2, 5> lie_dq(const LieCoeffs& C, const QGrad<S>& gradq) {
  Eigen::Matrix<S, 2, 5> out = Eigen::Matrix<S, 2, 5>::Zero();
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 5; ++k) {
      S acc{0};
      for (int j = 0; j < 5; ++j)
        for (int a = 0; a < 2; ++a) acc += S(C(i, j, k, a)) * gradq(j, a);
      out(i, k) = acc;
    }
  return out;
}

template <typename S>
std::array<QGrad<S>, 2> lie_dgrad(const LieCoeffs& C, const QVec<S>& q) {
  std::array<QGrad<S>, 2> out{QGrad<S>::Zero(), QGrad<S>::Zero()};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 5; ++j)
      for (int a = 0; a < 2; ++a) {
        S acc{0};
        for (int k = 0; k < 5; ++k) acc += S(C(i, j, k, a)) * q[k];
        out[i](j, a) = acc;
      }
  return out;
}

// Finite-difference bracket in frame space, used as the independent oracle.
// Branch continuation picks the representative nearest in angle; refuses when
// a stencil jump exceeds pi/8 (singularity too close).
Vec2d lie_oracle(const std::function<Frame2(const Vec2d&)>& field, const Vec2d& p, double h);

// Branch-consistent frame vectors: representative `branch` of the class,
// direction phi + branch*pi/2 with sizes swapping on odd branches.
inline std::pair<Vec2d, Vec2d> frame_vectors(const Frame2& f, int branch) {
  const double ang = f.phi + branch * kHalfPi;
  const double su = (branch % 2 == 0) ? f.lambda : f.mu;
  const double sv = (branch % 2 == 0) ? f.mu : f.lambda;
  const Vec2d u = su * Vec2d(std::cos(ang), std::sin(ang));
  const Vec2d v = sv * Vec2d(-std::sin(ang), std::cos(ang));
  return {u, v};
}

}  // namespace framefield
