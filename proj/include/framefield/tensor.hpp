#pragma once

// 2D fourth-order symmetric / odeco tensor algebra in the circular-harmonics
// basis  p(theta) = q0/sqrt(2pi) + (q1 cos2t + q2 sin2t + q3 cos4t + q4 sin4t)/sqrt(pi).
// A frame (phi, lambda, mu) corresponds to the odeco tensor
// lambda*u^x4 + mu*v^x4 with u = (cos phi, sin phi) and v = u rotated by +pi/2.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace framefield {

template <typename S> using Vec2 = Eigen::Matrix<S, 2, 1>;
template <typename S> using Vec3 = Eigen::Matrix<S, 3, 1>;
template <typename S> using QVec = Eigen::Matrix<S, 5, 1>;
template <typename S> using QGrad = Eigen::Matrix<S, 5, 2>;  // dq_j/dx_a

using Vec2d = Vec2<double>;
using QVecd = QVec<double>;
using QGradd = QGrad<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

template <typename S> S sqrt_pi() { return std::sqrt(S(kPi)); }
template <typename S> S sqrt_two_pi() { return std::sqrt(S(2) * S(kPi)); }

// Frames are equivalence classes under 90-degree rotations; the canonical
// representative has phi in [0, pi/2), sizes swapping on odd quarter turns.
template <typename S>
struct Frame {
  S phi{0};
  S lambda{1};
  S mu{1};

  static Frame canonical(S raw_phi, S lambda, S mu) {
    S turns = std::floor(raw_phi / S(kHalfPi));
    S phi = raw_phi - turns * S(kHalfPi);
    if (phi >= S(kHalfPi)) {  // fp guard at the wrap point
      phi -= S(kHalfPi);
      turns += S(1);
    }
    if (phi < S(0)) {
      phi += S(kHalfPi);
      turns -= S(1);
    }
    const bool odd = std::fmod(std::abs(turns), S(2)) >= S(0.5);
    return odd ? Frame{phi, mu, lambda} : Frame{phi, lambda, mu};
  }
};

using Frame2 = Frame<double>;

// Fully symmetric 2x2x2x2 tensor; entries depend only on how many indices are 1.
template <typename S>
struct SymTensor4 {
  Eigen::Matrix<S, 5, 1> comp = Eigen::Matrix<S, 5, 1>::Zero();  // t1111 t1112 t1122 t1222 t2222

  S operator()(int i, int j, int k, int l) const { return comp[i + j + k + l]; }
};

using SymTensor4d = SymTensor4<double>;

// Change of basis q = Mq * t between the 5 independent tensor components and
// the circular-harmonics coefficients, and its inverse.  Derived by expanding
// the quartic in Fourier modes; dense-quadrature regression lives in the
// verification module.
template <typename S>
Eigen::Matrix<S, 5, 5> q_from_tensor_matrix() {
  const S sp = sqrt_pi<S>();
  const S s2p = sqrt_two_pi<S>();
  Eigen::Matrix<S, 5, 5> m;
  m << S(3) / 8 * s2p, 0, S(3) / 4 * s2p, 0, S(3) / 8 * s2p,
       sp / 2,         0, 0,              0, -sp / 2,
       0,              sp, 0,             sp, 0,
       sp / 8,         0, -S(3) / 4 * sp, 0, sp / 8,
       0,              sp / 2, 0,         -sp / 2, 0;
  return m;
}

template <typename S>
Eigen::Matrix<S, 5, 5> tensor_from_q_matrix() {
  const S sp = sqrt_pi<S>();
  const S s2p = sqrt_two_pi<S>();
  Eigen::Matrix<S, 5, 5> m;
  m << 1 / s2p,       1 / sp, 0,            1 / sp,  0,
       0,             0,      1 / (2 * sp), 0,       1 / sp,
       1 / (3 * s2p), 0,      0,            -1 / sp, 0,
       0,             0,      1 / (2 * sp), 0,       -1 / sp,
       1 / s2p,       -1 / sp, 0,           1 / sp,  0;
  return m;
}

template <typename S>
SymTensor4<S> tensor_from_q(const QVec<S>& q) {
  SymTensor4<S> t;
  t.comp = tensor_from_q_matrix<S>() * q;
  return t;
}

template <typename S>
QVec<S> q_from_tensor(const SymTensor4<S>& t) {
  return q_from_tensor_matrix<S>() * t.comp;
}

// p_T(theta): full contraction of the tensor with (cos t, sin t)^x4.
template <typename S>
S eval_poly(const QVec<S>& q, S theta) {
  return q[0] / sqrt_two_pi<S>() +
         (q[1] * std::cos(2 * theta) + q[2] * std::sin(2 * theta) +
          q[3] * std::cos(4 * theta) + q[4] * std::sin(4 * theta)) /
             sqrt_pi<S>();
}

// Quadratic residuals whose zero set is the odeco variety.
template <typename S>
Vec3<S> odeco_residuals(const QVec<S>& q) {
  const S s2 = std::sqrt(S(2));
  Vec3<S> c;
  c[0] = q[0] * q[0] - 18 * (q[3] * q[3] + q[4] * q[4]);
  c[1] = s2 * q[0] * q[1] - 6 * q[1] * q[3] - 6 * q[2] * q[4];
  c[2] = s2 * q[0] * q[2] - 6 * q[1] * q[4] + 6 * q[2] * q[3];
  return c;
}

template <typename S>
Eigen::Matrix<S, 3, 5> odeco_residuals_jacobian(const QVec<S>& q) {
  const S s2 = std::sqrt(S(2));
  Eigen::Matrix<S, 3, 5> j;
  j << 2 * q[0], 0, 0, -36 * q[3], -36 * q[4],
       s2 * q[1], s2 * q[0] - 6 * q[3], -6 * q[4], -6 * q[1], -6 * q[2],
       s2 * q[2], -6 * q[4], s2 * q[0] + 6 * q[3], 6 * q[2], -6 * q[1];
  return j;
}

// Frame area lambda*mu, valid on the variety; defined for every q.
template <typename S>
S area(const QVec<S>& q) {
  return (S(8) / 9 * q[0] * q[0] - (q[1] * q[1] + q[2] * q[2])) / S(kPi);
}

template <typename S>
QVec<S> area_gradient(const QVec<S>& q) {
  QVec<S> g;
  g << S(16) / 9 * q[0], -2 * q[1], -2 * q[2], S(0), S(0);
  return g / S(kPi);
}

// q of the frame (phi, lambda, mu), written via the sum/difference form
//   q0 = 3/8 sqrt(2pi) (l+m),  (q1,q2) = sqrt(pi)/2 (l-m) (cos2p, sin2p),
//   (q3,q4) = sqrt(pi)/8 (l+m) (cos4p, sin4p).
template <typename S>
QVec<S> q_from_sum_diff(S phi, S sum, S diff) {
  const S sp = sqrt_pi<S>();
  QVec<S> q;
  q[0] = S(3) / 8 * sqrt_two_pi<S>() * sum;
  q[1] = sp / 2 * diff * std::cos(2 * phi);
  q[2] = sp / 2 * diff * std::sin(2 * phi);
  q[3] = sp / 8 * sum * std::cos(4 * phi);
  q[4] = sp / 8 * sum * std::sin(4 * phi);
  return q;
}

template <typename S>
QVec<S> q_from_frame(const Frame<S>& f) {
  if (!(f.lambda > S(0)) || !(f.mu > S(0)))
    throw std::invalid_argument("q_from_frame: frame sizes must be positive");
  return q_from_sum_diff(f.phi, f.lambda + f.mu, f.lambda - f.mu);
}

enum class TensorClass { kRegular, kDegenerate, kNonPositive };

template <typename S>
struct Projection {
  QVec<S> q = QVec<S>::Zero();
  S phi{0}, sum{0}, diff{0};  // projected frame parameters (lambda+mu, lambda-mu)
  TensorClass status{TensorClass::kRegular};
};

// Closed-form projection onto the odeco variety: the 4-theta phase fixes phi,
// lambda+mu is the least-squares blend of q0 and |(q3,q4)| along the variety
// ray (which keeps c1 = 0), and lambda-mu projects (q1,q2) on (cos2p, sin2p).
// Tensors with no 4-theta content carry no direction and are reported instead.
template <typename S>
Projection<S> project_odeco(const QVec<S>& q) {
  Projection<S> out;
  const S rho = std::hypot(q[3], q[4]);
  if (rho < S(1e-12) * q.norm() || !(area(q) > S(0))) {
    out.q = q;
    out.status = TensorClass::kDegenerate;
    return out;
  }
  const S phi = std::atan2(q[4], q[3]) / 4;
  const S sp = sqrt_pi<S>();
  const S sum = (24 * sqrt_two_pi<S>() * q[0] + 8 * sp * rho) / (19 * S(kPi));
  if (!(sum > S(0))) {
    out.q = q;
    out.status = TensorClass::kNonPositive;
    return out;
  }
  const S diff = 2 / sp * (q[1] * std::cos(2 * phi) + q[2] * std::sin(2 * phi));
  out.q = q_from_sum_diff(phi, sum, diff);
  out.phi = phi;
  out.sum = sum;
  out.diff = diff;
  return out;
}

template <typename S>
struct RecoveredFrame {
  Frame<S> frame;
  bool degenerate{false};        // no usable direction in the tensor
  bool nonpositive_size{false};  // a contracted size came out <= 0
};

// Direction from the projected tensor, sizes by contracting the original
// tensor along that direction and its perpendicular.
template <typename S>
RecoveredFrame<S> extract_frame(const QVec<S>& q) {
  RecoveredFrame<S> out;
  const Projection<S> p = project_odeco(q);
  if (p.status != TensorClass::kRegular) {
    out.degenerate = true;
    out.frame = Frame<S>{S(0), eval_poly(q, S(0)), eval_poly(q, S(kHalfPi))};
    out.nonpositive_size = !(out.frame.lambda > S(0)) || !(out.frame.mu > S(0));
    return out;
  }
  const S lambda = eval_poly(q, p.phi);
  const S mu = eval_poly(q, p.phi + S(kHalfPi));
  out.frame = Frame<S>::canonical(p.phi, lambda, mu);
  out.nonpositive_size = !(lambda > S(0)) || !(mu > S(0));
  return out;
}

// T w^3 (one free index) and T w^2 (two free indices).
template <typename S>
Vec2<S> contract3(const SymTensor4<S>& t, const Vec2<S>& w) {
  Vec2<S> out = Vec2<S>::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out[i] += t(i, j, k, l) * w[j] * w[k] * w[l];
  return out;
}

template <typename S>
Eigen::Matrix<S, 2, 2> contract2(const SymTensor4<S>& t, const Vec2<S>& w) {
  Eigen::Matrix<S, 2, 2> out = Eigen::Matrix<S, 2, 2>::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(i, j) += t(i, j, k, l) * w[k] * w[l];
  return out;
}

template <typename S>
S contract4(const SymTensor4<S>& t, const Vec2<S>& w) {
  return contract3(t, w).dot(w);
}

// First-order change of the scaled eigenvector w = lambda*w_hat of an odeco
// tensor under a perturbation dt:  delta_w = dt : w_hat^3.
template <typename S>
Vec2<S> sensitivity_delta_w(const SymTensor4<S>& dt, const Vec2<S>& w_hat) {
  return contract3(dt, w_hat);
}

}  // namespace framefield
