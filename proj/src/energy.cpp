#include "framefield/energy.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace framefield {

namespace {

// Static contiguous ranges merged in thread order keeps summation deterministic
// for a fixed thread count.
void run_blocks(int n, int threads, const std::function<void(int, int, int)>& body) {
  if (threads <= 1 || n < 64) {
    body(0, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  const int per = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = std::min(n, t * per), hi = std::min(n, (t + 1) * per);
    pool.emplace_back([=, &body] { body(lo, hi, t); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

EnergyAssembler::EnergyAssembler(const TriMesh& mesh, int threads)
    : mesh_(mesh), threads_(std::max(1, threads)) {
  const int nt = mesh.num_tris();
  elems_.reserve(nt);
  for (int t = 0; t < nt; ++t) elems_.push_back(p1_element(mesh, t));

  const int nn = mesh.num_nodes();
  std::vector<Eigen::Triplet<double>> trips, trips5;
  trips.reserve(9 * nt);
  trips5.reserve(45 * nt);
  for (int t = 0; t < nt; ++t) {
    const P1Element& el = elems_[t];
    for (int c1 = 0; c1 < 3; ++c1)
      for (int c2 = 0; c2 < 3; ++c2) {
        const double k = el.area * el.grad.col(c1).dot(el.grad.col(c2));
        const int n1 = mesh.tris(t, c1), n2 = mesh.tris(t, c2);
        trips.emplace_back(n1, n2, k);
        for (int m = 0; m < 5; ++m) trips5.emplace_back(5 * n1 + m, 5 * n2 + m, k);
      }
  }
  stiffness_.resize(nn, nn);
  stiffness_.setFromTriplets(trips.begin(), trips.end());
  stiffness5_.resize(5 * nn, 5 * nn);
  stiffness5_.setFromTriplets(trips5.begin(), trips5.end());
}

template <typename PerTri>
void EnergyAssembler::accumulate(int n_dofs, PerTri&& per_tri, double* value,
                                 Eigen::VectorXd* grad, bool* barrier) const {
  const int nt = mesh_.num_tris();
  std::atomic<bool> stop{false};
  std::vector<double> vals(threads_, 0.0);
  std::vector<Eigen::VectorXd> grads(threads_, Eigen::VectorXd::Zero(n_dofs));
  run_blocks(nt, threads_, [&](int lo, int hi, int slot) {
    for (int t = lo; t < hi && !stop.load(std::memory_order_relaxed); ++t)
      if (!per_tri(t, vals[slot], grads[slot])) stop.store(true, std::memory_order_relaxed);
  });
  *barrier = stop.load();
  if (*barrier) {
    *value = std::numeric_limits<double>::infinity();
    grad->setZero(n_dofs);
    return;
  }
  *value = 0;
  grad->setZero(n_dofs);
  for (int s = 0; s < threads_; ++s) {
    *value += vals[s];
    *grad += grads[s];
  }
}

EnergyValue EnergyAssembler::lie(const FieldState& state, double a_min) const {
  const LieCoeffs& C = lie_coeffs();
  const QuadratureRule& rule = tri_quadrature();
  EnergyValue out;
  auto per_tri = [&](int t, double& val, Eigen::VectorXd& g) -> bool {
    const int n[3] = {mesh_.tris(t, 0), mesh_.tris(t, 1), mesh_.tris(t, 2)};
    const P1Element& el = elems_[t];
    Eigen::Matrix<double, 5, 3> qn;
    for (int c = 0; c < 3; ++c) qn.col(c) = state.node_q(n[c]);
    const QGradd gradq = qn * el.grad.transpose();
    const Eigen::Matrix<double, 2, 5> jq = lie_dq(C, gradq);
    for (int k = 0; k < 3; ++k) {
      const QVecd qk = qn * rule.bary.row(k).transpose();
      const double a = area(qk);
      if (a <= a_min) return false;
      const Vec2d L = lie_bracket(C, qk, gradq);
      const double a2 = a * a;
      const double H = L.squaredNorm() / a2;
      const double w = el.area * rule.weights[k];
      val += w * H;

      const std::array<QGradd, 2> jg = lie_dgrad(C, qk);
      const QVecd s_q = (2.0 / a2) * (jq.transpose() * L) - (2.0 * H / a) * area_gradient(qk);
      QGradd mg;
      for (int m = 0; m < 5; ++m)
        for (int al = 0; al < 2; ++al)
          mg(m, al) = (2.0 / a2) * (L[0] * jg[0](m, al) + L[1] * jg[1](m, al));
      for (int c = 0; c < 3; ++c) {
        const double b = rule.bary(k, c);
        for (int m = 0; m < 5; ++m) {
          double d = s_q[m] * b;
          d += mg(m, 0) * el.grad(0, c) + mg(m, 1) * el.grad(1, c);
          g[5 * n[c] + m] += w * d;
        }
      }
    }
    return true;
  };
  accumulate(static_cast<int>(state.q.size()), per_tri, &out.value, &out.grad, &out.barrier);
  return out;
}

EnergyAssembler::LieProfile EnergyAssembler::lie_profile(const FieldState& state) const {
  const LieCoeffs& C = lie_coeffs();
  const QuadratureRule& rule = tri_quadrature();
  LieProfile out;
  for (int t = 0; t < mesh_.num_tris(); ++t) {
    const int n[3] = {mesh_.tris(t, 0), mesh_.tris(t, 1), mesh_.tris(t, 2)};
    const P1Element& el = elems_[t];
    Eigen::Matrix<double, 5, 3> qn;
    for (int c = 0; c < 3; ++c) qn.col(c) = state.node_q(n[c]);
    const QGradd gradq = qn * el.grad.transpose();
    for (int k = 0; k < 3; ++k) {
      const QVecd qk = qn * rule.bary.row(k).transpose();
      const double a = area(qk);
      if (a <= 0) {
        out.barrier = true;
        continue;
      }
      const double H = lie_bracket(C, qk, gradq).squaredNorm() / (a * a);
      out.value += el.area * rule.weights[k] * H;
      out.max_integrand = std::max(out.max_integrand, H);
    }
  }
  return out;
}

EnergyValue EnergyAssembler::odeco(const FieldState& state) const {
  const QuadratureRule& rule = tri_quadrature();
  const int n_res = state.iso_mode ? 1 : 3;
  EnergyValue out;
  auto per_tri = [&](int t, double& val, Eigen::VectorXd& g) -> bool {
    const int n[3] = {mesh_.tris(t, 0), mesh_.tris(t, 1), mesh_.tris(t, 2)};
    const P1Element& el = elems_[t];
    Eigen::Matrix<double, 5, 3> qn;
    for (int c = 0; c < 3; ++c) qn.col(c) = state.node_q(n[c]);
    for (int k = 0; k < 3; ++k) {
      const QVecd qk = qn * rule.bary.row(k).transpose();
      const Vec3<double> ci = odeco_residuals(qk);
      const Eigen::Matrix<double, 3, 5> j = odeco_residuals_jacobian(qk);
      const double w = el.area * rule.weights[k];
      QVecd dq = QVecd::Zero();
      for (int i = 0; i < n_res; ++i) {
        val += w * ci[i] * ci[i];
        dq += 2.0 * ci[i] * j.row(i).transpose();
      }
      for (int c = 0; c < 3; ++c) g.segment<5>(5 * n[c]) += w * rule.bary(k, c) * dq;
    }
    return true;
  };
  accumulate(static_cast<int>(state.q.size()), per_tri, &out.value, &out.grad, &out.barrier);
  return out;
}

EnergyValue EnergyAssembler::dirichlet(const FieldState& state) const {
  EnergyValue out;
  out.grad = stiffness5_ * state.q;
  out.value = 0.5 * state.q.dot(out.grad);
  return out;
}

EnergyValue EnergyAssembler::total(const FieldState& state, const EnergyParams& p) const {
  EnergyValue out;
  out.grad = Eigen::VectorXd::Zero(state.q.size());
  if (p.kappa < 1.0) {
    EnergyValue el = lie(state, p.a_min);
    if (el.barrier) {
      out.value = std::numeric_limits<double>::infinity();
      out.barrier = true;
      return out;
    }
    out.value += (1.0 - p.kappa) * el.value;
    out.grad += (1.0 - p.kappa) * el.grad;
  }
  if (p.kappa > 0.0) {
    EnergyValue ed = dirichlet(state);
    out.value += p.kappa * ed.value;
    out.grad += p.kappa * ed.grad;
  }
  if (std::isfinite(p.epsilon)) {
    const double s = 1.0 / (p.epsilon * p.epsilon);
    EnergyValue eo = odeco(state);
    out.value += s * eo.value;
    out.grad += s * eo.grad;
  }
  for (int i = 0; i < state.fixed.size(); ++i)
    if (state.fixed[i]) out.grad[i] = 0.0;
  return out;
}

EnergyValue e_lie(const TriMesh& mesh, const FieldState& state, double a_min) {
  return EnergyAssembler(mesh).lie(state, a_min);
}
EnergyValue e_odeco(const TriMesh& mesh, const FieldState& state) {
  return EnergyAssembler(mesh).odeco(state);
}
EnergyValue e_dirichlet(const TriMesh& mesh, const FieldState& state) {
  return EnergyAssembler(mesh).dirichlet(state);
}
EnergyValue e_total(const TriMesh& mesh, const FieldState& state, const EnergyParams& p) {
  return EnergyAssembler(mesh).total(state, p);
}

}  // namespace framefield
