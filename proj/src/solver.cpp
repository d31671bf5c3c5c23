#include "framefield/solver.hpp"

#include <Eigen/SparseCholesky>

#include <chrono>
#include <cmath>
#include <deque>

namespace framefield {

namespace {

double curve_arclength(const TriMesh& mesh, const BoundaryCurve& c, int upto) {
  double s = 0;
  for (int i = 0; i + 1 <= upto; ++i) s += (mesh.node(c.nodes[i + 1]) - mesh.node(c.nodes[i])).norm();
  return s;
}

// Tangent direction at position i of a curve, averaging the adjacent edges.
double curve_tangent_angle(const TriMesh& mesh, const BoundaryCurve& c, int i) {
  const int m = static_cast<int>(c.nodes.size());
  Vec2d d = Vec2d::Zero();
  if (i > 0) d += (mesh.node(c.nodes[i]) - mesh.node(c.nodes[i - 1])).normalized();
  if (i + 1 < m) d += (mesh.node(c.nodes[i + 1]) - mesh.node(c.nodes[i])).normalized();
  return std::atan2(d.y(), d.x());
}

}  // namespace

InitResult init_state(const TriMesh& mesh, const BoundaryConstraints& bc, bool iso_mode) {
  InitResult out;
  const int nn = mesh.num_nodes();
  out.state.q = Eigen::VectorXd::Zero(5 * nn);
  out.state.fixed = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(5 * nn, false);
  out.state.iso_mode = iso_mode;
  if (iso_mode)
    for (int i = 0; i < nn; ++i) {
      out.state.fixed[5 * i + 1] = true;
      out.state.fixed[5 * i + 2] = true;
    }

  for (const BoundaryCurve& curve : mesh.curves)
    if (!bc.curve_sizes.count(curve.tag))
      throw SolverError("constraints: no size prescribed for boundary tag '" + curve.tag + "'");

  double size_sum = 0, area_sum = 0;
  int size_count = 0;
  std::vector<bool> assigned(nn, false);
  for (const BoundaryCurve& curve : mesh.curves) {
    const SizeSpec spec = bc.curve_sizes.at(curve.tag);
    const int m = static_cast<int>(curve.nodes.size());
    const double len = curve_arclength(mesh, curve, m - 1);
    for (int i = 0; i < m; ++i) {
      const int n = curve.nodes[i];
      double size = spec.start;
      if (len > 0) {
        const double s = curve_arclength(mesh, curve, i) / len;
        size = (1 - s) * spec.start + s * spec.end;
      }
      if (auto it = bc.node_overrides.find(n); it != bc.node_overrides.end()) size = it->second;
      if (!(size > 0)) throw SolverError("constraints: non-positive size on tag '" + curve.tag + "'");

      // corner nodes sit on two curves; the first assignment wins
      const double ang = curve_tangent_angle(mesh, curve, i);
      const QVecd q = q_from_frame(Frame2::canonical(ang, size, size));
      if (assigned[n]) {
        if ((q - out.state.node_q(n)).norm() > 1e-9 * q.norm())
          out.warnings.push_back("corner node " + std::to_string(n) +
                                 ": incompatible constraints, keeping the first curve's frame");
        continue;
      }
      assigned[n] = true;
      out.state.set_node_q(n, q);
      for (int c = 0; c < 5; ++c) out.state.fixed[5 * n + c] = true;
      size_sum += size;
      area_sum += size * size;
      ++size_count;
    }
  }
  if (size_count > 0) {
    out.mean_boundary_size = size_sum / size_count;
    out.mean_boundary_area = area_sum / size_count;
  }
  return out;
}

void smooth_init(const TriMesh& mesh, FieldState& state) {
  const int nn = mesh.num_nodes();
  EnergyAssembler assembler(mesh);
  const Eigen::SparseMatrix<double>& K = assembler.stiffness();

  // all channels share the fixed/free node pattern (boundary nodes fix all five)
  std::vector<int> free_index(nn, -1);
  std::vector<int> free_nodes;
  for (int i = 0; i < nn; ++i)
    if (!state.fixed[5 * i]) {
      free_index[i] = static_cast<int>(free_nodes.size());
      free_nodes.push_back(i);
    }
  const int nf = static_cast<int>(free_nodes.size());
  if (nf == 0) return;

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nf, 5);
  for (int col = 0; col < K.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
      const int i = static_cast<int>(it.row()), j = static_cast<int>(it.col());
      if (free_index[i] < 0) continue;
      if (free_index[j] >= 0)
        trips.emplace_back(free_index[i], free_index[j], it.value());
      else
        for (int c = 0; c < 5; ++c) rhs(free_index[i], c) -= it.value() * state.q[5 * j + c];
    }
  Eigen::SparseMatrix<double> Kff(nf, nf);
  Kff.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(Kff);
  if (solver.info() != Eigen::Success)
    throw SolverError("smooth_init: singular stiffness (disconnected mesh?)");
  for (int c = 0; c < 5; ++c) {
    bool channel_free = false;
    for (int i : free_nodes) channel_free |= !state.fixed[5 * i + c];
    if (!channel_free) continue;
    const Eigen::VectorXd x = solver.solve(rhs.col(c));
    for (int k = 0; k < nf; ++k) state.q[5 * free_nodes[k] + c] = x[k];
  }
}

LbfgsResult lbfgs_minimize(const Objective& objective, const Eigen::VectorXd& x0,
                           const LbfgsOptions& opts) {
  LbfgsResult res;
  Eigen::VectorXd x = x0, g(x0.size());
  double f = objective(x, g);
  if (!std::isfinite(f)) {
    res.x = x;
    res.value = f;
    res.message = "objective not finite at the initial point";
    return res;
  }
  const double g0 = g.norm();
  const double tol = std::max(opts.grad_rel_tol * g0, 1e-300);

  std::deque<Eigen::VectorXd> ss, ys;
  std::deque<double> rhos;
  Eigen::VectorXd best_x = x;
  double best_f = f;
  int stalled = 0;

  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    res.grad_norm = g.norm();
    if (res.grad_norm <= tol) {
      res.converged = true;
      break;
    }
    // two-loop recursion
    Eigen::VectorXd d = -g;
    std::vector<double> alpha(ss.size());
    for (int i = static_cast<int>(ss.size()) - 1; i >= 0; --i) {
      alpha[i] = rhos[i] * ss[i].dot(d);
      d -= alpha[i] * ys[i];
    }
    if (!ss.empty()) d *= ss.back().dot(ys.back()) / ys.back().squaredNorm();
    for (size_t i = 0; i < ss.size(); ++i) {
      const double beta = rhos[i] * ys[i].dot(d);
      d += (alpha[i] - beta) * ss[i];
    }
    double dir_deriv = g.dot(d);
    if (!(dir_deriv < 0)) {
      d = -g;
      dir_deriv = -g.squaredNorm();
      ss.clear();
      ys.clear();
      rhos.clear();
    }

    double step = ss.empty() ? std::min(1.0, 1.0 / std::max(res.grad_norm, 1e-12)) : 1.0;
    Eigen::VectorXd x_new, g_new(x.size());
    double f_new = 0;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      x_new = x + step * d;
      f_new = objective(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + opts.armijo_c1 * step * dir_deriv) {
        accepted = true;
        break;
      }
      step *= opts.step_shrink;
    }
    if (!accepted) {
      res.message = "line search failed; returning the best iterate";
      break;
    }
    const Eigen::VectorXd s = x_new - x, y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      ss.push_back(s);
      ys.push_back(y);
      rhos.push_back(1.0 / sy);
      if (static_cast<int>(ss.size()) > opts.memory) {
        ss.pop_front();
        ys.pop_front();
        rhos.pop_front();
      }
    }
    if (f - f_new <= opts.f_progress_tol * std::max(1.0, std::abs(f)))
      ++stalled;
    else
      stalled = 0;
    x = std::move(x_new);
    g = g_new;
    f = f_new;
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
    if (stalled >= opts.patience) {
      ++it;
      res.converged = true;
      res.message = "progress stalled";
      break;
    }
  }
  res.iterations = it;
  if (f <= best_f) {
    best_f = f;
    best_x = x;
  }
  res.x = std::move(best_x);
  res.value = best_f;
  res.grad_norm = g.norm();
  return res;
}

void repair_state(FieldState& state, double mean_boundary_size) {
  const int nn = state.num_nodes();
  const double ball_size = 0.1 * mean_boundary_size;
  // sizes below this cannot guarantee quadrature areas above the barrier floor
  const double size_floor = 1e-3 * mean_boundary_size;
  for (int i = 0; i < nn; ++i) {
    if (state.fixed[5 * i]) continue;
    const QVecd q = state.node_q(i);
    const Projection<double> p = project_odeco(q);
    bool ok = p.status == TensorClass::kRegular;
    if (ok) {
      const double lam = (p.sum + p.diff) / 2, mu = (p.sum - p.diff) / 2;
      ok = lam > size_floor && mu > size_floor;
    }
    if (ok) {
      state.set_node_q(i, p.q);
    } else {
      // isotropic ball with a small positive area keyed to the local scale
      const double a = area(q);
      const double s = std::max(a > 0 ? std::sqrt(a) : 0.0, ball_size);
      QVecd ball = QVecd::Zero();
      ball[0] = 3.0 * s * std::sqrt(kPi / 8.0);  // area(ball) = s^2
      state.set_node_q(i, ball);
    }
  }
}

ScheduleResult run_schedule(const TriMesh& mesh, const BoundaryConstraints& bc,
                            const ScheduleConfig& config, bool iso_mode) {
  ScheduleResult out;
  InitResult init = init_state(mesh, bc, iso_mode);
  out.state = std::move(init.state);
  out.report.warnings = init.warnings;

  const double epsilon = config.epsilon > 0 ? config.epsilon : mesh.max_edge_length();
  const double a_min = 1e-8 * init.mean_boundary_area;
  out.report.epsilon = epsilon;
  out.report.a_min = a_min;

  smooth_init(mesh, out.state);

  EnergyAssembler assembler(mesh, config.threads);

  // pack/unpack over the free entries
  std::vector<int> free_dofs;
  for (int i = 0; i < out.state.q.size(); ++i)
    if (!out.state.fixed[i]) free_dofs.push_back(i);
  const int nf = static_cast<int>(free_dofs.size());

  FieldState work = out.state;
  auto pack = [&](const FieldState& s) {
    Eigen::VectorXd x(nf);
    for (int k = 0; k < nf; ++k) x[k] = s.q[free_dofs[k]];
    return x;
  };
  auto unpack = [&](const Eigen::VectorXd& x, FieldState& s) {
    for (int k = 0; k < nf; ++k) s.q[free_dofs[k]] = x[k];
  };

  bool repaired = false;
  for (const double kappa : config.kappa_sequence) {
    if (kappa < 1.0 && !repaired) {
      repair_state(out.state, init.mean_boundary_size);
      repaired = true;
    }
    const EnergyParams params{kappa, epsilon, a_min};
    const auto t0 = std::chrono::steady_clock::now();

    Objective obj = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
      unpack(x, work);
      EnergyValue ev = assembler.total(work, params);
      grad.resize(nf);
      if (ev.barrier) {
        grad.setZero();
        return ev.value;
      }
      for (int k = 0; k < nf; ++k) grad[k] = ev.grad[free_dofs[k]];
      return ev.value;
    };

    LbfgsResult r = lbfgs_minimize(obj, pack(out.state), config.lbfgs);
    if (!std::isfinite(r.value)) {
      out.report.failure = "stage kappa=" + std::to_string(kappa) + ": " + r.message;
      return out;
    }
    unpack(r.x, out.state);

    StageReport stage;
    stage.kappa = kappa;
    stage.iterations = r.iterations;
    stage.converged = r.converged;
    stage.grad_norm = r.grad_norm;
    EnergyValue el = assembler.lie(out.state, a_min);
    stage.e_lie = el.barrier ? std::numeric_limits<double>::infinity() : el.value;
    stage.e_dirichlet = assembler.dirichlet(out.state).value;
    stage.e_odeco = assembler.odeco(out.state).value;
    stage.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.report.stages.push_back(stage);
  }
  out.report.ok = true;
  return out;
}

std::vector<RecoveredFrame<double>> recover_frames(const FieldState& state) {
  std::vector<RecoveredFrame<double>> frames;
  frames.reserve(state.num_nodes());
  for (int i = 0; i < state.num_nodes(); ++i) frames.push_back(extract_frame<double>(state.node_q(i)));
  return frames;
}

}  // namespace framefield
