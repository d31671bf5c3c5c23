#pragma once

// Boundary-condition setup, harmonic initialization, the kappa schedule
// driver and the L-BFGS minimizer underneath it.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "framefield/energy.hpp"

namespace framefield {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-curve size prescription: constant, or linear in arclength from the
// curve's first node to its last.  Frame directions always align with the
// boundary tangent.
struct SizeSpec {
  double start{1.0};
  double end{1.0};
  static SizeSpec constant(double s) { return {s, s}; }
};

struct BoundaryConstraints {
  std::map<std::string, SizeSpec> curve_sizes;  // by curve tag
  std::map<int, double> node_overrides;         // by node id
};

struct LbfgsOptions {
  int memory{10};
  int max_iterations{2000};
  double grad_rel_tol{1e-8};
  double armijo_c1{1e-4};
  double step_shrink{0.5};
  int max_backtracks{60};
  // plateau stop: quit after `patience` consecutive steps with relative
  // decrease below f_progress_tol
  double f_progress_tol{1e-13};
  int patience{25};
};

struct ScheduleConfig {
  std::vector<double> kappa_sequence{1.0, 1e-1, 1e-2, 1e-3, 1e-4, 0.0};
  double epsilon{0.0};  // <= 0 means auto: max mesh edge length
  LbfgsOptions lbfgs;
  int threads{1};
};

struct InitResult {
  FieldState state;
  std::vector<std::string> warnings;
  double mean_boundary_size{1.0};
  double mean_boundary_area{1.0};
};

// Boundary nodes fixed to tangent-aligned frames with prescribed sizes,
// interior zero; in iso mode q1,q2 are fixed at zero everywhere.
InitResult init_state(const TriMesh& mesh, const BoundaryConstraints& bc, bool iso_mode);

// Minimizes the Dirichlet energy with the fixed entries held: one harmonic
// solve per free channel.  This is the kappa=1, epsilon=inf minimizer.
void smooth_init(const TriMesh& mesh, FieldState& state);

using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct LbfgsResult {
  Eigen::VectorXd x;
  double value{0};
  double grad_norm{0};
  int iterations{0};
  bool converged{false};
  std::string message;
};

// Two-loop L-BFGS with backtracking Armijo line search; non-finite objective
// values act as rejection.
LbfgsResult lbfgs_minimize(const Objective& objective, const Eigen::VectorXd& x0,
                           const LbfgsOptions& opts);

struct StageReport {
  double kappa{0};
  int iterations{0};
  double e_lie{0};  // +inf when the barrier is active for the stage result
  double e_dirichlet{0};
  double e_odeco{0};
  double grad_norm{0};
  bool converged{false};
  double seconds{0};
};

struct SolveReport {
  std::vector<StageReport> stages;
  std::vector<std::string> warnings;
  double epsilon{0};
  double a_min{0};
  bool ok{false};
  std::string failure;
};

struct ScheduleResult {
  FieldState state;
  SolveReport report;
};

ScheduleResult run_schedule(const TriMesh& mesh, const BoundaryConstraints& bc,
                            const ScheduleConfig& config, bool iso_mode);

std::vector<RecoveredFrame<double>> recover_frames(const FieldState& state);

// Projects nodal tensors onto the variety before the first barrier-guarded
// stage; nodes without a usable direction become small isotropic balls scaled
// to the boundary size.
void repair_state(FieldState& state, double mean_boundary_size);

}  // namespace framefield
