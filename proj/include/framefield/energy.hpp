#pragma once

// The three energies over a nodal field of circular-harmonics coefficients:
// normalized Lie bracket energy, odeco penalty and Dirichlet smoothness, all
// with analytic gradients.  Values and gradients are assembled triangle-wise
// with the 3-point rule; the Lie energy carries a positive-area barrier.

#include <Eigen/Sparse>

#include <limits>

#include "framefield/lie.hpp"
#include "framefield/mesh.hpp"

namespace framefield {

struct FieldState {
  Eigen::VectorXd q;                            // 5N, node-major
  Eigen::Array<bool, Eigen::Dynamic, 1> fixed;  // 5N; fixed entries never move
  bool iso_mode{false};                         // q1 = q2 frozen at zero everywhere

  int num_nodes() const { return static_cast<int>(q.size()) / 5; }
  QVecd node_q(int i) const { return q.segment<5>(5 * i); }
  void set_node_q(int i, const QVecd& v) { q.segment<5>(5 * i) = v; }
};

struct EnergyParams {
  double kappa{1.0};
  double epsilon{std::numeric_limits<double>::infinity()};
  double a_min{1e-12};
};

struct EnergyValue {
  double value{0};
  Eigen::VectorXd grad;
  bool barrier{false};  // a quadrature-point area fell to a_min or below
};

class EnergyAssembler {
 public:
  EnergyAssembler(const TriMesh& mesh, int threads = 1);

  EnergyValue lie(const FieldState& state, double a_min) const;
  EnergyValue odeco(const FieldState& state) const;
  EnergyValue dirichlet(const FieldState& state) const;
  // (1-kappa) E_Lie + kappa E_D + E_odeco / eps^2, gradient masked on fixed
  // entries.  E_Lie is skipped entirely at kappa = 1 (no barrier there).
  EnergyValue total(const FieldState& state, const EnergyParams& p) const;

  // Lie energy together with the maximum of its integrand over quadrature points.
  struct LieProfile {
    double value{0};
    double max_integrand{0};
    bool barrier{false};
  };
  LieProfile lie_profile(const FieldState& state) const;

  const TriMesh& mesh() const { return mesh_; }
  const Eigen::SparseMatrix<double>& stiffness() const { return stiffness_; }

 private:
  const TriMesh& mesh_;
  int threads_;
  std::vector<P1Element> elems_;
  Eigen::SparseMatrix<double> stiffness_;    // N x N scalar P1 stiffness
  Eigen::SparseMatrix<double> stiffness5_;   // 5N x 5N, interleaved channels

  template <typename PerTri>
  void accumulate(int n_dofs, PerTri&& per_tri, double* value, Eigen::VectorXd* grad,
                  bool* barrier) const;
};

// Convenience wrappers matching the per-operation contracts (they build a
// single-thread assembler; the solver reuses one across iterations).
EnergyValue e_lie(const TriMesh& mesh, const FieldState& state, double a_min);
EnergyValue e_odeco(const TriMesh& mesh, const FieldState& state);
EnergyValue e_dirichlet(const TriMesh& mesh, const FieldState& state);
EnergyValue e_total(const TriMesh& mesh, const FieldState& state, const EnergyParams& p);

}  // namespace framefield
