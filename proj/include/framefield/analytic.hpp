#pragma once

// Analytic frame fields with exact coefficient gradients, the closed-form
// singular field, the energy-convergence experiment and the quadrature
// regression for the basis-change matrices.  Also the structured mesh
// fixtures used by the verification drivers and tests.

#include <functional>
#include <string>
#include <vector>

#include "framefield/energy.hpp"
#include "framefield/mesh.hpp"

namespace framefield {

struct AnalyticField {
  std::string name;
  std::function<Frame2(const Vec2d&)> frame;
  std::function<QVecd(const Vec2d&)> q;
  std::function<QGradd(const Vec2d&)> grad_q;  // exact spatial gradient of q
};

// u = r^i (cos((1-i)t) e_r - sin((1-i)t) e_t), v its quarter rotation: the
// exactly integrable field around a singularity of index i.
Frame2 polar_singular_field(double index, const Vec2d& p);

AnalyticField make_constant_field(const Frame2& f);
AnalyticField make_rigid_rotation_field(double angle);
AnalyticField make_polar_field(double index);  // frame/q only defined away from the origin
AnalyticField make_random_smooth_field(unsigned seed);

struct ConvergenceSample {
  double h{0};
  double e_lie{0};
  double max_integrand{0};
};

// Samples the analytic field at the nodes of each mesh and evaluates the
// normalized Lie energy and its maximum integrand.
std::vector<ConvergenceSample> convergence_experiment(double index,
                                                      const std::vector<TriMesh>& meshes,
                                                      int threads = 1);

std::string convergence_csv(const std::vector<ConvergenceSample>& samples);

struct BasisOracleReport {
  double max_matrix_error{0};   // hard-coded basis change vs dense quadrature
  double max_gram_error{0};     // orthonormality of the harmonics basis
  double max_roundtrip_error{0};
  bool pass{false};
};

BasisOracleReport basis_change_oracle();

// Structured fixtures.
// Unit square [0,1]^2 with n x n nodes, tags bottom/right/top/left.  jitter
// displaces interior nodes by that fraction of the grid step (deterministic),
// breaking the grid symmetries the way an unstructured mesh would.
TriMesh make_square_mesh(int n, double jitter = 0.0);
// Polygonal disk of radius 1; the central triangle keeps the origin at its
// centroid under every refinement level (each level splits triangles in 4).
TriMesh make_disk_mesh(int refine_levels);
// Annulus with nr radial layers and nt nodes around, tags inner/outer.
TriMesh make_annulus_mesh(int nr, int nt, double r_inner, double r_outer);

// Samples an analytic field into a nodal state (all entries free).
FieldState sample_field(const TriMesh& mesh, const AnalyticField& field);

}  // namespace framefield
