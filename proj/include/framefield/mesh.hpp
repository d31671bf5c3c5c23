#pragma once

// Triangle-mesh container with tagged boundary curves, adjacency, P1 element
// operators and the 3-point quadrature rule used by every domain integral.

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "framefield/tensor.hpp"

namespace framefield {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BoundaryEdge {
  int a{-1}, b{-1};   // oriented with the interior on the left
  int tri{-1};        // the unique incident triangle
  std::string tag;
};

struct BoundaryCurve {
  std::string tag;
  std::vector<int> nodes;  // ordered along the loop; open curves run corner to corner
  bool closed{false};
};

class TriMesh {
 public:
  Eigen::MatrixX2d nodes;  // N x 2 positions
  Eigen::MatrixX3i tris;   // T x 3, CCW

  std::vector<BoundaryEdge> boundary_edges;
  std::vector<int> corners;
  std::vector<BoundaryCurve> curves;

  struct Edge {
    int a{-1}, b{-1};          // a < b
    int tri_ab{-1}, tri_ba{-1};  // triangle left of a->b, left of b->a (-1 on boundary)
  };
  std::vector<Edge> edges;
  Eigen::MatrixX3i tri_edges;  // edge id of (tris(t,e), tris(t,e+1))
  Eigen::MatrixX3i neighbors;  // triangle across that edge, -1 on boundary
  std::vector<std::vector<int>> node_tris;
  std::vector<bool> node_on_boundary;

  int num_nodes() const { return static_cast<int>(nodes.rows()); }
  int num_tris() const { return static_cast<int>(tris.rows()); }
  Vec2d node(int i) const { return nodes.row(i).transpose(); }

  double tri_area(int t) const;
  double max_edge_length() const;
  double total_area() const;

  // Builds adjacency, boundary loops, corner nodes and tagged curves;
  // validates manifoldness and orientation.
  void finalize(double corner_angle_deg = 30.0);
};

struct P1Element {
  Eigen::Matrix<double, 2, 3> grad;  // nodal values -> constant in-triangle gradient
  double area{0};
};

P1Element p1_element(const TriMesh& mesh, int t);

Vec2d elem_gradient(const TriMesh& mesh, int t, const Eigen::Vector3d& nodal_values);

struct QuadratureRule {
  Eigen::Matrix3d bary;   // one point per row
  Eigen::Vector3d weights;
};

// (2/3,1/6,1/6) and permutations, weights 1/3: degree-2 exact.
const QuadratureRule& tri_quadrature();

double integrate_domain(const TriMesh& mesh, const std::function<double(const Vec2d&, int)>& f);

// Loaders.  format: "auto" (by extension), "msh22" or "json".
TriMesh load_mesh(const std::string& path, const std::string& format = "auto",
                  double corner_angle_deg = 30.0);
TriMesh mesh_from_msh(std::istream& in, double corner_angle_deg = 30.0);
TriMesh mesh_from_json_text(const std::string& text, double corner_angle_deg = 30.0);

}  // namespace framefield
