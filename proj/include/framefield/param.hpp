#pragma once

// From a recovered frame field to a seamless parametrization: matchings,
// singular triangles, cut graph, branch assignment and the constrained
// least-squares integration.

#include <array>
#include <optional>
#include <vector>

#include "framefield/mesh.hpp"
#include "framefield/solver.hpp"

namespace framefield {

using FrameField = std::vector<RecoveredFrame<double>>;

// Period jump k per undirected mesh edge, for crossing from the smaller to
// the larger node id; crossing the other way negates it (mod 4).
struct Matchings {
  std::vector<int> k;

  int quarters(const TriMesh::Edge& e, int from, int to, int id) const {
    (void)e;
    (void)to;
    return (from < to) ? k[id] : -k[id];
  }
};

Matchings compute_matchings(const TriMesh& mesh, const FrameField& frames);

struct Singularity {
  int tri{-1};
  int index_quarters{0};  // index = quarters / 4
};

std::vector<Singularity> detect_singularities(const TriMesh& mesh, const Matchings& m);

struct CutGraph {
  std::vector<bool> cut_edge;      // per mesh edge
  std::vector<bool> tri_included;  // false for singular triangles
  int num_wedges{0};
  Eigen::MatrixX3i corner_wedge;   // wedge id of (t, corner), -1 when excluded
  std::vector<int> wedge_node;     // wedge -> original node

  int wedge(int t, int corner) const { return corner_wedge(t, corner); }
};

CutGraph build_cut_graph(const TriMesh& mesh, const std::vector<Singularity>& sing);

struct VectorAssignment {
  std::vector<int> branch;  // per wedge, 0..3
  std::vector<Vec2d> u, v;  // per wedge
};

VectorAssignment assign_vectors(const TriMesh& mesh, const FrameField& frames,
                                const CutGraph& cut, const Matchings& m);

struct CutArcReport {
  int k{0};           // rotation power across the arc
  Vec2d translation;  // (s, t) implied by the solution
  int edges{0};
};

struct BoundaryPieceReport {
  int curve{-1};
  char potential{'u'};  // which potential is held constant
  double variance{0};
  std::vector<int> wedges;
};

struct SeamlessParam {
  Eigen::VectorXd u, v;  // per wedge
  double integration_error{0};
  double max_seam_residual{0};       // cut-edge constraint violation, gradient units
  double max_boundary_variance{0};
  int nullspace_dim{0};              // rank deficiency beyond the pinned translation
  std::vector<CutArcReport> arcs;
  std::vector<BoundaryPieceReport> pieces;
};

SeamlessParam integrate(const TriMesh& mesh, const FrameField& frames, const CutGraph& cut,
                        const VectorAssignment& vectors, const Matchings& m);

// Quadrature value of the least-squares objective over the included triangles.
double integration_error(const TriMesh& mesh, const CutGraph& cut, const VectorAssignment& vectors,
                         const Eigen::VectorXd& u, const Eigen::VectorXd& v);

struct ParamPipelineResult {
  Matchings matchings;
  std::vector<Singularity> singularities;
  CutGraph cut;
  VectorAssignment vectors;
  SeamlessParam param;
};

ParamPipelineResult parametrize(const TriMesh& mesh, const FrameField& frames);

}  // namespace framefield
