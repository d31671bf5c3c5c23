#include "framefield/param.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

namespace framefield {

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

int mod4(int k) { return ((k % 4) + 4) % 4; }

// R = [[0,1],[-1,0]]: one step of the quarter-turn relation (u,v) -> (v,-u).
Eigen::Matrix2d rot_power(int k) {
  Eigen::Matrix2d r;
  r << 0, 1, -1, 0;
  Eigen::Matrix2d out = Eigen::Matrix2d::Identity();
  for (int i = 0; i < mod4(k); ++i) out = r * out;
  return out;
}

int corner_slot(const TriMesh& mesh, int t, int node) {
  for (int c = 0; c < 3; ++c)
    if (mesh.tris(t, c) == node) return c;
  throw std::logic_error("corner_slot: node not in triangle");
}

}  // namespace

Matchings compute_matchings(const TriMesh& mesh, const FrameField& frames) {
  Matchings out;
  out.k.resize(mesh.edges.size(), 0);
  for (size_t e = 0; e < mesh.edges.size(); ++e) {
    const auto& ed = mesh.edges[e];
    const double diff = frames[ed.b].frame.phi - frames[ed.a].frame.phi;
    const double ratio = diff / kHalfPi;
    int k = static_cast<int>(std::lround(ratio));
    // ties at exactly a quarter turn resolve toward the smaller |k|
    if (std::abs(std::abs(ratio - std::trunc(ratio)) - 0.5) < 1e-15) k = static_cast<int>(std::trunc(ratio));
    out.k[e] = k;
  }
  return out;
}

std::vector<Singularity> detect_singularities(const TriMesh& mesh, const Matchings& m) {
  std::vector<Singularity> out;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    int sum = 0;
    for (int e = 0; e < 3; ++e) {
      const int a = mesh.tris(t, e), b = mesh.tris(t, (e + 1) % 3);
      const int id = mesh.tri_edges(t, e);
      sum += m.quarters(mesh.edges[id], a, b, id);
    }
    if (sum != 0) out.push_back(Singularity{t, -sum});
  }
  return out;
}

CutGraph build_cut_graph(const TriMesh& mesh, const std::vector<Singularity>& sing) {
  CutGraph cut;
  const int nt = mesh.num_tris();
  const int ne = static_cast<int>(mesh.edges.size());
  cut.tri_included.assign(nt, true);
  for (const Singularity& s : sing) cut.tri_included[s.tri] = false;

  // dual spanning forest over included triangles
  std::vector<bool> crossed(ne, false), visited(nt, false);
  for (int seed = 0; seed < nt; ++seed) {
    if (!cut.tri_included[seed] || visited[seed]) continue;
    std::deque<int> queue{seed};
    visited[seed] = true;
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop_front();
      for (int e = 0; e < 3; ++e) {
        const int nb = mesh.neighbors(t, e);
        if (nb < 0 || visited[nb] || !cut.tri_included[nb]) continue;
        visited[nb] = true;
        crossed[mesh.tri_edges(t, e)] = true;
        queue.push_back(nb);
      }
    }
  }

  cut.cut_edge.assign(ne, false);
  for (int e = 0; e < ne; ++e) {
    const auto& ed = mesh.edges[e];
    const bool interior = ed.tri_ab >= 0 && ed.tri_ba >= 0;
    if (interior && !crossed[e]) cut.cut_edge[e] = true;
  }

  // prune dangling chains that end neither at the boundary nor at a singular triangle
  std::vector<bool> protected_node(mesh.num_nodes(), false);
  for (int i = 0; i < mesh.num_nodes(); ++i) protected_node[i] = mesh.node_on_boundary[i];
  for (const Singularity& s : sing)
    for (int c = 0; c < 3; ++c) protected_node[mesh.tris(s.tri, c)] = true;

  std::vector<int> degree(mesh.num_nodes(), 0);
  for (int e = 0; e < ne; ++e)
    if (cut.cut_edge[e]) {
      ++degree[mesh.edges[e].a];
      ++degree[mesh.edges[e].b];
    }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int e = 0; e < ne; ++e) {
      if (!cut.cut_edge[e]) continue;
      const auto& ed = mesh.edges[e];
      const bool dangling_a = degree[ed.a] == 1 && !protected_node[ed.a];
      const bool dangling_b = degree[ed.b] == 1 && !protected_node[ed.b];
      if (dangling_a || dangling_b) {
        cut.cut_edge[e] = false;
        --degree[ed.a];
        --degree[ed.b];
        changed = true;
      }
    }
  }

  // cut-open mesh: wedge groups of triangle corners
  Dsu dsu(3 * nt);
  for (int e = 0; e < ne; ++e) {
    const auto& ed = mesh.edges[e];
    if (ed.tri_ab < 0 || ed.tri_ba < 0 || cut.cut_edge[e]) continue;
    if (!cut.tri_included[ed.tri_ab] || !cut.tri_included[ed.tri_ba]) continue;
    for (const int n : {ed.a, ed.b})
      dsu.unite(3 * ed.tri_ab + corner_slot(mesh, ed.tri_ab, n),
                3 * ed.tri_ba + corner_slot(mesh, ed.tri_ba, n));
  }
  cut.corner_wedge.resize(nt, 3);
  cut.corner_wedge.setConstant(-1);
  std::map<int, int> root_to_wedge;
  for (int t = 0; t < nt; ++t) {
    if (!cut.tri_included[t]) continue;
    for (int c = 0; c < 3; ++c) {
      const int root = dsu.find(3 * t + c);
      auto it = root_to_wedge.find(root);
      if (it == root_to_wedge.end()) {
        it = root_to_wedge.emplace(root, static_cast<int>(cut.wedge_node.size())).first;
        cut.wedge_node.push_back(mesh.tris(t, c));
      }
      cut.corner_wedge(t, c) = it->second;
    }
  }
  cut.num_wedges = static_cast<int>(cut.wedge_node.size());
  return cut;
}

VectorAssignment assign_vectors(const TriMesh& mesh, const FrameField& frames, const CutGraph& cut,
                                const Matchings& m) {
  VectorAssignment out;
  out.branch.assign(cut.num_wedges, -1);

  auto edge_quarters = [&](int t, int slot_from, int slot_to) {
    // matching along the triangle edge between two corner slots
    const int a = mesh.tris(t, slot_from), b = mesh.tris(t, slot_to);
    int e = -1;
    for (int s = 0; s < 3; ++s) {
      const auto& ed = mesh.edges[mesh.tri_edges(t, s)];
      if ((ed.a == std::min(a, b)) && (ed.b == std::max(a, b))) e = mesh.tri_edges(t, s);
    }
    return m.quarters(mesh.edges[e], a, b, e);
  };

  auto fill_triangle = [&](int t) {
    int known = -1;
    for (int c = 0; c < 3; ++c)
      if (out.branch[cut.wedge(t, c)] >= 0) known = c;
    if (known < 0) throw std::logic_error("assign_vectors: triangle with no seeded corner");
    for (int s = 1; s <= 2; ++s) {
      const int from = (known + s - 1) % 3, to = (known + s) % 3;
      const int b = mod4(out.branch[cut.wedge(t, from)] - edge_quarters(t, from, to));
      int& slot = out.branch[cut.wedge(t, to)];
      if (slot >= 0 && slot != b)
        throw std::logic_error("assign_vectors: inconsistent branch propagation");
      slot = b;
    }
  };

  std::vector<bool> visited(mesh.num_tris(), false);
  for (int seed = 0; seed < mesh.num_tris(); ++seed) {
    if (!cut.tri_included[seed] || visited[seed]) continue;
    if (out.branch[cut.wedge(seed, 0)] < 0) out.branch[cut.wedge(seed, 0)] = 0;
    fill_triangle(seed);
    visited[seed] = true;
    std::deque<int> queue{seed};
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop_front();
      for (int e = 0; e < 3; ++e) {
        const int nb = mesh.neighbors(t, e);
        if (nb < 0 || visited[nb] || !cut.tri_included[nb]) continue;
        if (cut.cut_edge[mesh.tri_edges(t, e)]) continue;
        fill_triangle(nb);
        visited[nb] = true;
        queue.push_back(nb);
      }
    }
  }

  out.u.assign(cut.num_wedges, Vec2d::Zero());
  out.v.assign(cut.num_wedges, Vec2d::Zero());
  for (int w = 0; w < cut.num_wedges; ++w) {
    const auto [u, v] = frame_vectors(frames[cut.wedge_node[w]].frame, std::max(0, out.branch[w]));
    out.u[w] = u;
    out.v[w] = v;
  }
  return out;
}

namespace {

// Homogeneous linear constraints imposed by substitution: each processed row
// eliminates one dof as a combination of the remaining free ones.
class SubstitutionBuilder {
 public:
  explicit SubstitutionBuilder(int n) : n_(n) {}

  void add_row(std::map<int, double> row) {
    expand(row);
    double maxc = 0;
    for (const auto& [d, v] : row) maxc = std::max(maxc, std::abs(v));
    if (maxc < 1e-10) return;  // redundant row
    int piv = -1;
    double pc = 0;
    for (const auto& [d, v] : row)
      if (std::abs(v) > std::abs(pc) + 1e-12 ||
          (std::abs(std::abs(v) - std::abs(pc)) <= 1e-12 && d > piv)) {
        piv = d;
        pc = v;
      }
    std::vector<std::pair<int, double>> expr;
    for (const auto& [d, v] : row) {
      if (d == piv) continue;
      const double c = -v / pc;
      if (std::abs(c) > 1e-14) expr.emplace_back(d, c);
    }
    elim_[piv] = std::move(expr);
    order_.push_back(piv);
  }

  // x = S y over the free dofs (in increasing dof order).
  Eigen::SparseMatrix<double> finalize(std::vector<int>* free_dofs) {
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      auto& expr = elim_[*it];
      std::map<int, double> flat;
      for (const auto& [d, c] : expr) {
        auto e = elim_.find(d);
        if (e == elim_.end())
          flat[d] += c;
        else
          for (const auto& [d2, c2] : e->second) flat[d2] += c * c2;
      }
      expr.assign(flat.begin(), flat.end());
    }
    free_dofs->clear();
    std::vector<int> col(n_, -1);
    for (int d = 0; d < n_; ++d)
      if (!elim_.count(d)) {
        col[d] = static_cast<int>(free_dofs->size());
        free_dofs->push_back(d);
      }
    std::vector<Eigen::Triplet<double>> trips;
    for (int d = 0; d < n_; ++d) {
      if (col[d] >= 0) {
        trips.emplace_back(d, col[d], 1.0);
        continue;
      }
      for (const auto& [d2, c] : elim_[d]) trips.emplace_back(d, col[d2], c);
    }
    Eigen::SparseMatrix<double> s(n_, static_cast<int>(free_dofs->size()));
    s.setFromTriplets(trips.begin(), trips.end());
    return s;
  }

 private:
  void expand(std::map<int, double>& row) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto it = row.begin(); it != row.end(); ++it) {
        auto e = elim_.find(it->first);
        if (e == elim_.end()) continue;
        const double c = it->second;
        row.erase(it);
        for (const auto& [d, v] : e->second) row[d] += c * v;
        changed = true;
        break;
      }
    }
  }

  int n_;
  std::map<int, std::vector<std::pair<int, double>>> elim_;
  std::vector<int> order_;
};

struct BoundaryPiece {
  int curve{-1};
  std::vector<int> wedges;
  double score_u{0}, score_v{0};  // alignment of each vector with the curve normal
};

std::vector<BoundaryPiece> boundary_pieces(const TriMesh& mesh, const CutGraph& cut,
                                           const VectorAssignment& vec) {
  std::vector<BoundaryPiece> pieces;
  for (int ci = 0; ci < static_cast<int>(mesh.curves.size()); ++ci) {
    const BoundaryCurve& curve = mesh.curves[ci];
    BoundaryPiece cur;
    cur.curve = ci;
    int prev_wedge_b = -1;
    for (size_t i = 0; i + 1 < curve.nodes.size(); ++i) {
      const int a = curve.nodes[i], b = curve.nodes[i + 1];
      // locate the boundary edge and its triangle
      int tri = -1;
      for (size_t e = 0; e < mesh.edges.size(); ++e) {
        const auto& ed = mesh.edges[e];
        if (ed.a == std::min(a, b) && ed.b == std::max(a, b)) {
          tri = ed.tri_ab >= 0 ? ed.tri_ab : ed.tri_ba;
          break;
        }
      }
      if (tri < 0 || !cut.tri_included[tri]) {
        if (!cur.wedges.empty()) pieces.push_back(std::move(cur));
        cur = BoundaryPiece{};
        cur.curve = ci;
        prev_wedge_b = -1;
        continue;
      }
      const int wa = cut.wedge(tri, corner_slot(mesh, tri, a));
      const int wb = cut.wedge(tri, corner_slot(mesh, tri, b));
      if (!cur.wedges.empty() && wa != prev_wedge_b) {
        pieces.push_back(std::move(cur));
        cur = BoundaryPiece{};
        cur.curve = ci;
      }
      if (cur.wedges.empty()) cur.wedges.push_back(wa);
      cur.wedges.push_back(wb);
      prev_wedge_b = wb;

      const Vec2d d = mesh.node(b) - mesh.node(a);
      const Vec2d n(d.y(), -d.x());
      const Vec2d um = 0.5 * (vec.u[wa] + vec.u[wb]);
      const Vec2d vm = 0.5 * (vec.v[wa] + vec.v[wb]);
      cur.score_u += std::abs(um.normalized().dot(n.normalized())) * d.norm();
      cur.score_v += std::abs(vm.normalized().dot(n.normalized())) * d.norm();
    }
    if (!cur.wedges.empty()) pieces.push_back(std::move(cur));
  }
  return pieces;
}

}  // namespace

SeamlessParam integrate(const TriMesh& mesh, const FrameField& frames, const CutGraph& cut,
                        const VectorAssignment& vec, const Matchings& m) {
  SeamlessParam out;
  const int nw = cut.num_wedges;
  const int ndof = 2 * nw;
  if (nw == 0) throw std::runtime_error("integrate: empty cut-open mesh");

  SubstitutionBuilder subst(ndof);
  auto udof = [](int w) { return 2 * w; };
  auto vdof = [](int w) { return 2 * w + 1; };

  // (ii) matching potential gradients across each cut edge, in difference form
  struct CutPair {
    int e;
    int wLa, wLb, wRa, wRb;
    int k;
  };
  std::vector<CutPair> cut_pairs;
  for (int e = 0; e < static_cast<int>(mesh.edges.size()); ++e) {
    if (!cut.cut_edge[e]) continue;
    const auto& ed = mesh.edges[e];
    if (!cut.tri_included[ed.tri_ab] || !cut.tri_included[ed.tri_ba]) continue;
    CutPair cp;
    cp.e = e;
    cp.wLa = cut.wedge(ed.tri_ab, corner_slot(mesh, ed.tri_ab, ed.a));
    cp.wLb = cut.wedge(ed.tri_ab, corner_slot(mesh, ed.tri_ab, ed.b));
    cp.wRa = cut.wedge(ed.tri_ba, corner_slot(mesh, ed.tri_ba, ed.a));
    cp.wRb = cut.wedge(ed.tri_ba, corner_slot(mesh, ed.tri_ba, ed.b));
    cp.k = mod4(vec.branch[cp.wRa] - vec.branch[cp.wLa]);
    if (cp.k != mod4(vec.branch[cp.wRb] - vec.branch[cp.wLb]))
      throw std::logic_error("integrate: inconsistent branch jump along a cut edge");
    cut_pairs.push_back(cp);

    const Eigen::Matrix2d r = rot_power(cp.k);
    for (int comp = 0; comp < 2; ++comp) {
      std::map<int, double> row;
      auto dof = [&](int w, int c) { return c == 0 ? udof(w) : vdof(w); };
      row[dof(cp.wRb, comp)] += 1;
      row[dof(cp.wRa, comp)] -= 1;
      for (int c2 = 0; c2 < 2; ++c2) {
        if (r(comp, c2) == 0) continue;
        row[dof(cp.wLb, c2)] -= r(comp, c2);
        row[dof(cp.wLa, c2)] += r(comp, c2);
      }
      subst.add_row(std::move(row));
    }
  }

  // (i) one potential constant per boundary piece
  std::vector<BoundaryPiece> pieces = boundary_pieces(mesh, cut, vec);
  std::vector<char> piece_potential(pieces.size(), 'u');
  for (size_t p = 0; p < pieces.size(); ++p) {
    const BoundaryPiece& bp = pieces[p];
    const bool u_const = bp.score_u >= bp.score_v;
    piece_potential[p] = u_const ? 'u' : 'v';
    for (size_t i = 1; i < bp.wedges.size(); ++i) {
      if (bp.wedges[i] == bp.wedges[0]) continue;
      std::map<int, double> row;
      row[u_const ? udof(bp.wedges[i]) : vdof(bp.wedges[i])] += 1;
      row[u_const ? udof(bp.wedges[0]) : vdof(bp.wedges[0])] -= 1;
      subst.add_row(std::move(row));
    }
  }

  // pin the global translation
  subst.add_row({{udof(0), 1.0}});
  subst.add_row({{vdof(0), 1.0}});

  std::vector<int> free_dofs;
  const Eigen::SparseMatrix<double> S = subst.finalize(&free_dofs);

  // least-squares targets grad(u) = u/|u|^2 per corner, interpolated at the
  // quadrature points; degenerate sizes are floored to keep targets finite
  double mean_size = 0;
  int n_size = 0;
  for (int w = 0; w < nw; ++w) {
    const double su = vec.u[w].norm(), sv = vec.v[w].norm();
    if (su > 0) {
      mean_size += su;
      ++n_size;
    }
    if (sv > 0) {
      mean_size += sv;
      ++n_size;
    }
  }
  mean_size = n_size > 0 ? mean_size / n_size : 1.0;
  const double size_floor = 1e-3 * mean_size;
  auto target = [&](const Vec2d& w) {
    const double s = w.norm();
    if (s <= 0) return Vec2d::Zero().eval();
    return ((w / s) / std::max(s, size_floor)).eval();
  };

  const QuadratureRule& rule = tri_quadrature();
  std::vector<Eigen::Triplet<double>> h_trips;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(ndof);
  for (int t = 0; t < mesh.num_tris(); ++t) {
    if (!cut.tri_included[t]) continue;
    const P1Element el = p1_element(mesh, t);
    const int w[3] = {cut.wedge(t, 0), cut.wedge(t, 1), cut.wedge(t, 2)};
    Vec2d tu[3], tv[3];
    for (int c = 0; c < 3; ++c) {
      tu[c] = target(vec.u[w[c]]);
      tv[c] = target(vec.v[w[c]]);
    }
    // mean target over the rule equals the corner average
    const Vec2d tu_bar = (tu[0] + tu[1] + tu[2]) / 3.0;
    const Vec2d tv_bar = (tv[0] + tv[1] + tv[2]) / 3.0;
    for (int c1 = 0; c1 < 3; ++c1) {
      for (int c2 = 0; c2 < 3; ++c2) {
        const double k = el.area * el.grad.col(c1).dot(el.grad.col(c2));
        h_trips.emplace_back(udof(w[c1]), udof(w[c2]), k);
        h_trips.emplace_back(vdof(w[c1]), vdof(w[c2]), k);
      }
      b[udof(w[c1])] += el.area * el.grad.col(c1).dot(tu_bar);
      b[vdof(w[c1])] += el.area * el.grad.col(c1).dot(tv_bar);
    }
    (void)rule;
  }
  Eigen::SparseMatrix<double> H(ndof, ndof);
  H.setFromTriplets(h_trips.begin(), h_trips.end());

  const Eigen::SparseMatrix<double> Hy = S.transpose() * H * S;
  const Eigen::VectorXd by = S.transpose() * b;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Hy);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("integrate: factorization failed");
  const Eigen::VectorXd d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  for (int i = 0; i < d.size(); ++i)
    if (std::abs(d[i]) < 1e-10 * dmax) ++out.nullspace_dim;
  const Eigen::VectorXd y = ldlt.solve(by);
  const Eigen::VectorXd x = S * y;

  out.u.resize(nw);
  out.v.resize(nw);
  for (int w = 0; w < nw; ++w) {
    out.u[w] = x[udof(w)];
    out.v[w] = x[vdof(w)];
  }
  out.integration_error = integration_error(mesh, cut, vec, out.u, out.v);

  // diagnostics and per-arc reports
  for (const CutPair& cp : cut_pairs) {
    const Eigen::Matrix2d r = rot_power(cp.k);
    const Vec2d db(out.u[cp.wRb] - out.u[cp.wRa], out.v[cp.wRb] - out.v[cp.wRa]);
    const Vec2d da(out.u[cp.wLb] - out.u[cp.wLa], out.v[cp.wLb] - out.v[cp.wLa]);
    const double len = (mesh.node(mesh.edges[cp.e].a) - mesh.node(mesh.edges[cp.e].b)).norm();
    out.max_seam_residual = std::max(out.max_seam_residual, (db - r * da).norm() / len);
  }
  if (!cut_pairs.empty()) {
    Dsu arc_dsu(mesh.num_nodes());
    for (const CutPair& cp : cut_pairs) arc_dsu.unite(mesh.edges[cp.e].a, mesh.edges[cp.e].b);
    std::map<int, CutArcReport> arcs;
    for (const CutPair& cp : cut_pairs) {
      const int root = arc_dsu.find(mesh.edges[cp.e].a);
      auto it = arcs.find(root);
      if (it == arcs.end()) {
        CutArcReport rep;
        rep.k = cp.k;
        const Eigen::Matrix2d r = rot_power(cp.k);
        const Vec2d ua(out.u[cp.wLa], out.v[cp.wLa]);
        const Vec2d ub(out.u[cp.wRa], out.v[cp.wRa]);
        rep.translation = ub - r * ua;
        it = arcs.emplace(root, rep).first;
      }
      ++it->second.edges;
    }
    for (auto& [root, rep] : arcs) out.arcs.push_back(rep);
  }
  for (size_t p = 0; p < pieces.size(); ++p) {
    BoundaryPieceReport rep;
    rep.curve = pieces[p].curve;
    rep.potential = piece_potential[p];
    rep.wedges = pieces[p].wedges;
    double mean = 0;
    for (int w : rep.wedges) mean += (rep.potential == 'u') ? out.u[w] : out.v[w];
    mean /= static_cast<double>(rep.wedges.size());
    for (int w : rep.wedges) {
      const double val = (rep.potential == 'u') ? out.u[w] : out.v[w];
      rep.variance += (val - mean) * (val - mean);
    }
    rep.variance /= static_cast<double>(rep.wedges.size());
    out.max_boundary_variance = std::max(out.max_boundary_variance, rep.variance);
    out.pieces.push_back(std::move(rep));
  }
  return out;
}

double integration_error(const TriMesh& mesh, const CutGraph& cut, const VectorAssignment& vec,
                         const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  double mean_size = 0;
  int n_size = 0;
  for (int w = 0; w < cut.num_wedges; ++w) {
    const double su = vec.u[w].norm(), sv = vec.v[w].norm();
    if (su > 0) {
      mean_size += su;
      ++n_size;
    }
    if (sv > 0) {
      mean_size += sv;
      ++n_size;
    }
  }
  mean_size = n_size > 0 ? mean_size / n_size : 1.0;
  const double size_floor = 1e-3 * mean_size;
  auto target = [&](const Vec2d& w) {
    const double s = w.norm();
    if (s <= 0) return Vec2d::Zero().eval();
    return ((w / s) / std::max(s, size_floor)).eval();
  };

  const QuadratureRule& rule = tri_quadrature();
  double err = 0;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    if (!cut.tri_included[t]) continue;
    const P1Element el = p1_element(mesh, t);
    const int w[3] = {cut.wedge(t, 0), cut.wedge(t, 1), cut.wedge(t, 2)};
    const Vec2d gu = el.grad * Eigen::Vector3d(u[w[0]], u[w[1]], u[w[2]]);
    const Vec2d gv = el.grad * Eigen::Vector3d(v[w[0]], v[w[1]], v[w[2]]);
    for (int k = 0; k < 3; ++k) {
      Vec2d tu = Vec2d::Zero(), tv = Vec2d::Zero();
      for (int c = 0; c < 3; ++c) {
        tu += rule.bary(k, c) * target(vec.u[w[c]]);
        tv += rule.bary(k, c) * target(vec.v[w[c]]);
      }
      err += el.area * rule.weights[k] * ((gu - tu).squaredNorm() + (gv - tv).squaredNorm());
    }
  }
  return err;
}

ParamPipelineResult parametrize(const TriMesh& mesh, const FrameField& frames) {
  ParamPipelineResult out;
  out.matchings = compute_matchings(mesh, frames);
  out.singularities = detect_singularities(mesh, out.matchings);
  out.cut = build_cut_graph(mesh, out.singularities);
  out.vectors = assign_vectors(mesh, frames, out.cut, out.matchings);
  out.param = integrate(mesh, frames, out.cut, out.vectors, out.matchings);
  return out;
}

}  // namespace framefield
