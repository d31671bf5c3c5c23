#include "framefield/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace framefield {

double TriMesh::tri_area(int t) const {
  const Vec2d a = node(tris(t, 0)), b = node(tris(t, 1)), c = node(tris(t, 2));
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double TriMesh::max_edge_length() const {
  double m = 0;
  for (const Edge& e : edges) m = std::max(m, (node(e.a) - node(e.b)).norm());
  return m;
}

double TriMesh::total_area() const {
  double s = 0;
  for (int t = 0; t < num_tris(); ++t) s += tri_area(t);
  return s;
}

void TriMesh::finalize(double corner_angle_deg) {
  const int nn = num_nodes();
  const int nt = num_tris();
  if (nn < 3 || nt < 1) throw MeshError("mesh: empty or too small");

  for (int t = 0; t < nt; ++t) {
    for (int e = 0; e < 3; ++e) {
      const int v = tris(t, e);
      if (v < 0 || v >= nn) throw MeshError("mesh: triangle " + std::to_string(t) + " references node " + std::to_string(v));
    }
    if (!(tri_area(t) > 0))
      throw MeshError("mesh: triangle " + std::to_string(t) + " is inverted or degenerate");
  }

  // undirected edge table
  std::map<std::pair<int, int>, int> edge_id;
  edges.clear();
  tri_edges.resize(nt, 3);
  for (int t = 0; t < nt; ++t)
    for (int e = 0; e < 3; ++e) {
      const int a = tris(t, e), b = tris(t, (e + 1) % 3);
      const auto key = std::minmax(a, b);
      auto it = edge_id.find(key);
      if (it == edge_id.end()) {
        it = edge_id.emplace(key, static_cast<int>(edges.size())).first;
        edges.push_back(Edge{key.first, key.second, -1, -1});
      }
      Edge& ed = edges[it->second];
      int& side = (a == ed.a) ? ed.tri_ab : ed.tri_ba;
      if (side != -1)
        throw MeshError("mesh: non-manifold edge (" + std::to_string(a) + "," + std::to_string(b) +
                        ") shared by triangles " + std::to_string(side) + " and " + std::to_string(t));
      side = t;
      tri_edges(t, e) = it->second;
    }

  neighbors.resize(nt, 3);
  for (int t = 0; t < nt; ++t)
    for (int e = 0; e < 3; ++e) {
      const Edge& ed = edges[tri_edges(t, e)];
      neighbors(t, e) = (ed.tri_ab == t) ? ed.tri_ba : ed.tri_ab;
    }

  node_tris.assign(nn, {});
  for (int t = 0; t < nt; ++t)
    for (int e = 0; e < 3; ++e) node_tris[tris(t, e)].push_back(t);

  // boundary edges: orientation follows the unique incident triangle (interior left)
  std::map<std::pair<int, int>, std::string> tag_of;
  for (const BoundaryEdge& be : boundary_edges) tag_of[std::minmax(be.a, be.b)] = be.tag;

  std::vector<BoundaryEdge> oriented;
  for (const Edge& ed : edges) {
    if (ed.tri_ab != -1 && ed.tri_ba != -1) continue;
    BoundaryEdge be;
    if (ed.tri_ab != -1) {
      be.a = ed.a;
      be.b = ed.b;
      be.tri = ed.tri_ab;
    } else {
      be.a = ed.b;
      be.b = ed.a;
      be.tri = ed.tri_ba;
    }
    auto it = tag_of.find(std::minmax(ed.a, ed.b));
    be.tag = (it != tag_of.end()) ? it->second : "boundary";
    oriented.push_back(be);
  }
  for (const BoundaryEdge& be : boundary_edges) {
    if (!edge_id.count(std::minmax(be.a, be.b)))
      throw MeshError("mesh: boundary edge (" + std::to_string(be.a) + "," + std::to_string(be.b) +
                      ") is not a mesh edge");
    const Edge& ed = edges[edge_id[std::minmax(be.a, be.b)]];
    if (ed.tri_ab != -1 && ed.tri_ba != -1)
      throw MeshError("mesh: tagged edge (" + std::to_string(be.a) + "," + std::to_string(be.b) +
                      ") is interior");
  }
  boundary_edges = std::move(oriented);

  node_on_boundary.assign(nn, false);
  std::vector<int> out_edge(nn, -1);
  for (int i = 0; i < static_cast<int>(boundary_edges.size()); ++i) {
    const BoundaryEdge& be = boundary_edges[i];
    node_on_boundary[be.a] = node_on_boundary[be.b] = true;
    if (out_edge[be.a] != -1) throw MeshError("mesh: boundary is not a set of simple loops");
    out_edge[be.a] = i;
  }

  // walk loops, detect corners, split into curves
  corners.clear();
  curves.clear();
  const double cos_thresh = std::cos(corner_angle_deg * kPi / 180.0);
  std::vector<bool> seen(boundary_edges.size(), false);
  for (int start = 0; start < static_cast<int>(boundary_edges.size()); ++start) {
    if (seen[start]) continue;
    std::vector<int> loop;  // edge ids in order
    int e = start;
    do {
      loop.push_back(e);
      seen[e] = true;
      e = out_edge[boundary_edges[e].b];
      if (e == -1) throw MeshError("mesh: open boundary chain");
    } while (e != start);

    const int m = static_cast<int>(loop.size());
    std::vector<bool> corner_at(m, false);  // corner at the start node of loop[i]
    for (int i = 0; i < m; ++i) {
      const BoundaryEdge& prev = boundary_edges[loop[(i + m - 1) % m]];
      const BoundaryEdge& cur = boundary_edges[loop[i]];
      const Vec2d d0 = (node(prev.b) - node(prev.a)).normalized();
      const Vec2d d1 = (node(cur.b) - node(cur.a)).normalized();
      if (d0.dot(d1) < cos_thresh || prev.tag != cur.tag) {
        corner_at[i] = true;
        corners.push_back(cur.a);
      }
    }

    int first_corner = -1;
    for (int i = 0; i < m; ++i)
      if (corner_at[i]) {
        if (first_corner == -1 || boundary_edges[loop[i]].a < boundary_edges[loop[first_corner]].a)
          first_corner = i;
      }

    if (first_corner == -1) {
      // smooth closed loop: a single closed curve, started at the smallest node
      int best = 0;
      for (int i = 0; i < m; ++i)
        if (boundary_edges[loop[i]].a < boundary_edges[loop[best]].a) best = i;
      BoundaryCurve c;
      c.tag = boundary_edges[loop[best]].tag;
      c.closed = true;
      for (int i = 0; i < m; ++i) c.nodes.push_back(boundary_edges[loop[(best + i) % m]].a);
      c.nodes.push_back(c.nodes.front());
      curves.push_back(std::move(c));
      continue;
    }
    BoundaryCurve cur;
    for (int s = 0; s < m; ++s) {
      const int i = (first_corner + s) % m;
      if (corner_at[i] && !cur.nodes.empty()) {
        cur.nodes.push_back(boundary_edges[loop[i]].a);
        curves.push_back(std::move(cur));
        cur = BoundaryCurve{};
      }
      if (cur.nodes.empty()) cur.tag = boundary_edges[loop[i]].tag;
      cur.nodes.push_back(boundary_edges[loop[i]].a);
    }
    cur.nodes.push_back(boundary_edges[loop[first_corner]].a);
    curves.push_back(std::move(cur));
  }
  std::sort(corners.begin(), corners.end());
}

P1Element p1_element(const TriMesh& mesh, int t) {
  const Vec2d p0 = mesh.node(mesh.tris(t, 0));
  const Vec2d p1 = mesh.node(mesh.tris(t, 1));
  const Vec2d p2 = mesh.node(mesh.tris(t, 2));
  const double two_a = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p1.y() - p0.y()) * (p2.x() - p0.x());
  if (!(two_a > 0)) throw MeshError("p1_element: degenerate triangle " + std::to_string(t));
  P1Element el;
  el.area = 0.5 * two_a;
  const Vec2d e0 = p2 - p1, e1 = p0 - p2, e2 = p1 - p0;
  el.grad.col(0) = Vec2d(-e0.y(), e0.x()) / two_a;
  el.grad.col(1) = Vec2d(-e1.y(), e1.x()) / two_a;
  el.grad.col(2) = Vec2d(-e2.y(), e2.x()) / two_a;
  return el;
}

Vec2d elem_gradient(const TriMesh& mesh, int t, const Eigen::Vector3d& nodal_values) {
  return p1_element(mesh, t).grad * nodal_values;
}

const QuadratureRule& tri_quadrature() {
  static const QuadratureRule rule = [] {
    QuadratureRule r;
    r.bary << 2.0 / 3, 1.0 / 6, 1.0 / 6,
              1.0 / 6, 2.0 / 3, 1.0 / 6,
              1.0 / 6, 1.0 / 6, 2.0 / 3;
    r.weights << 1.0 / 3, 1.0 / 3, 1.0 / 3;
    return r;
  }();
  return rule;
}

double integrate_domain(const TriMesh& mesh, const std::function<double(const Vec2d&, int)>& f) {
  const QuadratureRule& q = tri_quadrature();
  double total = 0;
  for (int t = 0; t < mesh.num_tris(); ++t) {
    const Vec2d p0 = mesh.node(mesh.tris(t, 0));
    const Vec2d p1 = mesh.node(mesh.tris(t, 1));
    const Vec2d p2 = mesh.node(mesh.tris(t, 2));
    const double a = mesh.tri_area(t);
    double s = 0;
    for (int k = 0; k < 3; ++k) {
      const Vec2d p = q.bary(k, 0) * p0 + q.bary(k, 1) * p1 + q.bary(k, 2) * p2;
      s += q.weights[k] * f(p, t);
    }
    total += a * s;
  }
  return total;
}

namespace {

TriMesh mesh_from_parsed(const nlohmann::json& j, double corner_angle_deg) {
  TriMesh m;
  const auto& nodes = j.at("nodes");
  m.nodes.resize(static_cast<int>(nodes.size()), 2);
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    m.nodes(i, 0) = nodes[i][0].get<double>();
    m.nodes(i, 1) = nodes[i][1].get<double>();
  }
  const auto& tris = j.at("triangles");
  m.tris.resize(static_cast<int>(tris.size()), 3);
  for (int t = 0; t < static_cast<int>(tris.size()); ++t)
    for (int e = 0; e < 3; ++e) m.tris(t, e) = tris[t][e].get<int>();
  if (j.contains("boundary"))
    for (const auto& be : j.at("boundary")) {
      BoundaryEdge b;
      b.a = be.at("edge")[0].get<int>();
      b.b = be.at("edge")[1].get<int>();
      b.tag = be.value("tag", "boundary");
      m.boundary_edges.push_back(b);
    }
  m.finalize(corner_angle_deg);
  return m;
}

}  // namespace

TriMesh mesh_from_json_text(const std::string& text, double corner_angle_deg) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MeshError(std::string("mesh: JSON parse error: ") + e.what());
  }
  return mesh_from_parsed(j, corner_angle_deg);
}

TriMesh mesh_from_msh(std::istream& in, double corner_angle_deg) {
  TriMesh m;
  std::string line;
  std::map<int, std::string> physical_names;
  std::map<int, int> node_index;  // msh node id -> row
  std::vector<Vec2d> nodes;
  std::vector<std::array<int, 3>> tris;
  std::vector<std::pair<std::array<int, 2>, int>> lines2;  // node pair, physical tag

  auto expect_end = [&](const std::string& tag) {
    while (std::getline(in, line) && line.find(tag) == std::string::npos) {}
  };

  while (std::getline(in, line)) {
    if (line.rfind("$MeshFormat", 0) == 0) {
      std::getline(in, line);
      std::istringstream is(line);
      double version = 0;
      is >> version;
      if (version < 2.19 || version > 2.21) throw MeshError("msh: only MSH 2.2 ASCII is supported");
      expect_end("$EndMeshFormat");
    } else if (line.rfind("$PhysicalNames", 0) == 0) {
      std::getline(in, line);
      const int n = std::stoi(line);
      for (int i = 0; i < n; ++i) {
        std::getline(in, line);
        std::istringstream is(line);
        int dim = 0, id = 0;
        std::string name;
        is >> dim >> id >> name;
        if (name.size() >= 2 && name.front() == '"' && name.back() == '"')
          name = name.substr(1, name.size() - 2);
        physical_names[id] = name;
      }
      expect_end("$EndPhysicalNames");
    } else if (line.rfind("$Nodes", 0) == 0) {
      std::getline(in, line);
      const int n = std::stoi(line);
      for (int i = 0; i < n; ++i) {
        std::getline(in, line);
        std::istringstream is(line);
        int id = 0;
        double x = 0, y = 0, z = 0;
        is >> id >> x >> y >> z;
        if (is.fail()) throw MeshError("msh: bad node line: " + line);
        node_index[id] = static_cast<int>(nodes.size());
        nodes.push_back(Vec2d(x, y));
      }
      expect_end("$EndNodes");
    } else if (line.rfind("$Elements", 0) == 0) {
      std::getline(in, line);
      const int n = std::stoi(line);
      for (int i = 0; i < n; ++i) {
        std::getline(in, line);
        std::istringstream is(line);
        int id = 0, type = 0, ntags = 0;
        is >> id >> type >> ntags;
        int phys = 0;
        for (int t = 0; t < ntags; ++t) {
          int tag = 0;
          is >> tag;
          if (t == 0) phys = tag;
        }
        if (type == 1) {
          int a = 0, b = 0;
          is >> a >> b;
          lines2.push_back({{a, b}, phys});
        } else if (type == 2) {
          int a = 0, b = 0, c = 0;
          is >> a >> b >> c;
          tris.push_back({a, b, c});
        } else if (type == 15) {
          // point elements carry corner hints in some exports; ignored
        } else {
          throw MeshError("msh: unsupported element type " + std::to_string(type) +
                          " at element " + std::to_string(id));
        }
        if (is.fail()) throw MeshError("msh: bad element line: " + line);
      }
      expect_end("$EndElements");
    }
  }
  if (nodes.empty() || tris.empty()) throw MeshError("msh: missing $Nodes or $Elements");

  m.nodes.resize(static_cast<int>(nodes.size()), 2);
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) m.nodes.row(i) = nodes[i].transpose();
  m.tris.resize(static_cast<int>(tris.size()), 3);
  for (int t = 0; t < static_cast<int>(tris.size()); ++t)
    for (int e = 0; e < 3; ++e) {
      auto it = node_index.find(tris[t][e]);
      if (it == node_index.end()) throw MeshError("msh: triangle references unknown node");
      m.tris(t, e) = it->second;
    }
  for (const auto& [ab, phys] : lines2) {
    BoundaryEdge be;
    be.a = node_index.at(ab[0]);
    be.b = node_index.at(ab[1]);
    be.tag = physical_names.count(phys) ? physical_names[phys] : ("tag" + std::to_string(phys));
    m.boundary_edges.push_back(be);
  }
  m.finalize(corner_angle_deg);
  return m;
}

TriMesh load_mesh(const std::string& path, const std::string& format, double corner_angle_deg) {
  std::string fmt = format;
  if (fmt == "auto") {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".msh")
      fmt = "msh22";
    else
      fmt = "json";
  }
  std::ifstream in(path);
  if (!in) throw MeshError("mesh: cannot open " + path);
  if (fmt == "msh22") return mesh_from_msh(in, corner_angle_deg);
  if (fmt == "json") {
    std::stringstream ss;
    ss << in.rdbuf();
    return mesh_from_json_text(ss.str(), corner_angle_deg);
  }
  throw MeshError("mesh: unknown format " + fmt);
}

}  // namespace framefield
