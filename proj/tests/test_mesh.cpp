#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "framefield/analytic.hpp"
#include "framefield/mesh.hpp"

using namespace framefield;

namespace {

const char* kTriangleJson = R"({
  "nodes": [[0,0],[1,0],[0,1]],
  "triangles": [[0,1,2]],
  "boundary": [{"edge":[0,1],"tag":"a"},{"edge":[1,2],"tag":"b"},{"edge":[2,0],"tag":"c"}]
})";

const char* kSquareJson = R"({
  "nodes": [[0,0],[1,0],[1,1],[0,1]],
  "triangles": [[0,1,2],[0,2,3]],
  "boundary": [{"edge":[0,1],"tag":"bottom"},{"edge":[1,2],"tag":"right"},
               {"edge":[2,3],"tag":"top"},{"edge":[3,0],"tag":"left"}]
})";

}  // namespace

TEST_CASE("single reference triangle") {
  const TriMesh m = mesh_from_json_text(kTriangleJson);
  CHECK(m.num_tris() == 1);
  CHECK(m.boundary_edges.size() == 3);
  CHECK(m.tri_area(0) == doctest::Approx(0.5));
  CHECK(m.curves.size() == 3);  // three tags, three corner-separated curves
  CHECK(m.corners.size() == 3);
}

TEST_CASE("two-triangle square satisfies Euler's formula") {
  const TriMesh m = mesh_from_json_text(kSquareJson);
  const int V = m.num_nodes();
  const int E = static_cast<int>(m.edges.size());
  const int F = m.num_tris();
  CHECK(V - E + F == 1);
  CHECK(m.curves.size() == 4);
  CHECK(m.corners.size() == 4);
}

TEST_CASE("duplicate triangle is rejected as non-manifold") {
  const std::string bad = R"({
    "nodes": [[0,0],[1,0],[0,1]],
    "triangles": [[0,1,2],[0,1,2]]
  })";
  CHECK_THROWS_AS((void)mesh_from_json_text(bad), MeshError);
}

TEST_CASE("inverted triangle is rejected with its id") {
  const std::string bad = R"({
    "nodes": [[0,0],[1,0],[0,1]],
    "triangles": [[0,2,1]]
  })";
  try {
    (void)mesh_from_json_text(bad);
    FAIL("expected MeshError");
  } catch (const MeshError& e) {
    CHECK(std::string(e.what()).find("triangle 0") != std::string::npos);
  }
}

TEST_CASE("element gradients reproduce linear fields") {
  const TriMesh m = mesh_from_json_text(kSquareJson);
  for (int t = 0; t < m.num_tris(); ++t) {
    Eigen::Vector3d xs, constant, lin;
    for (int c = 0; c < 3; ++c) {
      const Vec2d p = m.node(m.tris(t, c));
      xs[c] = p.x();
      constant[c] = 7.0;
      lin[c] = 2 * p.x() + 3 * p.y();
    }
    CHECK((elem_gradient(m, t, xs) - Vec2d(1, 0)).norm() < 1e-14);
    CHECK(elem_gradient(m, t, constant).norm() < 1e-14);
    CHECK((elem_gradient(m, t, lin) - Vec2d(2, 3)).norm() < 1e-13);
  }
}

TEST_CASE("domain integration is degree-2 exact") {
  const TriMesh m = mesh_from_json_text(kSquareJson);
  CHECK(integrate_domain(m, [](const Vec2d&, int) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate_domain(m, [](const Vec2d& p, int) { return p.x(); }) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(integrate_domain(m, [](const Vec2d& p, int) { return p.x() * p.x(); }) ==
        doctest::Approx(1.0 / 3).epsilon(1e-13));
  CHECK(integrate_domain(m, [](const Vec2d& p, int) { return p.x() * p.y(); }) ==
        doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("quadrature rule weights and exactness") {
  const QuadratureRule& r = tri_quadrature();
  CHECK(r.weights.sum() == doctest::Approx(1.0));
  for (int k = 0; k < 3; ++k) CHECK(r.bary.row(k).sum() == doctest::Approx(1.0));
}

TEST_CASE("adjacency is involutive and areas match the shoelace") {
  const TriMesh m = make_square_mesh(7);
  for (int t = 0; t < m.num_tris(); ++t)
    for (int e = 0; e < 3; ++e) {
      const int nb = m.neighbors(t, e);
      if (nb < 0) continue;
      bool found = false;
      for (int e2 = 0; e2 < 3; ++e2) found |= m.neighbors(nb, e2) == t;
      CHECK(found);
    }

  double shoelace = 0;
  for (const auto& be : m.boundary_edges)
    shoelace += m.node(be.a).x() * m.node(be.b).y() - m.node(be.b).x() * m.node(be.a).y();
  shoelace *= 0.5;
  CHECK(m.total_area() == doctest::Approx(shoelace).epsilon(1e-10));
}

TEST_CASE("MSH 2.2 subset parses with physical names") {
  const std::string msh = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
2
1 1 "bottom"
1 2 "rest"
$EndPhysicalNames
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
6
1 1 2 1 1 1 2
2 1 2 2 2 2 3
3 1 2 2 2 3 4
4 1 2 2 2 4 1
5 2 2 3 1 1 2 3
6 2 2 3 1 1 3 4
$EndElements
)";
  std::istringstream in(msh);
  const TriMesh m = mesh_from_msh(in);
  CHECK(m.num_nodes() == 4);
  CHECK(m.num_tris() == 2);
  bool has_bottom = false;
  for (const auto& c : m.curves) has_bottom |= c.tag == "bottom";
  CHECK(has_bottom);
}

TEST_CASE("corner detection splits loops by turning angle and tag change") {
  // a square with a single tag still gets 4 corners from the 90-degree turns
  const std::string one_tag = R"({
    "nodes": [[0,0],[1,0],[1,1],[0,1]],
    "triangles": [[0,1,2],[0,2,3]],
    "boundary": [{"edge":[0,1],"tag":"s"},{"edge":[1,2],"tag":"s"},
                 {"edge":[2,3],"tag":"s"},{"edge":[3,0],"tag":"s"}]
  })";
  const TriMesh m = mesh_from_json_text(one_tag);
  CHECK(m.corners.size() == 4);
  CHECK(m.curves.size() == 4);

  // the annulus fixture has smooth loops: no corners, two closed curves
  const TriMesh ann = make_annulus_mesh(3, 24, 1.0, 2.0);
  CHECK(ann.corners.empty());
  REQUIRE(ann.curves.size() == 2);
  CHECK(ann.curves[0].closed);
  CHECK(ann.curves[1].closed);
}

TEST_CASE("fixture meshes are valid") {
  const TriMesh disk = make_disk_mesh(2);
  CHECK(disk.num_tris() == 16 * 16);
  // the central triangle keeps the origin strictly inside
  bool origin_inside = false;
  for (int t = 0; t < disk.num_tris() && !origin_inside; ++t) {
    const Vec2d a = disk.node(disk.tris(t, 0)), b = disk.node(disk.tris(t, 1)),
                c = disk.node(disk.tris(t, 2));
    auto cross = [](const Vec2d& u, const Vec2d& v) { return u.x() * v.y() - u.y() * v.x(); };
    if (cross(b - a, -a) > 1e-12 && cross(c - b, -b) > 1e-12 && cross(a - c, -c) > 1e-12)
      origin_inside = true;
  }
  CHECK(origin_inside);

  const TriMesh sq = make_square_mesh(10, 0.3);
  CHECK(sq.num_nodes() == 100);
  CHECK(sq.curves.size() == 4);
  for (int t = 0; t < sq.num_tris(); ++t) CHECK(sq.tri_area(t) > 0);
}
