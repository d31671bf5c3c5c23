#include "framefield/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace framefield {

using nlohmann::json;

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string mesh_to_json_text(const TriMesh& mesh) {
  json j;
  json nodes = json::array();
  for (int i = 0; i < mesh.num_nodes(); ++i) nodes.push_back({mesh.nodes(i, 0), mesh.nodes(i, 1)});
  j["nodes"] = std::move(nodes);
  json tris = json::array();
  for (int t = 0; t < mesh.num_tris(); ++t)
    tris.push_back({mesh.tris(t, 0), mesh.tris(t, 1), mesh.tris(t, 2)});
  j["triangles"] = std::move(tris);
  json boundary = json::array();
  for (const auto& be : mesh.boundary_edges)
    boundary.push_back({{"edge", {be.a, be.b}}, {"tag", be.tag}});
  j["boundary"] = std::move(boundary);
  return j.dump() + "\n";
}

void write_field_artifact(const std::string& dir, const FieldArtifact& a) {
  json j;
  j["mesh"] = a.mesh_path;
  j["mesh_format"] = a.mesh_format;
  j["mode"] = a.mode;
  j["num_nodes"] = a.state.num_nodes();
  json qs = json::array();
  for (int i = 0; i < a.state.num_nodes(); ++i) {
    const QVecd q = a.state.node_q(i);
    qs.push_back({q[0], q[1], q[2], q[3], q[4]});
  }
  j["q"] = std::move(qs);
  json fr = json::array();
  for (const auto& f : a.frames)
    fr.push_back({{"phi", f.frame.phi},
                  {"lambda", f.frame.lambda},
                  {"mu", f.frame.mu},
                  {"degenerate", f.degenerate},
                  {"nonpositive_size", f.nonpositive_size}});
  j["frames"] = std::move(fr);
  write_text_file(dir + "/field.json", j.dump(2) + "\n");
}

FieldArtifact read_field_artifact(const std::string& path) {
  const json j = json::parse(read_text_file(path));
  FieldArtifact a;
  a.mesh_path = j.at("mesh").get<std::string>();
  a.mesh_format = j.value("mesh_format", "auto");
  a.mode = j.value("mode", "iso");
  const int n = j.at("num_nodes").get<int>();
  a.state.q = Eigen::VectorXd::Zero(5 * n);
  a.state.fixed = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(5 * n, false);
  a.state.iso_mode = a.mode == "iso";
  for (int i = 0; i < n; ++i) {
    QVecd q;
    for (int c = 0; c < 5; ++c) q[c] = j.at("q")[i][c].get<double>();
    a.state.set_node_q(i, q);
  }
  for (const auto& f : j.at("frames")) {
    RecoveredFrame<double> rf;
    rf.frame.phi = f.at("phi").get<double>();
    rf.frame.lambda = f.at("lambda").get<double>();
    rf.frame.mu = f.at("mu").get<double>();
    rf.degenerate = f.at("degenerate").get<bool>();
    rf.nonpositive_size = f.at("nonpositive_size").get<bool>();
    a.frames.push_back(rf);
  }
  return a;
}

void write_solve_report(const std::string& dir, const SolveReport& report) {
  json j;
  j["ok"] = report.ok;
  if (!report.failure.empty()) j["failure"] = report.failure;
  j["epsilon"] = report.epsilon;
  j["a_min"] = report.a_min;
  j["warnings"] = report.warnings;
  json stages = json::array();
  for (const auto& s : report.stages)
    stages.push_back({{"kappa", s.kappa},
                      {"iterations", s.iterations},
                      {"e_lie", finite_or_null(s.e_lie)},
                      {"e_dirichlet", s.e_dirichlet},
                      {"e_odeco", s.e_odeco},
                      {"grad_norm", s.grad_norm},
                      {"converged", s.converged}});
  j["stages"] = std::move(stages);
  write_text_file(dir + "/report.json", j.dump(2) + "\n");
}

void write_timings(const std::string& dir, const SolveReport& report) {
  std::ostringstream os;
  for (const auto& s : report.stages)
    os << "kappa " << s.kappa << ": " << s.seconds << " s, " << s.iterations << " iterations\n";
  write_text_file(dir + "/timings.txt", os.str());
}

void write_singularities(const std::string& dir, const std::vector<Singularity>& sing) {
  json j;
  json list = json::array();
  for (const auto& s : sing) list.push_back({{"triangle", s.tri}, {"index_quarters", s.index_quarters}});
  j["singularities"] = std::move(list);
  j["count"] = sing.size();
  write_text_file(dir + "/singularities.json", j.dump(2) + "\n");
}

void write_cut_graph(const std::string& dir, const TriMesh& mesh, const CutGraph& cut) {
  json j;
  json edges = json::array();
  for (size_t e = 0; e < mesh.edges.size(); ++e)
    if (cut.cut_edge[e]) edges.push_back({mesh.edges[e].a, mesh.edges[e].b});
  j["edges"] = std::move(edges);
  write_text_file(dir + "/cutgraph.json", j.dump(2) + "\n");
}

void write_param_artifact(const std::string& dir, const TriMesh& mesh, const CutGraph& cut,
                          const SeamlessParam& param) {
  json j;
  json nodes = json::array();
  for (int w = 0; w < cut.num_wedges; ++w)
    nodes.push_back({{"node", cut.wedge_node[w]}, {"u", param.u[w]}, {"v", param.v[w]}});
  j["nodes"] = std::move(nodes);
  j["integration_error"] = param.integration_error;
  j["max_seam_residual"] = param.max_seam_residual;
  j["max_boundary_variance"] = param.max_boundary_variance;
  j["nullspace_dim"] = param.nullspace_dim;
  json arcs = json::array();
  for (const auto& a : param.arcs)
    arcs.push_back({{"k", a.k}, {"s", a.translation.x()}, {"t", a.translation.y()}, {"edges", a.edges}});
  j["arcs"] = std::move(arcs);
  write_text_file(dir + "/param.json", j.dump(2) + "\n");
}

void write_compare_report(const std::string& dir, const CompareReport& report) {
  json j;
  j["smooth_error"] = report.smooth_error;
  j["integrable_error"] = report.integrable_error;
  j["ratio"] = report.ratio;
  j["both_negligible"] = report.both_negligible;
  j["smooth_singularities"] = report.smooth_singularities;
  j["integrable_singularities"] = report.integrable_singularities;
  write_text_file(dir + "/compare.json", j.dump(2) + "\n");
}

namespace {

struct SvgCanvas {
  std::ostringstream body;
  double xmin, ymin, xmax, ymax;

  explicit SvgCanvas(const TriMesh& mesh) {
    xmin = mesh.nodes.col(0).minCoeff();
    xmax = mesh.nodes.col(0).maxCoeff();
    ymin = mesh.nodes.col(1).minCoeff();
    ymax = mesh.nodes.col(1).maxCoeff();
    const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin);
    xmin -= pad;
    xmax += pad;
    ymin -= pad;
    ymax += pad;
  }

  double sx(double x) const { return (x - xmin) / (xmax - xmin) * 1000.0; }
  double sy(double y) const { return (ymax - y) / (ymax - ymin) * 1000.0 * aspect(); }
  double aspect() const { return (ymax - ymin) / (xmax - xmin); }

  void line(const Vec2d& a, const Vec2d& b, const std::string& color, double width) {
    body << "<line x1=\"" << sx(a.x()) << "\" y1=\"" << sy(a.y()) << "\" x2=\"" << sx(b.x())
         << "\" y2=\"" << sy(b.y()) << "\" stroke=\"" << color << "\" stroke-width=\"" << width
         << "\"/>\n";
  }

  void polyline(const std::vector<Vec2d>& pts, const std::string& color, double width) {
    body << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
         << "\" points=\"";
    for (const Vec2d& p : pts) body << sx(p.x()) << "," << sy(p.y()) << " ";
    body << "\"/>\n";
  }

  std::string finish() const {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\""
       << 1000.0 * aspect() << "\" viewBox=\"0 0 1000 " << 1000.0 * aspect() << "\">\n"
       << body.str() << "</svg>\n";
    return os.str();
  }
};

double local_scale(const TriMesh& mesh, int node) {
  double s = 0;
  int n = 0;
  for (int t : mesh.node_tris[node]) {
    for (int e = 0; e < 3; ++e) {
      const auto& ed = mesh.edges[mesh.tri_edges(t, e)];
      if (ed.a == node || ed.b == node) {
        s += (mesh.node(ed.a) - mesh.node(ed.b)).norm();
        ++n;
      }
    }
  }
  return n > 0 ? s / n : 1.0;
}

}  // namespace

std::string render_frames_svg(const TriMesh& mesh, const FrameField& frames) {
  SvgCanvas svg(mesh);
  for (size_t e = 0; e < mesh.edges.size(); ++e)
    svg.line(mesh.node(mesh.edges[e].a), mesh.node(mesh.edges[e].b), "#dddddd", 0.5);
  double max_size = 1e-12;
  for (const auto& f : frames) max_size = std::max({max_size, f.frame.lambda, f.frame.mu});
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const auto& f = frames[i];
    const double scale = 0.45 * local_scale(mesh, i) / max_size;
    const Vec2d p = mesh.node(i);
    const Vec2d du(std::cos(f.frame.phi), std::sin(f.frame.phi));
    const Vec2d dv(-du.y(), du.x());
    const std::string color = f.degenerate ? "#999999" : "#1f4e9c";
    svg.line(p - scale * f.frame.lambda * du, p + scale * f.frame.lambda * du, color, 1.2);
    svg.line(p - scale * f.frame.mu * dv, p + scale * f.frame.mu * dv, color, 1.2);
  }
  return svg.finish();
}

std::string render_glyphs_svg(const TriMesh& mesh, const FieldState& state) {
  SvgCanvas svg(mesh);
  for (size_t e = 0; e < mesh.edges.size(); ++e)
    svg.line(mesh.node(mesh.edges[e].a), mesh.node(mesh.edges[e].b), "#eeeeee", 0.4);
  const int samples = 64;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const QVecd q = state.node_q(i);
    double pmax = 1e-12;
    for (int k = 0; k < samples; ++k)
      pmax = std::max(pmax, std::abs(eval_poly(q, 2 * kPi * k / samples)));
    const double scale = 0.45 * local_scale(mesh, i) / pmax;
    const Vec2d c = mesh.node(i);
    std::vector<Vec2d> run;
    bool run_positive = true;
    auto flush = [&] {
      if (run.size() >= 2) svg.polyline(run, run_positive ? "#1fa03c" : "#c43bbf", 1.0);
      run.clear();
    };
    for (int k = 0; k <= samples; ++k) {
      const double th = 2 * kPi * k / samples;
      const double r = eval_poly(q, th);
      const bool positive = r >= 0;
      const Vec2d pt = c + scale * std::abs(r) * Vec2d(std::cos(th), std::sin(th));
      if (!run.empty() && positive != run_positive) {
        run.push_back(pt);
        flush();
      }
      if (run.empty()) run_positive = positive;
      run.push_back(pt);
    }
    flush();
  }
  return svg.finish();
}

std::string render_isolines_svg(const TriMesh& mesh, const CutGraph& cut,
                                const SeamlessParam& param) {
  SvgCanvas svg(mesh);
  for (const auto& be : mesh.boundary_edges) svg.line(mesh.node(be.a), mesh.node(be.b), "#444444", 1.0);

  auto draw_channel = [&](const Eigen::VectorXd& f, const std::string& color) {
    for (int t = 0; t < mesh.num_tris(); ++t) {
      if (!cut.tri_included[t]) continue;
      const int w[3] = {cut.wedge(t, 0), cut.wedge(t, 1), cut.wedge(t, 2)};
      const double vals[3] = {f[w[0]], f[w[1]], f[w[2]]};
      const Vec2d pts[3] = {mesh.node(mesh.tris(t, 0)), mesh.node(mesh.tris(t, 1)),
                            mesh.node(mesh.tris(t, 2))};
      const double lo = std::min({vals[0], vals[1], vals[2]});
      const double hi = std::max({vals[0], vals[1], vals[2]});
      for (double level = std::ceil(lo); level <= std::floor(hi); ++level) {
        std::vector<Vec2d> hits;
        for (int e = 0; e < 3; ++e) {
          const double a = vals[e], b = vals[(e + 1) % 3];
          if ((a <= level && b > level) || (b <= level && a > level)) {
            const double s = (level - a) / (b - a);
            hits.push_back(pts[e] + s * (pts[(e + 1) % 3] - pts[e]));
          }
        }
        if (hits.size() == 2) svg.line(hits[0], hits[1], color, 0.8);
      }
    }
  };
  draw_channel(param.u, "#c03030");
  draw_channel(param.v, "#3050c0");
  return svg.finish();
}

std::string render_field_vtk(const TriMesh& mesh, const FieldState& state,
                             const FrameField& frames) {
  std::ostringstream os;
  os.precision(17);
  os << "# vtk DataFile Version 3.0\nframe field\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_nodes() << " double\n";
  for (int i = 0; i < mesh.num_nodes(); ++i)
    os << mesh.nodes(i, 0) << " " << mesh.nodes(i, 1) << " 0\n";
  os << "CELLS " << mesh.num_tris() << " " << 4 * mesh.num_tris() << "\n";
  for (int t = 0; t < mesh.num_tris(); ++t)
    os << "3 " << mesh.tris(t, 0) << " " << mesh.tris(t, 1) << " " << mesh.tris(t, 2) << "\n";
  os << "CELL_TYPES " << mesh.num_tris() << "\n";
  for (int t = 0; t < mesh.num_tris(); ++t) os << "5\n";
  os << "POINT_DATA " << mesh.num_nodes() << "\n";
  os << "FIELD field 4\n";
  os << "q 5 " << mesh.num_nodes() << " double\n";
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const QVecd q = state.node_q(i);
    os << q[0] << " " << q[1] << " " << q[2] << " " << q[3] << " " << q[4] << "\n";
  }
  os << "phi 1 " << mesh.num_nodes() << " double\n";
  for (const auto& f : frames) os << f.frame.phi << "\n";
  os << "sizes 2 " << mesh.num_nodes() << " double\n";
  for (const auto& f : frames) os << f.frame.lambda << " " << f.frame.mu << "\n";
  os << "degenerate 1 " << mesh.num_nodes() << " int\n";
  for (const auto& f : frames) os << (f.degenerate ? 1 : 0) << "\n";
  return os.str();
}

std::string render_param_vtk(const TriMesh& mesh, const CutGraph& cut,
                             const SeamlessParam& param) {
  std::ostringstream os;
  os.precision(17);
  int n_inc = 0;
  for (int t = 0; t < mesh.num_tris(); ++t) n_inc += cut.tri_included[t] ? 1 : 0;
  os << "# vtk DataFile Version 3.0\nseamless parametrization\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << cut.num_wedges << " double\n";
  for (int w = 0; w < cut.num_wedges; ++w)
    os << mesh.nodes(cut.wedge_node[w], 0) << " " << mesh.nodes(cut.wedge_node[w], 1) << " 0\n";
  os << "CELLS " << n_inc << " " << 4 * n_inc << "\n";
  for (int t = 0; t < mesh.num_tris(); ++t)
    if (cut.tri_included[t])
      os << "3 " << cut.wedge(t, 0) << " " << cut.wedge(t, 1) << " " << cut.wedge(t, 2) << "\n";
  os << "CELL_TYPES " << n_inc << "\n";
  for (int t = 0; t < n_inc; ++t) os << "5\n";
  os << "POINT_DATA " << cut.num_wedges << "\n";
  os << "FIELD param 2\n";
  os << "u 1 " << cut.num_wedges << " double\n";
  for (int w = 0; w < cut.num_wedges; ++w) os << param.u[w] << "\n";
  os << "v 1 " << cut.num_wedges << " double\n";
  for (int w = 0; w < cut.num_wedges; ++w) os << param.v[w] << "\n";
  return os.str();
}

}  // namespace framefield
