#include "framefield/analytic.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace framefield {

namespace {

// q and its gradient from (phi, lambda, mu) and their spatial partials.
QVecd q_of(double phi, double lam, double mu) { return q_from_sum_diff(phi, lam + mu, lam - mu); }

QGradd grad_q_of(double phi, double lam, double mu, const Vec2d& dphi, const Vec2d& dlam,
                 const Vec2d& dmu) {
  const double sp = sqrt_pi<double>();
  const double s2p = sqrt_two_pi<double>();
  const double sum = lam + mu, diff = lam - mu;
  const double c2 = std::cos(2 * phi), s2 = std::sin(2 * phi);
  const double c4 = std::cos(4 * phi), s4 = std::sin(4 * phi);
  QGradd g;
  for (int a = 0; a < 2; ++a) {
    const double dsum = dlam[a] + dmu[a], ddiff = dlam[a] - dmu[a];
    g(0, a) = 3.0 / 8 * s2p * dsum;
    g(1, a) = sp / 2 * (ddiff * c2 - 2 * diff * s2 * dphi[a]);
    g(2, a) = sp / 2 * (ddiff * s2 + 2 * diff * c2 * dphi[a]);
    g(3, a) = sp / 8 * (dsum * c4 - 4 * sum * s4 * dphi[a]);
    g(4, a) = sp / 8 * (dsum * s4 + 4 * sum * c4 * dphi[a]);
  }
  return g;
}

}  // namespace

Frame2 polar_singular_field(double index, const Vec2d& p) {
  const double r = p.norm();
  if (r < 1e-14) throw std::domain_error("polar_singular_field: undefined at the origin");
  const double theta = std::atan2(p.y(), p.x());
  const double size = std::pow(r, index);
  return Frame2::canonical(index * theta, size, size);
}

AnalyticField make_constant_field(const Frame2& f) {
  AnalyticField out;
  out.name = "constant";
  const QVecd q = q_from_frame(f);
  out.frame = [f](const Vec2d&) { return f; };
  out.q = [q](const Vec2d&) { return q; };
  out.grad_q = [](const Vec2d&) { return QGradd::Zero().eval(); };
  return out;
}

AnalyticField make_rigid_rotation_field(double angle) {
  return make_constant_field(Frame2::canonical(angle, 1.0, 1.0));
}

AnalyticField make_polar_field(double index) {
  AnalyticField out;
  out.name = "polar_singular";
  out.frame = [index](const Vec2d& p) { return polar_singular_field(index, p); };
  out.q = [index](const Vec2d& p) {
    const double r = p.norm();
    const double theta = std::atan2(p.y(), p.x());
    const double size = std::pow(r, index);
    return q_of(index * theta, size, size);
  };
  out.grad_q = [index](const Vec2d& p) {
    const double r = p.norm();
    const double theta = std::atan2(p.y(), p.x());
    const double size = std::pow(r, index);
    // dr = p/r, dtheta = (-y, x)/r^2
    const Vec2d dr = p / r;
    const Vec2d dth(-p.y() / (r * r), p.x() / (r * r));
    const Vec2d dphi = index * dth;
    const Vec2d dsize = index * std::pow(r, index - 1) * dr;
    return grad_q_of(index * theta, size, size, dphi, dsize, dsize);
  };
  return out;
}

AnalyticField make_random_smooth_field(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> amp(-0.2, 0.2);
  std::uniform_int_distribution<int> freq(1, 2);
  std::uniform_real_distribution<double> phase(0, 2 * kPi);

  struct Wave {
    double a, fx, fy, p;
  };
  auto waves = [&](int n) {
    std::vector<Wave> w(n);
    for (Wave& wi : w) wi = Wave{amp(rng), double(freq(rng)), double(freq(rng)), phase(rng)};
    return w;
  };
  const auto wp = waves(3);
  const auto wl = waves(2);
  const auto wm = waves(2);

  auto eval = [](const std::vector<Wave>& w, double base, const Vec2d& p, double* dx, double* dy) {
    double v = base;
    *dx = *dy = 0;
    for (const Wave& wi : w) {
      const double arg = wi.fx * p.x() + wi.fy * p.y() + wi.p;
      v += wi.a * std::sin(arg);
      *dx += wi.a * wi.fx * std::cos(arg);
      *dy += wi.a * wi.fy * std::cos(arg);
    }
    return v;
  };

  AnalyticField out;
  out.name = "random_smooth_" + std::to_string(seed);
  auto plm = [=](const Vec2d& p, Vec2d* dphi, Vec2d* dlam, Vec2d* dmu) {
    double dx, dy;
    const double phi = eval(wp, 0.3, p, &dx, &dy);
    *dphi = Vec2d(dx, dy);
    const double lam = eval(wl, 1.2, p, &dx, &dy);
    *dlam = Vec2d(dx, dy);
    const double mu = eval(wm, 0.9, p, &dx, &dy);
    *dmu = Vec2d(dx, dy);
    return std::array<double, 3>{phi, lam, mu};
  };
  out.frame = [plm](const Vec2d& p) {
    Vec2d a, b, c;
    const auto [phi, lam, mu] = plm(p, &a, &b, &c);
    return Frame2::canonical(phi, lam, mu);
  };
  out.q = [plm](const Vec2d& p) {
    Vec2d a, b, c;
    const auto [phi, lam, mu] = plm(p, &a, &b, &c);
    return q_of(phi, lam, mu);
  };
  out.grad_q = [plm](const Vec2d& p) {
    Vec2d dphi, dlam, dmu;
    const auto [phi, lam, mu] = plm(p, &dphi, &dlam, &dmu);
    return grad_q_of(phi, lam, mu, dphi, dlam, dmu);
  };
  return out;
}

FieldState sample_field(const TriMesh& mesh, const AnalyticField& field) {
  FieldState state;
  state.q = Eigen::VectorXd::Zero(5 * mesh.num_nodes());
  state.fixed = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(5 * mesh.num_nodes(), false);
  for (int i = 0; i < mesh.num_nodes(); ++i) state.set_node_q(i, field.q(mesh.node(i)));
  return state;
}

std::vector<ConvergenceSample> convergence_experiment(double index,
                                                      const std::vector<TriMesh>& meshes,
                                                      int threads) {
  std::vector<ConvergenceSample> out;
  const AnalyticField field = make_polar_field(index);
  for (const TriMesh& mesh : meshes) {
    const FieldState state = sample_field(mesh, field);
    EnergyAssembler assembler(mesh, threads);
    const auto profile = assembler.lie_profile(state);
    out.push_back(ConvergenceSample{mesh.max_edge_length(), profile.value, profile.max_integrand});
  }
  return out;
}

std::string convergence_csv(const std::vector<ConvergenceSample>& samples) {
  std::ostringstream os;
  os << "h,e_lie,max_integrand\n";
  os.precision(17);
  for (const auto& s : samples) os << s.h << "," << s.e_lie << "," << s.max_integrand << "\n";
  return os.str();
}

BasisOracleReport basis_change_oracle() {
  BasisOracleReport rep;
  const int n = 1024;
  const double w = 2 * kPi / n;

  auto basis = [](double t, int i) {
    switch (i) {
      case 0: return 1.0 / sqrt_two_pi<double>();
      case 1: return std::cos(2 * t) / sqrt_pi<double>();
      case 2: return std::sin(2 * t) / sqrt_pi<double>();
      case 3: return std::cos(4 * t) / sqrt_pi<double>();
      default: return std::sin(4 * t) / sqrt_pi<double>();
    }
  };
  // p(theta) of the unit tensor with a single independent component set,
  // carried with its multiplicity
  const double mult[5] = {1, 4, 6, 4, 1};
  auto monomial = [&](double t, int j) {
    const double c = std::cos(t), s = std::sin(t);
    const double m[5] = {c * c * c * c, c * c * c * s, c * c * s * s, c * s * s * s, s * s * s * s};
    return mult[j] * m[j];
  };

  Eigen::Matrix<double, 5, 5> projected = Eigen::Matrix<double, 5, 5>::Zero();
  Eigen::Matrix<double, 5, 5> gram = Eigen::Matrix<double, 5, 5>::Zero();
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) * w;
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        projected(i, j) += basis(t, i) * monomial(t, j) * w;
        gram(i, j) += basis(t, i) * basis(t, j) * w;
      }
    }
  }
  rep.max_matrix_error = (projected - q_from_tensor_matrix<double>()).cwiseAbs().maxCoeff();
  rep.max_gram_error = (gram - Eigen::Matrix<double, 5, 5>::Identity()).cwiseAbs().maxCoeff();
  rep.max_roundtrip_error =
      (q_from_tensor_matrix<double>() * tensor_from_q_matrix<double>() -
       Eigen::Matrix<double, 5, 5>::Identity())
          .cwiseAbs()
          .maxCoeff();
  rep.pass = rep.max_matrix_error < 1e-12 && rep.max_gram_error < 1e-12 &&
             rep.max_roundtrip_error < 1e-12;
  return rep;
}

TriMesh make_square_mesh(int n, double jitter) {
  if (n < 2) throw MeshError("make_square_mesh: need n >= 2");
  TriMesh m;
  m.nodes.resize(n * n, 2);
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double h = 1.0 / (n - 1);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double x = i * h, y = j * h;
      if (jitter > 0 && i > 0 && i < n - 1 && j > 0 && j < n - 1) {
        x += jitter * h * uni(rng);
        y += jitter * h * uni(rng);
      }
      m.nodes(j * n + i, 0) = x;
      m.nodes(j * n + i, 1) = y;
    }
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j + 1 < n; ++j)
    for (int i = 0; i + 1 < n; ++i) {
      const int a = j * n + i, b = j * n + i + 1, c = (j + 1) * n + i + 1, d = (j + 1) * n + i;
      if ((i + j) % 2 == 0) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  m.tris.resize(static_cast<int>(tris.size()), 3);
  for (size_t t = 0; t < tris.size(); ++t)
    for (int e = 0; e < 3; ++e) m.tris(static_cast<int>(t), e) = tris[t][e];
  for (int i = 0; i + 1 < n; ++i) {
    m.boundary_edges.push_back({i, i + 1, -1, "bottom"});
    m.boundary_edges.push_back({(n - 1) * n + i, (n - 1) * n + i + 1, -1, "top"});
    m.boundary_edges.push_back({i * n + n - 1, (i + 1) * n + n - 1, -1, "right"});
    m.boundary_edges.push_back({i * n, (i + 1) * n, -1, "left"});
  }
  m.finalize();
  return m;
}

TriMesh make_disk_mesh(int refine_levels) {
  // central equilateral triangle (centroid exactly at the origin) inside a
  // 12-gon rim; midpoint refinement keeps the origin at the centroid of the
  // shrinking central triangle
  std::vector<Vec2d> nodes;
  const double ri = 0.42, ro = 1.0;
  for (int k = 0; k < 3; ++k) {
    const double a = kHalfPi + 2 * kPi * k / 3;
    nodes.push_back(ri * Vec2d(std::cos(a), std::sin(a)));
  }
  for (int k = 0; k < 12; ++k) {
    const double a = 2 * kPi * k / 12;
    nodes.push_back(ro * Vec2d(std::cos(a), std::sin(a)));
  }
  std::vector<std::array<int, 3>> tris{{0, 1, 2}};
  auto nearest_inner = [&](double angle) {
    int best = 0;
    double bd = 10;
    for (int k = 0; k < 3; ++k) {
      const double ia = kHalfPi + 2 * kPi * k / 3;
      const double d = std::abs(std::remainder(angle - ia, 2 * kPi));
      if (d < bd) {
        bd = d;
        best = k;
      }
    }
    return best;
  };
  for (int k = 0; k < 12; ++k) {
    const int o0 = 3 + k, o1 = 3 + (k + 1) % 12;
    tris.push_back({o0, o1, nearest_inner(2 * kPi * (k + 0.5) / 12)});
  }
  for (int k = 0; k < 3; ++k) {
    const double mid = kHalfPi + 2 * kPi * (k + 0.5) / 3;
    const int kk = static_cast<int>(std::lround(mid / (2 * kPi / 12))) % 12;
    tris.push_back({(k + 1) % 3, k, 3 + kk});
  }
  // orient everything CCW
  for (auto& t : tris) {
    const Vec2d a = nodes[t[0]], b = nodes[t[1]], c = nodes[t[2]];
    if ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()) < 0)
      std::swap(t[1], t[2]);
  }

  for (int level = 0; level < refine_levels; ++level) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it == mid.end()) {
        it = mid.emplace(key, static_cast<int>(nodes.size())).first;
        nodes.push_back(0.5 * (nodes[a] + nodes[b]));
      }
      return it->second;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(4 * tris.size());
    for (const auto& t : tris) {
      const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({ab, t[1], bc});
      next.push_back({ca, bc, t[2]});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }

  TriMesh m;
  m.nodes.resize(static_cast<int>(nodes.size()), 2);
  for (size_t i = 0; i < nodes.size(); ++i) m.nodes.row(static_cast<int>(i)) = nodes[i].transpose();
  m.tris.resize(static_cast<int>(tris.size()), 3);
  for (size_t t = 0; t < tris.size(); ++t)
    for (int e = 0; e < 3; ++e) m.tris(static_cast<int>(t), e) = tris[t][e];
  // rim edges all carry one tag; corner detection keeps the loop whole
  m.finalize(46.0);
  for (auto& be : m.boundary_edges) be.tag = "rim";
  for (auto& c : m.curves) c.tag = "rim";
  return m;
}

TriMesh make_annulus_mesh(int nr, int nt, double r_inner, double r_outer) {
  if (nr < 1 || nt < 3) throw MeshError("make_annulus_mesh: bad resolution");
  TriMesh m;
  m.nodes.resize((nr + 1) * nt, 2);
  for (int j = 0; j <= nr; ++j) {
    const double r = r_inner + (r_outer - r_inner) * j / nr;
    for (int i = 0; i < nt; ++i) {
      const double a = 2 * kPi * i / nt;
      m.nodes(j * nt + i, 0) = r * std::cos(a);
      m.nodes(j * nt + i, 1) = r * std::sin(a);
    }
  }
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j < nr; ++j)
    for (int i = 0; i < nt; ++i) {
      const int i1 = (i + 1) % nt;
      const int a = j * nt + i, b = j * nt + i1, c = (j + 1) * nt + i1, d = (j + 1) * nt + i;
      if ((i + j) % 2 == 0) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  m.tris.resize(static_cast<int>(tris.size()), 3);
  for (size_t t = 0; t < tris.size(); ++t) {
    auto tri = tris[t];
    const Vec2d pa = m.nodes.row(tri[0]), pb = m.nodes.row(tri[1]), pc = m.nodes.row(tri[2]);
    if ((pb.x() - pa.x()) * (pc.y() - pa.y()) - (pb.y() - pa.y()) * (pc.x() - pa.x()) < 0)
      std::swap(tri[1], tri[2]);
    for (int e = 0; e < 3; ++e) m.tris(static_cast<int>(t), e) = tri[e];
  }
  for (int i = 0; i < nt; ++i) {
    m.boundary_edges.push_back({i, (i + 1) % nt, -1, "inner"});
    m.boundary_edges.push_back({nr * nt + i, nr * nt + (i + 1) % nt, -1, "outer"});
  }
  m.finalize(60.0);
  return m;
}

}  // namespace framefield
