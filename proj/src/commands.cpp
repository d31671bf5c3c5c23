#include "framefield/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include "framefield/analytic.hpp"
#include "json.hpp"

namespace framefield {

using nlohmann::json;

JobConfig load_job_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  JobConfig c;
  c.mesh_path = j.at("mesh").get<std::string>();
  c.mesh_format = j.value("mesh_format", "auto");
  c.mode = j.value("mode", "iso");
  if (c.mode != "iso" && c.mode != "aniso") throw ConfigError("config: mode must be iso or aniso");
  if (!j.contains("boundary")) throw ConfigError("config: missing boundary constraints");
  for (const auto& [tag, spec] : j.at("boundary").items()) {
    SizeSpec s;
    if (spec.is_number()) {
      s = SizeSpec::constant(spec.get<double>());
    } else if (spec.is_array() && spec.size() == 2) {
      s.start = spec[0].get<double>();
      s.end = spec[1].get<double>();
    } else {
      throw ConfigError("config: boundary size for '" + tag + "' must be a number or [start,end]");
    }
    if (!(s.start > 0) || !(s.end > 0))
      throw ConfigError("config: sizes for '" + tag + "' must be positive");
    c.constraints.curve_sizes[tag] = s;
  }
  if (j.contains("node_overrides"))
    for (const auto& [node, size] : j.at("node_overrides").items())
      c.constraints.node_overrides[std::stoi(node)] = size.get<double>();
  if (j.contains("epsilon")) {
    if (j["epsilon"].is_string()) {
      if (j["epsilon"] != "auto") throw ConfigError("config: epsilon must be a number or \"auto\"");
    } else {
      c.epsilon = j["epsilon"].get<double>();
      if (!(c.epsilon > 0)) throw ConfigError("config: epsilon must be positive");
    }
  }
  if (j.contains("kappa")) {
    c.kappa_sequence = j["kappa"].get<std::vector<double>>();
    if (c.kappa_sequence.empty() || c.kappa_sequence.front() != 1.0)
      throw ConfigError("config: kappa sequence must start at 1");
    for (size_t i = 1; i < c.kappa_sequence.size(); ++i)
      if (!(c.kappa_sequence[i] < c.kappa_sequence[i - 1]))
        throw ConfigError("config: kappa sequence must be strictly decreasing");
  }
  if (j.contains("lbfgs")) {
    const auto& l = j["lbfgs"];
    c.lbfgs.memory = l.value("memory", c.lbfgs.memory);
    c.lbfgs.max_iterations = l.value("max_iterations", c.lbfgs.max_iterations);
    c.lbfgs.grad_rel_tol = l.value("grad_tol", c.lbfgs.grad_rel_tol);
  }
  c.threads = j.value("threads", c.threads);
  c.out_dir = j.value("out", c.out_dir);
  if (j.contains("export")) {
    const auto& e = j["export"];
    c.exports.frames_svg = e.value("frames_svg", c.exports.frames_svg);
    c.exports.glyphs_svg = e.value("glyphs_svg", c.exports.glyphs_svg);
    c.exports.isolines_svg = e.value("isolines_svg", c.exports.isolines_svg);
    c.exports.vtk = e.value("vtk", c.exports.vtk);
  }
  return c;
}

namespace {

void validate_tags(const TriMesh& mesh, const BoundaryConstraints& bc) {
  for (const auto& [tag, spec] : bc.curve_sizes) {
    bool found = false;
    for (const auto& c : mesh.curves) found |= c.tag == tag;
    if (!found) throw ConfigError("config: boundary tag '" + tag + "' does not exist in the mesh");
  }
  for (const auto& c : mesh.curves)
    if (!bc.curve_sizes.count(c.tag))
      throw ConfigError("config: no size prescribed for mesh boundary tag '" + c.tag + "'");
}

ScheduleConfig schedule_from(const JobConfig& c) {
  ScheduleConfig s;
  s.kappa_sequence = c.kappa_sequence;
  s.epsilon = c.epsilon;
  s.lbfgs = c.lbfgs;
  s.threads = c.threads;
  return s;
}

struct SolveOutputs {
  TriMesh mesh;
  ScheduleResult result;
  FrameField frames;
};

SolveOutputs run_solve(const JobConfig& config, const std::vector<double>& kappa_sequence) {
  SolveOutputs out;
  out.mesh = load_mesh(config.mesh_path, config.mesh_format);
  validate_tags(out.mesh, config.constraints);
  ScheduleConfig sched = schedule_from(config);
  sched.kappa_sequence = kappa_sequence;
  out.result = run_schedule(out.mesh, config.constraints, sched, config.mode == "iso");
  if (!out.result.report.ok) throw std::runtime_error("solve failed: " + out.result.report.failure);
  out.frames = recover_frames(out.result.state);
  return out;
}

void write_solve_outputs(const JobConfig& config, const std::string& dir, const SolveOutputs& s) {
  FieldArtifact artifact;
  artifact.mesh_path = config.mesh_path;
  artifact.mesh_format = config.mesh_format;
  artifact.mode = config.mode;
  artifact.state = s.result.state;
  artifact.frames = s.frames;
  write_field_artifact(dir, artifact);
  write_solve_report(dir, s.result.report);
  write_timings(dir, s.result.report);
  if (config.exports.frames_svg)
    write_text_file(dir + "/frames.svg", render_frames_svg(s.mesh, s.frames));
  if (config.exports.glyphs_svg)
    write_text_file(dir + "/glyphs.svg", render_glyphs_svg(s.mesh, s.result.state));
  if (config.exports.vtk)
    write_text_file(dir + "/field.vtk", render_field_vtk(s.mesh, s.result.state, s.frames));
}

void write_param_outputs(const std::string& dir, const TriMesh& mesh,
                         const ParamPipelineResult& p, bool isolines_svg) {
  write_singularities(dir, p.singularities);
  write_cut_graph(dir, mesh, p.cut);
  write_param_artifact(dir, mesh, p.cut, p.param);
  write_text_file(dir + "/param.vtk", render_param_vtk(mesh, p.cut, p.param));
  if (isolines_svg)
    write_text_file(dir + "/isolines.svg", render_isolines_svg(mesh, p.cut, p.param));
}

}  // namespace

int cmd_solve(const JobConfig& config) {
  const SolveOutputs s = run_solve(config, config.kappa_sequence);
  write_solve_outputs(config, config.out_dir, s);
  const auto& stages = s.result.report.stages;
  std::cout << "solve: " << stages.size() << " stages";
  if (!stages.empty() && std::isfinite(stages.back().e_lie))
    std::cout << ", final E_Lie = " << stages.back().e_lie;
  std::cout << "\nartifacts written to " << config.out_dir << "\n";
  return 0;
}

int cmd_parametrize(const std::string& field_path, const std::string& out_dir,
                    const std::optional<std::string>& mesh_override) {
  const std::string path = std::filesystem::is_directory(field_path)
                               ? field_path + "/field.json"
                               : field_path;
  FieldArtifact artifact = read_field_artifact(path);
  const std::string mesh_path = mesh_override ? *mesh_override : artifact.mesh_path;
  const TriMesh mesh = load_mesh(mesh_path, artifact.mesh_format);
  if (mesh.num_nodes() != artifact.state.num_nodes())
    throw std::runtime_error("parametrize: mesh does not match the field artifact");
  const ParamPipelineResult p = parametrize(mesh, artifact.frames);
  write_param_outputs(out_dir, mesh, p, true);
  std::cout << "singularities: " << p.singularities.size() << "\n";
  std::cout << "integration error: " << p.param.integration_error << "\n";
  return 0;
}

int cmd_compare(const JobConfig& config) {
  const SolveOutputs smooth = run_solve(config, {1.0});
  const SolveOutputs integrable = run_solve(config, config.kappa_sequence);

  const ParamPipelineResult p_smooth = parametrize(smooth.mesh, smooth.frames);
  const ParamPipelineResult p_int = parametrize(integrable.mesh, integrable.frames);

  write_solve_outputs(config, config.out_dir + "/smooth", smooth);
  write_param_outputs(config.out_dir + "/smooth", smooth.mesh, p_smooth,
                      config.exports.isolines_svg);
  write_solve_outputs(config, config.out_dir + "/integrable", integrable);
  write_param_outputs(config.out_dir + "/integrable", integrable.mesh, p_int,
                      config.exports.isolines_svg);

  CompareReport rep;
  rep.smooth_error = p_smooth.param.integration_error;
  rep.integrable_error = p_int.param.integration_error;
  rep.both_negligible = rep.smooth_error < 1e-10 && rep.integrable_error < 1e-10;
  rep.ratio = rep.both_negligible ? 1.0 : rep.smooth_error / std::max(rep.integrable_error, 1e-300);
  rep.smooth_singularities = static_cast<int>(p_smooth.singularities.size());
  rep.integrable_singularities = static_cast<int>(p_int.singularities.size());
  write_compare_report(config.out_dir, rep);

  std::cout << "smooth integration error:     " << rep.smooth_error << "\n";
  std::cout << "integrable integration error: " << rep.integrable_error << "\n";
  std::cout << "ratio: " << rep.ratio << (rep.both_negligible ? " (both negligible)" : "") << "\n";
  return 0;
}

namespace {

bool gradient_check(const TriMesh& mesh, const FieldState& base, const EnergyParams& params,
                    int n_dirs, double* worst) {
  EnergyAssembler assembler(mesh);
  std::mt19937 rng(20240);
  std::normal_distribution<double> normal;
  const EnergyValue ev = assembler.total(base, params);
  if (ev.barrier) return false;
  *worst = 0;
  for (int d = 0; d < n_dirs; ++d) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(base.q.size());
    for (int i = 0; i < dir.size(); ++i)
      if (!base.fixed[i]) dir[i] = normal(rng);
    dir.normalize();
    const double h = 1e-6 * std::max(1.0, base.q.norm());
    FieldState plus = base, minus = base;
    plus.q += h * dir;
    minus.q -= h * dir;
    const double fp = assembler.total(plus, params).value;
    const double fm = assembler.total(minus, params).value;
    if (!std::isfinite(fp) || !std::isfinite(fm)) return false;
    const double fd = (fp - fm) / (2 * h);
    const double an = ev.grad.dot(dir);
    const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8});
    *worst = std::max(*worst, rel);
  }
  return *worst < 1e-5;
}

FieldState verify_state(const TriMesh& mesh) {
  FieldState state = sample_field(mesh, make_random_smooth_field(7));
  state.fixed = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(state.q.size(), false);
  return state;
}

}  // namespace

int cmd_verify(int threads, const std::string& out_dir) {
  int failures = 0;
  auto report = [&](const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!pass) ++failures;
  };

  {
    const BasisOracleReport r = basis_change_oracle();
    report("basis change vs dense quadrature", r.pass,
           "max matrix err " + std::to_string(r.max_matrix_error));
  }
  {
    const LieCoeffs& frozen = lie_coeffs();
    const LieCoeffs rebuilt = build_lie_coeffs();
    double err = 0;
    for (size_t i = 0; i < frozen.c.size(); ++i) err = std::max(err, std::abs(frozen.c[i] - rebuilt.c[i]));
    report("Lie coefficient snapshot", err < 1e-14, "max err " + std::to_string(err));
  }
  {
    double worst = 0;
    int n = 0;
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> uni(0.05, 0.95);
    for (unsigned seed = 0; n < 100 && seed < 400; ++seed) {
      const AnalyticField f = make_random_smooth_field(seed);
      const Vec2d p(uni(rng), uni(rng));
      const Vec2d oracle = lie_oracle(f.frame, p, 1e-5);
      if (oracle.norm() < 2e-2) continue;
      const Vec2d formula = lie_bracket(lie_coeffs(), f.q(p), f.grad_q(p));
      worst = std::max(worst, (formula - oracle).norm() / oracle.norm());
      ++n;
    }
    report("Lie operator vs finite-difference oracle", n >= 100 && worst < 1e-6,
           "n=" + std::to_string(n) + " worst rel err " + std::to_string(worst));
  }
  {
    const TriMesh mesh = make_square_mesh(8);
    const FieldState state = verify_state(mesh);
    double worst = 0;
    bool pass = gradient_check(mesh, state, EnergyParams{0.3, 0.5, 1e-12}, 20, &worst);
    report("energy gradients vs central differences", pass, "worst rel err " + std::to_string(worst));
  }
  {
    std::vector<TriMesh> meshes;
    for (int level : {2, 3, 4}) meshes.push_back(make_disk_mesh(level));
    const auto v3 = convergence_experiment(0.25, meshes, threads);
    const auto v5 = convergence_experiment(-0.25, meshes, threads);
    bool pass = true;
    for (size_t i = 0; i < meshes.size(); ++i) pass &= v5[i].e_lie > v3[i].e_lie;
    pass &= std::abs(v3[2].e_lie - v3[1].e_lie) < 0.1 * v3[2].e_lie;
    pass &= std::abs(v5[2].e_lie - v5[1].e_lie) < 0.1 * v5[2].e_lie;
    pass &= v3[2].max_integrand > v3[0].max_integrand && v5[2].max_integrand > v5[0].max_integrand;
    if (!out_dir.empty()) {
      write_text_file(out_dir + "/convergence_valence3.csv", convergence_csv(v3));
      write_text_file(out_dir + "/convergence_valence5.csv", convergence_csv(v5));
    }
    report("singular-field energy convergence", pass,
           "E3 " + std::to_string(v3[2].e_lie) + ", E5 " + std::to_string(v5[2].e_lie));
  }
  return failures;
}

int cmd_export(const std::string& field_path, const std::string& out_dir,
               const ExportToggles& toggles, const std::optional<std::string>& mesh_override) {
  const std::string path = std::filesystem::is_directory(field_path)
                               ? field_path + "/field.json"
                               : field_path;
  FieldArtifact artifact = read_field_artifact(path);
  const std::string mesh_path = mesh_override ? *mesh_override : artifact.mesh_path;
  const TriMesh mesh = load_mesh(mesh_path, artifact.mesh_format);
  if (toggles.frames_svg)
    write_text_file(out_dir + "/frames.svg", render_frames_svg(mesh, artifact.frames));
  if (toggles.glyphs_svg)
    write_text_file(out_dir + "/glyphs.svg", render_glyphs_svg(mesh, artifact.state));
  if (toggles.vtk)
    write_text_file(out_dir + "/field.vtk", render_field_vtk(mesh, artifact.state, artifact.frames));
  if (toggles.isolines_svg) {
    const ParamPipelineResult p = parametrize(mesh, artifact.frames);
    write_text_file(out_dir + "/isolines.svg", render_isolines_svg(mesh, p.cut, p.param));
  }
  return 0;
}

}  // namespace framefield
