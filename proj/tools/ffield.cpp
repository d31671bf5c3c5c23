// Frame-field CLI: solve, parametrize, compare, verify, export.

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "framefield/commands.hpp"

using namespace framefield;

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::string> mesh;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<std::string> epsilon;
  std::optional<int> threads;
};

JobConfig make_config(const CommonOpts& o) {
  JobConfig c = load_job_config(o.config_path);
  if (o.mesh) c.mesh_path = *o.mesh;
  if (o.out) c.out_dir = *o.out;
  if (o.mode) {
    if (*o.mode != "iso" && *o.mode != "aniso") throw ConfigError("--mode must be iso or aniso");
    c.mode = *o.mode;
  }
  if (o.epsilon) {
    if (*o.epsilon == "auto")
      c.epsilon = 0;
    else
      c.epsilon = std::stod(*o.epsilon);
  }
  if (o.threads) c.threads = *o.threads;
  return c;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "job config (JSON)")->required();
  cmd->add_option("--mesh", o.mesh, "mesh path override");
  cmd->add_option("--out", o.out, "output directory override");
  cmd->add_option("--mode", o.mode, "iso|aniso override");
  cmd->add_option("--epsilon", o.epsilon, "odeco penalty length or 'auto'");
  cmd->add_option("--threads", o.threads, "assembly threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"integrable frame fields and seamless parametrization"};
  app.require_subcommand(1);

  CommonOpts solve_opts, compare_opts;
  CLI::App* solve = app.add_subcommand("solve", "compute a frame field");
  add_common(solve, solve_opts);

  CLI::App* compare = app.add_subcommand("compare", "smooth vs integrable comparison");
  add_common(compare, compare_opts);

  std::string field_path, param_out = "out";
  std::optional<std::string> param_mesh;
  CLI::App* param = app.add_subcommand("parametrize", "integrate a solved frame field");
  param->add_option("--field", field_path, "field artifact (field.json or its directory)")->required();
  param->add_option("--out", param_out, "output directory");
  param->add_option("--mesh", param_mesh, "mesh path override");

  int verify_threads = 4;
  std::string verify_out = "out";
  CLI::App* verify = app.add_subcommand("verify", "run the built-in oracle suite");
  verify->add_option("--threads", verify_threads, "assembly threads");
  verify->add_option("--out", verify_out, "directory for the convergence CSVs");

  std::string export_field, export_out = "out";
  std::optional<std::string> export_mesh;
  bool exp_frames = true, exp_glyphs = true, exp_iso = true, exp_vtk = true;
  CLI::App* exp = app.add_subcommand("export", "re-render artifacts");
  exp->add_option("--field", export_field, "field artifact")->required();
  exp->add_option("--out", export_out, "output directory");
  exp->add_option("--mesh", export_mesh, "mesh path override");
  exp->add_flag("--frames,!--no-frames", exp_frames, "frame segments SVG");
  exp->add_flag("--glyphs,!--no-glyphs", exp_glyphs, "polynomial glyph SVG");
  exp->add_flag("--isolines,!--no-isolines", exp_iso, "isoline SVG");
  exp->add_flag("--vtk,!--no-vtk", exp_vtk, "VTK point fields");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(make_config(solve_opts));
    if (compare->parsed()) return cmd_compare(make_config(compare_opts));
    if (param->parsed()) return cmd_parametrize(field_path, param_out, param_mesh);
    if (verify->parsed()) {
      const int failures = cmd_verify(verify_threads, verify_out);
      if (failures > 0) std::cerr << failures << " verification failures\n";
      return failures > 0 ? 1 : 0;
    }
    if (exp->parsed())
      return cmd_export(export_field, export_out,
                        ExportToggles{exp_frames, exp_glyphs, exp_iso, exp_vtk}, export_mesh);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
