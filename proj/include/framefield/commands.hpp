#pragma once

// Commands behind the CLI: solve, parametrize, compare, verify, export.

#include <optional>
#include <string>

#include "framefield/io.hpp"

namespace framefield {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExportToggles {
  bool frames_svg{true};
  bool glyphs_svg{false};
  bool isolines_svg{true};
  bool vtk{true};
};

struct JobConfig {
  std::string mesh_path;
  std::string mesh_format{"auto"};
  std::string mode{"iso"};  // iso | aniso
  BoundaryConstraints constraints;
  double epsilon{0};  // <= 0: auto (max edge length)
  std::vector<double> kappa_sequence{1.0, 1e-1, 1e-2, 1e-3, 1e-4, 0.0};
  LbfgsOptions lbfgs;
  int threads{4};
  std::string out_dir{"out"};
  ExportToggles exports;
};

// Parses the JSON job config; CLI overrides are applied by the caller.
JobConfig load_job_config(const std::string& path);

// Validates tags against the mesh and runs the full schedule; writes
// field.json, report.json, timings and the enabled renderings.
int cmd_solve(const JobConfig& config);

// From a solve artifact to singularities, cut graph, (u,v) and isolines.
int cmd_parametrize(const std::string& field_path, const std::string& out_dir,
                    const std::optional<std::string>& mesh_override);

// Smooth (kappa = 1 only) versus the full schedule, both parametrized.
int cmd_compare(const JobConfig& config);

// Built-in oracle suite: basis change, Lie coefficients, oracle sweep,
// gradient checks, convergence experiment.  Returns the number of failures.
int cmd_verify(int threads, const std::string& out_dir);

int cmd_export(const std::string& field_path, const std::string& out_dir,
               const ExportToggles& toggles, const std::optional<std::string>& mesh_override);

}  // namespace framefield
