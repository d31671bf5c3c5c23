#pragma once

// Artifact readers/writers: JSON reports, legacy-ASCII VTK point fields and
// SVG renderings of frames, tensor glyphs and parametrization isolines.
// Reports are byte-reproducible for identical inputs; wall-clock timings go
// to a separate sidecar.

#include <string>

#include "framefield/param.hpp"
#include "framefield/solver.hpp"

namespace framefield {

struct FieldArtifact {
  std::string mesh_path;
  std::string mesh_format{"auto"};
  std::string mode{"iso"};
  FieldState state;
  FrameField frames;
};

void write_field_artifact(const std::string& dir, const FieldArtifact& artifact);
FieldArtifact read_field_artifact(const std::string& path);

void write_solve_report(const std::string& dir, const SolveReport& report);
void write_timings(const std::string& dir, const SolveReport& report);

void write_singularities(const std::string& dir, const std::vector<Singularity>& sing);
void write_cut_graph(const std::string& dir, const TriMesh& mesh, const CutGraph& cut);
void write_param_artifact(const std::string& dir, const TriMesh& mesh, const CutGraph& cut,
                          const SeamlessParam& param);

struct CompareReport {
  double smooth_error{0};
  double integrable_error{0};
  double ratio{1};
  bool both_negligible{false};
  int smooth_singularities{0};
  int integrable_singularities{0};
};

void write_compare_report(const std::string& dir, const CompareReport& report);

// SVG renderings.
std::string render_frames_svg(const TriMesh& mesh, const FrameField& frames);
std::string render_glyphs_svg(const TriMesh& mesh, const FieldState& state);
std::string render_isolines_svg(const TriMesh& mesh, const CutGraph& cut,
                                const SeamlessParam& param);

// Legacy ASCII VTK.
std::string render_field_vtk(const TriMesh& mesh, const FieldState& state,
                             const FrameField& frames);
std::string render_param_vtk(const TriMesh& mesh, const CutGraph& cut, const SeamlessParam& param);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// JSON mesh serialization (the format load_mesh reads back).
std::string mesh_to_json_text(const TriMesh& mesh);

}  // namespace framefield
