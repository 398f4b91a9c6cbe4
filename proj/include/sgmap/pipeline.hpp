#pragma once
// Orchestration of the certify -> construct -> verify -> mesh -> reeb
// pipeline with report documents and artifact output. The CLI is a thin
// wrapper around these runners.

#include <string>

#include "sgmap/io.hpp"

namespace sgmap {

struct PipelineOptions {
  std::string out_dir;          // empty: no artifact files
  bool no_timestamp = false;
  double require_margin = 0.0;  // certify gradient-margin gate, 0 disables
  double sweep_angle_deg = 0.0;
  bool unchecked = false;       // skip the certificate gate before construct
  double singular_tol = 1e-5;
  double collar_band = 0.05;
};

struct PipelineResult {
  Doc report;
  bool passed = true;
  std::string failed_stage;  // empty when passed
};

PipelineResult run_certify(const JobConfig& cfg, const PipelineOptions& opts);
PipelineResult run_construct(const JobConfig& cfg, const PipelineOptions& opts);
PipelineResult run_verify(const JobConfig& cfg, const PipelineOptions& opts);
PipelineResult run_verify_hypersurface(const Hypersurface& h, int samples,
                                       uint64_t seed, const PipelineOptions& opts);
PipelineResult run_mesh(const JobConfig& cfg, const PipelineOptions& opts);
PipelineResult run_mesh_hypersurface(const Hypersurface& h, int mesh_res,
                                     const PipelineOptions& opts);
PipelineResult run_reeb(const JobConfig& cfg, const PipelineOptions& opts);
PipelineResult run_full(const JobConfig& cfg, const PipelineOptions& opts);

/// Region with the sweep axis rotated by angle_deg (dim 2 only); boundary
/// polynomials are rewritten by linear substitution and the bbox becomes a
/// covering square.
Region rotated_region(const Region& r, double angle_deg);

}  // namespace sgmap
