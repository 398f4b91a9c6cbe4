#include "sgmap/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace sgmap {

namespace {

void stamp(Doc& report, const PipelineOptions& opts) {
  if (!opts.no_timestamp) report["timestamp"] = iso_timestamp();
}

void ensure_out(const PipelineOptions& opts) {
  if (!opts.out_dir.empty()) std::filesystem::create_directories(opts.out_dir);
}

std::string out_path(const PipelineOptions& opts, const std::string& name) {
  return opts.out_dir + "/" + name;
}

void fail(PipelineResult& res, const std::string& stage) {
  if (res.passed) {
    res.passed = false;
    res.failed_stage = stage;
  }
}

Doc error_doc(const std::string& message) {
  Doc d;
  d["passed"] = false;
  d["error"] = message;
  return d;
}

// certificate + optional margin gate
Doc certify_stage(const JobConfig& cfg, const PipelineOptions& opts, bool& ok) {
  const RegionCertificate cert = certify(cfg.region);
  Doc d = to_doc(cert);
  ok = cert.passed;
  if (opts.require_margin > 0.0) {
    const bool margin_ok = cert.grad_margin >= opts.require_margin;
    d["require_margin"] = opts.require_margin;
    d["margin_ok"] = margin_ok;
    ok = ok && margin_ok;
  }
  return d;
}

Hypersurface construct_hypersurface(const JobConfig& cfg) {
  // the certificate gate is handled by the caller; skip it here
  if (cfg.vspec) return build_generalized(cfg.region, *cfg.vspec, false);
  return build_basic(cfg.region, cfg.k, false);
}

Doc construct_summary(const Hypersurface& h) {
  Doc d;
  d["n"] = h.n;
  d["k"] = h.k;
  d["kind"] = h.generalized ? "generalized" : "basic";
  d["T"] = h.T;
  d["P_terms"] = h.P.terms().size();
  d["P_degree"] = h.P.degree();
  d["bbox_y"] = to_doc(h.bbox_y);
  d["level_max"] = h.level_max;
  return d;
}

void write_hypersurface_artifacts(const Hypersurface& h, const PipelineOptions& opts) {
  if (opts.out_dir.empty()) return;
  write_doc(to_doc(h), out_path(opts, "hypersurface.json"));
  std::ofstream txt(out_path(opts, "defining_poly.txt"));
  txt << to_text(h.P);
}

// The four verification stages; returns the failed stage name or "".
std::string verify_stages(const Hypersurface& h, int samples, uint64_t seed,
                          const PipelineOptions& opts, Doc& stages) {
  std::vector<SamplePoint> pts;
  try {
    pts = sample_manifold(h, samples, seed);
    const NonsingularReport ns = verify_nonsingular(h, pts);
    stages["verify_nonsingular"] = to_doc(ns);
    if (!ns.passed) return "verify_nonsingular";
  } catch (const Error& e) {
    stages["verify_nonsingular"] = error_doc(e.what());
    return "verify_nonsingular";
  }

  try {
    const SingularSetReport ss = singular_set_check(h, opts.singular_tol);
    stages["singular_set"] = to_doc(ss);
    if (!ss.passed) return "singular_set";
  } catch (const Error& e) {
    stages["singular_set"] = error_doc(e.what());
    return "singular_set";
  }

  try {
    const FiberSuiteReport fs = run_fiber_suite(h);
    stages["fibers"] = to_doc(fs);
    if (!fs.passed) return "fibers";
  } catch (const Error& e) {
    stages["fibers"] = error_doc(e.what());
    return "fibers";
  }

  try {
    const CollarReport cr = collar_model_check(h, opts.collar_band);
    stages["collar"] = to_doc(cr);
    if (!cr.passed) return "collar";
  } catch (const Error& e) {
    stages["collar"] = error_doc(e.what());
    return "collar";
  }
  return "";
}

// Extraction at mesh_res and at 2 * mesh_res; topology must agree.
Doc mesh_stage(const Hypersurface& h, int mesh_res, const PipelineOptions& opts,
               bool& ok, bool write_obj) {
  Doc d;
  ok = true;
  const int total_dim = h.n + h.k;
  if (total_dim != 2 && total_dim != 3) {
    d["skipped"] = "total dimension " + std::to_string(total_dim) +
                   " is not meshable (2-D and 3-D only)";
    return d;
  }
  const Box box = Box::product(h.region.bbox, h.bbox_y);
  const Mesh coarse = extract_isosurface(h.P, box, mesh_res);
  const Mesh fine = extract_isosurface(h.P, box, 2 * mesh_res);
  d["res"] = mesh_res;
  d["summary"] = mesh_summary(coarse);
  d["res_2x"] = 2 * mesh_res;
  d["summary_2x"] = mesh_summary(fine);
  const bool stable = d["summary"]["euler"] == d["summary_2x"]["euler"] &&
                      d["summary"]["components"] == d["summary_2x"]["components"];
  d["stable"] = stable;
  d["per_component_euler"] = component_euler_chars(fine);
  ok = stable;

  // doubling oracle: chi(M0) = 2 chi(region) for the (1,2) and (2,1) shapes
  if ((h.n == 1 && h.k == 2) || (h.n == 2 && h.k == 1)) {
    const int chi_region = region_euler(h.region);
    d["region_euler"] = chi_region;
    d["expected_euler"] = 2 * chi_region;
    const bool matches = d["summary_2x"]["euler"] == Doc(2 * chi_region);
    d["euler_matches_expected"] = matches;
    ok = ok && matches;
  } else {
    d["region_euler"] = nullptr;
    d["expected_euler"] = nullptr;
    d["euler_matches_expected"] = nullptr;
  }

  if (write_obj && !opts.out_dir.empty() && total_dim == 3 && !fine.empty()) {
    export_obj(fine, out_path(opts, "m0.obj"));
    d["obj"] = "m0.obj";
  }
  return d;
}

Doc reeb_stage(const Region& region, int k, int sweep_res,
               const PipelineOptions& opts, bool& ok, bool write_dot) {
  Doc d;
  ok = true;
  Region r = region;
  d["sweep_res"] = sweep_res;
  d["sweep_angle_deg"] = opts.sweep_angle_deg;
  if (opts.sweep_angle_deg != 0.0) r = rotated_region(region, opts.sweep_angle_deg);

  const ReebGraph g = poincare_reeb(r, sweep_res);
  d["graph"] = to_doc(g);
  bool degrees_ok = true;
  for (const ReebVertex& v : g.vertices)
    if (v.degree != 1 && v.degree != 3) degrees_ok = false;
  d["degrees_ok"] = degrees_ok;

  // b1 = C - chi for a certified region with C connected pieces (1 - chi in
  // the connected case)
  const int chi_region = region_euler(r);
  d["region_euler"] = chi_region;
  d["betti1"] = g.betti1;
  const bool betti_ok = g.betti1 == g.components - chi_region;
  d["betti1_matches_components_minus_euler"] = betti_ok;

  d["composed"] = k >= 2 ? "isomorphic to the region graph (connected fibers)"
                         : "not supported for k = 1 (disconnected S^0 fibers)";

  ok = degrees_ok && betti_ok;
  if (write_dot && !opts.out_dir.empty()) {
    export_dot(g, out_path(opts, "reeb.dot"));
    d["dot"] = "reeb.dot";
  }
  return d;
}

}  // namespace

Region rotated_region(const Region& r, double angle_deg) {
  if (r.dim != 2) throw std::invalid_argument("rotated_region: dim-2 regions only");
  const double th = angle_deg * M_PI / 180.0;
  Eigen::MatrixXd rot(2, 2);
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  Region out = r;
  out.boundary_polys.clear();
  for (const MultiPoly& f : r.boundary_polys)
    out.boundary_polys.push_back(linear_substitution(f, rot));
  const Eigen::VectorXd center = 0.5 * (r.bbox.lo + r.bbox.hi);
  const double radius = 0.5 * (r.bbox.hi - r.bbox.lo).norm();
  const Eigen::VectorXd new_center = rot.transpose() * center;
  out.bbox.lo = new_center - Eigen::VectorXd::Constant(2, radius);
  out.bbox.hi = new_center + Eigen::VectorXd::Constant(2, radius);
  return out;
}

PipelineResult run_certify(const JobConfig& cfg, const PipelineOptions& opts) {
  ensure_out(opts);
  PipelineResult res;
  res.report["command"] = "certify";
  stamp(res.report, opts);
  bool ok = false;
  res.report["certificate"] = certify_stage(cfg, opts, ok);
  if (!ok) fail(res, "certify");
  if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "certificate.json"));
  return res;
}

PipelineResult run_construct(const JobConfig& cfg, const PipelineOptions& opts) {
  ensure_out(opts);
  PipelineResult res;
  res.report["command"] = "construct";
  stamp(res.report, opts);

  if (!opts.unchecked) {
    bool cert_ok = false;
    res.report["certificate"] = certify_stage(cfg, opts, cert_ok);
    if (!cert_ok) {
      fail(res, "certify");
      if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "construct_report.json"));
      return res;
    }
  }

  if (cfg.vspec) {
    const SpecValidation v = validate_vertical_spec(*cfg.vspec, cfg.k);
    res.report["validate_vertical_spec"] = to_doc(v);
    if (!v.passed) {
      fail(res, "validate_vertical_spec");
      if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "construct_report.json"));
      return res;
    }
  }

  try {
    const Hypersurface h = construct_hypersurface(cfg);
    res.report["construct"] = construct_summary(h);
    write_hypersurface_artifacts(h, opts);
  } catch (const Error& e) {
    res.report["construct"] = error_doc(e.what());
    fail(res, "construct");
  }
  if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "construct_report.json"));
  return res;
}

PipelineResult run_verify(const JobConfig& cfg, const PipelineOptions& opts) {
  ensure_out(opts);
  PipelineResult res;
  res.report["command"] = "verify";
  stamp(res.report, opts);

  if (!opts.unchecked) {
    bool cert_ok = false;
    res.report["certificate"] = certify_stage(cfg, opts, cert_ok);
    if (!cert_ok) {
      fail(res, "certify");
      if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "verify_report.json"));
      return res;
    }
  }
  if (cfg.vspec) {
    const SpecValidation v = validate_vertical_spec(*cfg.vspec, cfg.k);
    res.report["validate_vertical_spec"] = to_doc(v);
    if (!v.passed) {
      fail(res, "validate_vertical_spec");
      if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "verify_report.json"));
      return res;
    }
  }

  try {
    const Hypersurface h = construct_hypersurface(cfg);
    res.report["construct"] = construct_summary(h);
    Doc stages = Doc::object();
    const std::string bad = verify_stages(h, cfg.samples, cfg.seed, opts, stages);
    res.report["stages"] = std::move(stages);
    if (!bad.empty()) fail(res, bad);
  } catch (const Error& e) {
    res.report["construct"] = error_doc(e.what());
    fail(res, "construct");
  }
  if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "verify_report.json"));
  return res;
}

PipelineResult run_verify_hypersurface(const Hypersurface& h, int samples,
                                       uint64_t seed, const PipelineOptions& opts) {
  ensure_out(opts);
  PipelineResult res;
  res.report["command"] = "verify";
  stamp(res.report, opts);
  res.report["construct"] = construct_summary(h);
  Doc stages = Doc::object();
  const std::string bad = verify_stages(h, samples, seed, opts, stages);
  res.report["stages"] = std::move(stages);
  if (!bad.empty()) fail(res, bad);
  if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "verify_report.json"));
  return res;
}

PipelineResult run_mesh(const JobConfig& cfg, const PipelineOptions& opts) {
  ensure_out(opts);
  PipelineResult res;
  res.report["command"] = "mesh";
  stamp(res.report, opts);
  if (!opts.unchecked) {
    bool cert_ok = false;
    res.report["certificate"] = certify_stage(cfg, opts, cert_ok);
    if (!cert_ok) {
      fail(res, "certify");
      if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "mesh_summary.json"));
      return res;
    }
  }
  try {
    const Hypersurface h = construct_hypersurface(cfg);
    bool ok = false;
    res.report["mesh"] = mesh_stage(h, cfg.mesh_res, opts, ok, true);
    if (!ok) fail(res, "mesh");
  } catch (const Error& e) {
    res.report["mesh"] = error_doc(e.what());
    fail(res, "mesh");
  }
  if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "mesh_summary.json"));
  return res;
}

PipelineResult run_mesh_hypersurface(const Hypersurface& h, int mesh_res,
                                     const PipelineOptions& opts) {
  ensure_out(opts);
  PipelineResult res;
  res.report["command"] = "mesh";
  stamp(res.report, opts);
  try {
    bool ok = false;
    res.report["mesh"] = mesh_stage(h, mesh_res, opts, ok, true);
    if (!ok) fail(res, "mesh");
  } catch (const Error& e) {
    res.report["mesh"] = error_doc(e.what());
    fail(res, "mesh");
  }
  if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "mesh_summary.json"));
  return res;
}

PipelineResult run_reeb(const JobConfig& cfg, const PipelineOptions& opts) {
  ensure_out(opts);
  PipelineResult res;
  res.report["command"] = "reeb";
  stamp(res.report, opts);
  if (cfg.region.dim != 2) {
    res.report["reeb"] = error_doc("reeb sweeps require a dim-2 region");
    fail(res, "reeb");
    return res;
  }
  bool cert_ok = false;
  res.report["certificate"] = certify_stage(cfg, opts, cert_ok);
  if (!cert_ok) {
    fail(res, "certify");
    if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "reeb_summary.json"));
    return res;
  }
  try {
    bool ok = false;
    res.report["reeb"] = reeb_stage(cfg.region, cfg.k, cfg.sweep_res, opts, ok, true);
    if (!ok) fail(res, "reeb");
  } catch (const Error& e) {
    res.report["reeb"] = error_doc(e.what());
    fail(res, "reeb");
  }
  if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "reeb_summary.json"));
  return res;
}

PipelineResult run_full(const JobConfig& cfg, const PipelineOptions& opts) {
  ensure_out(opts);
  PipelineResult res;
  res.report["command"] = "full";
  stamp(res.report, opts);
  res.report["config"] = to_doc(cfg);
  Doc stages = Doc::object();

  bool cert_ok = false;
  if (!opts.unchecked) {
    stages["certify"] = certify_stage(cfg, opts, cert_ok);
    if (!cert_ok) fail(res, "certify");
  } else {
    stages["certify"] = "skipped (unchecked)";
    cert_ok = true;
  }

  Hypersurface h;
  bool have_h = false;
  if (res.passed) {
    if (cfg.vspec) {
      const SpecValidation v = validate_vertical_spec(*cfg.vspec, cfg.k);
      stages["validate_vertical_spec"] = to_doc(v);
      if (!v.passed) fail(res, "validate_vertical_spec");
    }
    if (res.passed) {
      try {
        h = construct_hypersurface(cfg);
        have_h = true;
        stages["construct"] = construct_summary(h);
        write_hypersurface_artifacts(h, opts);
      } catch (const Error& e) {
        stages["construct"] = error_doc(e.what());
        fail(res, "construct");
      }
    }
  }

  if (res.passed && have_h) {
    const std::string bad = verify_stages(h, cfg.samples, cfg.seed, opts, stages);
    if (!bad.empty()) fail(res, bad);
  }

  if (res.passed && have_h) {
    try {
      bool ok = false;
      stages["mesh"] = mesh_stage(h, cfg.mesh_res, opts, ok, true);
      if (!ok) fail(res, "mesh");
    } catch (const Error& e) {
      stages["mesh"] = error_doc(e.what());
      fail(res, "mesh");
    }
  }

  if (res.passed && cfg.region.dim == 2) {
    try {
      bool ok = false;
      stages["reeb"] = reeb_stage(cfg.region, cfg.k, cfg.sweep_res, opts, ok, true);
      if (!ok) fail(res, "reeb");
    } catch (const Error& e) {
      stages["reeb"] = error_doc(e.what());
      fail(res, "reeb");
    }
  } else if (res.passed) {
    stages["reeb"] = "skipped (dim-1 region)";
  }

  res.report["stages"] = std::move(stages);
  res.report["verdict"] = res.passed ? "special_generic_verified" : "failed";
  res.report["failed_stage"] = res.passed ? Doc(nullptr) : Doc(res.failed_stage);
  if (!opts.out_dir.empty()) write_doc(res.report, out_path(opts, "pipeline_report.json"));
  return res;
}

}  // namespace sgmap
