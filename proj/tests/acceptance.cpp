// Acceptance suite: one pass/fail line per criterion. Exit code equals the
// number of failed criteria. An optional argument selects one criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <vector>

#include "cli_helpers.hpp"
#include "sgmap/analyze.hpp"
#include "sgmap/mesh.hpp"
#include "sgmap/pipeline.hpp"
#include "sgmap/reeb.hpp"

using namespace sgmap;
using namespace sgmap::testfix;

namespace {

struct Criterion {
  bool ok = true;
  std::vector<std::string> failures;
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
  }
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::string kWork = "acceptance_work";

// ---- 1. sphere recovery ----------------------------------------------------
void criterion1(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  JobConfig cfg = disk_config(1);
  cfg.mesh_res = 96;
  PipelineOptions opts;
  opts.no_timestamp = true;
  const PipelineResult res = run_full(cfg, opts);
  c.expect(res.passed, "full pipeline verdict is " + std::string(res.passed
               ? "verified" : "failed at " + res.failed_stage));
  const Doc& stages = res.report["stages"];
  c.expect(stages["mesh"]["summary"]["euler"] == 2, "mesh euler != 2");
  c.expect(stages["mesh"]["summary"]["components"] == 1, "mesh components != 1");
  c.expect(stages["verify_nonsingular"]["min_sample_grad"].get<double>() >= 1.0,
           "non-singularity margin < 1");
  c.expect(stages["fibers"]["passed"] == true, "fiber suite failed");
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 10.0, "runtime " + std::to_string(elapsed) + "s >= 10s");
}

// ---- 2. doubling identity --------------------------------------------------
void criterion2(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, Region>> regions = {
      {"disk", disk_region()}, {"annulus", annulus_region()},
      {"two-holed", two_holed_region()}};
  const std::map<std::string, int> expected_chi = {
      {"disk", 2}, {"annulus", 0}, {"two-holed", -2}};
  for (const auto& [name, region] : regions) {
    const Hypersurface h = build_basic(region, 1);
    const int chi_region = region_euler(region);
    const Box box = Box::product(h.region.bbox, h.bbox_y);
    const Mesh coarse = extract_isosurface(h.P, box, 96);
    const Mesh fine = extract_isosurface(h.P, box, 192);
    const int chi_c = euler_char(coarse);
    const int chi_f = euler_char(fine);
    c.expect(chi_c == chi_f, name + ": euler differs between resolutions 96/192");
    c.expect(chi_f == 2 * chi_region, name + ": euler != 2 * region_euler");
    c.expect(chi_f == expected_chi.at(name), name + ": euler != expected");
    c.expect(component_count(coarse) == 1 && component_count(fine) == 1,
             name + ": component count != 1");
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 60.0, "runtime " + std::to_string(elapsed) + "s >= 60s");
}

// ---- 3. interval case ------------------------------------------------------
void criterion3(Criterion& c) {
  {
    const Hypersurface h = build_basic(interval_region(), 2);
    const Box box = Box::product(h.region.bbox, h.bbox_y);
    const Mesh m = extract_isosurface(h.P, box, 96);
    c.expect(euler_char(m) == 2, "interval k=2: euler != 2");
    c.expect(component_count(m) == 1, "interval k=2: components != 1");
  }
  {
    const Hypersurface h = build_basic(two_interval_region(), 2);
    const Box box = Box::product(h.region.bbox, h.bbox_y);
    const Mesh m = extract_isosurface(h.P, box, 96);
    c.expect(component_count(m) == 2, "two-interval k=2: components != 2");
    const std::vector<int> chis = component_euler_chars(m);
    c.expect(chis == std::vector<int>({2, 2}),
             "two-interval k=2: per-component euler != {2,2}");
  }
}

// ---- 4. generalized construction (quartic fiber shape) ----------------------
void criterion4(Criterion& c) {
  JobConfig cfg = quartic_disk_config();
  const SpecValidation v = validate_vertical_spec(*cfg.vspec, cfg.k);
  c.expect(v.passed, "validate_vertical_spec failed");
  const Hypersurface h = build_generalized(cfg.region, *cfg.vspec);

  // every interior fiber is one circle, every boundary fiber a point
  std::vector<Eigen::VectorXd> interior;
  for_each_grid_node(h.region.bbox, 16, [&](const Eigen::VectorXd& x) {
    try {
      if (classify_point(h.region, x, h.region_tol).tag == PointTag::Interior)
        interior.push_back(x);
    } catch (const AmbiguousPointError&) {
    }
  });
  c.expect(!interior.empty(), "no interior base points");
  for (const auto& x : interior) {
    const FiberReport f = fiber_at(h, x);
    if (f.classification != FiberClass::Circle || f.components != 1 ||
        !f.euler_char || *f.euler_char != 0) {
      c.expect(false, "interior fiber not a single circle at x=(" +
                          std::to_string(x[0]) + "," + std::to_string(x[1]) + ")");
      break;
    }
  }
  for (const auto& xb : sample_boundary(h.region, 24)) {
    const FiberReport f = fiber_at(h, xb);
    if (f.classification != FiberClass::Point) {
      c.expect(false, "boundary fiber not a point");
      break;
    }
  }
  const SingularSetReport ss = singular_set_check(h, 1e-5);
  c.expect(ss.passed, "singular set check failed");
  c.expect(ss.hausdorff_to_boundary < 1e-5,
           "singular-set Hausdorff distance >= 1e-5");
}

// ---- 5. T choice -----------------------------------------------------------
void criterion5(Criterion& c) {
  const Region r = annulus_region();
  const double t = choose_T(r, 1.0);
  c.expect(t >= 0.26 && t <= 0.30, "choose_T(annulus, 1) = " + std::to_string(t) +
                                       " outside [0.26, 0.30]");
  const MultiPoly prod = product_of(r.boundary_polys);
  const double m = grid_max(prod, r.bbox, 512);
  c.expect(m / t <= 0.5 * (1.0 + 4e-16),
           "max(prod/T) over the 512^2 grid exceeds a/2");
}

// ---- 6. Poincare-Reeb ------------------------------------------------------
void criterion6(Criterion& c) {
  const auto count_kind = [](const ReebGraph& g, ReebVertexKind k) {
    int n = 0;
    for (const auto& v : g.vertices) n += v.kind == k;
    return n;
  };
  const auto kind_x = [](const ReebGraph& g, ReebVertexKind k, int which) {
    int seen = 0;
    for (const auto& v : g.vertices)
      if (v.kind == k && seen++ == which) return v.x;
    return 1e300;
  };

  const ReebGraph disk = poincare_reeb(disk_region(), 256);
  c.expect(disk.vertices.size() == 2 && disk.edges.size() == 1 && disk.betti1 == 0,
           "disk graph != (V,E,b1) = (2,1,0)");
  c.expect(std::abs(kind_x(disk, ReebVertexKind::Birth, 0) + 1.0) <= 1e-6 &&
               std::abs(kind_x(disk, ReebVertexKind::Death, 0) - 1.0) <= 1e-6,
           "disk event abscissae not within 1e-6 of +-1");

  const ReebGraph ann = poincare_reeb(annulus_region(), 256);
  c.expect(ann.vertices.size() == 4 && ann.edges.size() == 4 && ann.betti1 == 1,
           "annulus graph != (V,E,b1) = (4,4,1)");
  c.expect(std::abs(kind_x(ann, ReebVertexKind::Birth, 0) + 1.0) <= 1e-6 &&
               std::abs(kind_x(ann, ReebVertexKind::Split, 0) + 0.5) <= 1e-6 &&
               std::abs(kind_x(ann, ReebVertexKind::Merge, 0) - 0.5) <= 1e-6 &&
               std::abs(kind_x(ann, ReebVertexKind::Death, 0) - 1.0) <= 1e-6,
           "annulus event abscissae not within 1e-6 of the circle extremes");
  c.expect(count_kind(ann, ReebVertexKind::Split) == 1 &&
               count_kind(ann, ReebVertexKind::Merge) == 1,
           "annulus split/merge structure wrong");

  const ReebGraph two = poincare_reeb(two_holed_region(), 256);
  c.expect(two.betti1 == 2, "two-holed disk betti1 != 2");

  for (const ReebGraph* g : {&disk, &ann, &two})
    for (const auto& v : g->vertices)
      if (v.degree != 1 && v.degree != 3) c.expect(false, "vertex degree not in {1,3}");

  c.expect(disk.betti1 == 1 - region_euler(disk_region()) &&
               ann.betti1 == 1 - region_euler(annulus_region()) &&
               two.betti1 == 1 - region_euler(two_holed_region()),
           "betti1 != 1 - region_euler");
}

// ---- 7. collar identity ----------------------------------------------------
void criterion7(Criterion& c) {
  struct Case {
    std::string name;
    Region region;
    int k;
  };
  const std::vector<Case> basics = {{"disk", disk_region(), 1},
                                    {"annulus", annulus_region(), 1},
                                    {"two-holed", two_holed_region(), 1},
                                    {"interval", interval_region(), 2},
                                    {"two-interval", two_interval_region(), 2}};
  for (const Case& bc : basics) {
    const Hypersurface h = build_basic(bc.region, bc.k);
    const auto samples = sample_manifold(h, 1200, 42);
    c.expect(samples.size() >= 250, bc.name + ": fewer than 250 refined samples");
    double worst = 0.0;
    for (const SamplePoint& s : samples) {
      const double prod = eval(h.prod, Eigen::VectorXd(s.coords.head(h.n)));
      const double y2 = s.coords.tail(h.k).squaredNorm();
      worst = std::max(worst, std::abs(y2 - prod));
    }
    c.expect(worst <= 1e-8,
             bc.name + ": max |sum y^2 - prod f| = " + std::to_string(worst) + " > 1e-8");
  }

  JobConfig gen = quartic_disk_config();
  const Hypersurface h = build_generalized(gen.region, *gen.vspec);
  const auto samples = sample_manifold(h, 1200, 43);
  c.expect(samples.size() >= 250, "generalized: fewer than 250 refined samples");
  double worst = 0.0;
  for (const SamplePoint& s : samples) {
    const double level = eval(h.f0, eval(h.prod, Eigen::VectorXd(s.coords.head(h.n))) / h.T);
    const double fv = eval(h.fvert, Eigen::VectorXd(s.coords.tail(h.k)));
    worst = std::max(worst, std::abs(level - fv));
  }
  c.expect(worst <= 1e-8,
           "generalized: max |f0(prod/T) - fvert| = " + std::to_string(worst) + " > 1e-8");
}

// ---- 8. negative controls (CLI level, exit codes) ----------------------------
void criterion8(Criterion& c) {
  const std::string dup = write_config(duplicated_disk_config(), kWork, "dup.json");
  const CliResult r1 = run_cli(
      "verify --config " + dup + " --unchecked --samples 400 --no-timestamp", kWork);
  c.expect(r1.exit_code == 1, "duplicated-polynomial verify exit code != 1");
  c.expect(r1.err.find("verify_nonsingular") != std::string::npos,
           "duplicated-polynomial control did not fail at verify_nonsingular");

  const std::string swapped = write_config(swapped_annulus_config(), kWork, "swapped.json");
  const CliResult r2 = run_cli("certify --config " + swapped + " --no-timestamp", kWork);
  c.expect(r2.exit_code == 1, "swapped-annulus certify exit code != 1");
  c.expect(r2.err.find("certify") != std::string::npos,
           "swapped-annulus control did not fail at certify");

  const std::string bad = write_config(bad_f0_config(), kWork, "bad_f0.json");
  const CliResult r3 = run_cli("construct --config " + bad + " --no-timestamp", kWork);
  c.expect(r3.exit_code == 1, "f0=t^2 construct exit code != 1");
  c.expect(r3.err.find("validate_vertical_spec") != std::string::npos,
           "f0=t^2 control did not fail at validate_vertical_spec");
  const Doc report = Doc::parse(r3.out);
  c.expect(report["validate_vertical_spec"]["first_failed_condition"] == 2,
           "f0=t^2 did not fail condition (2)");
}

// ---- 9. numeric hygiene ------------------------------------------------------
void criterion9(Criterion& c) {
  // derivative vs central finite differences on 100 random polynomials:
  // the error must respect the C h^2 bound (C from the exact third
  // derivative, plus a cancellation floor), and where the truncation term
  // dominates the floor the observed decay must be quadratic.
  Rng rng(20250808);
  int decay_seen = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int nvars = 1 + static_cast<int>(rng.next_u64() % 3);
    std::vector<Term> terms;
    for (int t = 0; t < 6; ++t) {
      Exponents e(nvars);
      for (int i = 0; i < nvars; ++i)
        e[i] = static_cast<int>(rng.next_u64() % 5);
      terms.push_back({e, 2.0 * rng.next_double() - 1.0});
    }
    const MultiPoly p(nvars, terms);
    const int var = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(nvars));
    const MultiPoly d = partial_derivative(p, var);
    const MultiPoly d3 =
        partial_derivative(partial_derivative(partial_derivative(p, var), var), var);
    Eigen::VectorXd x(nvars);
    for (int i = 0; i < nvars; ++i) x[i] = 4.0 * rng.next_double() - 2.0;

    double value_scale = 0.0;  // sum of |term| at x, conditioning of the FD
    for (const Term& t : p.terms()) {
      double v = std::abs(t.coeff);
      for (int i = 0; i < nvars; ++i)
        for (int e2 = 0; e2 < t.exps[i]; ++e2) v *= std::abs(x[i]) + 1e-3;
      value_scale += v;
    }
    const auto fd_err = [&](double hstep) {
      Eigen::VectorXd xp = x, xm = x;
      xp[var] += hstep;
      xm[var] -= hstep;
      return std::abs(eval(d, x) - (eval(p, xp) - eval(p, xm)) / (2.0 * hstep));
    };
    const auto noise = [&](double hstep) { return 8.0 * 2.2e-16 * value_scale / hstep; };
    const double third = std::abs(eval(d3, x)) / 6.0;
    bool bound_ok = true;
    for (double hstep : {1e-3, 1e-4}) {
      if (fd_err(hstep) > 2.0 * third * hstep * hstep + noise(hstep)) bound_ok = false;
    }
    if (!bound_ok) {
      c.expect(false, "finite-difference error exceeds the C h^2 + noise bound on "
                      "polynomial " + std::to_string(rep));
      break;
    }
    const double e3 = fd_err(1e-3);
    const double e4 = fd_err(1e-4);
    if (e4 > 8.0 * noise(1e-4)) {
      if (e3 / e4 < 25.0) {
        c.expect(false, "observable decay is sub-quadratic on polynomial " +
                            std::to_string(rep));
        break;
      }
      ++decay_seen;
    }
  }
  c.expect(decay_seen > 30, "quadratic decay rarely observable (test degenerate)");

  // byte-reproducible reports under a fixed seed
  JobConfig cfg = interval_config(1);
  cfg.mesh_res = 48;
  cfg.samples = 300;
  cfg.seed = 99;
  const std::string path = write_config(cfg, kWork, "interval_full.json");
  const CliResult a = run_cli(
      "full --config " + path + " --out " + kWork + "/fa --no-timestamp --seed 99", kWork);
  const CliResult b = run_cli(
      "full --config " + path + " --out " + kWork + "/fb --no-timestamp --seed 99", kWork);
  c.expect(a.exit_code == 0 && b.exit_code == 0, "reproducibility runs failed");
  c.expect(slurp(kWork + "/fa/pipeline_report.json") ==
               slurp(kWork + "/fb/pipeline_report.json"),
           "pipeline reports differ between identical runs");
  c.expect(!slurp(kWork + "/fa/pipeline_report.json").empty(), "empty report");

  const std::string ann = write_config(annulus_config(), kWork, "annulus.json");
  run_cli("reeb --config " + ann + " --out " + kWork + "/r1 --no-timestamp", kWork);
  run_cli("reeb --config " + ann + " --out " + kWork + "/r2 --no-timestamp", kWork);
  c.expect(slurp(kWork + "/r1/reeb_summary.json") == slurp(kWork + "/r2/reeb_summary.json"),
           "reeb reports differ between identical runs");
}

const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> kCriteria = {
    {"sphere recovery (disk, k=1)", criterion1},
    {"doubling identity chi(M0) = 2 chi(region)", criterion2},
    {"interval regions with k=2", criterion3},
    {"generalized construction, quartic fiber shape", criterion4},
    {"choice of T on the annulus", criterion5},
    {"Poincare-Reeb graphs", criterion6},
    {"collar identity on refined samples", criterion7},
    {"negative controls fail at the named stages", criterion8},
    {"numeric hygiene and reproducibility", criterion9},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  int failures = 0;
  for (size_t i = 0; i < kCriteria.size(); ++i) {
    const int num = static_cast<int>(i) + 1;
    if (only != 0 && only != num) continue;
    Criterion c;
    try {
      kCriteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %d (%s): %s\n", num, kCriteria[i].first.c_str(),
                c.ok ? "PASS" : "FAIL");
    for (const std::string& f : c.failures) std::printf("    - %s\n", f.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  }
  return failures;
}
