// sgmap: construct real algebraic hypersurfaces from boundary polynomials
// and verify that the coordinate projection restricted to them behaves like
// a special generic map (sphere fibers inside, point fibers on the boundary,
// singular set over the region boundary, expected global topology).
//
// Exit codes: 0 success, 1 verification failure (stderr names the failing
// stage), 2 usage or configuration error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sgmap/pipeline.hpp"

using namespace sgmap;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string hypersurface_path;
  std::string out_dir;
  std::string csv_path;
  int degree = 2;
  int grid_res = -1;
  int mesh_res = -1;
  int sweep_res = -1;
  int samples = -1;
  uint64_t seed = 0;
  bool have_seed = false;
  PipelineOptions opts;
};

JobConfig load_config(const CommonArgs& args) {
  if (args.config_path.empty()) throw ConfigError("--config is required");
  JobConfig cfg = jobconfig_from_doc(load_doc(args.config_path));
  if (args.grid_res > 0) cfg.region.grid_res = args.grid_res;
  if (args.mesh_res > 0) cfg.mesh_res = args.mesh_res;
  if (args.sweep_res > 0) cfg.sweep_res = args.sweep_res;
  if (args.samples > 0) cfg.samples = args.samples;
  if (args.have_seed) cfg.seed = args.seed;
  return cfg;
}

int finish(const PipelineResult& res) {
  std::cout << res.report.dump(2) << std::endl;
  if (!res.passed) {
    std::cerr << "failed stage: " << res.failed_stage << std::endl;
    return 1;
  }
  return 0;
}

int run_fit(const CommonArgs& args) {
  if (args.csv_path.empty()) throw ConfigError("fit: --csv is required");
  std::ifstream in(args.csv_path);
  if (!in) throw ConfigError("fit: cannot open " + args.csv_path);
  std::vector<Eigen::VectorXd> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    Eigen::VectorXd x(static_cast<int>(row.size()));
    for (size_t i = 0; i < row.size(); ++i) x[static_cast<int>(i)] = row[i];
    samples.push_back(std::move(x));
  }
  if (samples.empty()) throw ConfigError("fit: no points in " + args.csv_path);

  PipelineResult res;
  res.report["command"] = "fit";
  if (!args.opts.no_timestamp) res.report["timestamp"] = iso_timestamp();
  res.report["samples"] = samples.size();
  res.report["degree"] = args.degree;
  try {
    const BoundaryFit fit = fit_boundary(samples, args.degree);
    res.report["poly"] = to_doc(fit.poly);
    res.report["rms_residual"] = fit.rms_residual;
    res.report["min_gradient_norm"] = fit.min_gradient_norm;
    if (!args.opts.out_dir.empty()) {
      std::filesystem::create_directories(args.opts.out_dir);
      write_doc(res.report, args.opts.out_dir + "/fit_report.json");
      std::ofstream txt(args.opts.out_dir + "/fit_poly.txt");
      txt << to_text(fit.poly);
    }
  } catch (const Error& e) {
    res.report["error"] = e.what();
    res.passed = false;
    res.failed_stage = "fit";
  }
  return finish(res);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"real algebraic hypersurfaces with special generic projections"};
  app.require_subcommand(1);

  CommonArgs args;

  auto add_common = [&](CLI::App* cmd, bool with_config = true) {
    if (with_config) cmd->add_option("--config", args.config_path, "job configuration document");
    cmd->add_option("--out", args.out_dir, "output directory for artifacts");
    cmd->add_flag("--no-timestamp", args.opts.no_timestamp,
                  "omit the timestamp so reports are byte-reproducible");
  };

  CLI::App* certify = app.add_subcommand("certify", "check the region sign conditions");
  add_common(certify);
  certify->add_option("--grid-res", args.grid_res, "grid resolution per axis");
  certify->add_option("--require-margin", args.opts.require_margin,
                      "minimum boundary gradient margin for a pass");

  CLI::App* construct = app.add_subcommand("construct", "emit the defining polynomial");
  add_common(construct);
  construct->add_option("--grid-res", args.grid_res, "grid resolution per axis");
  construct->add_flag("--unchecked", args.opts.unchecked, "skip the certificate gate");

  CLI::App* verify = app.add_subcommand("verify", "non-singularity, singular set, fibers, collar");
  add_common(verify);
  verify->add_option("--hypersurface", args.hypersurface_path,
                     "verify a previously constructed hypersurface document");
  verify->add_option("--samples", args.samples, "manifold sample count");
  verify->add_option("--seed", args.seed, "sampling seed")->each([&](const std::string&) {
    args.have_seed = true;
  });
  verify->add_option("--grid-res", args.grid_res, "grid resolution per axis");
  verify->add_flag("--unchecked", args.opts.unchecked, "skip the certificate gate");

  CLI::App* mesh = app.add_subcommand("mesh", "extract the hypersurface mesh and topology");
  add_common(mesh);
  mesh->add_option("--hypersurface", args.hypersurface_path,
                   "mesh a previously constructed hypersurface document");
  mesh->add_option("--mesh-res", args.mesh_res, "mesh resolution per axis");
  mesh->add_flag("--unchecked", args.opts.unchecked, "skip the certificate gate");

  CLI::App* reeb = app.add_subcommand("reeb", "Poincare-Reeb graph of the region sweep");
  add_common(reeb);
  reeb->add_option("--sweep-res", args.sweep_res, "sweep slice count");
  reeb->add_option("--sweep-angle", args.opts.sweep_angle_deg,
                   "rotate the sweep axis by this many degrees");

  CLI::App* fit = app.add_subcommand("fit", "least-squares implicit boundary fit from CSV");
  add_common(fit, false);
  fit->add_option("--csv", args.csv_path, "sample points, one comma-separated point per line")
      ->required();
  fit->add_option("--degree", args.degree, "total degree of the fitted polynomial");

  CLI::App* full = app.add_subcommand("full", "entire pipeline with a verdict");
  add_common(full);
  full->add_option("--grid-res", args.grid_res, "grid resolution per axis");
  full->add_option("--mesh-res", args.mesh_res, "mesh resolution per axis");
  full->add_option("--sweep-res", args.sweep_res, "sweep slice count");
  full->add_option("--samples", args.samples, "manifold sample count");
  full->add_option("--seed", args.seed, "sampling seed")->each([&](const std::string&) {
    args.have_seed = true;
  });
  full->add_option("--sweep-angle", args.opts.sweep_angle_deg,
                   "rotate the sweep axis by this many degrees");
  full->add_option("--require-margin", args.opts.require_margin,
                   "minimum boundary gradient margin for certification");
  full->add_flag("--unchecked", args.opts.unchecked, "skip the certificate gate");

  CLI11_PARSE(app, argc, argv);
  args.opts.out_dir = args.out_dir;

  try {
    if (app.got_subcommand(certify)) return finish(run_certify(load_config(args), args.opts));
    if (app.got_subcommand(construct)) return finish(run_construct(load_config(args), args.opts));
    if (app.got_subcommand(verify)) {
      const int samples = args.samples > 0 ? args.samples : 1000;
      const uint64_t seed = args.have_seed ? args.seed : 1;
      if (!args.hypersurface_path.empty()) {
        const Hypersurface h = hypersurface_from_doc(load_doc(args.hypersurface_path));
        return finish(run_verify_hypersurface(h, samples, seed, args.opts));
      }
      return finish(run_verify(load_config(args), args.opts));
    }
    if (app.got_subcommand(mesh)) {
      if (!args.hypersurface_path.empty()) {
        const Hypersurface h = hypersurface_from_doc(load_doc(args.hypersurface_path));
        return finish(run_mesh_hypersurface(h, args.mesh_res > 0 ? args.mesh_res : 96,
                                            args.opts));
      }
      return finish(run_mesh(load_config(args), args.opts));
    }
    if (app.got_subcommand(reeb)) return finish(run_reeb(load_config(args), args.opts));
    if (app.got_subcommand(fit)) return run_fit(args);
    if (app.got_subcommand(full)) return finish(run_full(load_config(args), args.opts));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 2;
}
