#include "sgmap/io.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

namespace sgmap {

namespace {

Doc vec_to_doc(const Eigen::VectorXd& v) {
  Doc a = Doc::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_doc(const Doc& d) {
  if (!d.is_array()) throw ConfigError("expected a numeric array");
  Eigen::VectorXd v(static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) v[static_cast<int>(i)] = d[i].get<double>();
  return v;
}

const Doc& field(const Doc& d, const char* key) {
  auto it = d.find(key);
  if (it == d.end()) throw ConfigError(std::string("missing field \"") + key + "\"");
  return *it;
}

}  // namespace

Doc to_doc(const MultiPoly& p) {
  Doc d;
  d["nvars"] = p.nvars();
  Doc terms = Doc::array();
  for (const Term& t : p.terms()) {
    Doc term;
    term["coeff"] = t.coeff;
    term["exps"] = t.exps;
    terms.push_back(std::move(term));
  }
  d["terms"] = std::move(terms);
  return d;
}

MultiPoly multipoly_from_doc(const Doc& d) {
  const int nvars = field(d, "nvars").get<int>();
  std::vector<Term> terms;
  for (const Doc& td : field(d, "terms")) {
    Term t;
    t.coeff = field(td, "coeff").get<double>();
    t.exps = field(td, "exps").get<std::vector<int>>();
    terms.push_back(std::move(t));
  }
  try {
    return MultiPoly(nvars, terms);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid polynomial document: ") + e.what());
  }
}

Doc to_doc(const UniPoly& p) {
  Doc d;
  d["coeffs"] = p.coeffs();
  return d;
}

UniPoly unipoly_from_doc(const Doc& d) {
  return UniPoly(field(d, "coeffs").get<std::vector<double>>());
}

Doc to_doc(const Box& b) {
  Doc d;
  d["min"] = vec_to_doc(b.lo);
  d["max"] = vec_to_doc(b.hi);
  return d;
}

Box box_from_doc(const Doc& d) {
  Box b;
  b.lo = vec_from_doc(field(d, "min"));
  b.hi = vec_from_doc(field(d, "max"));
  if (!b.valid()) throw ConfigError("invalid bbox (min must be strictly below max)");
  return b;
}

Doc to_doc(const Region& r) {
  Doc d;
  d["dim"] = r.dim;
  Doc polys = Doc::array();
  for (const MultiPoly& f : r.boundary_polys) polys.push_back(to_doc(f));
  d["boundary_polys"] = std::move(polys);
  d["bbox"] = to_doc(r.bbox);
  d["grid_res"] = r.grid_res;
  return d;
}

Region region_from_doc(const Doc& d) {
  Region r;
  r.dim = field(d, "dim").get<int>();
  for (const Doc& pd : field(d, "boundary_polys"))
    r.boundary_polys.push_back(multipoly_from_doc(pd));
  r.bbox = box_from_doc(field(d, "bbox"));
  if (d.contains("grid_res")) r.grid_res = d["grid_res"].get<int>();
  try {
    validate_region(r);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid region document: ") + e.what());
  }
  return r;
}

Doc to_doc(const VerticalSpec& s) {
  Doc d;
  d["f0"] = to_doc(s.f0);
  d["fvert"] = to_doc(s.fvert);
  d["a"] = s.a;
  if (s.T)
    d["T"] = *s.T;
  else
    d["T"] = "auto";
  return d;
}

VerticalSpec vertical_spec_from_doc(const Doc& d) {
  VerticalSpec s;
  s.f0 = unipoly_from_doc(field(d, "f0"));
  s.fvert = multipoly_from_doc(field(d, "fvert"));
  s.a = field(d, "a").get<double>();
  if (!(s.a > 0)) throw ConfigError("vertical spec: a must be > 0");
  const Doc& t = field(d, "T");
  if (t.is_string()) {
    if (t.get<std::string>() != "auto")
      throw ConfigError("vertical spec: T must be a positive number or \"auto\"");
  } else {
    s.T = t.get<double>();
    if (!(*s.T > 0)) throw ConfigError("vertical spec: T must be > 0");
  }
  return s;
}

Doc to_doc(const Hypersurface& h) {
  Doc d;
  d["n"] = h.n;
  d["k"] = h.k;
  d["kind"] = h.generalized ? "generalized" : "basic";
  d["T"] = h.T;
  d["region"] = to_doc(h.region);
  d["f0"] = to_doc(h.f0);
  d["fvert"] = to_doc(h.fvert);
  d["prod"] = to_doc(h.prod);
  d["P"] = to_doc(h.P);
  d["bbox_y"] = to_doc(h.bbox_y);
  d["level_max"] = h.level_max;
  d["region_tol"] = h.region_tol;
  return d;
}

Hypersurface hypersurface_from_doc(const Doc& d) {
  Hypersurface h;
  h.n = field(d, "n").get<int>();
  h.k = field(d, "k").get<int>();
  h.generalized = field(d, "kind").get<std::string>() == "generalized";
  h.T = field(d, "T").get<double>();
  h.region = region_from_doc(field(d, "region"));
  h.f0 = unipoly_from_doc(field(d, "f0"));
  h.fvert = multipoly_from_doc(field(d, "fvert"));
  h.prod = multipoly_from_doc(field(d, "prod"));
  h.P = multipoly_from_doc(field(d, "P"));
  h.bbox_y = box_from_doc(field(d, "bbox_y"));
  h.level_max = field(d, "level_max").get<double>();
  h.region_tol = field(d, "region_tol").get<double>();
  if (h.P.nvars() != h.n + h.k) throw ConfigError("hypersurface: P must have n+k variables");
  return h;
}

namespace {

Doc check_to_doc(const CheckResult& c) {
  Doc d;
  d["name"] = c.name;
  d["passed"] = c.passed;
  d["detail"] = c.detail;
  d["witness"] = c.witness ? vec_to_doc(*c.witness) : Doc(nullptr);
  return d;
}

}  // namespace

Doc to_doc(const RegionCertificate& c) {
  Doc d;
  d["passed"] = c.passed;
  d["grid_res"] = c.grid_res;
  d["tol"] = c.tol;
  d["margin"] = c.margin;
  d["grad_margin"] = c.grad_margin;
  Doc checks = Doc::array();
  checks.push_back(check_to_doc(c.intersection_nonneg));
  checks.push_back(check_to_doc(c.interior_positivity));
  checks.push_back(check_to_doc(c.exactly_one_negative));
  d["checks"] = std::move(checks);
  return d;
}

Doc to_doc(const SpecValidation& v) {
  Doc d;
  d["passed"] = v.passed;
  d["first_failed_condition"] = v.first_failed;
  Doc checks = Doc::array();
  for (const SpecCheck& c : v.checks) {
    Doc cd;
    cd["condition"] = c.condition;
    cd["passed"] = c.passed;
    cd["detail"] = c.detail;
    checks.push_back(std::move(cd));
  }
  d["checks"] = std::move(checks);
  return d;
}

Doc to_doc(const NonsingularReport& r) {
  Doc d;
  d["passed"] = r.passed;
  d["delta"] = r.delta;
  d["min_sample_grad"] = r.min_sample_grad;
  d["min_sample_point"] = vec_to_doc(r.min_sample_point);
  d["descent_min_grad"] = r.descent_min_grad;
  d["descent_min_point"] = vec_to_doc(r.descent_min_point);
  return d;
}

Doc to_doc(const SingularSetReport& r) {
  Doc d;
  d["passed"] = r.passed;
  d["tol"] = r.tol;
  d["hausdorff_to_boundary"] = r.hausdorff_to_boundary;
  d["max_vertical_value"] = r.max_vertical_value;
  d["interior_violation"] = r.interior_violation;
  d["interior_witness"] = r.interior_witness ? vec_to_doc(*r.interior_witness) : Doc(nullptr);
  d["candidate_count"] = r.candidates.size();
  Doc cands = Doc::array();
  for (const auto& z : r.candidates) cands.push_back(vec_to_doc(z));
  d["candidates"] = std::move(cands);
  return d;
}

Doc to_doc(const FiberReport& r) {
  Doc d;
  d["base_x"] = vec_to_doc(r.base_x);
  d["level"] = r.level;
  d["components"] = r.components;
  d["euler"] = r.euler_char ? Doc(*r.euler_char) : Doc(nullptr);
  d["classification"] = to_string(r.classification);
  return d;
}

Doc to_doc(const FiberSuiteReport& r) {
  Doc d;
  d["passed"] = r.passed;
  d["interior_checked"] = r.interior_checked;
  d["band_checked"] = r.band_checked;
  d["detail"] = r.detail;
  Doc fails = Doc::array();
  for (const FiberReport& f : r.failures) fails.push_back(to_doc(f));
  d["failures"] = std::move(fails);
  return d;
}

Doc to_doc(const CollarReport& r) {
  Doc d;
  d["passed"] = r.passed;
  d["rays_checked"] = r.rays_checked;
  d["detail"] = r.detail;
  d["offending_ray"] = r.offending_ray ? vec_to_doc(*r.offending_ray) : Doc(nullptr);
  return d;
}

Doc to_doc(const ReebGraph& g) {
  Doc d;
  Doc verts = Doc::array();
  for (const ReebVertex& v : g.vertices) {
    Doc vd;
    vd["x"] = v.x;
    vd["kind"] = to_string(v.kind);
    vd["degree"] = v.degree;
    verts.push_back(std::move(vd));
  }
  d["vertices"] = std::move(verts);
  Doc edges = Doc::array();
  for (const ReebEdge& e : g.edges) {
    Doc ed;
    ed["from"] = e.from;
    ed["to"] = e.to;
    ed["track"] = e.track;
    edges.push_back(std::move(ed));
  }
  d["edges"] = std::move(edges);
  d["components"] = g.components;
  d["betti1"] = g.betti1;
  d["note"] = g.note;
  return d;
}

Doc mesh_summary(const Mesh& m) {
  Doc d;
  d["vertices"] = m.vertices.size();
  d["edges"] = unique_edge_count(m);
  d["faces"] = m.triangles.size();
  d["euler"] = euler_char(m);
  d["components"] = component_count(m);
  return d;
}

Doc to_doc(const JobConfig& c) {
  Doc d;
  d["region"] = to_doc(c.region);
  d["k"] = c.k;
  if (c.vspec) d["vertical_spec"] = to_doc(*c.vspec);
  d["mesh_res"] = c.mesh_res;
  d["sweep_res"] = c.sweep_res;
  d["samples"] = c.samples;
  d["seed"] = c.seed;
  return d;
}

JobConfig jobconfig_from_doc(const Doc& d) {
  JobConfig c;
  c.region = region_from_doc(field(d, "region"));
  if (d.contains("vertical_spec")) {
    c.vspec = vertical_spec_from_doc(d["vertical_spec"]);
    c.k = c.vspec->fvert.nvars();
  }
  if (d.contains("k")) {
    c.k = d["k"].get<int>();
    if (c.vspec && c.k != c.vspec->fvert.nvars())
      throw ConfigError("config: k disagrees with the vertical spec's variable count");
  }
  if (c.k < 1) throw ConfigError("config: k must be >= 1");
  if (d.contains("grid_res")) c.region.grid_res = d["grid_res"].get<int>();
  if (d.contains("mesh_res")) c.mesh_res = d["mesh_res"].get<int>();
  if (d.contains("sweep_res")) c.sweep_res = d["sweep_res"].get<int>();
  if (d.contains("samples")) c.samples = d["samples"].get<int>();
  if (d.contains("seed")) c.seed = d["seed"].get<uint64_t>();
  if (c.region.grid_res < 2 || c.region.grid_res > 8192)
    throw ConfigError("config: grid_res out of range [2, 8192]");
  if (c.mesh_res < 16 || c.mesh_res > 512)
    throw ConfigError("config: mesh_res out of range [16, 512]");
  if (c.sweep_res < 64 || c.sweep_res > 65536)
    throw ConfigError("config: sweep_res out of range [64, 65536]");
  if (c.samples < 4 || c.samples > 1000000)
    throw ConfigError("config: samples out of range [4, 1000000]");
  return c;
}

Doc load_doc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  Doc d;
  try {
    in >> d;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  return d;
}

void write_doc(const Doc& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << d.dump(2) << '\n';
  if (!out) throw Error("write failure on " + path);
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc;
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace sgmap
