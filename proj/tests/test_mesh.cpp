#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "sgmap/construct.hpp"
#include "sgmap/mesh.hpp"

using namespace sgmap;
using namespace sgmap::testfix;

namespace {

Box box3(double r) { return Box::cube(3, r); }

// Independent OBJ reader for the round-trip oracle: counts V, F and
// recomputes V - E + F from the parsed records.
struct ParsedObj {
  int vertices = 0;
  std::vector<std::array<int, 3>> faces;
  int euler() const {
    std::set<std::pair<int, int>> edges;
    auto add = [&](int a, int b) { edges.insert({std::min(a, b), std::max(a, b)}); };
    for (const auto& f : faces) {
      add(f[0], f[1]);
      add(f[1], f[2]);
      add(f[0], f[2]);
    }
    return vertices - static_cast<int>(edges.size()) + static_cast<int>(faces.size());
  }
};

ParsedObj parse_obj(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  ParsedObj obj;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      ++obj.vertices;
    } else if (tag == "f") {
      std::array<int, 3> f{};
      ls >> f[0] >> f[1] >> f[2];
      obj.faces.push_back(f);
    }
  }
  return obj;
}

}  // namespace

TEST_CASE("sphere mesh: chi 2, one component") {
  const MultiPoly p = MultiPoly(
      3, {{{0, 0, 0}, 1.0}, {{2, 0, 0}, -1.0}, {{0, 2, 0}, -1.0}, {{0, 0, 2}, -1.0}});
  const Mesh m = extract_isosurface(p, box3(1.2), 64);
  CHECK_FALSE(m.empty());
  CHECK(euler_char(m) == 2);
  CHECK(component_count(m) == 1);
  // no degenerate cells, every vertex referenced
  std::vector<bool> used(m.vertices.size(), false);
  for (const auto& t : m.triangles) {
    CHECK(t[0] != t[1]);
    CHECK(t[1] != t[2]);
    CHECK(t[0] != t[2]);
    used[t[0]] = used[t[1]] = used[t[2]] = true;
  }
  for (bool u : used) CHECK(u);
}

TEST_CASE("vertices lie on the surface within the interpolation bound") {
  const MultiPoly p = MultiPoly(
      3, {{{0, 0, 0}, 1.0}, {{2, 0, 0}, -1.0}, {{0, 2, 0}, -1.0}, {{0, 0, 2}, -1.0}});
  const int res = 64;
  const Box b = box3(1.2);
  const Mesh m = extract_isosurface(p, b, res);
  const double cell_diag = (b.extent() / res).norm();
  // Lipschitz bound of P = 1 - |z|^2 over the box: 2 * sqrt(3) * 1.2
  const double bound = 2.0 * (2.0 * std::sqrt(3.0) * 1.2) * cell_diag;
  for (const auto& v : m.vertices) {
    Eigen::VectorXd z(3);
    z << v[0], v[1], v[2];
    CHECK(std::abs(eval(p, z)) <= bound);
  }
}

TEST_CASE("annulus construction meshes to a torus") {
  const Hypersurface h = build_basic(annulus_region(), 1);
  const Box b = Box::product(h.region.bbox, h.bbox_y);
  const Mesh m = extract_isosurface(h.P, b, 96);
  CHECK(euler_char(m) == 0);
  CHECK(component_count(m) == 1);
}

TEST_CASE("circle polynomial in two variables meshes to one closed polyline") {
  const MultiPoly p = circle_poly(0, 0, 1);
  const Mesh m = extract_isosurface(p, box2(-1.2, 1.2), 64);
  CHECK(m.dim == 2);
  CHECK_FALSE(m.segments.empty());
  CHECK(euler_char(m) == 0);
  CHECK(component_count(m) == 1);
}

TEST_CASE("two-interval construction gives two circles in the plane") {
  const Hypersurface h = build_basic(two_interval_region(), 1);
  const Box b = Box::product(h.region.bbox, h.bbox_y);
  const Mesh m = extract_isosurface(h.P, b, 96);
  CHECK(m.dim == 2);
  CHECK(component_count(m) == 2);
  CHECK(euler_char(m) == 0);
}

TEST_CASE("topology stable under resolution doubling") {
  const Hypersurface h = build_basic(annulus_region(), 1);
  const Box b = Box::product(h.region.bbox, h.bbox_y);
  const Mesh coarse = extract_isosurface(h.P, b, 64);
  const Mesh fine = extract_isosurface(h.P, b, 128);
  CHECK(euler_char(coarse) == euler_char(fine));
  CHECK(component_count(coarse) == component_count(fine));
}

TEST_CASE("reflecting the vertical axis preserves the topology numbers") {
  const Hypersurface h = build_basic(annulus_region(), 1);
  const Box b = Box::product(h.region.bbox, h.bbox_y);
  // y -> -y at coefficient level: P is even in y, so the polynomial is equal
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  m(2, 2) = -1.0;
  const MultiPoly reflected = linear_substitution(h.P, m);
  CHECK(reflected == h.P);
  const Mesh mesh_orig = extract_isosurface(h.P, b, 64);
  const Mesh mesh_refl = extract_isosurface(reflected, b, 64);
  CHECK(euler_char(mesh_orig) == euler_char(mesh_refl));
  CHECK(component_count(mesh_orig) == component_count(mesh_refl));
}

TEST_CASE("surface touching the box is an error") {
  const MultiPoly p = MultiPoly(
      3, {{{0, 0, 0}, 1.0}, {{2, 0, 0}, -1.0}, {{0, 2, 0}, -1.0}, {{0, 0, 2}, -1.0}});
  CHECK_THROWS_AS(extract_isosurface(p, box3(0.9), 32), Error);
}

TEST_CASE("empty zero set gives an empty mesh") {
  const MultiPoly p = MultiPoly(
      3, {{{0, 0, 0}, -1.0}, {{2, 0, 0}, -1.0}, {{0, 2, 0}, -1.0}, {{0, 0, 2}, -1.0}});
  const Mesh m = extract_isosurface(p, box3(1.0), 32);
  CHECK(m.empty());
  CHECK(component_count(m) == 0);
}

TEST_CASE("export_obj round-trips through an independent reader") {
  const Hypersurface h = build_basic(annulus_region(), 1);
  const Box b = Box::product(h.region.bbox, h.bbox_y);
  const Mesh m = extract_isosurface(h.P, b, 64);
  const std::string path = "test_mesh_torus.obj";
  export_obj(m, path);
  const ParsedObj parsed = parse_obj(path);
  CHECK(parsed.vertices == static_cast<int>(m.vertices.size()));
  CHECK(parsed.faces.size() == m.triangles.size());
  // 1-based OBJ indices, same chi after reparse
  ParsedObj zero_based = parsed;
  for (auto& f : zero_based.faces)
    for (int& i : f) --i;
  CHECK(zero_based.euler() == euler_char(m));
  std::remove(path.c_str());

  const Mesh empty;
  CHECK_THROWS_AS(export_obj(empty, "nope.obj"), Error);
}

TEST_CASE("welded vertices are separated") {
  const Hypersurface h = build_basic(disk_region(), 1);
  const Box b = Box::product(h.region.bbox, h.bbox_y);
  const Mesh m = extract_isosurface(h.P, b, 24);
  for (size_t i = 0; i < m.vertices.size(); ++i)
    for (size_t j = i + 1; j < m.vertices.size(); ++j)
      CHECK((m.vertices[i] - m.vertices[j]).norm() >= m.weld_tol / 2.0);
}
