#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sgmap/analyze.hpp"

using namespace sgmap;
using namespace sgmap::testfix;

namespace {

VerticalSpec quartic_spec() {
  VerticalSpec spec;
  spec.f0 = UniPoly::identity();
  spec.fvert = MultiPoly(2, {{{2, 0}, 2.0}, {{0, 4}, 1.0}});  // 2 y0^2 + y1^4
  spec.a = 1.0;
  return spec;
}

}  // namespace

TEST_CASE("sample_manifold lands on the unit sphere") {
  const Hypersurface h = build_basic(disk_region(), 1);
  const auto samples = sample_manifold(h, 1000, 7);
  CHECK(samples.size() >= 250);
  for (const SamplePoint& s : samples) {
    CHECK(s.residual <= 1e-10);
    CHECK(std::abs(s.coords.norm() - 1.0) <= 1e-8);
  }
}

TEST_CASE("sample_manifold is reproducible per seed") {
  const Hypersurface h = build_basic(disk_region(), 1);
  const auto a = sample_manifold(h, 64, 99);
  const auto b = sample_manifold(h, 64, 99);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].coords == b[i].coords);
  const auto c = sample_manifold(h, 64, 100);
  bool all_same = a.size() == c.size();
  for (size_t i = 0; all_same && i < a.size(); ++i)
    all_same = a[i].coords == c[i].coords;
  CHECK_FALSE(all_same);
}

TEST_CASE("sample_manifold errors on an empty hypersurface") {
  Hypersurface h = build_basic(disk_region(), 1);
  // P = -1 - x0^2 - x1^2 - y^2 has an empty zero set
  h.P = MultiPoly(3, {{{0, 0, 0}, -1.0}, {{2, 0, 0}, -1.0}, {{0, 2, 0}, -1.0},
                      {{0, 0, 2}, -1.0}});
  CHECK_THROWS_AS(sample_manifold(h, 100, 1), Error);
}

TEST_CASE("collar identity holds on basic samples") {
  for (const Region& r : {disk_region(), annulus_region(), two_holed_region()}) {
    const Hypersurface h = build_basic(r, 1);
    const auto samples = sample_manifold(h, 400, 3);
    for (const SamplePoint& s : samples) {
      const double prod = eval(h.prod, Eigen::VectorXd(s.coords.head(2)));
      const double y2 = s.coords.tail(1).squaredNorm();
      CHECK(std::abs(y2 - prod) <= 1e-8);
    }
  }
}

TEST_CASE("y-reflection of a sample refines back onto the manifold") {
  const Hypersurface h = build_basic(annulus_region(), 1);
  const auto samples = sample_manifold(h, 200, 5);
  for (size_t i = 0; i < samples.size(); i += 7) {
    Eigen::VectorXd z = samples[i].coords;
    z[2] = -z[2];
    CHECK(std::abs(eval(h.P, z)) <= 1e-9);
  }
}

TEST_CASE("verify_nonsingular passes on the sphere with margin 2") {
  const Hypersurface h = build_basic(disk_region(), 1);
  const auto samples = sample_manifold(h, 500, 11);
  const NonsingularReport rep = verify_nonsingular(h, samples);
  CHECK(rep.passed);
  CHECK(rep.min_sample_grad == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(rep.descent_min_grad == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("verify_nonsingular fails on a squared boundary polynomial") {
  // region made of the same circle twice: P = f^2 - y^2 is singular on
  // the circle f = 0, y = 0
  Region r = disk_region();
  r.boundary_polys.push_back(r.boundary_polys[0]);
  const Hypersurface h = build_basic(r, 1, false);
  const auto samples = sample_manifold(h, 600, 13);
  const NonsingularReport rep = verify_nonsingular(h, samples);
  CHECK_FALSE(rep.passed);
  CHECK(rep.descent_min_grad < rep.delta);
}

TEST_CASE("verify_nonsingular passes on the annulus torus") {
  const Hypersurface h = build_basic(annulus_region(), 1);
  const auto samples = sample_manifold(h, 500, 17);
  const NonsingularReport rep = verify_nonsingular(h, samples);
  CHECK(rep.passed);
  CHECK(rep.min_sample_grad > 0.1);
}

TEST_CASE("singular set of the disk construction is the unit circle") {
  const Hypersurface h = build_basic(disk_region(), 1);
  const SingularSetReport rep = singular_set_check(h, 1e-6);
  CHECK(rep.passed);
  CHECK(rep.hausdorff_to_boundary < 1e-6);
  CHECK_FALSE(rep.interior_violation);
  for (const auto& z : rep.candidates) {
    CHECK(std::abs(z.head(2).norm() - 1.0) <= 1e-8);
    CHECK(std::abs(z[2]) <= 1e-6);
  }
}

TEST_CASE("singular set of the interval k=2 construction is the two endpoints") {
  const Hypersurface h = build_basic(interval_region(), 2);
  const SingularSetReport rep = singular_set_check(h, 1e-6);
  CHECK(rep.passed);
  for (const auto& z : rep.candidates) {
    CHECK(std::abs(std::abs(z[0]) - 1.0) <= 1e-8);
    CHECK(z.tail(2).norm() <= 1e-6);
  }
}

TEST_CASE("singular set of the generalized quartic construction") {
  VerticalSpec spec = quartic_spec();
  spec.T = 1.0;
  spec.a = 2.0;
  const Hypersurface h = build_generalized(disk_region(), spec);
  const SingularSetReport rep = singular_set_check(h, 1e-5);
  CHECK(rep.passed);
  CHECK(rep.hausdorff_to_boundary < 1e-5);
}

TEST_CASE("singular set with the pure quartic vertical term is still the circle") {
  VerticalSpec spec;
  spec.f0 = UniPoly::identity();
  spec.fvert = MultiPoly(1, {{{4}, 1.0}});  // dP/dy = -4y^3 vanishes iff y = 0
  spec.a = 2.0;
  spec.T = 1.0;
  const Hypersurface h = build_generalized(disk_region(), spec);
  const SingularSetReport rep = singular_set_check(h, 1e-5);
  CHECK(rep.passed);
  for (const auto& z : rep.candidates)
    CHECK(std::abs(z.head(2).norm() - 1.0) <= 1e-7);
}

TEST_CASE("fiber_at on the basic disk") {
  const Hypersurface h = build_basic(disk_region(), 1);
  const FiberReport center = fiber_at(h, pt({0.0, 0.0}));
  CHECK(center.classification == FiberClass::TwoPoints);
  CHECK(center.components == 2);
  CHECK(center.level == doctest::Approx(1.0));

  const FiberReport edge = fiber_at(h, pt({1.0, 0.0}));
  CHECK(edge.classification == FiberClass::Point);
  CHECK(edge.components == 1);
}

TEST_CASE("fiber_at on the interval k=2 construction") {
  const Hypersurface h = build_basic(interval_region(), 2);
  const FiberReport center = fiber_at(h, pt({0.0}));
  CHECK(center.classification == FiberClass::Circle);
  CHECK(center.components == 1);
  REQUIRE(center.euler_char.has_value());
  CHECK(*center.euler_char == 0);

  const FiberReport edge = fiber_at(h, pt({1.0}));
  CHECK(edge.classification == FiberClass::Point);
}

TEST_CASE("fiber_at on the generalized quartic over the disk") {
  VerticalSpec spec = quartic_spec();
  spec.T = 1.0;
  spec.a = 2.0;
  const Hypersurface h = build_generalized(disk_region(), spec);
  const FiberReport center = fiber_at(h, pt({0.0, 0.0}));
  CHECK(center.classification == FiberClass::Circle);
  CHECK(center.components == 1);
  CHECK(*center.euler_char == 0);
}

TEST_CASE("fiber suite passes on the example constructions") {
  for (int k : {1, 2}) {
    for (const Region& r : {disk_region(), annulus_region()}) {
      const Hypersurface h = build_basic(r, k);
      const FiberSuiteReport rep = run_fiber_suite(h);
      INFO(rep.detail);
      CHECK(rep.passed);
      CHECK(rep.interior_checked > 0);
      CHECK(rep.band_checked > 0);
    }
  }
}

TEST_CASE("collar model holds on the basic constructions") {
  for (const Region& r : {disk_region(), annulus_region()}) {
    const Hypersurface h = build_basic(r, 1);
    const CollarReport rep = collar_model_check(h, 0.05);
    INFO(rep.detail);
    CHECK(rep.passed);
    CHECK(rep.rays_checked > 0);
  }
}

TEST_CASE("collar model holds on the interval and the quartic family") {
  const Hypersurface hi = build_basic(interval_region(), 2);
  CHECK(collar_model_check(hi, 0.05).passed);

  VerticalSpec spec;
  spec.f0 = UniPoly::identity();
  spec.fvert = MultiPoly(1, {{{4}, 1.0}});  // y^4: extent (prod/T)^(1/4)
  spec.a = 2.0;
  spec.T = 1.0;
  const Hypersurface hq = build_generalized(disk_region(), spec);
  const CollarReport rep = collar_model_check(hq, 0.05);
  INFO(rep.detail);
  CHECK(rep.passed);
}

TEST_CASE("fiber_at with k=3 reports sampled components only") {
  const Hypersurface h = build_basic(interval_region(), 3);  // M0 = S^3
  const FiberReport center = fiber_at(h, pt({0.0}));
  CHECK(center.classification == FiberClass::NotComputed);
  CHECK(center.components == 1);  // fiber is S^2
  CHECK_FALSE(center.euler_char.has_value());
  const FiberReport edge = fiber_at(h, pt({-1.0}));
  CHECK(edge.classification == FiberClass::Point);
}

TEST_CASE("generalized collar identity on samples") {
  VerticalSpec spec = quartic_spec();
  const Hypersurface h = build_generalized(annulus_region(), spec);  // auto T
  const auto samples = sample_manifold(h, 400, 23);
  for (const SamplePoint& s : samples) {
    const double level = eval(h.f0, eval(h.prod, Eigen::VectorXd(s.coords.head(2))) / h.T);
    const double fv = eval(h.fvert, Eigen::VectorXd(s.coords.tail(2)));
    CHECK(std::abs(level - fv) <= 1e-8);
  }
}
