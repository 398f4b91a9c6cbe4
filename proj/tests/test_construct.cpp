#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sgmap/construct.hpp"

using namespace sgmap;
using namespace sgmap::testfix;

TEST_CASE("build_basic on the unit disk gives the sphere polynomial") {
  const Hypersurface h = build_basic(disk_region(), 1);
  // P = 1 - x0^2 - x1^2 - y^2
  const MultiPoly want = MultiPoly(
      3, {{{0, 0, 0}, 1.0}, {{2, 0, 0}, -1.0}, {{0, 2, 0}, -1.0}, {{0, 0, 2}, -1.0}});
  CHECK(h.P == want);
  CHECK(h.n == 2);
  CHECK(h.k == 1);
  CHECK(h.bbox_y.hi[0] == doctest::Approx(1.1).epsilon(1e-6));
}

TEST_CASE("build_basic on the interval with k=2 gives the 2-sphere") {
  const Hypersurface h = build_basic(interval_region(), 2);
  const MultiPoly want = MultiPoly(3, {{{0, 0, 0}, 1.0},
                                       {{2, 0, 0}, -1.0},
                                       {{0, 2, 0}, -1.0},
                                       {{0, 0, 2}, -1.0}});
  CHECK(h.P == want);
}

TEST_CASE("build_basic refuses an uncertified region") {
  CHECK_THROWS_AS(build_basic(swapped_annulus_region(), 1), Error);
  CHECK_NOTHROW(build_basic(swapped_annulus_region(), 1, false));
}

TEST_CASE("basic equals generalized with the identity spec, coefficient for coefficient") {
  for (int k : {1, 2}) {
    const Region r = annulus_region();
    const Hypersurface basic = build_basic(r, k);
    VerticalSpec spec;
    spec.f0 = UniPoly::identity();
    std::vector<Term> sq;
    for (int j = 0; j < k; ++j) {
      Exponents e(k, 0);
      e[j] = 2;
      sq.push_back({e, 1.0});
    }
    spec.fvert = MultiPoly(k, sq);
    spec.a = 2.0;
    spec.T = 1.0;
    const Hypersurface gen = build_generalized(r, spec);
    CHECK(basic.P == gen.P);
  }
}

TEST_CASE("P is even in the vertical variables at coefficient level") {
  VerticalSpec spec;
  spec.f0 = UniPoly::identity();
  spec.fvert = MultiPoly(2, {{{2, 0}, 2.0}, {{0, 4}, 1.0}});  // 2 y0^2 + y1^4
  spec.a = 1.0;
  const Hypersurface h = build_generalized(disk_region(), spec);
  for (const Term& t : h.P.terms()) {
    CHECK(t.exps[2] % 2 == 0);
    CHECK(t.exps[3] % 2 == 0);
  }
}

TEST_CASE("quartic vertical shape over the disk expands to the expected polynomial") {
  VerticalSpec spec;
  spec.f0 = UniPoly::identity();
  spec.fvert = MultiPoly(1, {{{4}, 1.0}});  // y^4
  spec.a = 2.0;
  spec.T = 1.0;
  const Hypersurface h = build_generalized(disk_region(), spec);
  const MultiPoly want = MultiPoly(
      3, {{{0, 0, 0}, 1.0}, {{2, 0, 0}, -1.0}, {{0, 2, 0}, -1.0}, {{0, 0, 4}, -1.0}});
  CHECK(h.P == want);
}

TEST_CASE("choose_T on the unit disk") {
  const Region r = disk_region();
  CHECK(choose_T(r, 0.5) == doctest::Approx(4.0).epsilon(1e-3));
  CHECK(choose_T(r, 2.0) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("choose_T on the annulus matches the analytic optimum") {
  // max of (r^2 - 0.25)(1 - r^2) is 0.140625 at r^2 = 0.625
  const double t = choose_T(annulus_region(), 1.0);
  CHECK(t == doctest::Approx(0.28125).epsilon(0.05));
  CHECK(t >= 0.26);
  CHECK(t <= 0.30);
}

TEST_CASE("after choose_T the scaled product stays at or below a/2") {
  for (double a : {0.5, 1.0, 2.0}) {
    const Region r = annulus_region();
    const double t = choose_T(r, a);
    const MultiPoly prod = product_of(r.boundary_polys);
    const double m = grid_max(prod, r.bbox, 512);
    CHECK(m / t <= a / 2.0 * (1.0 + 4e-16));
  }
}

TEST_CASE("validate_vertical_spec accepts the identity example") {
  VerticalSpec spec;
  spec.f0 = UniPoly::identity();
  spec.fvert = MultiPoly(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}});
  spec.a = 1.0;
  const SpecValidation v = validate_vertical_spec(spec, 2);
  CHECK(v.passed);
  CHECK(v.first_failed == 0);
}

TEST_CASE("validate_vertical_spec rejects f0 = t^2 at condition (2)") {
  VerticalSpec spec;
  spec.f0 = UniPoly({0.0, 0.0, 1.0});
  spec.fvert = MultiPoly(1, {{{2}, 1.0}});
  spec.a = 1.0;
  const SpecValidation v = validate_vertical_spec(spec, 1);
  CHECK_FALSE(v.passed);
  CHECK(v.first_failed == 2);
}

TEST_CASE("validate_vertical_spec rejects a shifted zero set at condition (3)") {
  VerticalSpec spec;
  spec.f0 = UniPoly::identity();
  // (y - 1)^2 = y^2 - 2y + 1: zero set {1}, odd exponent, nonzero constant
  spec.fvert = MultiPoly(1, {{{0}, 1.0}, {{1}, -2.0}, {{2}, 1.0}});
  spec.a = 1.0;
  const SpecValidation v = validate_vertical_spec(spec, 1);
  CHECK_FALSE(v.passed);
  CHECK(v.first_failed == 3);
}

TEST_CASE("validate_vertical_spec accepts the quartic family") {
  VerticalSpec spec;
  spec.f0 = UniPoly::identity();
  spec.fvert = MultiPoly(2, {{{2, 0}, 2.0}, {{0, 4}, 1.0}});
  spec.a = 1.0;
  CHECK(validate_vertical_spec(spec, 2).passed);
}

TEST_CASE("auto-T resolution on the generalized construction") {
  VerticalSpec spec;
  spec.f0 = UniPoly::identity();
  spec.fvert = MultiPoly(2, {{{2, 0}, 2.0}, {{0, 4}, 1.0}});
  spec.a = 1.0;
  const Hypersurface h = build_generalized(annulus_region(), spec);
  CHECK(h.T == doctest::Approx(0.28125).epsilon(0.05));
  CHECK(h.generalized);
}

TEST_CASE("generalized sphere fibers fit in the vertical bbox") {
  VerticalSpec spec;
  spec.f0 = UniPoly::identity();
  spec.fvert = MultiPoly(2, {{{2, 0}, 2.0}, {{0, 4}, 1.0}});
  spec.a = 2.0;
  spec.T = 1.0;
  const Hypersurface h = build_generalized(disk_region(), spec);
  // level never exceeds 1; on the level set, |y1| <= 1 and |y0| <= 1/sqrt(2)
  CHECK(h.bbox_y.hi[0] > 1.0);
  CHECK(h.level_max == doctest::Approx(1.0).epsilon(1e-3));
}
