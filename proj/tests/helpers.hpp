#pragma once
// Shared fixture regions for the test suites.

#include <Eigen/Core>

#include "sgmap/poly.hpp"
#include "sgmap/region.hpp"

namespace sgmap::testfix {

inline Eigen::VectorXd pt(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<int>(v.size()));
  int i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

inline Box box2(double lo, double hi) {
  Box b;
  b.lo = pt({lo, lo});
  b.hi = pt({hi, hi});
  return b;
}

// 1 - x0^2 - x1^2
inline MultiPoly circle_poly(double cx, double cy, double r) {
  return MultiPoly(2, {{{0, 0}, r * r - cx * cx - cy * cy},
                       {{1, 0}, 2.0 * cx},
                       {{0, 1}, 2.0 * cy},
                       {{2, 0}, -1.0},
                       {{0, 2}, -1.0}});
}

// x0^2 + x1^2 - r^2 (positive outside the circle)
inline MultiPoly circle_poly_outward(double cx, double cy, double r) {
  return -1.0 * circle_poly(cx, cy, r);
}

inline Region disk_region() {
  Region r;
  r.dim = 2;
  r.boundary_polys = {circle_poly(0, 0, 1)};
  r.bbox = box2(-1.2, 1.2);
  return r;
}

inline Region annulus_region() {
  Region r;
  r.dim = 2;
  r.boundary_polys = {circle_poly_outward(0, 0, 0.5), circle_poly(0, 0, 1)};
  r.bbox = box2(-1.2, 1.2);
  return r;
}

inline Region two_holed_region() {
  Region r;
  r.dim = 2;
  r.boundary_polys = {circle_poly(0, 0, 1), circle_poly_outward(0.45, 0, 0.2),
                      circle_poly_outward(-0.45, 0, 0.2)};
  r.bbox = box2(-1.2, 1.2);
  return r;
}

// [-1, 1] as 1 - x^2 >= 0
inline Region interval_region() {
  Region r;
  r.dim = 1;
  r.boundary_polys = {MultiPoly(1, {{{0}, 1.0}, {{2}, -1.0}})};
  Box b;
  b.lo = pt({-1.3});
  b.hi = pt({1.3});
  r.bbox = b;
  return r;
}

// [-2,-1] plus [1,2] via x^2 - 1 >= 0 and 4 - x^2 >= 0
inline Region two_interval_region() {
  Region r;
  r.dim = 1;
  r.boundary_polys = {MultiPoly(1, {{{0}, -1.0}, {{2}, 1.0}}),
                      MultiPoly(1, {{{0}, 4.0}, {{2}, -1.0}})};
  Box b;
  b.lo = pt({-2.4});
  b.hi = pt({2.4});
  r.bbox = b;
  return r;
}

// Empty: annulus with radii swapped
inline Region swapped_annulus_region() {
  Region r;
  r.dim = 2;
  r.boundary_polys = {circle_poly_outward(0, 0, 1), circle_poly(0, 0, 0.5)};
  r.bbox = box2(-1.2, 1.2);
  return r;
}

}  // namespace sgmap::testfix
