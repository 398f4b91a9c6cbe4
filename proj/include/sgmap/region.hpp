#pragma once
// Compact regions cut out by boundary polynomials with the sign convention:
// the region is the intersection of { f_j >= 0 }, its interior is where all
// f_j > 0, and outside the region exactly one f_j is negative. certify()
// checks these conditions on a grid and is the gate for every downstream
// construction.

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "sgmap/box.hpp"
#include "sgmap/poly.hpp"

namespace sgmap {

struct Region {
  int dim = 0;
  std::vector<MultiPoly> boundary_polys;
  Box bbox;
  int grid_res = 256;
};

/// Throws std::invalid_argument if the Region invariants are violated.
void validate_region(const Region& r);

/// 1e-9 times the largest |f_j| over a bounding-box grid. Relative, not
/// absolute, so classification is insensitive to overall polynomial scale.
double default_tol(const Region& r);

enum class PointTag { Interior, BoundaryBand, Exterior };

struct PointClass {
  PointTag tag = PointTag::Interior;
  int boundary_index = -1;  // responsible polynomial for BoundaryBand/Exterior
};

/// Raised when a point's sign pattern matches none of the three classes
/// (two polynomials near zero, or two negative). Signals a non-certified
/// region or a too-coarse tolerance.
struct AmbiguousPointError : Error {
  AmbiguousPointError(Eigen::VectorXd point_, std::vector<int> indices_);
  Eigen::VectorXd point;
  std::vector<int> indices;
};

PointClass classify_point(const Region& r, const Eigen::VectorXd& x, double tol);
PointClass classify_point(const Region& r, const Eigen::VectorXd& x);

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
  std::optional<Eigen::VectorXd> witness;
};

struct RegionCertificate {
  bool passed = false;
  CheckResult intersection_nonneg;    // boundary bands do not overlap
  CheckResult interior_positivity;    // nonempty interior, every f_j goes positive
  CheckResult exactly_one_negative;   // outside: single negative polynomial
  int grid_res = 0;
  double tol = 0.0;
  // Smallest |f_j| observed on the grid boundary band (nodes adjacent to a
  // classification change), and the smallest gradient norm of the
  // responsible polynomial there. The latter is the non-singularity proxy
  // tested by --require-margin.
  double margin = 0.0;
  double grad_margin = 0.0;
};

RegionCertificate certify(const Region& r);

/// Euler characteristic of the region, computed from the cubical complex of
/// grid cells whose corners all classify Interior or BoundaryBand. The
/// resolution is doubled until two successive values agree (cap 2048).
/// Supported for dim <= 2.
int region_euler(const Region& r);

/// Points on the zero set of prod f_j inside the box, found by sign-change
/// bisection along grid edges. Deterministic; at most max_points returned.
std::vector<Eigen::VectorXd> sample_boundary(const Region& r, int max_points);

struct BoundaryFit {
  MultiPoly poly;
  double rms_residual = 0.0;
  double min_gradient_norm = 0.0;
};

/// Least-squares implicit fit: minimizes sum p(sample)^2 over polynomials of
/// total degree <= degree with unit coefficient norm (smallest singular
/// vector). The sign is normalized so the fit is positive at the sample
/// centroid when that value is meaningful.
BoundaryFit fit_boundary(const std::vector<Eigen::VectorXd>& samples, int degree);

}  // namespace sgmap
