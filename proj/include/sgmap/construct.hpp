#pragma once
// Defining polynomials of the hypersurfaces M0 = P^{-1}(0).
//
// Basic form:        P = prod_j f_j(x) - sum_j y_j^2
// Generalized form:  P = f0(prod_j f_j(x) / T) - fvert(y)
// with f0 vanishing at 0 with nonzero slope and fvert >= 0 vanishing only at
// the origin, so that the fiber over x is the level set fvert = f0(prod/T).

#include <optional>
#include <string>
#include <vector>

#include "sgmap/box.hpp"
#include "sgmap/poly.hpp"
#include "sgmap/region.hpp"

namespace sgmap {

/// Fiber-shape data of the generalized construction. T empty means "auto":
/// resolve via choose_T so the scaled product stays below the sweep bound a.
struct VerticalSpec {
  UniPoly f0;
  MultiPoly fvert;
  double a = 1.0;
  std::optional<double> T;
};

struct Hypersurface {
  MultiPoly P;       // n + k variables: x first, y last
  int n = 0;
  int k = 0;
  Region region;
  MultiPoly prod;    // product of the boundary polynomials, n variables
  UniPoly f0;        // identity for the basic form
  MultiPoly fvert;   // sum of y_j^2 for the basic form
  double T = 1.0;
  bool generalized = false;
  Box bbox_y;        // vertical box guaranteed to contain all fibers
  // cached at construction so per-point queries need no grid passes
  double level_max = 0.0;   // grid max of f0(prod/T) over the region bbox
  double region_tol = 0.0;  // default classification tolerance of the region
};

struct SpecCheck {
  int condition = 0;  // 1..4, mirroring the construction hypotheses
  bool passed = true;
  std::string detail;
};

struct SpecValidation {
  bool passed = true;
  std::vector<SpecCheck> checks;
  int first_failed = 0;  // 0 when passed
};

/// Checks the generalized-construction hypotheses:
///  (1) structural split F = f0(t) - fvert(y)  (enforced by the types)
///  (2) f0(0) = 0, f0'(0) != 0, sign(f0(t)) = sign(t) on [-a, a]
///  (3) fvert >= 0 with zero set {0}: even exponents, zero constant term,
///      grid nonnegativity with zero only at the origin cell
///  (4) level sets fvert = f0(t) are non-singular for t on a geometric
///      ladder in (0, a] (sampled gradient-norm check, k <= 3)
SpecValidation validate_vertical_spec(const VerticalSpec& spec, int k);

/// T = 2 * (grid maximum of prod f over the bbox) / a, so the scaled product
/// stays at or below a/2 on the grid. The grid uses at least 512 cells per
/// axis so later, equally fine checks cannot exceed the bound.
double choose_T(const Region& r, double a);

/// Basic construction. Certifies the region first unless require_certified
/// is false (used by the unchecked CLI path).
Hypersurface build_basic(const Region& r, int k, bool require_certified = true);

/// Generalized construction; validates the spec and resolves T.
Hypersurface build_generalized(const Region& r, const VerticalSpec& spec,
                               bool require_certified = true);

}  // namespace sgmap
