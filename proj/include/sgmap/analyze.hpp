#pragma once
// Numerical verification of the hypersurface M0 = P^{-1}(0) and of the
// projection (x, y) -> x restricted to it: non-singularity, the location of
// the projection-critical set over the region boundary, the sphere/point
// fiber alternative, and the Morse-height collar model near the boundary.

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "sgmap/construct.hpp"

namespace sgmap {

struct SamplePoint {
  Eigen::VectorXd coords;  // n + k entries
  double residual = 0.0;   // |P| after refinement
  double grad_norm = 0.0;  // ||grad P||
};

/// Draws count seeds uniformly in bbox x bbox_y (deterministic per seed) and
/// refines each with damped Newton until |P| <= 1e-10 (50 iteration cap).
/// Throws Error when fewer than count/4 converge, which suggests an empty or
/// near-singular zero set.
std::vector<SamplePoint> sample_manifold(const Hypersurface& h, int count,
                                         uint64_t seed);

struct NonsingularReport {
  double min_sample_grad = 0.0;
  Eigen::VectorXd min_sample_point;
  double descent_min_grad = 0.0;   // minimum found by constrained descent
  Eigen::VectorXd descent_min_point;
  double delta = 0.0;
  bool passed = false;
};

/// Passes when the smallest gradient norm over the samples, and over the
/// points reached by gradient-norm descent restarted from them, stays at or
/// above delta. delta <= 0 selects the default 1e-4 * max ||grad P||.
NonsingularReport verify_nonsingular(const Hypersurface& h,
                                     const std::vector<SamplePoint>& samples,
                                     double delta = 0.0);

struct SingularSetReport {
  std::vector<Eigen::VectorXd> candidates;  // refined projection-critical points
  double hausdorff_to_boundary = 0.0;
  double max_vertical_value = 0.0;  // max fvert(y) over candidates
  bool interior_violation = false;
  std::optional<Eigen::VectorXd> interior_witness;
  double tol = 0.0;
  bool passed = false;
};

/// Finds points of M0 where the vertical gradient vanishes by Gauss-Newton
/// refinement from boundary seeds, and checks they sit over the sampled zero
/// set of prod f_j (Hausdorff distance <= tol) with fvert(y) <= tol. A
/// critical point over the certified interior fails the report.
SingularSetReport singular_set_check(const Hypersurface& h, double tol);

enum class FiberClass { Point, TwoPoints, Circle, Unknown, NotComputed };

std::string to_string(FiberClass c);

struct FiberReport {
  Eigen::VectorXd base_x;
  double level = 0.0;  // f0(prod(x)/T)
  int components = 0;
  std::optional<int> euler_char;
  FiberClass classification = FiberClass::Unknown;
};

/// Classifies the fiber {y : fvert(y) = level} over x. k = 1 isolates roots
/// by sign-change bisection, k = 2 extracts the level curve, k >= 3 reports
/// sampled component counts only.
FiberReport fiber_at(const Hypersurface& h, const Eigen::VectorXd& x);

struct FiberSuiteReport {
  int interior_checked = 0;
  int band_checked = 0;
  bool passed = false;
  std::string detail;
  std::vector<FiberReport> failures;
};

/// Interior base points must carry S^{k-1} fibers (two points for k = 1, a
/// circle for k = 2), boundary-band base points must carry point fibers.
FiberSuiteReport run_fiber_suite(const Hypersurface& h, int max_interior = 32,
                                 int max_band = 16);

struct CollarReport {
  bool passed = false;
  int rays_checked = 0;
  std::string detail;
  std::optional<Eigen::VectorXd> offending_ray;
};

/// Along inward normal rays from boundary samples, the fiber extent
/// rho(s) = max ||y|| must increase strictly with the depth s in (0, band]
/// and shrink toward zero as s -> 0.
CollarReport collar_model_check(const Hypersurface& h, double band = 0.05);

}  // namespace sgmap
