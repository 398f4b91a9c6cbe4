#pragma once
// Axis-aligned boxes and deterministic grid/random sampling helpers.

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sgmap/poly.hpp"

namespace sgmap {

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool valid() const {
    if (lo.size() != hi.size() || lo.size() == 0) return false;
    for (int i = 0; i < lo.size(); ++i)
      if (!(lo[i] < hi[i])) return false;
    return true;
  }

  bool contains(const Eigen::VectorXd& x) const {
    for (int i = 0; i < lo.size(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }

  Eigen::VectorXd extent() const { return hi - lo; }

  static Box cube(int dim, double radius) {
    Box b;
    b.lo = Eigen::VectorXd::Constant(dim, -radius);
    b.hi = Eigen::VectorXd::Constant(dim, radius);
    return b;
  }

  /// Cartesian product of two boxes.
  static Box product(const Box& a, const Box& b) {
    Box p;
    p.lo.resize(a.dim() + b.dim());
    p.hi.resize(a.dim() + b.dim());
    p.lo << a.lo, b.lo;
    p.hi << a.hi, b.hi;
    return p;
  }
};

/// Visits every node of the (res+1)^dim lattice over the box in row-major
/// order (last axis fastest). The callback receives the node coordinates.
void for_each_grid_node(const Box& box, int res,
                        const std::function<void(const Eigen::VectorXd&)>& fn);

/// Maximum of p over the grid nodes; res nodes per cell axis (res+1 per axis).
double grid_max(const MultiPoly& p, const Box& box, int res);

/// Maximum of |p| over the grid nodes.
double grid_max_abs(const MultiPoly& p, const Box& box, int res);

/// Evaluates p on the full node lattice using per-axis power tables; output
/// is row-major with the last axis fastest. Matches eval() bit-for-bit.
std::vector<double> grid_eval(const MultiPoly& p, const Box& box, int res);

/// splitmix64: tiny deterministic generator, identical on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform point in the box.
  Eigen::VectorXd point_in(const Box& box) {
    Eigen::VectorXd x(box.dim());
    for (int i = 0; i < box.dim(); ++i)
      x[i] = box.lo[i] + next_double() * (box.hi[i] - box.lo[i]);
    return x;
  }

 private:
  uint64_t state_;
};

}  // namespace sgmap
