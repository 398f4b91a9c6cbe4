#pragma once
// Sweep-line computation of the Poincare-Reeb graph of a certified planar
// region: slices along the first coordinate are decomposed into intervals,
// tracked between consecutive slices, and each change in the interval
// pattern is bisected to an event vertex (birth/death for a new or vanished
// interval, split/merge when one interval exchanges with two).

#include <string>
#include <utility>
#include <vector>

#include "sgmap/construct.hpp"
#include "sgmap/region.hpp"

namespace sgmap {

struct Slice {
  double c = 0.0;  // sweep value (first coordinate)
  std::vector<std::pair<double, double>> intervals;  // disjoint, sorted
};

/// Intervals of { x2 : (c, x2) in the region }: zeros of every boundary
/// polynomial along the line are isolated by sign-change bracketing plus
/// bisection, then midpoints classify the induced partition. Throws Error
/// when a midpoint classification is ambiguous (advising perturbation).
Slice slice_region(const Region& r, double c);

enum class ReebVertexKind { Birth, Death, Split, Merge };

std::string to_string(ReebVertexKind k);

struct ReebVertex {
  double x = 0.0;  // sweep value of the event, located to 1e-9
  ReebVertexKind kind = ReebVertexKind::Birth;
  int degree = 0;  // 1 for birth/death, 3 for split/merge
};

struct ReebEdge {
  int from = 0;
  int to = 0;
  int track = 0;  // id of the tracked interval component
};

struct ReebGraph {
  std::vector<ReebVertex> vertices;
  std::vector<ReebEdge> edges;
  int components = 0;
  int betti1 = 0;  // E - V + components
  std::string note;
};

/// Sweeps sweep_res slice positions across the bbox. Non-generic sweeps
/// (interval count jumping by two or more between refined adjacent slices)
/// raise an Error suggesting a rotated sweep axis.
ReebGraph poincare_reeb(const Region& r, int sweep_res);

/// Reeb graph of the composed height function x1 of the projection. With
/// k >= 2 the fibers are connected, so level-set components upstairs biject
/// with those of the region sweep and the graph equals poincare_reeb of the
/// region; the note records this. k = 1 is not supported (disconnected S^0
/// fibers).
ReebGraph reeb_of_composition(const Hypersurface& h, int sweep_res = 256);

/// Deterministic undirected DOT text; labels carry sweep value and kind.
void export_dot(const ReebGraph& g, const std::string& path);

}  // namespace sgmap
