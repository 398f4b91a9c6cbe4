#include "sgmap/reeb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace sgmap {

std::string to_string(ReebVertexKind k) {
  switch (k) {
    case ReebVertexKind::Birth: return "birth";
    case ReebVertexKind::Death: return "death";
    case ReebVertexKind::Split: return "split";
    case ReebVertexKind::Merge: return "merge";
  }
  return "?";
}

namespace {

using Interval = std::pair<double, double>;

Slice slice_impl(const Region& r, double c, double tol) {
  Slice s;
  s.c = c;
  const double ylo = r.bbox.lo[1], yhi = r.bbox.hi[1];

  // zeros of every boundary polynomial along the vertical line
  std::vector<double> zeros;
  Eigen::VectorXd p(2);
  p[0] = c;
  for (const MultiPoly& f : r.boundary_polys) {
    const int scan = 1024;
    p[1] = ylo;
    double prev = eval(f, p);
    for (int i = 1; i <= scan; ++i) {
      const double y = ylo + (yhi - ylo) * i / scan;
      p[1] = y;
      const double cur = eval(f, p);
      if ((prev > 0) != (cur > 0)) {
        double a = ylo + (yhi - ylo) * (i - 1) / scan, b = y, fa = prev;
        for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
          const double m = 0.5 * (a + b);
          p[1] = m;
          const double fm = eval(f, p);
          if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
          } else {
            b = m;
          }
        }
        zeros.push_back(0.5 * (a + b));
      }
      prev = cur;
    }
  }
  std::sort(zeros.begin(), zeros.end());
  zeros.erase(std::unique(zeros.begin(), zeros.end(),
                          [](double a, double b) { return b - a < 1e-10; }),
              zeros.end());

  // classify the partition midpoints and collect maximal interior runs
  std::vector<double> cuts;
  cuts.push_back(ylo);
  cuts.insert(cuts.end(), zeros.begin(), zeros.end());
  cuts.push_back(yhi);
  int run_start = -1;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    Eigen::VectorXd x(2);
    x << c, mid;
    PointTag tag;
    try {
      tag = classify_point(r, x, tol).tag;
    } catch (const AmbiguousPointError&) {
      throw Error("slice_region: ambiguous classification near a slice zero at x1=" +
                  format_double(c) + " (near-tangent boundary); perturb the event "
                  "point or rotate the sweep axis");
    }
    // the region is closed, so a midpoint in the boundary band is inside
    if (tag != PointTag::Exterior) {
      if (run_start < 0) run_start = static_cast<int>(i);
    } else if (run_start >= 0) {
      s.intervals.emplace_back(cuts[run_start], cuts[i]);
      run_start = -1;
    }
  }
  if (run_start >= 0) s.intervals.emplace_back(cuts[run_start], cuts.back());
  return s;
}

bool midpoint_match(const Interval& a, const Interval& b) {
  const double ma = 0.5 * (a.first + a.second);
  const double mb = 0.5 * (b.first + b.second);
  return (ma >= b.first && ma <= b.second) || (mb >= a.first && mb <= a.second);
}

bool is_bijection(const std::vector<Interval>& l, const std::vector<Interval>& r) {
  if (l.size() != r.size()) return false;
  // sorted disjoint intervals: a bijection must be order preserving
  for (size_t i = 0; i < l.size(); ++i)
    if (!midpoint_match(l[i], r[i])) return false;
  return true;
}

struct Leaf {
  double cl = 0.0, cr = 0.0;
  std::vector<Interval> left, right;
};

struct Sweeper {
  const Region& r;
  double tol;
  std::vector<ReebVertex> vertices;
  std::vector<ReebEdge> edges;
  std::vector<Interval> intervals;  // current slice intervals
  std::vector<int> track_id;        // per interval
  std::vector<int> origin;          // vertex where the track opened
  int next_track = 0;

  Sweeper(const Region& reg, double t) : r(reg), tol(t) {}

  void collect(double cl, std::vector<Interval> l, double cr, std::vector<Interval> rr,
               std::vector<Leaf>& out, int depth) {
    if (is_bijection(l, rr)) return;
    if (cr - cl <= 1e-9 || depth > 60) {
      out.push_back({cl, cr, std::move(l), std::move(rr)});
      return;
    }
    const double cm = 0.5 * (cl + cr);
    std::vector<Interval> m = slice_impl(r, cm, tol).intervals;
    collect(cl, std::move(l), cm, m, out, depth + 1);
    collect(cm, std::move(m), cr, std::move(rr), out, depth + 1);
  }

  [[noreturn]] void non_generic(double c) {
    throw Error("poincare_reeb: sweep not generic near x1=" + format_double(c) +
                " (events too close or simultaneous); rerun with --sweep-angle");
  }

  int add_vertex(double c, ReebVertexKind kind) {
    vertices.push_back({c, kind, kind == ReebVertexKind::Birth ||
                                     kind == ReebVertexKind::Death
                                 ? 1
                                 : 3});
    return static_cast<int>(vertices.size()) - 1;
  }

  void apply_leaf(const Leaf& leaf) {
    // advance the track state to the leaf's left slice
    if (!is_bijection(intervals, leaf.left)) non_generic(leaf.cl);
    intervals = leaf.left;

    const auto& l = leaf.left;
    const auto& rr = leaf.right;
    const double c = 0.5 * (leaf.cl + leaf.cr);
    const int nl = static_cast<int>(l.size());
    const int nr = static_cast<int>(rr.size());
    if (std::abs(nl - nr) != 1) non_generic(c);

    // match both ways
    std::vector<std::vector<int>> of_l(nl), of_r(nr);
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nr; ++j)
        if (midpoint_match(l[i], rr[j])) {
          of_l[i].push_back(j);
          of_r[j].push_back(i);
        }

    if (nr == nl + 1) {
      // one interval appeared: either an unmatched newcomer (birth) or one
      // old interval matching two new ones (split)
      int split_at = -1, born_at = -1;
      bool ok = true;
      for (int i = 0; i < nl && ok; ++i) {
        if (of_l[i].size() == 1) continue;
        if (of_l[i].size() == 2 && split_at < 0)
          split_at = i;
        else
          ok = false;
      }
      for (int j = 0; j < nr && ok; ++j) {
        if (of_r[j].size() == 1) continue;
        if (of_r[j].empty() && born_at < 0 && split_at < 0)
          born_at = j;
        else
          ok = false;
      }
      if (!ok || (split_at < 0) == (born_at < 0)) non_generic(c);

      std::vector<int> new_tracks(nr), new_origin(nr);
      for (int i = 0; i < nl; ++i) {
        if (i == split_at) continue;
        new_tracks[of_l[i][0]] = track_id[i];
        new_origin[of_l[i][0]] = origin[i];
      }
      if (split_at >= 0) {
        const int v = add_vertex(c, ReebVertexKind::Split);
        edges.push_back({origin[split_at], v, track_id[split_at]});
        for (int j : of_l[split_at]) {
          new_tracks[j] = next_track++;
          new_origin[j] = v;
        }
      } else {
        const int v = add_vertex(c, ReebVertexKind::Birth);
        new_tracks[born_at] = next_track++;
        new_origin[born_at] = v;
      }
      track_id = std::move(new_tracks);
      origin = std::move(new_origin);
    } else {  // nr == nl - 1: death or merge, mirrored
      int merge_at = -1, died_at = -1;
      bool ok = true;
      for (int j = 0; j < nr && ok; ++j) {
        if (of_r[j].size() == 1) continue;
        if (of_r[j].size() == 2 && merge_at < 0)
          merge_at = j;
        else
          ok = false;
      }
      for (int i = 0; i < nl && ok; ++i) {
        if (of_l[i].size() == 1) continue;
        if (of_l[i].empty() && died_at < 0 && merge_at < 0)
          died_at = i;
        else
          ok = false;
      }
      if (!ok || (merge_at < 0) == (died_at < 0)) non_generic(c);

      std::vector<int> new_tracks(nr), new_origin(nr);
      if (merge_at >= 0) {
        const int v = add_vertex(c, ReebVertexKind::Merge);
        for (int i : of_r[merge_at]) edges.push_back({origin[i], v, track_id[i]});
        for (int i = 0; i < nl; ++i) {
          if (i == of_r[merge_at][0] || i == of_r[merge_at][1]) continue;
          new_tracks[of_l[i][0]] = track_id[i];
          new_origin[of_l[i][0]] = origin[i];
        }
        new_tracks[merge_at] = next_track++;
        new_origin[merge_at] = v;
      } else {
        const int v = add_vertex(c, ReebVertexKind::Death);
        edges.push_back({origin[died_at], v, track_id[died_at]});
        for (int i = 0; i < nl; ++i) {
          if (i == died_at) continue;
          new_tracks[of_l[i][0]] = track_id[i];
          new_origin[of_l[i][0]] = origin[i];
        }
      }
      track_id = std::move(new_tracks);
      origin = std::move(new_origin);
    }
    intervals = rr;
  }

  void step(double c_prev, const std::vector<Interval>& prev, double c_next,
            const std::vector<Interval>& next) {
    std::vector<Leaf> leaves;
    collect(c_prev, prev, c_next, next, leaves, 0);
    for (const Leaf& leaf : leaves) apply_leaf(leaf);
    if (!is_bijection(intervals, next)) non_generic(c_next);
    intervals = next;
  }
};

}  // namespace

Slice slice_region(const Region& r, double c) {
  validate_region(r);
  if (r.dim != 2) throw std::invalid_argument("slice_region: dim-2 regions only");
  if (c < r.bbox.lo[0] || c > r.bbox.hi[0])
    throw std::invalid_argument("slice_region: sweep value outside the bbox");
  return slice_impl(r, c, default_tol(r));
}

ReebGraph poincare_reeb(const Region& r, int sweep_res) {
  validate_region(r);
  if (r.dim != 2) throw std::invalid_argument("poincare_reeb: dim-2 regions only");
  if (sweep_res < 64) throw std::invalid_argument("poincare_reeb: sweep_res must be >= 64");

  const double tol = default_tol(r);
  Sweeper sw(r, tol);
  const double lo = r.bbox.lo[0], hi = r.bbox.hi[0];

  double c_prev = lo;
  std::vector<Interval> prev = slice_impl(r, lo, tol).intervals;
  if (!prev.empty())
    throw Error("poincare_reeb: region touches the sweep start boundary; enlarge bbox");

  for (int i = 0; i <= sweep_res; ++i) {
    const double c = i < sweep_res ? lo + (i + 0.5) * (hi - lo) / sweep_res : hi;
    const std::vector<Interval> cur = slice_impl(r, c, tol).intervals;
    sw.step(c_prev, prev, c, cur);
    c_prev = c;
    prev = cur;
  }
  if (!prev.empty() || !sw.intervals.empty())
    throw Error("poincare_reeb: open tracks at the sweep end; enlarge bbox");

  ReebGraph g;
  g.vertices = std::move(sw.vertices);
  g.edges = std::move(sw.edges);

  // components via union-find over vertices
  std::vector<int> parent(g.vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const ReebEdge& e : g.edges) {
    const int a = find(e.from), b = find(e.to);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  int comps = 0;
  for (size_t v = 0; v < g.vertices.size(); ++v)
    if (find(static_cast<int>(v)) == static_cast<int>(v)) ++comps;
  g.components = comps;
  g.betti1 = static_cast<int>(g.edges.size()) - static_cast<int>(g.vertices.size()) +
             g.components;
  return g;
}

ReebGraph reeb_of_composition(const Hypersurface& h, int sweep_res) {
  if (h.n != 2) throw std::invalid_argument("reeb_of_composition: dim-2 regions only");
  if (h.k < 2)
    throw Error("reeb_of_composition: not supported for k = 1 (the S^0 fibers are "
                "disconnected, so level sets upstairs do not match the region sweep)");
  ReebGraph g = poincare_reeb(h.region, sweep_res);
  g.note = "fibers S^(k-1) are connected for k >= 2, so connected components of "
           "level sets of x1 on M0 project bijectively to those of x1 on the "
           "region; the composed Reeb graph equals the region's Poincare-Reeb graph";
  return g;
}

void export_dot(const ReebGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("export_dot: cannot open " + path);
  out << "graph reeb {\n";
  for (size_t v = 0; v < g.vertices.size(); ++v)
    out << "  v" << v << " [label=\"" << to_string(g.vertices[v].kind)
        << " x1=" << format_double(g.vertices[v].x) << "\"];\n";
  for (const ReebEdge& e : g.edges)
    out << "  v" << e.from << " -- v" << e.to << " [label=\"t" << e.track << "\"];\n";
  out << "}\n";
  if (!out) throw Error("export_dot: write failure on " + path);
}

}  // namespace sgmap
