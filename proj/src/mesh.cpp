#include "sgmap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace sgmap {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

struct Extractor {
  const Box& box;
  int res;
  int dim;
  std::vector<double> vals;
  Eigen::VectorXd step;
  Mesh mesh;
  std::unordered_map<uint64_t, int> edge_vertex;

  Extractor(const MultiPoly& p, const Box& b, int r)
      : box(b), res(r), dim(p.nvars()) {
    vals = grid_eval(p, box, res);
    step = box.extent() / res;
    // deterministic perturbation of exact zeros
    double scale = 0.0;
    for (double v : vals) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    for (double& v : vals)
      if (v == 0.0) v = 1e-12 * scale;
    mesh.dim = dim;
    mesh.weld_tol = step.norm() * 1e-6;
  }

  size_t node(int i, int j, int k = 0) const {
    size_t f = static_cast<size_t>(i) * (res + 1) + j;
    if (dim == 3) f = f * (res + 1) + k;
    return f;
  }

  Eigen::Vector3d node_point(int i, int j, int k = 0) const {
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    p[0] = box.lo[0] + i * step[0];
    p[1] = box.lo[1] + j * step[1];
    if (dim == 3) p[2] = box.lo[2] + k * step[2];
    return p;
  }

  void check_face_edges() const {
    // An edge lies on a box face when some other coordinate is pinned at an
    // end of the lattice; a sign change there means the surface is clipped.
    auto on_face = [&](const std::array<int, 3>& a, const std::array<int, 3>& b,
                       int axis) {
      for (int c = 0; c < dim; ++c) {
        if (c == axis) continue;
        if ((a[c] == 0 && b[c] == 0) || (a[c] == res && b[c] == res)) return true;
      }
      return false;
    };
    const int kmax = dim == 3 ? res : 0;
    for (int i = 0; i <= res; ++i)
      for (int j = 0; j <= res; ++j)
        for (int k = 0; k <= kmax; ++k)
          for (int axis = 0; axis < dim; ++axis) {
            std::array<int, 3> a = {i, j, k}, b = {i, j, k};
            ++b[axis];
            if (b[axis] > res) continue;
            if (!on_face(a, b, axis)) continue;
            const double va = vals[node(a[0], a[1], a[2])];
            const double vb = vals[node(b[0], b[1], b[2])];
            if ((va > 0) != (vb > 0))
              throw Error("isosurface touches the bounding box; enlarge the bbox");
          }
  }

  int edge_vert(size_t na, size_t nb, const Eigen::Vector3d& pa,
                const Eigen::Vector3d& pb) {
    if (na > nb) return edge_vert(nb, na, pb, pa);
    const uint64_t key = (static_cast<uint64_t>(na) << 32) | static_cast<uint64_t>(nb);
    auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;
    const double va = vals[na], vb = vals[nb];
    const double t = va / (va - vb);
    const Eigen::Vector3d p = pa + t * (pb - pa);
    const int idx = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(p);
    edge_vertex.emplace(key, idx);
    return idx;
  }

  // ---- 2-D: marching squares with the asymptotic decider ----
  void run2d() {
    for (int i = 0; i < res; ++i)
      for (int j = 0; j < res; ++j) {
        const size_t n00 = node(i, j), n10 = node(i + 1, j);
        const size_t n01 = node(i, j + 1), n11 = node(i + 1, j + 1);
        const double v00 = vals[n00], v10 = vals[n10], v01 = vals[n01], v11 = vals[n11];
        const int code = (v00 > 0 ? 1 : 0) | (v10 > 0 ? 2 : 0) | (v11 > 0 ? 4 : 0) |
                         (v01 > 0 ? 8 : 0);
        if (code == 0 || code == 15) continue;
        const Eigen::Vector3d p00 = node_point(i, j), p10 = node_point(i + 1, j);
        const Eigen::Vector3d p01 = node_point(i, j + 1), p11 = node_point(i + 1, j + 1);
        auto bottom = [&] { return edge_vert(n00, n10, p00, p10); };
        auto right = [&] { return edge_vert(n10, n11, p10, p11); };
        auto top = [&] { return edge_vert(n01, n11, p01, p11); };
        auto left = [&] { return edge_vert(n00, n01, p00, p01); };
        auto seg = [&](int a, int b) { mesh.segments.push_back({a, b}); };
        switch (code) {
          case 1: case 14: seg(bottom(), left()); break;
          case 2: case 13: seg(bottom(), right()); break;
          case 4: case 11: seg(right(), top()); break;
          case 8: case 7:  seg(top(), left()); break;
          case 3: case 12: seg(left(), right()); break;
          case 6: case 9:  seg(bottom(), top()); break;
          case 5: case 10: {
            // diagonal ambiguity: connect according to the sign of the
            // bilinear interpolant at its saddle
            const double denom = v00 + v11 - v10 - v01;
            const double saddle = denom != 0.0 ? (v00 * v11 - v10 * v01) / denom
                                               : v00;
            const bool diag_pos = (code == 5) == (saddle > 0);
            if (diag_pos) {
              // v00 and v11 side connected
              seg(bottom(), right());
              seg(top(), left());
            } else {
              seg(bottom(), left());
              seg(right(), top());
            }
            break;
          }
          default: break;
        }
      }
  }

  // ---- 3-D: six Kuhn tetrahedra per cell ----
  void emit_tet(const std::array<size_t, 4>& n, const std::array<Eigen::Vector3d, 4>& p) {
    int mask = 0;
    for (int v = 0; v < 4; ++v)
      if (vals[n[v]] > 0) mask |= 1 << v;
    if (mask == 0 || mask == 15) return;
    int pos[4], neg[4], np = 0, nn = 0;
    for (int v = 0; v < 4; ++v)
      (vals[n[v]] > 0 ? pos[np++] : neg[nn++]) = v;
    auto vert = [&](int a, int b) { return edge_vert(n[a], n[b], p[a], p[b]); };
    if (np == 1) {
      mesh.triangles.push_back({vert(pos[0], neg[0]), vert(pos[0], neg[1]), vert(pos[0], neg[2])});
    } else if (np == 3) {
      mesh.triangles.push_back({vert(neg[0], pos[0]), vert(neg[0], pos[1]), vert(neg[0], pos[2])});
    } else {
      // quad: (p0,n0) (p0,n1) (p1,n1) (p1,n0) is a cyclic order
      const int a = vert(pos[0], neg[0]);
      const int b = vert(pos[0], neg[1]);
      const int c = vert(pos[1], neg[1]);
      const int d = vert(pos[1], neg[0]);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }

  void run3d() {
    static const int tets[6][4] = {{0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7},
                                   {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7}};
    static const int off[8][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0},
                                  {0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}};
    for (int i = 0; i < res; ++i)
      for (int j = 0; j < res; ++j)
        for (int k = 0; k < res; ++k) {
          size_t cn[8];
          bool any_pos = false, any_neg = false;
          for (int v = 0; v < 8; ++v) {
            cn[v] = node(i + off[v][0], j + off[v][1], k + off[v][2]);
            (vals[cn[v]] > 0 ? any_pos : any_neg) = true;
          }
          if (!any_pos || !any_neg) continue;
          Eigen::Vector3d cp[8];
          for (int v = 0; v < 8; ++v)
            cp[v] = node_point(i + off[v][0], j + off[v][1], k + off[v][2]);
          for (const auto& t : tets)
            emit_tet({cn[t[0]], cn[t[1]], cn[t[2]], cn[t[3]]},
                     {cp[t[0]], cp[t[1]], cp[t[2]], cp[t[3]]});
        }
  }

  // Merge vertices closer than weld_tol, drop collapsed cells, prune unused
  // vertices. Keeps indices in first-use order so output is deterministic.
  void weld() {
    const double tol = mesh.weld_tol;
    const size_t nv = mesh.vertices.size();
    UnionFind uf(nv);
    std::unordered_map<uint64_t, std::vector<int>> cells;
    auto cell_of = [&](const Eigen::Vector3d& p) {
      const int64_t cx = static_cast<int64_t>(std::floor(p[0] / tol));
      const int64_t cy = static_cast<int64_t>(std::floor(p[1] / tol));
      const int64_t cz = static_cast<int64_t>(std::floor(p[2] / tol));
      return (static_cast<uint64_t>(cx & 0x1fffff) << 42) |
             (static_cast<uint64_t>(cy & 0x1fffff) << 21) |
             static_cast<uint64_t>(cz & 0x1fffff);
    };
    for (size_t v = 0; v < nv; ++v) cells[cell_of(mesh.vertices[v])].push_back(v);
    for (size_t v = 0; v < nv; ++v) {
      const Eigen::Vector3d& p = mesh.vertices[v];
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dz = -1; dz <= 1; ++dz) {
            Eigen::Vector3d q = p;
            q[0] += dx * tol;
            q[1] += dy * tol;
            q[2] += dz * tol;
            auto it = cells.find(cell_of(q));
            if (it == cells.end()) continue;
            for (int w : it->second)
              if (static_cast<size_t>(w) > v &&
                  (mesh.vertices[w] - p).norm() < tol)
                uf.unite(static_cast<int>(v), w);
          }
    }
    std::vector<int> remap(nv, -1);
    std::vector<Eigen::Vector3d> verts;
    auto mapped = [&](int v) {
      const int root = uf.find(v);
      if (remap[root] < 0) {
        remap[root] = static_cast<int>(verts.size());
        verts.push_back(mesh.vertices[root]);
      }
      return remap[root];
    };
    std::vector<std::array<int, 3>> tris;
    for (auto& t : mesh.triangles) {
      const std::array<int, 3> m = {mapped(t[0]), mapped(t[1]), mapped(t[2])};
      if (m[0] != m[1] && m[1] != m[2] && m[0] != m[2]) tris.push_back(m);
    }
    std::vector<std::array<int, 2>> segs;
    for (auto& s : mesh.segments) {
      const std::array<int, 2> m = {mapped(s[0]), mapped(s[1])};
      if (m[0] != m[1]) segs.push_back(m);
    }
    // prune vertices that lost all their cells
    std::vector<bool> used(verts.size(), false);
    for (auto& t : tris) used[t[0]] = used[t[1]] = used[t[2]] = true;
    for (auto& s : segs) used[s[0]] = used[s[1]] = true;
    std::vector<int> prune(verts.size(), -1);
    std::vector<Eigen::Vector3d> final_verts;
    for (size_t v = 0; v < verts.size(); ++v)
      if (used[v]) {
        prune[v] = static_cast<int>(final_verts.size());
        final_verts.push_back(verts[v]);
      }
    for (auto& t : tris) t = {prune[t[0]], prune[t[1]], prune[t[2]]};
    for (auto& s : segs) s = {prune[s[0]], prune[s[1]]};
    mesh.vertices = std::move(final_verts);
    mesh.triangles = std::move(tris);
    mesh.segments = std::move(segs);
  }
};

uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint64_t>(b);
}

}  // namespace

Mesh extract_isosurface(const MultiPoly& p, const Box& bbox, int res) {
  if (p.nvars() != 2 && p.nvars() != 3)
    throw std::invalid_argument("extract_isosurface: polynomial must have 2 or 3 variables");
  if (bbox.dim() != p.nvars()) throw std::invalid_argument("extract_isosurface: bbox dim mismatch");
  if (res < 16) throw std::invalid_argument("extract_isosurface: res must be >= 16");

  Extractor ex(p, bbox, res);
  ex.check_face_edges();
  if (ex.dim == 2)
    ex.run2d();
  else
    ex.run3d();
  ex.weld();
  return std::move(ex.mesh);
}

int euler_char(const Mesh& m) {
  if (m.dim == 2) {
    std::vector<int> degree(m.vertices.size(), 0);
    std::map<uint64_t, int> edges;
    for (const auto& s : m.segments) {
      ++edges[edge_key(s[0], s[1])];
      ++degree[s[0]];
      ++degree[s[1]];
    }
    for (int d : degree)
      if (d > 2) throw Error("euler_char: non-manifold polyline vertex");
    return static_cast<int>(m.vertices.size()) - static_cast<int>(edges.size());
  }
  std::map<uint64_t, int> edges;
  for (const auto& t : m.triangles) {
    ++edges[edge_key(t[0], t[1])];
    ++edges[edge_key(t[1], t[2])];
    ++edges[edge_key(t[0], t[2])];
  }
  for (const auto& [key, count] : edges) {
    if (count >= 3)
      throw Error("euler_char: non-manifold edge (" +
                  std::to_string(static_cast<int>(key >> 32)) + ", " +
                  std::to_string(static_cast<int>(key & 0xffffffffu)) + ") with " +
                  std::to_string(count) + " incident triangles");
  }
  return static_cast<int>(m.vertices.size()) - static_cast<int>(edges.size()) +
         static_cast<int>(m.triangles.size());
}

int unique_edge_count(const Mesh& m) {
  std::map<uint64_t, int> edges;
  for (const auto& s : m.segments) ++edges[edge_key(s[0], s[1])];
  for (const auto& t : m.triangles) {
    ++edges[edge_key(t[0], t[1])];
    ++edges[edge_key(t[1], t[2])];
    ++edges[edge_key(t[0], t[2])];
  }
  return static_cast<int>(edges.size());
}

namespace {

std::vector<int> vertex_component_labels(const Mesh& m) {
  UnionFind uf(m.vertices.size());
  for (const auto& s : m.segments) uf.unite(s[0], s[1]);
  for (const auto& t : m.triangles) {
    uf.unite(t[0], t[1]);
    uf.unite(t[1], t[2]);
  }
  std::vector<int> label(m.vertices.size(), -1);
  int next = 0;
  for (size_t v = 0; v < m.vertices.size(); ++v) {
    const int root = uf.find(static_cast<int>(v));
    if (label[root] < 0) label[root] = next++;
    label[v] = label[root];
  }
  return label;
}

}  // namespace

int component_count(const Mesh& m) {
  if (m.empty()) return 0;
  const auto label = vertex_component_labels(m);
  int mx = -1;
  for (int l : label) mx = std::max(mx, l);
  return mx + 1;
}

std::vector<int> component_euler_chars(const Mesh& m) {
  if (m.empty()) return {};
  const auto label = vertex_component_labels(m);
  const int nc = component_count(m);
  std::vector<int> v(nc, 0), f(nc, 0);
  std::vector<std::map<uint64_t, bool>> edges(nc);
  for (size_t i = 0; i < m.vertices.size(); ++i) ++v[label[i]];
  for (const auto& s : m.segments) edges[label[s[0]]][edge_key(s[0], s[1])] = true;
  for (const auto& t : m.triangles) {
    const int c = label[t[0]];
    ++f[c];
    edges[c][edge_key(t[0], t[1])] = true;
    edges[c][edge_key(t[1], t[2])] = true;
    edges[c][edge_key(t[0], t[2])] = true;
  }
  std::vector<int> chi(nc);
  for (int c = 0; c < nc; ++c)
    chi[c] = v[c] - static_cast<int>(edges[c].size()) + f[c];
  std::sort(chi.begin(), chi.end());
  return chi;
}

void export_obj(const Mesh& m, const std::string& path) {
  if (m.dim != 3) throw std::invalid_argument("export_obj: 3-D meshes only");
  if (m.empty()) throw Error("export_obj: empty mesh");
  std::ofstream out(path);
  if (!out) throw Error("export_obj: cannot open " + path);
  for (const auto& v : m.vertices)
    out << "v " << format_double(v[0]) << ' ' << format_double(v[1]) << ' '
        << format_double(v[2]) << '\n';
  for (const auto& t : m.triangles)
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  if (!out) throw Error("export_obj: write failure on " + path);
}

}  // namespace sgmap
