#include "sgmap/analyze.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sgmap/mesh.hpp"

namespace sgmap {

namespace {

struct PolyWithGrad {
  const MultiPoly& p;
  std::vector<MultiPoly> grads;
  explicit PolyWithGrad(const MultiPoly& poly) : p(poly), grads(gradient(poly)) {}

  double value(const Eigen::VectorXd& z) const { return eval(p, z); }
  Eigen::VectorXd grad(const Eigen::VectorXd& z) const {
    Eigen::VectorXd g(p.nvars());
    for (int i = 0; i < p.nvars(); ++i) g[i] = eval(grads[i], z);
    return g;
  }
};

// Damped Newton toward P = 0; returns true when |P| <= tol within maxit.
bool newton_project(const PolyWithGrad& pg, Eigen::VectorXd& z, double tol,
                    int maxit) {
  double f = pg.value(z);
  for (int it = 0; it < maxit; ++it) {
    if (std::abs(f) <= tol) return true;
    const Eigen::VectorXd g = pg.grad(z);
    const double g2 = g.squaredNorm();
    if (g2 < 1e-30) return false;
    Eigen::VectorXd step = (f / g2) * g;
    double scale = 1.0;
    for (int damp = 0; damp < 25; ++damp) {
      const Eigen::VectorXd trial = z - scale * step;
      const double ft = pg.value(trial);
      if (std::abs(ft) < std::abs(f)) {
        z = trial;
        f = ft;
        break;
      }
      scale *= 0.5;
      if (damp == 24) return false;
    }
  }
  return std::abs(f) <= tol;
}

void fiber_direction_set(int k, int count, std::vector<Eigen::VectorXd>& dirs);

}  // namespace

std::vector<SamplePoint> sample_manifold(const Hypersurface& h, int count,
                                         uint64_t seed) {
  if (count <= 0) throw std::invalid_argument("sample_manifold: count must be > 0");
  const PolyWithGrad pg(h.P);
  const Box box = Box::product(h.region.bbox, h.bbox_y);
  Rng rng(seed);
  std::vector<SamplePoint> out;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd z = rng.point_in(box);
    if (!newton_project(pg, z, 1e-10, 50)) continue;
    SamplePoint sp;
    sp.coords = z;
    sp.residual = std::abs(pg.value(z));
    sp.grad_norm = pg.grad(z).norm();
    out.push_back(std::move(sp));
  }
  if (static_cast<int>(out.size()) < count / 4)
    throw Error("sample_manifold: only " + std::to_string(out.size()) + " of " +
                std::to_string(count) +
                " seeds converged (empty or near-singular zero set?)");
  return out;
}

NonsingularReport verify_nonsingular(const Hypersurface& h,
                                     const std::vector<SamplePoint>& samples,
                                     double delta) {
  if (samples.empty()) throw std::invalid_argument("verify_nonsingular: no samples");
  NonsingularReport rep;
  rep.min_sample_grad = std::numeric_limits<double>::infinity();
  double max_grad = 0.0;
  for (const SamplePoint& s : samples) {
    max_grad = std::max(max_grad, s.grad_norm);
    if (s.grad_norm < rep.min_sample_grad) {
      rep.min_sample_grad = s.grad_norm;
      rep.min_sample_point = s.coords;
    }
  }
  rep.delta = delta > 0.0 ? delta : 1e-4 * max_grad;

  // Constrained descent of ||grad P||^2 over the zero set, restarted from a
  // subsample; guards against unlucky sampling of a singular pocket.
  const PolyWithGrad pg(h.P);
  const int nv = h.P.nvars();
  std::vector<std::vector<MultiPoly>> hess(nv);
  for (int i = 0; i < nv; ++i) hess[i] = gradient(pg.grads[i]);

  rep.descent_min_grad = rep.min_sample_grad;
  rep.descent_min_point = rep.min_sample_point;
  const Box box = Box::product(h.region.bbox, h.bbox_y);
  const double alpha0 = 0.05 * box.extent().minCoeff();
  const size_t stride = std::max<size_t>(1, samples.size() / 48);
  for (size_t si = 0; si < samples.size(); si += stride) {
    Eigen::VectorXd z = samples[si].coords;
    double g2 = pg.grad(z).squaredNorm();
    for (int it = 0; it < 80; ++it) {
      const Eigen::VectorXd g = pg.grad(z);
      Eigen::VectorXd hg(nv);
      for (int i = 0; i < nv; ++i) {
        double acc = 0.0;
        for (int j = 0; j < nv; ++j) acc += eval(hess[i][j], z) * g[j];
        hg[i] = acc;
      }
      Eigen::VectorXd dir = 2.0 * hg;  // gradient of ||grad P||^2
      const double gn2 = g.squaredNorm();
      if (gn2 > 1e-30) dir -= (dir.dot(g) / gn2) * g;  // tangent projection
      const double dn = dir.norm();
      if (dn < 1e-14) break;
      dir /= dn;
      bool moved = false;
      double alpha = alpha0;
      for (int bt = 0; bt < 30; ++bt) {
        Eigen::VectorXd trial = z - alpha * dir;
        if (newton_project(pg, trial, 1e-9, 25)) {
          const double t2 = pg.grad(trial).squaredNorm();
          if (t2 < g2 * (1.0 - 1e-12)) {
            z = trial;
            g2 = t2;
            moved = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    const double gn = std::sqrt(g2);
    if (gn < rep.descent_min_grad) {
      rep.descent_min_grad = gn;
      rep.descent_min_point = z;
    }
  }
  rep.passed = std::min(rep.min_sample_grad, rep.descent_min_grad) >= rep.delta;
  return rep;
}

SingularSetReport singular_set_check(const Hypersurface& h, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("singular_set_check: tol must be > 0");
  SingularSetReport rep;
  rep.tol = tol;

  const int nv = h.n + h.k;
  const PolyWithGrad pg(h.P);
  std::vector<MultiPoly> vertical;  // dP/dy_j
  for (int j = 0; j < h.k; ++j) vertical.push_back(pg.grads[h.n + j]);
  std::vector<std::vector<MultiPoly>> vgrads;
  for (const MultiPoly& v : vertical) vgrads.push_back(gradient(v));

  auto system_value = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd f(1 + h.k);
    f[0] = pg.value(z);
    for (int j = 0; j < h.k; ++j) f[1 + j] = eval(vertical[j], z);
    return f;
  };
  auto system_jacobian = [&](const Eigen::VectorXd& z) {
    Eigen::MatrixXd jac(1 + h.k, nv);
    jac.row(0) = pg.grad(z).transpose();
    for (int j = 0; j < h.k; ++j)
      for (int c = 0; c < nv; ++c) jac(1 + j, c) = eval(vgrads[j][c], z);
    return jac;
  };
  auto gauss_newton = [&](Eigen::VectorXd& z) {
    Eigen::VectorXd f = system_value(z);
    for (int it = 0; it < 40; ++it) {
      if (f.lpNorm<Eigen::Infinity>() <= 1e-11) return true;
      const Eigen::MatrixXd jac = system_jacobian(z);
      const Eigen::VectorXd step =
          jac.completeOrthogonalDecomposition().solve(f);
      double scale = 1.0;
      bool moved = false;
      for (int damp = 0; damp < 20; ++damp) {
        const Eigen::VectorXd trial = z - scale * step;
        const Eigen::VectorXd ft = system_value(trial);
        if (ft.norm() < f.norm()) {
          z = trial;
          f = ft;
          moved = true;
          break;
        }
        scale *= 0.5;
      }
      if (!moved) break;
    }
    return f.lpNorm<Eigen::Infinity>() <= 1e-9;
  };

  // Seeds: sampled zeros of prod f_j, lifted with y = 0.
  const auto boundary = sample_boundary(h.region, 256);
  if (boundary.empty()) throw Error("singular_set_check: no boundary samples found");
  for (const auto& xb : boundary) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(nv);
    z.head(h.n) = xb;
    if (gauss_newton(z)) rep.candidates.push_back(z);
  }

  // Hausdorff distance between candidate x-projections and the boundary
  // sample set, both directions.
  double d_cb = 0.0;
  for (const auto& z : rep.candidates) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& xb : boundary) best = std::min(best, (z.head(h.n) - xb).norm());
    d_cb = std::max(d_cb, best);
  }
  double d_bc = rep.candidates.empty() ? std::numeric_limits<double>::infinity() : 0.0;
  for (const auto& xb : boundary) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : rep.candidates) best = std::min(best, (z.head(h.n) - xb).norm());
    d_bc = std::max(d_bc, best);
  }
  rep.hausdorff_to_boundary = std::max(d_cb, d_bc);

  for (const auto& z : rep.candidates)
    rep.max_vertical_value =
        std::max(rep.max_vertical_value, std::abs(eval(h.fvert, Eigen::VectorXd(z.tail(h.k)))));

  // Interior sweep: projection-critical points over the certified interior
  // violate the expected structure.
  const auto probes = sample_manifold(h, 128, 0x5eed5eedULL);
  for (const SamplePoint& s : probes) {
    double v2 = 0.0;
    for (int j = 0; j < h.k; ++j) {
      const double v = eval(vertical[j], s.coords);
      v2 += v * v;
    }
    if (std::sqrt(v2) > 10.0 * tol * (1.0 + s.grad_norm)) continue;
    Eigen::VectorXd z = s.coords;
    if (!gauss_newton(z)) continue;
    const Eigen::VectorXd x = z.head(h.n);
    double bdist = std::numeric_limits<double>::infinity();
    for (const auto& xb : boundary) bdist = std::min(bdist, (x - xb).norm());
    if (bdist <= 100.0 * tol) continue;  // it refined onto the boundary set
    try {
      if (classify_point(h.region, x, h.region_tol).tag == PointTag::Interior) {
        rep.interior_violation = true;
        rep.interior_witness = z;
        break;
      }
    } catch (const AmbiguousPointError&) {
      // not interior; ignore
    }
  }

  rep.passed = !rep.candidates.empty() && rep.hausdorff_to_boundary <= tol &&
               rep.max_vertical_value <= tol && !rep.interior_violation;
  return rep;
}

std::string to_string(FiberClass c) {
  switch (c) {
    case FiberClass::Point: return "point";
    case FiberClass::TwoPoints: return "two_points";
    case FiberClass::Circle: return "circle";
    case FiberClass::Unknown: return "unknown";
    case FiberClass::NotComputed: return "not_computed";
  }
  return "unknown";
}

namespace {

// Roots of g(y) = 0 on [lo, hi] by sign-change bracketing plus bisection.
std::vector<double> univariate_roots(const MultiPoly& g, double lo, double hi) {
  const int scan = 4096;
  std::vector<double> roots;
  Eigen::VectorXd y(1);
  y[0] = lo;
  double prev = eval(g, y);
  for (int i = 1; i <= scan; ++i) {
    const double t = lo + (hi - lo) * i / scan;
    y[0] = t;
    const double cur = eval(g, y);
    if ((prev > 0) != (cur > 0)) {
      double a = lo + (hi - lo) * (i - 1) / scan, b = t;
      double fa = prev;
      for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
        const double m = 0.5 * (a + b);
        y[0] = m;
        const double fm = eval(g, y);
        if ((fm > 0) == (fa > 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev = cur;
  }
  return roots;
}

void fiber_direction_set(int k, int count, std::vector<Eigen::VectorXd>& dirs) {
  dirs.clear();
  if (k == 1) {
    dirs.push_back(Eigen::VectorXd::Constant(1, 1.0));
    dirs.push_back(Eigen::VectorXd::Constant(1, -1.0));
  } else if (k == 2) {
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * M_PI * i / count;
      Eigen::VectorXd u(2);
      u << std::cos(a), std::sin(a);
      dirs.push_back(u);
    }
  } else {
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = 2.39996322972865332 * i;
      Eigen::VectorXd u(k);
      u.setZero();
      u[0] = rho * std::cos(a);
      u[1] = rho * std::sin(a);
      u[2] = z;
      dirs.push_back(u);
    }
  }
}

// Outermost crossing of fvert = level along direction u, or -1 if none.
double outer_radial_crossing(const MultiPoly& fvert, const Eigen::VectorXd& u,
                             double rmax, double level) {
  const int scan = 128;
  double prev = eval(fvert, Eigen::VectorXd(rmax * u)) - level;
  for (int i = 1; i <= scan; ++i) {
    const double s = rmax * (scan - i) / scan;
    const double cur = eval(fvert, Eigen::VectorXd(s * u)) - level;
    if ((prev > 0) != (cur > 0)) {
      double hi = rmax * (scan - i + 1) / scan, lo = s;
      double fhi = prev;
      for (int it = 0; it < 50; ++it) {
        const double m = 0.5 * (lo + hi);
        const double fm = eval(fvert, Eigen::VectorXd(m * u)) - level;
        if ((fm > 0) == (fhi > 0)) {
          hi = m;
          fhi = fm;
        } else {
          lo = m;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev = cur;
  }
  return -1.0;
}

double level_tolerance(const Hypersurface& h) {
  return 1e-8 * std::max(h.level_max, 1e-6);
}

}  // namespace

FiberReport fiber_at(const Hypersurface& h, const Eigen::VectorXd& x) {
  if (x.size() != h.n) throw std::invalid_argument("fiber_at: base point dim mismatch");
  const PointClass cls = classify_point(h.region, x, h.region_tol);
  if (cls.tag == PointTag::Exterior)
    throw std::invalid_argument("fiber_at: base point lies outside the region");

  FiberReport rep;
  rep.base_x = x;
  rep.level = eval(h.f0, eval(h.prod, x) / h.T);

  if (std::abs(rep.level) <= level_tolerance(h)) {
    rep.classification = FiberClass::Point;
    rep.components = 1;
    rep.euler_char = 1;
    return rep;
  }

  if (h.k == 1) {
    const MultiPoly g = h.fvert - MultiPoly::constant(1, rep.level);
    const auto roots = univariate_roots(g, h.bbox_y.lo[0], h.bbox_y.hi[0]);
    rep.components = static_cast<int>(roots.size());
    if (roots.size() == 2) {
      rep.classification = FiberClass::TwoPoints;
      rep.euler_char = 2;
    } else {
      rep.classification = FiberClass::Unknown;
    }
    return rep;
  }

  if (h.k == 2) {
    const MultiPoly g = h.fvert - MultiPoly::constant(2, rep.level);
    try {
      const Mesh m = extract_isosurface(g, h.bbox_y, 128);
      rep.components = component_count(m);
      rep.euler_char = euler_char(m);
      rep.classification = (rep.components == 1 && *rep.euler_char == 0)
                               ? FiberClass::Circle
                               : FiberClass::Unknown;
    } catch (const Error&) {
      rep.classification = FiberClass::Unknown;
    }
    return rep;
  }

  // k >= 3: sampled union-find component count, no homeomorphism claim.
  std::vector<Eigen::VectorXd> dirs;
  fiber_direction_set(h.k, 256, dirs);
  const double rmax = h.bbox_y.hi[0];
  std::vector<Eigen::VectorXd> pts;
  for (const auto& u : dirs) {
    const double s = outer_radial_crossing(h.fvert, u, rmax, rep.level);
    if (s > 0) pts.push_back(s * u);
  }
  // link radius adapted to the realized sampling density
  double link = 0.15 * rmax;
  if (pts.size() >= 2) {
    std::vector<double> nn(pts.size(), std::numeric_limits<double>::infinity());
    for (size_t i = 0; i < pts.size(); ++i)
      for (size_t j = 0; j < pts.size(); ++j)
        if (i != j) nn[i] = std::min(nn[i], (pts[i] - pts[j]).norm());
    std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
    link = 2.5 * nn[nn.size() / 2];
  }
  std::vector<int> parent(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      if ((pts[i] - pts[j]).norm() < link) {
        const int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  int comps = 0;
  for (size_t i = 0; i < pts.size(); ++i)
    if (find(static_cast<int>(i)) == static_cast<int>(i)) ++comps;
  rep.components = comps;
  rep.classification = FiberClass::NotComputed;
  return rep;
}

FiberSuiteReport run_fiber_suite(const Hypersurface& h, int max_interior,
                                 int max_band) {
  FiberSuiteReport rep;
  std::ostringstream detail;
  rep.passed = true;

  const FiberClass expect_interior =
      h.k == 1 ? FiberClass::TwoPoints
               : (h.k == 2 ? FiberClass::Circle : FiberClass::NotComputed);

  // Interior base points from a coarse deterministic grid.
  std::vector<Eigen::VectorXd> interior;
  const int res = 24;
  for_each_grid_node(h.region.bbox, res, [&](const Eigen::VectorXd& x) {
    try {
      if (classify_point(h.region, x, h.region_tol).tag == PointTag::Interior)
        interior.push_back(x);
    } catch (const AmbiguousPointError&) {
    }
  });
  const size_t istride = std::max<size_t>(1, interior.size() / max_interior);
  for (size_t i = 0; i < interior.size(); i += istride) {
    const FiberReport f = fiber_at(h, interior[i]);
    ++rep.interior_checked;
    const bool ok = h.k <= 2 ? f.classification == expect_interior
                             : (f.classification == FiberClass::NotComputed &&
                                f.components == 1);
    if (!ok) {
      rep.passed = false;
      rep.failures.push_back(f);
    }
  }

  for (const auto& xb : sample_boundary(h.region, max_band)) {
    const FiberReport f = fiber_at(h, xb);
    ++rep.band_checked;
    if (f.classification != FiberClass::Point) {
      rep.passed = false;
      rep.failures.push_back(f);
    }
  }

  if (rep.interior_checked == 0 || rep.band_checked == 0) {
    rep.passed = false;
    detail << "no base points found; ";
  }
  detail << rep.interior_checked << " interior and " << rep.band_checked
         << " boundary fibers checked, " << rep.failures.size() << " failures";
  rep.detail = detail.str();
  return rep;
}

CollarReport collar_model_check(const Hypersurface& h, double band) {
  if (!(band > 0.0)) throw std::invalid_argument("collar_model_check: band must be > 0");
  CollarReport rep;
  rep.passed = true;

  const auto boundary = sample_boundary(h.region, 16);
  const auto prod_grads = gradient(h.prod);
  std::vector<Eigen::VectorXd> dirs;
  fiber_direction_set(h.k, 32, dirs);
  const double rmax = h.bbox_y.hi[0];

  auto fiber_extent = [&](const Eigen::VectorXd& x) -> double {
    const double level = eval(h.f0, eval(h.prod, x) / h.T);
    if (!(level > 0.0)) return -1.0;
    double ext = 0.0;
    bool found = false;
    for (const auto& u : dirs) {
      const double s = outer_radial_crossing(h.fvert, u, rmax, level);
      if (s > 0) {
        ext = std::max(ext, s);
        found = true;
      }
    }
    return found ? ext : -1.0;
  };

  std::ostringstream detail;
  for (const auto& xb : boundary) {
    Eigen::VectorXd u(h.n);
    for (int i = 0; i < h.n; ++i) u[i] = eval(prod_grads[i], xb);
    const double un = u.norm();
    if (un < 1e-12) {
      rep.passed = false;
      rep.offending_ray = xb;
      detail << "vanishing boundary gradient at a ray base; ";
      break;
    }
    u /= un;  // inward: prod increases along +u

    const int depths = 16;
    double prev = -1.0;
    bool ray_ok = true;
    double rho_band = 0.0;
    for (int j = 1; j <= depths && ray_ok; ++j) {
      const double s = band * j / depths;
      const double rho = fiber_extent(Eigen::VectorXd(xb + s * u));
      if (rho < 0.0) {
        ray_ok = false;
        detail << "ray left the region before depth " << band << "; ";
        break;
      }
      if (j > 1 && !(rho > prev)) {
        ray_ok = false;
        detail << "fiber extent not strictly increasing at depth " << s << "; ";
        break;
      }
      prev = rho;
      if (j == depths) rho_band = rho;
    }
    if (ray_ok) {
      const double rho_tiny = fiber_extent(Eigen::VectorXd(xb + (band / 256.0) * u));
      if (!(rho_tiny >= 0.0) || rho_tiny > 0.6 * rho_band) {
        ray_ok = false;
        detail << "fiber extent does not shrink toward the boundary; ";
      }
    }
    ++rep.rays_checked;
    if (!ray_ok) {
      rep.passed = false;
      rep.offending_ray = xb;
      break;
    }
  }
  if (rep.rays_checked == 0) {
    rep.passed = false;
    detail << "no boundary rays available";
  }
  rep.detail = detail.str();
  return rep;
}

}  // namespace sgmap
