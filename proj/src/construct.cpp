#include "sgmap/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sgmap {

namespace {

int construction_grid_res(const Region& r) {
  return std::max(r.grid_res, 512);
}

// Minimum of p over the sampled faces of the cube [-radius, radius]^k.
double min_on_cube_faces(const MultiPoly& p, int k, double radius, int res) {
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd y(k);
  for (int face_axis = 0; face_axis < k; ++face_axis) {
    for (int side = 0; side < 2; ++side) {
      std::vector<int> idx(k, 0);
      while (true) {
        for (int a = 0; a < k; ++a)
          y[a] = a == face_axis ? (side ? radius : -radius)
                                : -radius + 2.0 * radius * idx[a] / res;
        best = std::min(best, eval(p, y));
        int a = k - 1;
        while (a >= 0) {
          if (a == face_axis) {
            --a;
            continue;
          }
          if (++idx[a] <= res) break;
          idx[a--] = 0;
        }
        if (a < 0) break;
      }
    }
  }
  return best;
}

// Smallest cube radius whose boundary stays above the level, times a margin.
// Errors out if the sublevel set cannot be bounded.
double vertical_radius(const MultiPoly& fvert, int k, double level_max) {
  double r = 1e-3;
  while (r <= 1e6) {
    if (min_on_cube_faces(fvert, k, r, 16) > 1.05 * level_max + 1e-12) return 1.1 * r;
    r *= 2.0;
  }
  throw Error("cannot bound the vertical fibers: fvert sublevel sets appear unbounded");
}

MultiPoly sum_of_squares(int k) {
  std::vector<Term> terms;
  for (int j = 0; j < k; ++j) {
    Exponents e(k, 0);
    e[j] = 2;
    terms.push_back({e, 1.0});
  }
  return MultiPoly(k, terms);
}

void require_certificate(const Region& r, bool require_certified) {
  if (!require_certified) return;
  const RegionCertificate cert = certify(r);
  if (!cert.passed) throw Error("region is not certified; run certify for details");
}

}  // namespace

SpecValidation validate_vertical_spec(const VerticalSpec& spec, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (spec.fvert.nvars() != k)
    throw std::invalid_argument("fvert must have exactly k variables");
  if (!(spec.a > 0.0)) throw std::invalid_argument("sweep bound a must be > 0");

  SpecValidation v;
  auto add = [&](int cond, bool ok, std::string detail) {
    v.checks.push_back({cond, ok, std::move(detail)});
    if (!ok && v.passed) {
      v.passed = false;
      v.first_failed = cond;
    }
  };

  add(1, true, "split form F = f0(t) - fvert(y) enforced by representation");

  // condition (2): f0(0) = 0, f0'(0) != 0, sign agreement on (0,a] and [-a,0)
  {
    bool ok = true;
    std::ostringstream detail;
    if (spec.f0.coeff(0) != 0.0) {
      ok = false;
      detail << "f0(0) != 0; ";
    }
    const double slope = spec.f0.coeff(1);
    if (slope == 0.0) {
      ok = false;
      detail << "f0'(0) = 0; ";
    }
    for (int i = 1; i <= 64 && ok; ++i) {
      const double t = spec.a * i / 64.0;
      if (!(eval(spec.f0, t) > 0.0)) {
        ok = false;
        detail << "f0 not positive at t=" << t << "; ";
      } else if (!(eval(spec.f0, -t) < 0.0)) {
        ok = false;
        detail << "f0 not negative at t=" << -t << "; ";
      }
    }
    add(2, ok, ok ? "f0 vanishes at 0 with nonzero slope and correct signs"
                  : detail.str());
  }

  // condition (3): fvert >= 0 with zero set {0}
  {
    bool ok = true;
    std::ostringstream detail;
    if (spec.fvert.is_zero()) {
      ok = false;
      detail << "fvert is zero; ";
    }
    for (const Term& t : spec.fvert.terms()) {
      if (total_degree(t.exps) == 0) {
        ok = false;
        detail << "nonzero constant term; ";
        break;
      }
    }
    for (const Term& t : spec.fvert.terms()) {
      for (int e : t.exps)
        if (e % 2 != 0) {
          ok = false;
          detail << "odd exponent in fvert (y -> -y symmetry broken); ";
          goto evenness_done;
        }
    }
  evenness_done:
    if (ok) {
      double f0max = 0.0;
      for (int i = 1; i <= 64; ++i)
        f0max = std::max(f0max, eval(spec.f0, spec.a * i / 64.0));
      double radius = 2.0;
      try {
        radius = vertical_radius(spec.fvert, k, std::max(f0max, 1e-6));
      } catch (const Error&) {
        ok = false;
        detail << "sublevel sets of fvert are not bounded; ";
      }
      if (ok) {
        const int res = k <= 2 ? 128 : 32;
        const Box by = Box::cube(k, radius);
        const auto vals = grid_eval(spec.fvert, by, res);
        const double cell = 2.0 * radius / res;
        double maxv = 0.0;
        for (double x : vals) maxv = std::max(maxv, std::abs(x));
        const double ztol = 1e-9 * maxv;
        size_t strides[8];
        strides[k - 1] = 1;
        for (int a2 = k - 2; a2 >= 0; --a2) strides[a2] = strides[a2 + 1] * (res + 1);
        for (size_t flat = 0; flat < vals.size() && ok; ++flat) {
          if (vals[flat] < -ztol) {
            ok = false;
            detail << "fvert negative on the grid; ";
          } else if (vals[flat] <= ztol) {
            for (int a2 = 0; a2 < k; ++a2) {
              const double c = -radius + cell * ((flat / strides[a2]) % (res + 1));
              if (std::abs(c) > 1.5 * cell) {
                ok = false;
                detail << "fvert vanishes away from the origin; ";
                break;
              }
            }
          }
        }
      }
    }
    add(3, ok, ok ? "fvert nonnegative with zero set {0} (grid + even exponents)"
                  : detail.str());
  }

  // condition (4): non-singular level sets along a geometric ladder in (0, a]
  {
    bool ok = true;
    std::ostringstream detail;
    if (k <= 3 && v.passed) {
      const auto grads = gradient(spec.fvert);
      double max_grad = 0.0;
      double min_grad = std::numeric_limits<double>::infinity();
      double f0max = 0.0;
      for (int i = 1; i <= 64; ++i)
        f0max = std::max(f0max, eval(spec.f0, spec.a * i / 64.0));
      const double radius = vertical_radius(spec.fvert, k, std::max(f0max, 1e-6));
      // directions: +-e_j for k=1, a angular fan for k=2, a Fibonacci set for k=3
      std::vector<Eigen::VectorXd> dirs;
      if (k == 1) {
        dirs.push_back(Eigen::VectorXd::Constant(1, 1.0));
        dirs.push_back(Eigen::VectorXd::Constant(1, -1.0));
      } else if (k == 2) {
        for (int i = 0; i < 64; ++i) {
          const double ang = 2.0 * M_PI * i / 64.0;
          Eigen::VectorXd u(2);
          u << std::cos(ang), std::sin(ang);
          dirs.push_back(u);
        }
      } else {
        for (int i = 0; i < 64; ++i) {
          const double z = 1.0 - 2.0 * (i + 0.5) / 64.0;
          const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
          const double ang = 2.39996322972865332 * i;
          Eigen::VectorXd u(3);
          u << rho * std::cos(ang), rho * std::sin(ang), z;
          dirs.push_back(u);
        }
      }
      for (int step = 0; step < 8 && ok; ++step) {
        const double t = spec.a / std::pow(2.0, step);
        const double level = eval(spec.f0, t);
        for (const auto& u : dirs) {
          // first radial crossing fvert(s u) = level
          double slo = 0.0, shi = -1.0;
          double prev = -level;
          for (int i = 1; i <= 256; ++i) {
            const double s = radius * i / 256.0;
            const double val = eval(spec.fvert, Eigen::VectorXd(s * u)) - level;
            if (prev < 0.0 && val >= 0.0) {
              slo = radius * (i - 1) / 256.0;
              shi = s;
              break;
            }
            prev = val;
          }
          if (shi < 0) continue;  // no crossing along this ray
          for (int it = 0; it < 60; ++it) {
            const double sm = 0.5 * (slo + shi);
            const double val = eval(spec.fvert, Eigen::VectorXd(sm * u)) - level;
            (val < 0 ? slo : shi) = sm;
          }
          const Eigen::VectorXd y = 0.5 * (slo + shi) * u;
          double g2 = 0.0;
          for (int a2 = 0; a2 < k; ++a2) {
            const double g = eval(grads[a2], y);
            g2 += g * g;
          }
          const double g = std::sqrt(g2);
          max_grad = std::max(max_grad, g);
          min_grad = std::min(min_grad, g);
        }
      }
      if (!std::isfinite(min_grad)) {
        ok = false;
        detail << "no level-set points found; ";
      } else if (min_grad <= 1e-9 * (1.0 + max_grad)) {
        ok = false;
        detail << "near-singular level set (gradient norm " << min_grad << "); ";
      }
      if (ok) detail << "sampled level sets non-singular, min gradient norm " << min_grad;
    } else if (k > 3) {
      detail << "level-set sampling limited to k <= 3; not sampled";
    } else {
      detail << "skipped: earlier condition failed";
    }
    add(4, ok, detail.str());
  }

  return v;
}

double choose_T(const Region& r, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("choose_T: a must be > 0");
  require_certificate(r, true);
  const MultiPoly prod = product_of(r.boundary_polys);
  const double m = grid_max(prod, r.bbox, construction_grid_res(r));
  if (!(m > 0.0)) throw Error("choose_T: product has non-positive grid maximum (empty interior)");
  return 2.0 * m / a;
}

Hypersurface build_basic(const Region& r, int k, bool require_certified) {
  validate_region(r);
  if (k < 1) throw std::invalid_argument("build_basic: k must be >= 1");
  require_certificate(r, require_certified);

  Hypersurface h;
  h.n = r.dim;
  h.k = k;
  h.region = r;
  h.prod = product_of(r.boundary_polys);
  h.f0 = UniPoly::identity();
  h.fvert = sum_of_squares(k);
  h.T = 1.0;
  h.generalized = false;

  const int nv = h.n + k;
  MultiPoly p = lift(h.prod, nv, 0);
  for (int j = 0; j < k; ++j) {
    Exponents e(nv, 0);
    e[h.n + j] = 2;
    p = p - MultiPoly::monomial(e, 1.0);
  }
  h.P = p;

  const double m = grid_max(h.prod, r.bbox, construction_grid_res(r));
  const double radius = std::sqrt(std::max(m, 0.0)) * 1.1;
  if (!(radius > 0.0))
    throw Error("build_basic: product has non-positive grid maximum (empty interior)");
  h.bbox_y = Box::cube(k, radius);
  h.level_max = m;
  h.region_tol = default_tol(r);
  return h;
}

Hypersurface build_generalized(const Region& r, const VerticalSpec& spec,
                               bool require_certified) {
  validate_region(r);
  const int k = spec.fvert.nvars();
  const SpecValidation v = validate_vertical_spec(spec, k);
  if (!v.passed)
    throw Error("vertical spec failed condition (" + std::to_string(v.first_failed) + ")");
  require_certificate(r, require_certified);

  Hypersurface h;
  h.n = r.dim;
  h.k = k;
  h.region = r;
  h.prod = product_of(r.boundary_polys);
  h.f0 = spec.f0;
  h.fvert = spec.fvert;
  h.T = spec.T ? *spec.T : choose_T(r, spec.a);
  if (!(h.T > 0.0)) throw std::invalid_argument("T must be > 0");
  h.generalized = true;

  const int nv = h.n + k;
  h.P = compose_univariate(spec.f0, lift(h.prod, nv, 0), h.T) -
        lift(spec.fvert, nv, h.n);

  // Vertical box: every fiber satisfies fvert(y) = f0(prod/T) <= level_max.
  const int res = construction_grid_res(r);
  const auto vals = grid_eval(h.prod, r.bbox, res);
  double level_max = 0.0;
  for (double pv : vals)
    if (pv > 0.0) level_max = std::max(level_max, eval(spec.f0, pv / h.T));
  const double radius = vertical_radius(spec.fvert, k, std::max(level_max, 1e-9));
  h.bbox_y = Box::cube(k, radius);
  h.level_max = level_max;
  h.region_tol = default_tol(r);
  return h;
}

}  // namespace sgmap
