#include "sgmap/region.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sgmap {

void validate_region(const Region& r) {
  if (r.dim < 1) throw std::invalid_argument("region dim must be >= 1");
  if (r.boundary_polys.empty())
    throw std::invalid_argument("region needs at least one boundary polynomial");
  for (const MultiPoly& f : r.boundary_polys)
    if (f.nvars() != r.dim)
      throw std::invalid_argument("boundary polynomial nvars != region dim");
  if (!r.bbox.valid() || r.bbox.dim() != r.dim)
    throw std::invalid_argument("region bbox invalid");
  if (r.grid_res < 2) throw std::invalid_argument("grid_res must be >= 2");
}

namespace {

int effective_res(const Region& r) {
  return r.dim <= 2 ? r.grid_res : std::min(r.grid_res, 64);
}

}  // namespace

double default_tol(const Region& r) {
  validate_region(r);
  const int res = std::min(effective_res(r), 256);
  double m = 0.0;
  for (const MultiPoly& f : r.boundary_polys)
    m = std::max(m, grid_max_abs(f, r.bbox, res));
  return 1e-9 * m;
}

AmbiguousPointError::AmbiguousPointError(Eigen::VectorXd point_, std::vector<int> indices_)
    : Error([&] {
        std::ostringstream os;
        os << "ambiguous point classification (polynomials";
        for (int i : indices_) os << ' ' << i;
        os << " are near zero or negative together)";
        return os.str();
      }()),
      point(std::move(point_)),
      indices(std::move(indices_)) {}

namespace {

PointClass classify_values(const Eigen::VectorXd& x,
                           const std::vector<double>& vals, double tol) {
  std::vector<int> band, neg;
  for (size_t j = 0; j < vals.size(); ++j) {
    if (std::abs(vals[j]) <= tol)
      band.push_back(static_cast<int>(j));
    else if (vals[j] < -tol)
      neg.push_back(static_cast<int>(j));
  }
  if (band.empty() && neg.empty()) return {PointTag::Interior, -1};
  if (band.size() == 1 && neg.empty()) return {PointTag::BoundaryBand, band[0]};
  if (band.empty() && neg.size() == 1) return {PointTag::Exterior, neg[0]};
  std::vector<int> indices = band;
  indices.insert(indices.end(), neg.begin(), neg.end());
  std::sort(indices.begin(), indices.end());
  throw AmbiguousPointError(x, indices);
}

}  // namespace

PointClass classify_point(const Region& r, const Eigen::VectorXd& x, double tol) {
  if (x.size() != r.dim) throw std::invalid_argument("classify_point: dim mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("classify_point: tol must be > 0");
  std::vector<double> vals(r.boundary_polys.size());
  for (size_t j = 0; j < vals.size(); ++j) vals[j] = eval(r.boundary_polys[j], x);
  return classify_values(x, vals, tol);
}

PointClass classify_point(const Region& r, const Eigen::VectorXd& x) {
  return classify_point(r, x, default_tol(r));
}

RegionCertificate certify(const Region& r) {
  validate_region(r);
  const int res = effective_res(r);
  const int nodes = res + 1;
  const double tol = default_tol(r);
  const int l = static_cast<int>(r.boundary_polys.size());
  const int dim = r.dim;

  RegionCertificate cert;
  cert.grid_res = res;
  cert.tol = tol;
  cert.intersection_nonneg.name = "intersection-nonneg";
  cert.interior_positivity.name = "interior-positivity";
  cert.exactly_one_negative.name = "exactly-one-negative-outside";

  std::vector<std::vector<double>> vals(l);
  for (int j = 0; j < l; ++j) vals[j] = grid_eval(r.boundary_polys[j], r.bbox, res);
  const size_t count = vals[0].size();

  size_t strides[8];
  strides[dim - 1] = 1;
  for (int a = dim - 2; a >= 0; --a) strides[a] = strides[a + 1] * nodes;

  auto node_point = [&](size_t flat) {
    Eigen::VectorXd x(dim);
    for (int a = 0; a < dim; ++a) {
      const size_t i = (flat / strides[a]) % nodes;
      x[a] = r.bbox.lo[a] + static_cast<double>(i) * (r.bbox.hi[a] - r.bbox.lo[a]) / res;
    }
    return x;
  };

  // Classify every node; 0=interior, 1=band, 2=exterior, 3=ambiguous.
  std::vector<uint8_t> tags(count, 0);
  bool has_interior = false;
  std::vector<bool> has_pos(l, false), has_neg(l, false);
  for (size_t flat = 0; flat < count; ++flat) {
    int nband = 0, nneg = 0, jband = -1, jneg = -1;
    for (int j = 0; j < l; ++j) {
      const double v = vals[j][flat];
      if (v > tol) has_pos[j] = true;
      if (v < -tol) has_neg[j] = true;
      if (std::abs(v) <= tol) {
        ++nband;
        jband = j;
      } else if (v < -tol) {
        ++nneg;
        jneg = j;
      }
    }
    if (nband == 0 && nneg == 0) {
      tags[flat] = 0;
      has_interior = true;
    } else if (nband == 1 && nneg == 0) {
      tags[flat] = 1;
    } else if (nband == 0 && nneg == 1) {
      tags[flat] = 2;
      (void)jneg;
    } else {
      tags[flat] = 3;
      const Eigen::VectorXd x = node_point(flat);
      if (nband >= 2 && nneg == 0) {
        if (cert.intersection_nonneg.passed) {
          cert.intersection_nonneg.passed = false;
          cert.intersection_nonneg.detail = "two boundary polynomials vanish together";
          cert.intersection_nonneg.witness = x;
        }
      } else if (cert.exactly_one_negative.passed) {
        cert.exactly_one_negative.passed = false;
        cert.exactly_one_negative.detail =
            nneg >= 2 ? "two boundary polynomials negative at one point"
                      : "a polynomial vanishes while another is negative";
        cert.exactly_one_negative.witness = x;
      }
    }
    (void)jband;
  }

  if (!has_interior) {
    cert.interior_positivity.passed = false;
    cert.interior_positivity.detail = "no interior point on the grid (empty region)";
  }
  for (int j = 0; j < l && cert.interior_positivity.passed; ++j) {
    if (!has_pos[j]) {
      cert.interior_positivity.passed = false;
      cert.interior_positivity.detail =
          "boundary polynomial " + std::to_string(j) + " is never positive on the grid";
    }
  }
  for (int j = 0; j < l && cert.exactly_one_negative.passed; ++j) {
    if (!has_neg[j]) {
      cert.exactly_one_negative.passed = false;
      cert.exactly_one_negative.detail =
          "boundary polynomial " + std::to_string(j) +
          " is never negative on the grid (boundary not realized in bbox)";
    }
  }

  // Margins on the grid boundary band: nodes whose classification differs
  // from an axis neighbor. margin is the smallest |f_j| seen there,
  // grad_margin the smallest gradient norm of the responsible polynomial.
  double margin = std::numeric_limits<double>::infinity();
  double grad_margin = std::numeric_limits<double>::infinity();
  std::vector<std::vector<MultiPoly>> grads(l);
  for (int j = 0; j < l; ++j) grads[j] = gradient(r.boundary_polys[j]);
  auto band_node = [&](size_t flat) {
    double best = std::numeric_limits<double>::infinity();
    int bestj = 0;
    for (int j = 0; j < l; ++j)
      if (std::abs(vals[j][flat]) < best) {
        best = std::abs(vals[j][flat]);
        bestj = j;
      }
    margin = std::min(margin, best);
    const Eigen::VectorXd x = node_point(flat);
    double g2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double d = eval(grads[bestj][a], x);
      g2 += d * d;
    }
    grad_margin = std::min(grad_margin, std::sqrt(g2));
  };
  for (size_t flat = 0; flat < count; ++flat) {
    for (int a = 0; a < dim; ++a) {
      const size_t i = (flat / strides[a]) % nodes;
      if (i + 1 > static_cast<size_t>(res)) continue;
      const size_t nb = flat + strides[a];
      if (tags[flat] != tags[nb]) {
        band_node(flat);
        band_node(nb);
      }
    }
  }
  if (!std::isfinite(margin)) margin = 0.0;
  if (!std::isfinite(grad_margin)) grad_margin = 0.0;
  cert.margin = margin;
  cert.grad_margin = grad_margin;

  cert.passed = cert.intersection_nonneg.passed && cert.interior_positivity.passed &&
                cert.exactly_one_negative.passed;
  return cert;
}

namespace {

// Euler characteristic of the union of included grid cells (closed cubical
// complex), dim 1 or 2.
int cubical_euler(const Region& r, int res, double tol) {
  const int nodes = res + 1;
  const int l = static_cast<int>(r.boundary_polys.size());
  std::vector<std::vector<double>> vals(l);
  for (int j = 0; j < l; ++j) vals[j] = grid_eval(r.boundary_polys[j], r.bbox, res);

  auto in_region = [&](size_t flat) {
    int nband = 0, nneg = 0;
    for (int j = 0; j < l; ++j) {
      const double v = vals[j][flat];
      if (std::abs(v) <= tol)
        ++nband;
      else if (v < -tol)
        ++nneg;
    }
    return nneg == 0;  // Interior or BoundaryBand (ambiguous band counts as in)
  };

  if (r.dim == 1) {
    std::vector<bool> vused(nodes, false);
    int segs = 0;
    for (int i = 0; i < res; ++i) {
      if (in_region(i) && in_region(i + 1)) {
        ++segs;
        vused[i] = vused[i + 1] = true;
      }
    }
    int v = 0;
    for (bool b : vused) v += b;
    return v - segs;
  }

  // dim == 2; row-major, second axis fastest.
  auto at = [&](int i, int j) { return static_cast<size_t>(i) * nodes + j; };
  std::vector<bool> corner(static_cast<size_t>(nodes) * nodes, false);
  std::vector<bool> hedge(static_cast<size_t>(nodes) * res, false);  // along axis 1
  std::vector<bool> vedge(static_cast<size_t>(res) * nodes, false);  // along axis 0
  int faces = 0;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      if (!(in_region(at(i, j)) && in_region(at(i + 1, j)) && in_region(at(i, j + 1)) &&
            in_region(at(i + 1, j + 1))))
        continue;
      ++faces;
      corner[at(i, j)] = corner[at(i + 1, j)] = corner[at(i, j + 1)] =
          corner[at(i + 1, j + 1)] = true;
      hedge[static_cast<size_t>(i) * res + j] = true;
      hedge[static_cast<size_t>(i + 1) * res + j] = true;
      vedge[static_cast<size_t>(i) * nodes + j] = true;
      vedge[static_cast<size_t>(i) * nodes + j + 1] = true;
    }
  }
  long v = std::count(corner.begin(), corner.end(), true);
  long e = std::count(hedge.begin(), hedge.end(), true) +
           std::count(vedge.begin(), vedge.end(), true);
  return static_cast<int>(v - e + faces);
}

}  // namespace

int region_euler(const Region& r) {
  validate_region(r);
  if (r.dim > 2) throw Error("region_euler: only dim <= 2 is supported");
  const double tol = default_tol(r);
  int res = std::min(effective_res(r), 2048);
  int prev = 0;
  bool have_prev = false;
  while (res <= 2048) {
    const int chi = cubical_euler(r, res, tol);
    if (have_prev && chi == prev) return chi;
    prev = chi;
    have_prev = true;
    res *= 2;
  }
  throw Error("region_euler: no convergence up to resolution 2048 "
              "(region features finer than the grid)");
}

std::vector<Eigen::VectorXd> sample_boundary(const Region& r, int max_points) {
  validate_region(r);
  const MultiPoly prod = product_of(r.boundary_polys);
  const int res = effective_res(r);
  const int nodes = res + 1;
  const std::vector<double> vals = grid_eval(prod, r.bbox, res);
  const int dim = r.dim;

  size_t strides[8];
  strides[dim - 1] = 1;
  for (int a = dim - 2; a >= 0; --a) strides[a] = strides[a + 1] * nodes;

  std::vector<Eigen::VectorXd> pts;
  const Eigen::VectorXd step = r.bbox.extent() / res;
  for (size_t flat = 0; flat < vals.size(); ++flat) {
    for (int a = 0; a < dim; ++a) {
      const size_t i = (flat / strides[a]) % nodes;
      if (i + 1 > static_cast<size_t>(res)) continue;
      const size_t nb = flat + strides[a];
      if (!(vals[flat] > 0) == !(vals[nb] > 0)) continue;
      // bisect prod along the edge
      Eigen::VectorXd x0(dim);
      for (int b = 0; b < dim; ++b)
        x0[b] = r.bbox.lo[b] + static_cast<double>((flat / strides[b]) % nodes) * step[b];
      double t0 = 0.0, t1 = step[a];
      double f0 = vals[flat];
      for (int it = 0; it < 60 && t1 - t0 > 1e-12; ++it) {
        const double tm = 0.5 * (t0 + t1);
        Eigen::VectorXd xm = x0;
        xm[a] += tm;
        const double fm = eval(prod, xm);
        if (!(fm > 0) == !(f0 > 0)) {
          t0 = tm;
          f0 = fm;
        } else {
          t1 = tm;
        }
      }
      Eigen::VectorXd hit = x0;
      hit[a] += 0.5 * (t0 + t1);
      pts.push_back(std::move(hit));
    }
  }
  if (max_points > 0 && static_cast<int>(pts.size()) > max_points) {
    std::vector<Eigen::VectorXd> sub;
    const double stride = static_cast<double>(pts.size()) / max_points;
    for (int i = 0; i < max_points; ++i)
      sub.push_back(pts[static_cast<size_t>(i * stride)]);
    pts = std::move(sub);
  }
  return pts;
}

BoundaryFit fit_boundary(const std::vector<Eigen::VectorXd>& samples, int degree) {
  if (degree < 1) throw std::invalid_argument("fit_boundary: degree must be >= 1");
  if (samples.empty()) throw std::invalid_argument("fit_boundary: no samples");
  const int dim = static_cast<int>(samples[0].size());
  for (const auto& s : samples)
    if (static_cast<int>(s.size()) != dim)
      throw std::invalid_argument("fit_boundary: inconsistent sample dimension");

  // Monomial basis of total degree <= degree, graded-lex order.
  std::vector<Exponents> basis;
  Exponents e(dim, 0);
  std::function<void(int, int)> rec = [&](int axis, int remaining) {
    if (axis == dim) {
      basis.push_back(e);
      return;
    }
    for (int p = 0; p <= remaining; ++p) {
      e[axis] = p;
      rec(axis + 1, remaining - p);
    }
    e[axis] = 0;
  };
  rec(0, degree);
  std::sort(basis.begin(), basis.end(), graded_lex_less);

  const int m = static_cast<int>(basis.size());
  const int n = static_cast<int>(samples.size());
  if (n < m)
    throw std::invalid_argument("fit_boundary: need at least " + std::to_string(m) +
                                " samples for degree " + std::to_string(degree));

  Eigen::MatrixXd a(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      double v = 1.0;
      for (int d = 0; d < dim; ++d)
        for (int p = 0; p < basis[j][d]; ++p) v *= samples[i][d];
      a(i, j) = v;
    }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const Eigen::VectorXd sigma = svd.singularValues();
  if (m >= 2 && sigma(0) > 0 && sigma(m - 2) <= 1e-10 * sigma(0))
    throw Error("fit_boundary: rank-deficient basis matrix (samples lie on a "
                "lower-degree variety); retry with a lower degree");
  Eigen::VectorXd c = svd.matrixV().col(m - 1);

  // Deterministic sign: positive at the sample centroid when that value is
  // significant, otherwise positive leading (graded-lex greatest) coefficient.
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
  for (const auto& s : samples) centroid += s;
  centroid /= n;
  double cv = 0.0;
  for (int j = 0; j < m; ++j) {
    double v = c[j];
    for (int d = 0; d < dim; ++d)
      for (int p = 0; p < basis[j][d]; ++p) v *= centroid[d];
    cv += v;
  }
  double flip = 1.0;
  if (std::abs(cv) > 1e-12) {
    flip = cv > 0 ? 1.0 : -1.0;
  } else {
    for (int j = m - 1; j >= 0; --j)
      if (std::abs(c[j]) > 1e-12) {
        flip = c[j] > 0 ? 1.0 : -1.0;
        break;
      }
  }
  c *= flip;

  std::vector<Term> terms;
  for (int j = 0; j < m; ++j)
    if (c[j] != 0.0) terms.push_back({basis[j], c[j]});
  BoundaryFit fit;
  fit.poly = MultiPoly(dim, terms);
  const Eigen::VectorXd resid = a * c;
  fit.rms_residual = std::sqrt(resid.squaredNorm() / n);
  const auto grads = gradient(fit.poly);
  double min_g = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    double g2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double gd = eval(grads[d], s);
      g2 += gd * gd;
    }
    min_g = std::min(min_g, std::sqrt(g2));
  }
  fit.min_gradient_norm = min_g;
  return fit;
}

}  // namespace sgmap
