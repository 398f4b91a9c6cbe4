#include "sgmap/box.hpp"

#include <cmath>
#include <limits>

namespace sgmap {

void for_each_grid_node(const Box& box, int res,
                        const std::function<void(const Eigen::VectorXd&)>& fn) {
  if (!box.valid()) throw std::invalid_argument("invalid box");
  if (res < 1) throw std::invalid_argument("grid resolution must be >= 1");
  const int dim = box.dim();
  std::vector<int> idx(dim, 0);
  Eigen::VectorXd x(dim);
  const Eigen::VectorXd step = box.extent() / res;
  while (true) {
    for (int i = 0; i < dim; ++i) x[i] = box.lo[i] + idx[i] * step[i];
    fn(x);
    int axis = dim - 1;
    while (axis >= 0 && ++idx[axis] > res) idx[axis--] = 0;
    if (axis < 0) break;
  }
}

std::vector<double> grid_eval(const MultiPoly& p, const Box& box, int res) {
  if (!box.valid()) throw std::invalid_argument("invalid box");
  if (p.nvars() != box.dim()) throw std::invalid_argument("grid_eval: dim mismatch");
  const int dim = box.dim();
  const int nodes = res + 1;

  int maxdeg = 0;
  for (const Term& t : p.terms())
    for (int e : t.exps) maxdeg = std::max(maxdeg, e);

  // pow[axis][node * (maxdeg+1) + e] = coordinate^e, built by successive
  // multiplication exactly like eval()'s pow_int.
  std::vector<std::vector<double>> pow(dim);
  for (int a = 0; a < dim; ++a) {
    pow[a].resize(static_cast<size_t>(nodes) * (maxdeg + 1));
    const double step = (box.hi[a] - box.lo[a]) / res;
    for (int i = 0; i < nodes; ++i) {
      const double c = box.lo[a] + i * step;
      double v = 1.0;
      pow[a][static_cast<size_t>(i) * (maxdeg + 1)] = 1.0;
      for (int e = 1; e <= maxdeg; ++e) {
        v *= c;
        pow[a][static_cast<size_t>(i) * (maxdeg + 1) + e] = v;
      }
    }
  }

  size_t count = 1;
  for (int a = 0; a < dim; ++a) count *= nodes;
  std::vector<double> out(count, 0.0);

  const auto& terms = p.terms();
  std::vector<int> order = p.eval_order();

  std::vector<int> idx(dim, 0);
  for (size_t flat = 0; flat < count; ++flat) {
    double sum = 0.0;
    for (int ti : order) {
      const Term& t = terms[ti];
      double v = t.coeff;
      for (int a = 0; a < dim; ++a)
        v *= pow[a][static_cast<size_t>(idx[a]) * (maxdeg + 1) + t.exps[a]];
      sum += v;
    }
    out[flat] = sum;
    int axis = dim - 1;
    while (axis >= 0 && ++idx[axis] > res) idx[axis--] = 0;
  }
  return out;
}

double grid_max(const MultiPoly& p, const Box& box, int res) {
  const auto vals = grid_eval(p, box, res);
  double m = -std::numeric_limits<double>::infinity();
  for (double v : vals) m = std::max(m, v);
  return m;
}

double grid_max_abs(const MultiPoly& p, const Box& box, int res) {
  const auto vals = grid_eval(p, box, res);
  double m = 0.0;
  for (double v : vals) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace sgmap
