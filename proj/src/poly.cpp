#include "sgmap/poly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace sgmap {

int total_degree(const Exponents& e) {
  int d = 0;
  for (int x : e) d += x;
  return d;
}

bool graded_lex_less(const Exponents& a, const Exponents& b) {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

namespace {

std::vector<int> build_eval_order(const std::vector<Term>& terms) {
  std::vector<int> order(terms.size());
  for (size_t i = 0; i < terms.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    const int di = total_degree(terms[i].exps);
    const int dj = total_degree(terms[j].exps);
    if (di != dj) return di < dj;
    const double ai = std::abs(terms[i].coeff);
    const double aj = std::abs(terms[j].coeff);
    if (ai != aj) return ai < aj;
    return std::lexicographical_compare(terms[i].exps.begin(), terms[i].exps.end(),
                                        terms[j].exps.begin(), terms[j].exps.end());
  });
  return order;
}

double pow_int(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

MultiPoly make_poly(int nvars, std::vector<Term> terms, double drop_tol) {
  std::map<Exponents, double> combined;
  for (auto& t : terms) {
    if (static_cast<int>(t.exps.size()) != nvars)
      throw std::invalid_argument("term exponent vector length != nvars");
    for (int e : t.exps)
      if (e < 0) throw std::invalid_argument("negative exponent");
    combined[std::move(t.exps)] += t.coeff;
  }
  MultiPoly p(nvars);
  for (auto& [exps, coeff] : combined) {
    if (coeff == 0.0 || std::abs(coeff) < drop_tol) continue;
    p.terms_.push_back({exps, coeff});
  }
  std::sort(p.terms_.begin(), p.terms_.end(),
            [](const Term& a, const Term& b) { return graded_lex_less(a.exps, b.exps); });
  p.eval_order_ = build_eval_order(p.terms_);
  return p;
}

MultiPoly::MultiPoly(int nvars, const std::vector<Term>& terms) {
  *this = make_poly(nvars, terms, 0.0);
}

MultiPoly MultiPoly::constant(int nvars, double c) {
  return MultiPoly(nvars, {{Exponents(nvars, 0), c}});
}

MultiPoly MultiPoly::variable(int nvars, int index) {
  if (index < 0 || index >= nvars) throw std::invalid_argument("variable index out of range");
  Exponents e(nvars, 0);
  e[index] = 1;
  return MultiPoly(nvars, {{e, 1.0}});
}

MultiPoly MultiPoly::monomial(Exponents exps, double coeff) {
  const int n = static_cast<int>(exps.size());
  return MultiPoly(n, {{std::move(exps), coeff}});
}

int MultiPoly::degree() const {
  if (terms_.empty()) return -1;
  return total_degree(terms_.back().exps);
}

bool MultiPoly::operator==(const MultiPoly& other) const {
  if (nvars_ != other.nvars_ || terms_.size() != other.terms_.size()) return false;
  for (size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i].exps != other.terms_[i].exps || terms_[i].coeff != other.terms_[i].coeff)
      return false;
  return true;
}

UniPoly::UniPoly(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double eval(const UniPoly& p, double t) {
  double r = 0.0;
  for (size_t i = p.coeffs().size(); i-- > 0;) r = r * t + p.coeffs()[i];
  return r;
}

UniPoly derivative(const UniPoly& p) {
  std::vector<double> d;
  for (size_t i = 1; i < p.coeffs().size(); ++i)
    d.push_back(p.coeffs()[i] * static_cast<double>(i));
  return UniPoly(std::move(d));
}

double eval_at(const MultiPoly& p, const double* point) {
  double sum = 0.0;
  const auto& terms = p.terms();
  for (int idx : p.eval_order()) {
    const Term& t = terms[idx];
    double v = t.coeff;
    for (int i = 0; i < p.nvars(); ++i) v *= pow_int(point[i], t.exps[i]);
    sum += v;
  }
  return sum;
}

double eval(const MultiPoly& p, const Eigen::VectorXd& point) {
  if (point.size() != p.nvars())
    throw std::invalid_argument("eval: point dimension != nvars");
  return eval_at(p, point.data());
}

MultiPoly partial_derivative(const MultiPoly& p, int var) {
  if (var < 0 || var >= p.nvars())
    throw std::invalid_argument("partial_derivative: variable index out of range");
  std::vector<Term> out;
  for (const Term& t : p.terms()) {
    if (t.exps[var] == 0) continue;
    Term d = t;
    d.coeff *= d.exps[var];
    d.exps[var] -= 1;
    out.push_back(std::move(d));
  }
  return make_poly(p.nvars(), std::move(out), 0.0);
}

std::vector<MultiPoly> gradient(const MultiPoly& p) {
  std::vector<MultiPoly> g;
  g.reserve(p.nvars());
  for (int i = 0; i < p.nvars(); ++i) g.push_back(partial_derivative(p, i));
  return g;
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
  if (a.nvars() != b.nvars()) throw std::invalid_argument("nvars mismatch");
  std::vector<Term> terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return make_poly(a.nvars(), std::move(terms), kCoeffDropTol);
}

MultiPoly operator-(const MultiPoly& a) {
  std::vector<Term> terms = a.terms();
  for (Term& t : terms) t.coeff = -t.coeff;
  return make_poly(a.nvars(), std::move(terms), 0.0);
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return a + (-b); }

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.nvars() != b.nvars()) throw std::invalid_argument("nvars mismatch");
  std::vector<Term> terms;
  terms.reserve(a.terms().size() * b.terms().size());
  for (const Term& ta : a.terms())
    for (const Term& tb : b.terms()) {
      Term t;
      t.exps.resize(a.nvars());
      for (int i = 0; i < a.nvars(); ++i) t.exps[i] = ta.exps[i] + tb.exps[i];
      t.coeff = ta.coeff * tb.coeff;
      terms.push_back(std::move(t));
    }
  return make_poly(a.nvars(), std::move(terms), kCoeffDropTol);
}

MultiPoly operator*(const MultiPoly& a, double s) {
  std::vector<Term> terms = a.terms();
  for (Term& t : terms) t.coeff *= s;
  return make_poly(a.nvars(), std::move(terms), kCoeffDropTol);
}

MultiPoly product_of(const std::vector<MultiPoly>& ps) {
  if (ps.empty()) throw std::invalid_argument("product_of: empty list");
  MultiPoly r = ps[0];
  for (size_t i = 1; i < ps.size(); ++i) r = r * ps[i];
  return r;
}

MultiPoly compose_univariate(const UniPoly& outer, const MultiPoly& inner,
                             double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("compose_univariate: scale must be > 0");
  const int n = inner.nvars();
  if (outer.is_zero()) return MultiPoly::zero(n);
  const MultiPoly scaled = inner * (1.0 / scale);
  MultiPoly result = MultiPoly::constant(n, outer.coeffs().back());
  for (int d = outer.degree() - 1; d >= 0; --d)
    result = result * scaled + MultiPoly::constant(n, outer.coeffs()[d]);
  return result;
}

MultiPoly lift(const MultiPoly& p, int new_nvars, int offset) {
  if (offset < 0 || offset + p.nvars() > new_nvars)
    throw std::invalid_argument("lift: variables out of range");
  std::vector<Term> terms;
  for (const Term& t : p.terms()) {
    Term u;
    u.exps.assign(new_nvars, 0);
    for (int i = 0; i < p.nvars(); ++i) u.exps[offset + i] = t.exps[i];
    u.coeff = t.coeff;
    terms.push_back(std::move(u));
  }
  return make_poly(new_nvars, std::move(terms), 0.0);
}

MultiPoly linear_substitution(const MultiPoly& p, const Eigen::MatrixXd& m) {
  const int n = p.nvars();
  if (m.rows() != n || m.cols() != n)
    throw std::invalid_argument("linear_substitution: matrix must be nvars x nvars");
  std::vector<MultiPoly> images;
  for (int i = 0; i < n; ++i) {
    std::vector<Term> lin;
    for (int j = 0; j < n; ++j) {
      if (m(i, j) == 0.0) continue;
      Exponents e(n, 0);
      e[j] = 1;
      lin.push_back({e, m(i, j)});
    }
    images.push_back(MultiPoly(n, lin));
  }
  MultiPoly result = MultiPoly::zero(n);
  for (const Term& t : p.terms()) {
    MultiPoly mono = MultiPoly::constant(n, t.coeff);
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < t.exps[i]; ++e) mono = mono * images[i];
    result = result + mono;
  }
  return result;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string to_text(const MultiPoly& p) {
  std::string out;
  for (const Term& t : p.terms()) {
    out += format_double(t.coeff);
    for (int e : t.exps) {
      out += ' ';
      out += std::to_string(e);
    }
    out += '\n';
  }
  return out;
}

MultiPoly multipoly_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Term> terms;
  int nvars = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Term t;
    if (!(ls >> t.coeff)) throw ConfigError("polynomial text: bad coefficient");
    int e;
    while (ls >> e) t.exps.push_back(e);
    if (nvars < 0)
      nvars = static_cast<int>(t.exps.size());
    else if (static_cast<int>(t.exps.size()) != nvars)
      throw ConfigError("polynomial text: inconsistent variable count");
    terms.push_back(std::move(t));
  }
  if (nvars < 0) throw ConfigError("polynomial text: empty input");
  return MultiPoly(nvars, terms);
}

}  // namespace sgmap
