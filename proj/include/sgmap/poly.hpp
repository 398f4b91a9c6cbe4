#pragma once
// Sparse multivariate polynomials over double coefficients, plus dense
// univariate polynomials.
//
// Values are immutable after construction and every operation is a pure
// function, so concurrent reads are safe. Terms are stored in canonical
// graded lexicographic order; iteration order and text serialization are
// deterministic and the text round-trip is bit-exact.

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgmap {

using Exponents = std::vector<int>;

/// Coefficients below this magnitude are dropped after arithmetic; they are
/// cancellation noise and would otherwise blow up the sparse structure.
inline constexpr double kCoeffDropTol = 1e-14;

/// Base error for mathematical/verification failures (CLI exit code 1).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Configuration/usage error (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Term {
  Exponents exps;
  double coeff = 0.0;
};

int total_degree(const Exponents& e);

/// Graded lexicographic order: total degree first, lexicographic on ties.
bool graded_lex_less(const Exponents& a, const Exponents& b);

class MultiPoly {
 public:
  MultiPoly() = default;
  explicit MultiPoly(int nvars) : nvars_(nvars) {}

  /// Builds a polynomial from arbitrary terms; exponent vectors must all
  /// have length nvars. Like terms are combined, exact zeros dropped.
  MultiPoly(int nvars, const std::vector<Term>& terms);

  static MultiPoly zero(int nvars) { return MultiPoly(nvars); }
  static MultiPoly constant(int nvars, double c);
  static MultiPoly variable(int nvars, int index);
  static MultiPoly monomial(Exponents exps, double coeff);

  int nvars() const { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;  // total degree; -1 for the zero polynomial

  /// Term indices in evaluation order: graded, then ascending |coeff|.
  const std::vector<int>& eval_order() const { return eval_order_; }

  bool operator==(const MultiPoly& other) const;

 private:
  int nvars_ = 0;
  std::vector<Term> terms_;      // canonical graded-lex order
  std::vector<int> eval_order_;  // accumulation order for eval()

  friend MultiPoly make_poly(int nvars, std::vector<Term> terms,
                             double drop_tol);
};

/// Dense univariate polynomial, coefficients indexed by degree. The leading
/// coefficient is nonzero unless the polynomial is zero.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<double> coeffs);

  /// The identity polynomial t.
  static UniPoly identity() { return UniPoly({0.0, 1.0}); }

  const std::vector<double>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  double coeff(int d) const {
    return d >= 0 && d < static_cast<int>(coeffs_.size()) ? coeffs_[d] : 0.0;
  }

  bool operator==(const UniPoly& other) const { return coeffs_ == other.coeffs_; }

 private:
  std::vector<double> coeffs_;
};

double eval(const UniPoly& p, double t);
UniPoly derivative(const UniPoly& p);

/// Evaluates p at the given point, accumulating terms in the stable order
/// (graded, ascending absolute coefficient). Throws std::invalid_argument
/// on dimension mismatch.
double eval(const MultiPoly& p, const Eigen::VectorXd& point);

/// Raw-pointer variant for grid loops; point must have p.nvars() entries.
double eval_at(const MultiPoly& p, const double* point);

/// Exact term-wise differentiation with respect to variable var.
MultiPoly partial_derivative(const MultiPoly& p, int var);

/// All partial derivatives, index i = d/dx_i.
std::vector<MultiPoly> gradient(const MultiPoly& p);

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
MultiPoly operator*(const MultiPoly& a, double s);
inline MultiPoly operator*(double s, const MultiPoly& a) { return a * s; }
MultiPoly operator-(const MultiPoly& a);

/// Sparse product of all operands; they must share nvars and the list must
/// be non-empty.
MultiPoly product_of(const std::vector<MultiPoly>& ps);

/// Expands outer(inner / scale) as a polynomial in inner's variables.
/// scale is the paper-style normalization constant and must be positive.
MultiPoly compose_univariate(const UniPoly& outer, const MultiPoly& inner,
                             double scale);

/// Re-embeds p into a space with new_nvars variables, variable i of p
/// becoming variable offset+i.
MultiPoly lift(const MultiPoly& p, int new_nvars, int offset);

/// Applies the linear substitution x_i -> sum_j m(i,j) x_j. Used for sweep
/// axis rotation; m must be nvars x nvars.
MultiPoly linear_substitution(const MultiPoly& p, const Eigen::MatrixXd& m);

// Text format, one term per line: "coeff e1 e2 ... ek". Round-trip is
// bit-exact (shortest round-trip double formatting).
std::string to_text(const MultiPoly& p);
MultiPoly multipoly_from_text(const std::string& text);

std::string format_double(double v);  // shortest round-trip representation

}  // namespace sgmap
