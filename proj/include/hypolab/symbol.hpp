#ifndef HYPOLAB_SYMBOL_HPP
#define HYPOLAB_SYMBOL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypolab {

using Rational = boost::multiprecision::cpp_rational;

/// Complex number with exact rational real and imaginary parts.
struct RationalComplex {
  Rational re{0};
  Rational im{0};

  RationalComplex() = default;
  RationalComplex(Rational r) : re(std::move(r)) {}
  RationalComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  RationalComplex(long r) : re(r) {}

  bool is_zero() const { return re == 0 && im == 0; }
  std::complex<double> to_complex() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }

  RationalComplex operator+(const RationalComplex& o) const { return {re + o.re, im + o.im}; }
  RationalComplex operator-(const RationalComplex& o) const { return {re - o.re, im - o.im}; }
  RationalComplex operator-() const { return {-re, -im}; }
  RationalComplex operator*(const RationalComplex& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  RationalComplex& operator+=(const RationalComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  RationalComplex& operator*=(const RationalComplex& o) { return *this = *this * o; }
  bool operator==(const RationalComplex& o) const = default;
};

/// Exact rational from a double (every finite double is rational).
RationalComplex rc_from(std::complex<double> z);

/// Exponent vector; length is the ambient dimension.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : e_(std::move(e)) {
    for (int k : e_)
      if (k < 0) throw std::invalid_argument("MultiIndex: negative entry");
  }
  MultiIndex(std::initializer_list<int> e) : MultiIndex(std::vector<int>(e)) {}
  static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }

  int size() const { return static_cast<int>(e_.size()); }
  int operator[](int k) const { return e_[k]; }
  int order() const {
    int s = 0;
    for (int k : e_) s += k;
    return s;
  }
  MultiIndex operator+(const MultiIndex& o) const;
  bool operator<(const MultiIndex& o) const { return e_ < o.e_; }
  bool operator==(const MultiIndex& o) const = default;
  const std::vector<int>& entries() const { return e_; }

 private:
  std::vector<int> e_;
};

/// Good/bad variable split: first n coordinates are good, last m bad.
struct VariableSplit {
  int n = 1;
  int m = 0;
  bool operator==(const VariableSplit&) const = default;
};

struct ParseError : std::runtime_error {
  size_t position;
  ParseError(const std::string& what, size_t pos)
      : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

/// Multivariate polynomial symbol with exact complex-rational coefficients.
/// Immutable after construction; no zero coefficients are stored.
class SymbolPoly {
 public:
  using TermMap = std::map<MultiIndex, RationalComplex>;

  explicit SymbolPoly(int dimension, std::optional<VariableSplit> split = std::nullopt);
  SymbolPoly(int dimension, TermMap terms, std::optional<VariableSplit> split = std::nullopt);

  static SymbolPoly monomial(int dimension, const MultiIndex& alpha,
                             RationalComplex coeff = RationalComplex(1));
  /// The single variable xi_k (0-based) in the given dimension.
  static SymbolPoly variable(int dimension, int k);

  int dimension() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  const std::optional<VariableSplit>& split() const { return split_; }
  SymbolPoly with_split(VariableSplit s) const;

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int degree() const;
  /// Max total degree over the good block only (requires split).
  int good_degree() const;

  std::complex<double> evaluate(const std::vector<std::complex<double>>& xi) const;
  double evaluate_real_part(const std::vector<double>& xi) const;

  SymbolPoly derive(const MultiIndex& alpha) const;
  /// sqrt(sum over all alpha of |P^(alpha)(xi)|^2), xi real.
  double tilde_strength(const std::vector<double>& xi) const;

  SymbolPoly translate(const std::vector<RationalComplex>& eta, const RationalComplex& t) const;
  SymbolPoly translate(const std::vector<std::complex<double>>& eta, std::complex<double> t) const;

  SymbolPoly operator+(const SymbolPoly& o) const;
  SymbolPoly operator-(const SymbolPoly& o) const;
  SymbolPoly operator*(const SymbolPoly& o) const;
  SymbolPoly scale(const RationalComplex& c) const;
  bool operator==(const SymbolPoly& o) const {
    return dim_ == o.dim_ && terms_ == o.terms_;
  }

  /// Exact N-fold product.  Throws if the term count exceeds the cap.
  SymbolPoly power(int N, size_t term_cap = 100000) const;

  /// P(A xi): substitute the linear forms given by the rows of A.
  /// A has dimension() rows and new_dim columns.
  SymbolPoly compose_linear(const std::vector<std::vector<Rational>>& A, int new_dim) const;

  /// Coefficient polynomials of the bad-variable monomials:
  /// P(xi,eta) = sum_beta P_beta(xi) eta^beta, keyed by the bad multi-index beta.
  /// Each P_beta lives in the full dimension but depends only on good variables.
  std::map<MultiIndex, SymbolPoly> bad_coefficients() const;

  /// Project a symbol that only involves the good block down to dimension n.
  SymbolPoly restrict_to_good() const;
  /// Embed a good-block symbol (dimension n) into the full dimension n+m.
  SymbolPoly embed_good(VariableSplit s) const;

  /// All multi-indices alpha with nonzero P^(alpha), including alpha = 0 for P != 0.
  std::vector<MultiIndex> derivative_support() const;

  std::string serialize() const;
  std::string to_json() const;
  static SymbolPoly from_json(const std::string& text);

 private:
  int dim_;
  TermMap terms_;
  std::optional<VariableSplit> split_;
  void prune();
};

/// Parse the text grammar (terms joined by +/-, monomials coefficient*var^k,
/// "i" the imaginary unit, xi1..xiN good and eta1..etaM bad variables).
/// Dimension and split are inferred from the variables used unless forced.
SymbolPoly parse_symbol(const std::string& text,
                        std::optional<VariableSplit> force_split = std::nullopt);

}  // namespace hypolab

#endif
