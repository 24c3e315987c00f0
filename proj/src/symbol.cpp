#include "hypolab/symbol.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "nlohmann/json.hpp"

namespace hypolab {

RationalComplex rc_from(std::complex<double> z) {
  auto to_rat = [](double x) -> Rational {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite coefficient");
    if (x == std::floor(x) && std::abs(x) < 9e15) return Rational(static_cast<long long>(x));
    int exp;
    double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5,1)
    long long mi = static_cast<long long>(std::ldexp(m, 53));
    exp -= 53;
    Rational r(mi);
    boost::multiprecision::cpp_int two(2);
    if (exp >= 0)
      r *= Rational(boost::multiprecision::pow(two, exp));
    else
      r /= Rational(boost::multiprecision::pow(two, -exp));
    return r;
  };
  return {to_rat(z.real()), to_rat(z.imag())};
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  if (size() != o.size()) throw std::invalid_argument("MultiIndex: dimension mismatch");
  std::vector<int> e(e_);
  for (size_t k = 0; k < e.size(); ++k) e[k] += o.e_[k];
  return MultiIndex(std::move(e));
}

SymbolPoly::SymbolPoly(int dimension, std::optional<VariableSplit> split)
    : dim_(dimension), split_(split) {
  if (dim_ < 1) throw std::invalid_argument("SymbolPoly: dimension must be >= 1");
  if (split_ && (split_->n < 0 || split_->m < 0 || split_->n + split_->m != dim_))
    throw std::invalid_argument("SymbolPoly: inconsistent split");
}

SymbolPoly::SymbolPoly(int dimension, TermMap terms, std::optional<VariableSplit> split)
    : SymbolPoly(dimension, split) {
  terms_ = std::move(terms);
  for (const auto& [a, c] : terms_)
    if (a.size() != dim_) throw std::invalid_argument("SymbolPoly: term dimension mismatch");
  prune();
}

void SymbolPoly::prune() {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
}

SymbolPoly SymbolPoly::monomial(int dimension, const MultiIndex& alpha, RationalComplex coeff) {
  TermMap t;
  if (!coeff.is_zero()) t.emplace(alpha, std::move(coeff));
  return SymbolPoly(dimension, std::move(t));
}

SymbolPoly SymbolPoly::variable(int dimension, int k) {
  std::vector<int> e(dimension, 0);
  e.at(k) = 1;
  return monomial(dimension, MultiIndex(std::move(e)));
}

SymbolPoly SymbolPoly::with_split(VariableSplit s) const {
  return SymbolPoly(dim_, terms_, s);
}

bool SymbolPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.order() == 0);
}

int SymbolPoly::degree() const {
  int d = 0;
  for (const auto& [a, c] : terms_) d = std::max(d, a.order());
  return d;
}

int SymbolPoly::good_degree() const {
  if (!split_) throw std::logic_error("good_degree: no split declared");
  int d = 0;
  for (const auto& [a, c] : terms_) {
    int s = 0;
    for (int k = 0; k < split_->n; ++k) s += a[k];
    d = std::max(d, s);
  }
  return d;
}

std::complex<double> SymbolPoly::evaluate(const std::vector<std::complex<double>>& xi) const {
  if (static_cast<int>(xi.size()) != dim_)
    throw std::invalid_argument("evaluate: dimension mismatch");
  std::complex<double> acc{0.0, 0.0};
  for (const auto& [a, c] : terms_) {
    std::complex<double> t = c.to_complex();
    for (int k = 0; k < dim_; ++k)
      for (int p = 0; p < a[k]; ++p) t *= xi[k];
    acc += t;
  }
  return acc;
}

double SymbolPoly::evaluate_real_part(const std::vector<double>& xi) const {
  if (static_cast<int>(xi.size()) != dim_)
    throw std::invalid_argument("evaluate: dimension mismatch");
  double acc = 0.0;
  for (const auto& [a, c] : terms_) {
    double re = static_cast<double>(c.re);
    if (re == 0.0) continue;
    double t = re;
    for (int k = 0; k < dim_; ++k)
      for (int p = 0; p < a[k]; ++p) t *= xi[k];
    acc += t;
  }
  return acc;
}

SymbolPoly SymbolPoly::derive(const MultiIndex& alpha) const {
  if (alpha.size() != dim_) throw std::invalid_argument("derive: dimension mismatch");
  TermMap out;
  for (const auto& [a, c] : terms_) {
    std::vector<int> e = a.entries();
    Rational factor = 1;
    bool dead = false;
    for (int k = 0; k < dim_ && !dead; ++k) {
      for (int j = 0; j < alpha[k]; ++j) {
        if (e[k] == 0) {
          dead = true;
          break;
        }
        factor *= e[k];
        e[k] -= 1;
      }
    }
    if (dead) continue;
    RationalComplex coeff = c * RationalComplex(factor);
    out[MultiIndex(std::move(e))] += coeff;
  }
  return SymbolPoly(dim_, std::move(out), split_);
}

std::vector<MultiIndex> SymbolPoly::derivative_support() const {
  std::vector<int> box(dim_, 0);
  for (const auto& [a, c] : terms_)
    for (int k = 0; k < dim_; ++k) box[k] = std::max(box[k], a[k]);
  std::vector<MultiIndex> out;
  std::vector<int> cur(dim_, 0);
  while (true) {
    MultiIndex alpha(cur);
    if (!derive(alpha).is_zero()) out.push_back(alpha);
    int k = 0;
    while (k < dim_ && cur[k] == box[k]) cur[k++] = 0;
    if (k == dim_) break;
    ++cur[k];
  }
  return out;
}

double SymbolPoly::tilde_strength(const std::vector<double>& xi) const {
  std::vector<std::complex<double>> z(xi.begin(), xi.end());
  double s2 = 0.0;
  for (const auto& alpha : derivative_support()) s2 += std::norm(derive(alpha).evaluate(z));
  return std::sqrt(s2);
}

SymbolPoly SymbolPoly::translate(const std::vector<RationalComplex>& eta,
                                 const RationalComplex& t) const {
  if (static_cast<int>(eta.size()) != dim_)
    throw std::invalid_argument("translate: dimension mismatch");
  std::vector<RationalComplex> shift(dim_);
  for (int k = 0; k < dim_; ++k) shift[k] = t * eta[k];

  // Binomial re-expansion of each monomial in xi + shift.
  TermMap out;
  for (const auto& [a, c] : terms_) {
    TermMap mono;
    mono.emplace(MultiIndex::zero(dim_), c);
    for (int k = 0; k < dim_; ++k) {
      for (int p = 0; p < a[k]; ++p) {
        TermMap next;
        for (const auto& [b, cb] : mono) {
          std::vector<int> e = b.entries();
          ++e[k];
          next[MultiIndex(e)] += cb;
          --e[k];
          if (!shift[k].is_zero()) next[MultiIndex(e)] += cb * shift[k];
        }
        mono = std::move(next);
      }
    }
    for (auto& [b, cb] : mono) out[b] += cb;
  }
  return SymbolPoly(dim_, std::move(out), split_);
}

SymbolPoly SymbolPoly::translate(const std::vector<std::complex<double>>& eta,
                                 std::complex<double> t) const {
  std::vector<RationalComplex> e;
  e.reserve(eta.size());
  for (auto z : eta) e.push_back(rc_from(z));
  return translate(e, rc_from(t));
}

SymbolPoly SymbolPoly::operator+(const SymbolPoly& o) const {
  if (dim_ != o.dim_) throw std::invalid_argument("+: dimension mismatch");
  TermMap out = terms_;
  for (const auto& [a, c] : o.terms_) out[a] += c;
  return SymbolPoly(dim_, std::move(out), split_ ? split_ : o.split_);
}

SymbolPoly SymbolPoly::operator-(const SymbolPoly& o) const { return *this + o.scale({-1}); }

SymbolPoly SymbolPoly::operator*(const SymbolPoly& o) const {
  if (dim_ != o.dim_) throw std::invalid_argument("*: dimension mismatch");
  TermMap out;
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : o.terms_) out[a + b] += ca * cb;
  return SymbolPoly(dim_, std::move(out), split_ ? split_ : o.split_);
}

SymbolPoly SymbolPoly::scale(const RationalComplex& c) const {
  TermMap out;
  for (const auto& [a, ca] : terms_) out[a] = ca * c;
  return SymbolPoly(dim_, std::move(out), split_);
}

SymbolPoly SymbolPoly::power(int N, size_t term_cap) const {
  if (N < 1) throw std::invalid_argument("power: N must be >= 1");
  SymbolPoly acc = *this;
  for (int k = 1; k < N; ++k) {
    acc = acc * *this;
    if (acc.terms_.size() > term_cap)
      throw std::runtime_error("power: term count exceeds cap (symbol too large)");
  }
  return acc;
}

SymbolPoly SymbolPoly::compose_linear(const std::vector<std::vector<Rational>>& A,
                                      int new_dim) const {
  if (static_cast<int>(A.size()) != dim_)
    throw std::invalid_argument("compose_linear: row count must equal dimension");
  std::vector<SymbolPoly> forms;
  forms.reserve(dim_);
  for (int k = 0; k < dim_; ++k) {
    if (static_cast<int>(A[k].size()) != new_dim)
      throw std::invalid_argument("compose_linear: column count mismatch");
    TermMap t;
    for (int j = 0; j < new_dim; ++j) {
      if (A[k][j] == 0) continue;
      std::vector<int> e(new_dim, 0);
      e[j] = 1;
      t[MultiIndex(e)] = RationalComplex(A[k][j]);
    }
    forms.push_back(SymbolPoly(new_dim, std::move(t)));
  }
  SymbolPoly out(new_dim);
  for (const auto& [a, c] : terms_) {
    SymbolPoly mono = SymbolPoly::monomial(new_dim, MultiIndex::zero(new_dim), c);
    for (int k = 0; k < dim_; ++k)
      for (int p = 0; p < a[k]; ++p) mono = mono * forms[k];
    out = out + mono;
  }
  return out;
}

std::map<MultiIndex, SymbolPoly> SymbolPoly::bad_coefficients() const {
  if (!split_) throw std::logic_error("bad_coefficients: no split declared");
  const int n = split_->n, m = split_->m;
  std::map<MultiIndex, SymbolPoly> out;
  for (const auto& [a, c] : terms_) {
    std::vector<int> good(dim_, 0), bad(m, 0);
    for (int k = 0; k < n; ++k) good[k] = a[k];
    for (int k = 0; k < m; ++k) bad[k] = a[n + k];
    MultiIndex beta(bad);
    auto it = out.find(beta);
    if (it == out.end()) it = out.emplace(beta, SymbolPoly(dim_, *split_)).first;
    it->second = it->second + SymbolPoly::monomial(dim_, MultiIndex(good), c).with_split(*split_);
  }
  return out;
}

SymbolPoly SymbolPoly::restrict_to_good() const {
  if (!split_) throw std::logic_error("restrict_to_good: no split declared");
  const int n = split_->n;
  TermMap out;
  for (const auto& [a, c] : terms_) {
    for (int k = n; k < dim_; ++k)
      if (a[k] != 0) throw std::logic_error("restrict_to_good: symbol depends on bad variables");
    std::vector<int> e(a.entries().begin(), a.entries().begin() + n);
    out[MultiIndex(std::move(e))] += c;
  }
  return SymbolPoly(n, std::move(out), VariableSplit{n, 0});
}

SymbolPoly SymbolPoly::embed_good(VariableSplit s) const {
  if (dim_ != s.n) throw std::invalid_argument("embed_good: dimension must equal split.n");
  TermMap out;
  for (const auto& [a, c] : terms_) {
    std::vector<int> e = a.entries();
    e.resize(s.n + s.m, 0);
    out[MultiIndex(std::move(e))] = c;
  }
  return SymbolPoly(s.n + s.m, std::move(out), s);
}

namespace {

std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::string coeff_str(const RationalComplex& c) {
  const bool has_re = c.re != 0, has_im = c.im != 0;
  std::string s;
  if (has_re) s += rational_str(c.re);
  if (has_im) {
    if (has_re) s += c.im > 0 ? "+" : "-";
    Rational a = c.im > 0 || !has_re ? c.im : -c.im;
    if (a == 1)
      s += "i";
    else if (a == -1)
      s += "-i";
    else
      s += rational_str(a) + "*i";
  }
  if (has_re && has_im) s = "(" + s + ")";
  if (s.empty()) s = "0";
  return s;
}

}  // namespace

std::string SymbolPoly::serialize() const {
  if (terms_.empty()) return "0";
  const int n = split_ ? split_->n : dim_;
  std::string out;
  for (const auto& [a, c] : terms_) {
    std::string mono;
    for (int k = 0; k < dim_; ++k) {
      if (a[k] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += (k < n ? "xi" + std::to_string(k + 1) : "eta" + std::to_string(k - n + 1));
      if (a[k] > 1) mono += "^" + std::to_string(a[k]);
    }
    std::string cs = coeff_str(c);
    std::string term;
    if (mono.empty())
      term = cs;
    else if (cs == "1")
      term = mono;
    else if (cs == "-1")
      term = "-" + mono;
    else
      term = cs + "*" + mono;
    if (!out.empty() && term[0] != '-') out += " + ";
    else if (!out.empty()) {
      out += " - ";
      term = term.substr(1);
    }
    out += term;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;
  int max_xi = 0, max_eta = 0;

  struct Mono {
    RationalComplex coeff{1};
    std::map<std::pair<bool, int>, int> vars;  // (is_bad, index) -> exponent
  };
  using MonoSum = std::vector<Mono>;

  explicit Parser(const std::string& text) : s(text) {}

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }

  MonoSum parse_expression() {
    MonoSum acc;
    bool neg = false;
    if (eat('-')) neg = true;
    else eat('+');
    append(acc, parse_term(), neg);
    while (true) {
      char c = peek();
      if (c == '+' || c == '-') {
        ++pos;
        append(acc, parse_term(), c == '-');
      } else {
        break;
      }
    }
    return acc;
  }

  MonoSum parse_term() {
    MonoSum acc = parse_factor();
    while (true) {
      char c = peek();
      if (c == '*') {
        ++pos;
        acc = multiply(acc, parse_factor());
      } else if (c == '/') {
        ++pos;
        MonoSum d = parse_factor();
        if (d.size() != 1 || !d[0].vars.empty())
          throw ParseError("division only by a constant", pos);
        RationalComplex c0 = d[0].coeff;
        Rational n2 = c0.re * c0.re + c0.im * c0.im;
        if (n2 == 0) throw ParseError("division by zero", pos);
        RationalComplex inv{c0.re / n2, -c0.im / n2};
        for (auto& m : acc) m.coeff *= inv;
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '(') {
        // implicit product, e.g. "2xi1" or "i*xi1(..." forms
        acc = multiply(acc, parse_factor());
      } else {
        break;
      }
    }
    return acc;
  }

  MonoSum parse_factor() {
    MonoSum base = parse_base();
    if (peek() == '^') {
      ++pos;
      skip();
      bool neg = eat('-');
      size_t start = pos;
      long e = parse_integer();
      if (neg) throw ParseError("negative exponent", start);
      MonoSum acc{Mono{}};
      for (long k = 0; k < e; ++k) acc = multiply(acc, base);
      return acc;
    }
    return base;
  }

  MonoSum parse_base() {
    skip();
    if (pos >= s.size()) throw ParseError("unexpected end of input", pos);
    char c = s[pos];
    if (c == '(') {
      ++pos;
      MonoSum inner = parse_expression();
      if (!eat(')')) throw ParseError("expected ')'", pos);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return {Mono{parse_number(), {}}};
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos;
      std::string word;
      while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) word += s[pos++];
      if (word == "i") return {Mono{RationalComplex(Rational(0), Rational(1)), {}}};
      bool bad;
      if (word == "xi") bad = false;
      else if (word == "eta") bad = true;
      else throw ParseError("unknown identifier '" + word + "'", start);
      if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
        throw ParseError("variable index expected after '" + word + "'", pos);
      long idx = parse_integer();
      if (idx < 1) throw ParseError("variable index must be >= 1", start);
      if (bad) max_eta = std::max<long>(max_eta, idx);
      else max_xi = std::max<long>(max_xi, idx);
      Mono m;
      m.vars[{bad, static_cast<int>(idx)}] = 1;
      return {m};
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos);
  }

  long parse_integer() {
    skip();
    size_t start = pos;
    long v = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      v = v * 10 + (s[pos++] - '0');
    if (pos == start) throw ParseError("integer expected", pos);
    return v;
  }

  RationalComplex parse_number() {
    skip();
    size_t start = pos;
    boost::multiprecision::cpp_int ip = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      ip = ip * 10 + (s[pos++] - '0');
    Rational val(ip);
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      Rational scale = 1;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        scale /= 10;
        val += scale * (s[pos++] - '0');
      }
    }
    if (pos == start) throw ParseError("number expected", pos);
    return RationalComplex(val);
  }

  static void append(MonoSum& acc, const MonoSum& t, bool neg) {
    for (Mono m : t) {
      if (neg) m.coeff = -m.coeff;
      acc.push_back(std::move(m));
    }
  }

  static MonoSum multiply(const MonoSum& a, const MonoSum& b) {
    MonoSum out;
    for (const auto& x : a)
      for (const auto& y : b) {
        Mono m;
        m.coeff = x.coeff * y.coeff;
        m.vars = x.vars;
        for (const auto& [v, e] : y.vars) m.vars[v] += e;
        out.push_back(std::move(m));
      }
    return out;
  }
};

}  // namespace

SymbolPoly parse_symbol(const std::string& text, std::optional<VariableSplit> force_split) {
  Parser p(text);
  auto monos = p.parse_expression();
  p.skip();
  if (p.pos != text.size()) throw ParseError("trailing input", p.pos);

  int n, m;
  if (force_split) {
    n = force_split->n;
    m = force_split->m;
    if (p.max_xi > n || p.max_eta > m)
      throw ParseError("variable index exceeds declared split", 0);
  } else {
    n = std::max(1, p.max_xi);
    m = p.max_eta;
  }
  const int dim = n + m;
  SymbolPoly::TermMap terms;
  for (const auto& mono : monos) {
    std::vector<int> e(dim, 0);
    for (const auto& [v, exp] : mono.vars) {
      int k = v.first ? n + v.second - 1 : v.second - 1;
      e[k] += exp;
    }
    terms[MultiIndex(std::move(e))] += mono.coeff;
  }
  std::optional<VariableSplit> split;
  if (force_split || p.max_eta > 0) split = VariableSplit{n, m};
  return SymbolPoly(dim, std::move(terms), split);
}

std::string SymbolPoly::to_json() const {
  nlohmann::json j;
  j["dimension"] = dim_;
  if (split_) j["split"] = {{"n", split_->n}, {"m", split_->m}};
  auto& arr = j["terms"] = nlohmann::json::array();
  for (const auto& [a, c] : terms_) {
    nlohmann::json t;
    t["alpha"] = a.entries();
    t["re"] = rational_str(c.re);
    t["im"] = rational_str(c.im);
    arr.push_back(t);
  }
  return j.dump();
}

SymbolPoly SymbolPoly::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const int dim = j.at("dimension").get<int>();
  std::optional<VariableSplit> split;
  if (j.contains("split"))
    split = VariableSplit{j["split"].at("n").get<int>(), j["split"].at("m").get<int>()};
  TermMap terms;
  for (const auto& t : j.at("terms")) {
    MultiIndex a(t.at("alpha").get<std::vector<int>>());
    Rational re(t.at("re").get<std::string>());
    Rational im(t.at("im").get<std::string>());
    terms[a] += RationalComplex(re, im);
  }
  return SymbolPoly(dim, std::move(terms), split);
}

}  // namespace hypolab
