#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "hypolab/symbol.hpp"

using namespace hypolab;
using cplx = std::complex<double>;

namespace {

SymbolPoly S(const std::string& text) { return parse_symbol(text); }

SymbolPoly random_symbol(std::mt19937_64& rng, int dim, int max_deg, int n_terms) {
  std::uniform_int_distribution<int> deg(0, max_deg), coeff(-5, 5);
  SymbolPoly::TermMap terms;
  for (int t = 0; t < n_terms; ++t) {
    std::vector<int> e(dim);
    for (int k = 0; k < dim; ++k) e[k] = deg(rng);
    terms[MultiIndex(e)] += RationalComplex(Rational(coeff(rng)), Rational(coeff(rng)));
  }
  return SymbolPoly(dim, std::move(terms));
}

std::vector<cplx> random_point(std::mt19937_64& rng, int dim, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<cplx> xi(dim);
  for (auto& z : xi) z = {u(rng), u(rng)};
  return xi;
}

}  // namespace

TEST_CASE("evaluate: monomial, term sum, zero") {
  CHECK(S("xi1^2").evaluate({cplx(3, 0)}) == cplx(9, 0));
  CHECK(S("xi1^2 + i*xi2").evaluate({cplx(1, 0), cplx(2, 0)}) == cplx(1, 2));
  CHECK(SymbolPoly(3).evaluate({cplx(1, 2), cplx(0, 0), cplx(5, 5)}) == cplx(0, 0));
  CHECK_THROWS(S("xi1^2").evaluate({cplx(1, 0), cplx(1, 0)}));
}

TEST_CASE("derive: power rule, over-differentiation, mixed") {
  CHECK(S("xi1^2").derive({1}) == S("2*xi1"));
  CHECK(S("xi1^2").derive({3}).is_zero());
  CHECK(S("xi1^2*xi2").derive({1, 1}) == parse_symbol("2*xi1", VariableSplit{2, 0}));
  SymbolPoly p = S("xi1^3 + xi2");
  CHECK(p.derive(MultiIndex::zero(2)) == p);
}

TEST_CASE("tilde_strength examples") {
  CHECK(S("xi1").tilde_strength({0.0}) == doctest::Approx(1.0).epsilon(1e-14));
  // P = xi^2 at xi=1: |1|^2 + |2|^2 + |2|^2 = 9
  CHECK(S("xi1^2").tilde_strength({1.0}) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(SymbolPoly(1).tilde_strength({1.0}) == 0.0);
}

TEST_CASE("tilde_strength equals brute-force term-by-term sum") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    SymbolPoly p = random_symbol(rng, 2, 3, 4);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<double> xi{u(rng), u(rng)};
    std::vector<cplx> z(xi.begin(), xi.end());
    // independent enumeration over a generous exponent box
    double s2 = 0.0;
    for (int a = 0; a <= 8; ++a)
      for (int b = 0; b <= 8; ++b) s2 += std::norm(p.derive({a, b}).evaluate(z));
    CHECK(p.tilde_strength(xi) == doctest::Approx(std::sqrt(s2)).epsilon(1e-12));
  }
}

TEST_CASE("translate: binomial, identity, linear shift") {
  CHECK(S("xi1^2").translate({{cplx(1, 0)}}, cplx(1, 0)) == S("xi1^2 + 2*xi1 + 1"));
  std::mt19937_64 rng(3);
  SymbolPoly p = random_symbol(rng, 2, 3, 5);
  CHECK(p.translate({{cplx(2, 1), cplx(0, 3)}}, cplx(0, 0)) == p);
  CHECK(S("xi1^2 + xi2").translate({{cplx(0, 0), cplx(1, 0)}}, cplx(0, 1)) ==
        S("xi1^2 + xi2 + i"));
}

TEST_CASE("translate semigroup: s then t equals s+t") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    SymbolPoly p = random_symbol(rng, 2, 3, 4);
    std::vector<RationalComplex> eta{RationalComplex(Rational(1), Rational(2)),
                                     RationalComplex(Rational(-1, 3))};
    RationalComplex s(Rational(2, 5)), t(Rational(0), Rational(7, 3));
    CHECK(p.translate(eta, s).translate(eta, t) == p.translate(eta, s + t));
  }
}

TEST_CASE("derivative composition: d^a d^b = d^(a+b)") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    SymbolPoly p = random_symbol(rng, 3, 3, 5);
    MultiIndex a{1, 0, 2}, b{0, 1, 1};
    CHECK(p.derive(a).derive(b) == p.derive(a + b));
  }
}

TEST_CASE("power: examples and cap") {
  CHECK(S("xi1").power(3) == S("xi1^3"));
  CHECK(S("xi1 + 1").power(2) == S("xi1^2 + 2*xi1 + 1"));
  CHECK(S("xi1^2 + i*xi2").power(2) == S("xi1^4 + 2*i*xi1^2*xi2 - xi2^2"));
  CHECK_THROWS(S("(xi1+xi2+xi3+1)").power(40, 100));
}

TEST_CASE("power evaluation consistency") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    SymbolPoly p = random_symbol(rng, 2, 2, 3);
    auto xi = random_point(rng, 2, 5.0);
    for (int N = 1; N <= 4; ++N) {
      cplx lhs = p.power(N).evaluate(xi);
      cplx rhs = std::pow(p.evaluate(xi), N);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("parse: heat symbol, split inference") {
  SymbolPoly heat = S("xi1^2 + i*eta1");
  CHECK(heat.dimension() == 2);
  REQUIRE(heat.split().has_value());
  CHECK(heat.split()->n == 1);
  CHECK(heat.split()->m == 1);
  CHECK(heat.evaluate({cplx(2, 0), cplx(3, 0)}) == cplx(4, 3));
}

TEST_CASE("parse errors carry a position") {
  CHECK_THROWS_AS(S("xi1^2 +"), ParseError);
  CHECK_THROWS_AS(S("xi1 ** 2"), ParseError);
  CHECK_THROWS_AS(S("foo + 1"), ParseError);
  CHECK_THROWS_AS(parse_symbol("xi3", VariableSplit{2, 0}), ParseError);
}

TEST_CASE("serialize round trip") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    SymbolPoly p = random_symbol(rng, 2, 3, 5).with_split({1, 1});
    CHECK(parse_symbol(p.serialize(), VariableSplit{1, 1}) == p);
  }
  CHECK(S(SymbolPoly(2).serialize()).is_zero());
}

TEST_CASE("json round trip") {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 10; ++rep) {
    SymbolPoly p = random_symbol(rng, 3, 3, 5);
    CHECK(SymbolPoly::from_json(p.to_json()) == p);
  }
}

TEST_CASE("bad_coefficients reassembles the symbol") {
  SymbolPoly p = S("xi1^2 + 3*xi1*eta1 + i*eta1^2*xi1 - eta1");
  auto parts = p.bad_coefficients();
  SymbolPoly sum(p.dimension(), *p.split());
  for (const auto& [beta, pb] : parts) {
    std::vector<int> e(p.dimension(), 0);
    for (int k = 0; k < beta.size(); ++k) e[p.split()->n + k] = beta[k];
    sum = sum + pb * SymbolPoly::monomial(p.dimension(), MultiIndex(e));
  }
  CHECK(sum == p);
}

TEST_CASE("compose_linear substitutes linear forms exactly") {
  // Q(u) = u1^2 + u2, A = [[1,1],[0,2]]  ->  (xi1+xi2)^2 + 2*xi2
  SymbolPoly q = S("xi1^2 + xi2");
  auto p = q.compose_linear({{Rational(1), Rational(1)}, {Rational(0), Rational(2)}}, 2);
  CHECK(p == S("xi1^2 + 2*xi1*xi2 + xi2^2 + 2*xi2"));
}
