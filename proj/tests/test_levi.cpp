#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "hypolab/levi.hpp"

using namespace hypolab;

namespace {

GridSpec make_spec(VariableSplit split, int pts, std::vector<double> half) {
  GridSpec s;
  s.split = split;
  s.points = pts;
  s.half_width = std::move(half);
  return s;
}

GridFunction gaussian(const GridSpec& s, double sigma) {
  return GridFunction::sample(s, [&](const std::vector<double>& x) {
    double q = 0;
    for (double v : x) q += v * v;
    return std::complex<double>(std::exp(-q / (2 * sigma * sigma)), 0.0);
  });
}

double rel_diff(const TwoPointKernel& a, const TwoPointKernel& b) {
  return (a.values - b.values).cwiseAbs().maxCoeff() /
         std::max(1e-300, b.values.cwiseAbs().maxCoeff());
}

// -d^2/dz^2 + c(z) with c = 1 + bump(z/3): constant strength, head xi^2 + c(y).
OperatorDescription schroedinger_1d() {
  OperatorDescription L;
  L.split = {1, 0};
  L.type_symbol = parse_symbol("xi1^2 + 1", VariableSplit{1, 0});
  L.compact_box = {{-3.0, 3.0}};
  L.terms.push_back({CoefficientField::constant(1.0),
                     parse_symbol("xi1^2", VariableSplit{1, 0})});
  L.terms.push_back({CoefficientField::expression(Expr::parse("1 + bump(x/3)", 1, 0)),
                     parse_symbol("1", VariableSplit{1, 0})});
  return L;
}

// Good-bad desk operator: xi^2 head plus a compactly supported mixed term.
OperatorDescription mixed_1p1() {
  OperatorDescription L;
  L.split = {1, 1};
  L.type_symbol = parse_symbol("xi1^2", VariableSplit{1, 1});
  L.compact_box = {{-4.0, 4.0}, {-2.0, 2.0}};
  L.terms.push_back({CoefficientField::constant(1.0),
                     parse_symbol("xi1^2", VariableSplit{1, 1})});
  L.terms.push_back(
      {CoefficientField::expression(Expr::parse("0.5*bump(x/4)*bump(y/2)", 1, 1)),
       parse_symbol("xi1*eta1", VariableSplit{1, 1})});
  return L;
}

}  // namespace

TEST_CASE("bracket: delta is the identity") {
  GridSpec s = make_spec({1, 0}, 32, {6.0});
  TwoPointKernel d = TwoPointKernel::delta(s);
  TwoPointKernel f = TwoPointKernel::from_difference(gaussian(s, 0.7));
  CHECK(rel_diff(bracket(d, f), f) < 1e-12);
  CHECK(rel_diff(bracket(f, d), f) < 1e-12);
  CHECK(bracket(d, TwoPointKernel::zero(s)).max_abs() == 0.0);
}

TEST_CASE("bracket of difference kernels matches spectral convolution") {
  GridSpec s = make_spec({1, 0}, 64, {10.0});
  GridFunction ga = gaussian(s, 0.6), gb = gaussian(s, 0.9);
  TwoPointKernel prod = bracket(TwoPointKernel::from_difference(ga),
                                TwoPointKernel::from_difference(gb));
  TwoPointKernel ref = TwoPointKernel::from_difference(convolve(ga, gb));
  CHECK(rel_diff(prod, ref) < 1e-8);
}

TEST_CASE("bracket is associative") {
  GridSpec s = make_spec({1, 0}, 32, {5.0});
  TwoPointKernel f = TwoPointKernel::from_difference(gaussian(s, 0.5));
  // a genuinely two-point (non-convolution) kernel
  TwoPointKernel g = TwoPointKernel::zero(s);
  for (Eigen::Index i = 0; i < g.values.rows(); ++i)
    for (Eigen::Index j = 0; j < g.values.cols(); ++j)
      g.values(i, j) = std::complex<double>(std::sin(0.1 * double(i + 1) * double(j + 2)),
                                            0.03 * double(i - j));
  TwoPointKernel w = TwoPointKernel::from_difference(gaussian(s, 0.8));
  CHECK(rel_diff(bracket(bracket(f, g), w), bracket(f, bracket(g, w))) < 1e-8);
}

TEST_CASE("apply on a difference kernel equals convolution") {
  GridSpec s = make_spec({1, 0}, 64, {8.0});
  GridFunction k = gaussian(s, 0.5);
  GridFunction u = GridFunction::sample(s, [](const std::vector<double>& x) {
    return std::complex<double>(std::cos(0.7 * x[0]), std::sin(0.3 * x[0]));
  });
  GridFunction via_kernel = TwoPointKernel::from_difference(k).apply(u);
  GridFunction via_fft = convolve(k, u);
  CHECK((via_kernel - via_fft).max_abs() < 1e-8);
}

TEST_CASE("constant coefficients: zero remainder and g = K+") {
  GridSpec s = make_spec({1, 0}, 128, {8.0});
  auto L = OperatorDescription::constant(parse_symbol("xi1^2 + 1", VariableSplit{1, 0}));
  TwoPointKernel kplus = kplus_two_point(L, -4.0, s);
  TwoPointKernel alpha = remainder_alpha(L, -4.0, kplus);
  CHECK(alpha.max_abs() == 0.0);

  VariableSolution sol = fundamental_solution_variable(L, -4.0, {0.0}, s);
  CHECK(sol.series.converged);
  CHECK(sol.series.terms_kept == 0);
  CHECK(rel_diff(sol.g, kplus) < 1e-14);
  // unfolded mode reproduces the grid delta exactly
  CHECK(sol.residual_l2 < 1e-9);
  CHECK(sol.residual_sup < 1e-9 / s.cell_volume());
}

TEST_CASE("neumann_u: geometric series on a scaled delta") {
  GridSpec s = make_spec({1, 0}, 32, {4.0});
  const double q = 0.3;
  TwoPointKernel alpha = TwoPointKernel::delta(s);
  alpha.values *= q;
  NeumannSeries ser = neumann_u(alpha, 1e-8, 40);
  CHECK(ser.converged);
  CHECK(ser.recursion_residual < 1e-10);
  CHECK(ser.fixed_point_residual <= 10 * 1e-8);
  // term norms decay by the factor q
  REQUIRE(ser.norm_history.size() >= 4);
  for (size_t k = 1; k + 1 < ser.norm_history.size(); ++k)
    CHECK(ser.norm_history[k] / ser.norm_history[k - 1] == doctest::Approx(q).epsilon(1e-6));
  // limit is q/(1-q) * delta
  TwoPointKernel limit = TwoPointKernel::delta(s);
  limit.values *= q / (1 - q);
  CHECK(rel_diff(ser.partial_sum, limit) < 1e-7);
}

TEST_CASE("neumann_u: flags divergence for norm >= 1") {
  GridSpec s = make_spec({1, 0}, 16, {4.0});
  TwoPointKernel alpha = TwoPointKernel::delta(s);
  alpha.values *= 1.5;
  NeumannSeries ser = neumann_u(alpha, 1e-8, 10);
  CHECK_FALSE(ser.converged);
}

TEST_CASE("variable coefficients: matches a dense direct solve") {
  GridSpec s = make_spec({1, 0}, 256, {8.0});
  OperatorDescription L = schroedinger_1d();
  const double lambda = -10.0;
  VariableSolution sol = fundamental_solution_variable(L, lambda, {0.5}, s, 0, 4.0, 1e-9, 40);
  CHECK(sol.series.converged);
  CHECK(sol.series.recursion_residual < 1e-10);

  // dense oracle: assemble (L - lambda) column by column, LU-solve against delta
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXcd A(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<std::complex<double>> e(s.size(), 0.0);
    e[static_cast<size_t>(j)] = 1.0;
    GridFunction col = apply_operator_variable(L, lambda, GridFunction(s, std::move(e)));
    for (Eigen::Index i = 0; i < n; ++i) A(i, j) = col.at(static_cast<size_t>(i));
  }
  GridFunction rhs = grid_delta(s, {0.5});
  Eigen::Map<const Eigen::VectorXcd> b(rhs.values().data(), n);
  Eigen::VectorXcd u = A.partialPivLu().solve(b);

  size_t ix = 0;
  double best = 1e300;
  for (size_t k = 0; k < s.size(); ++k) {
    double d = std::abs(s.point_at(k)[0] - 0.5);
    if (d < best) best = d, ix = k;
  }
  GridFunction row = sol.g.row(ix);
  double num = 0, den = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    num += std::norm(row.at(static_cast<size_t>(k)) - u(k));
    den += std::norm(u(k));
  }
  CHECK(std::sqrt(num / den) < 1e-5);
  CHECK(sol.residual_l2 < 1e-6);
}

TEST_CASE("variable_good_kernel: agrees with the general path, validates input") {
  GridSpec s = make_spec({1, 0}, 128, {8.0});
  OperatorDescription L = schroedinger_1d();
  VariableSolution a = variable_good_kernel(L, -10.0, {0.0}, s);
  VariableSolution b = fundamental_solution_variable(L, -10.0, {0.0}, s);
  CHECK(rel_diff(a.g, b.g) < 1e-14);

  GridSpec mixed = make_spec({1, 1}, 16, {6.0, 3.0});
  CHECK_THROWS(variable_good_kernel(L, -10.0, {0.0, 0.0}, mixed));
  OperatorDescription M = mixed_1p1();
  GridSpec good = make_spec({1, 0}, 16, {6.0});
  CHECK_THROWS(variable_good_kernel(M, -10.0, {0.0}, good));
}

TEST_CASE("mixed good/bad operator: remainder shrinks with |lambda|") {
  GridSpec s = make_spec({1, 1}, 16, {6.0, 3.0});
  OperatorDescription L = mixed_1p1();
  std::vector<double> sups;
  for (double lambda : {-16.0, -32.0, -64.0, -128.0}) {
    TwoPointKernel kplus = kplus_two_point(L, lambda, s);
    TwoPointKernel alpha = remainder_alpha(L, lambda, kplus);
    sups.push_back(kernel_norm_estimate(alpha));
  }
  for (size_t k = 1; k < sups.size(); ++k) CHECK(sups[k] < sups[k - 1]);
  CHECK(sups.back() < 1.0);
}

TEST_CASE("mixed good/bad operator: Neumann solution has a small residual") {
  GridSpec s = make_spec({1, 1}, 16, {6.0, 3.0});
  OperatorDescription L = mixed_1p1();
  VariableSolution sol = fundamental_solution_variable(L, -64.0, {0.0, 0.0}, s);
  CHECK(sol.series.converged);
  // bad-variable mollification limits the residual to the grid resolution
  CHECK(sol.residual_l2 < 5e-3);
}

TEST_CASE("estimate_decay: constant operator short-circuits") {
  GridSpec s = make_spec({1, 0}, 32, {6.0});
  auto L = OperatorDescription::constant(parse_symbol("xi1^2", VariableSplit{1, 0}));
  LambdaSweep sweep;
  sweep.lambdas = {-16.0, -32.0, -64.0, -128.0};
  RemainderEstimate est = estimate_decay(L, {0.0}, sweep, 0.5, s);
  CHECK(est.alpha_exact_zero);
  CHECK(est.pass);
}

TEST_CASE("estimate_decay: variable operator decay rates") {
  GridSpec s = make_spec({1, 0}, 64, {8.0});
  OperatorDescription L = schroedinger_1d();
  LambdaSweep sweep;
  sweep.lambdas = {-16.0, -32.0, -64.0, -128.0};
  RemainderEstimate est = estimate_decay(L, {0.0}, sweep, 0.5, s);
  CHECK_FALSE(est.alpha_exact_zero);
  CHECK(est.c_hat > 0.0);
  CHECK(est.c_residual < 0.5);
  CHECK(est.kappa_hat > 0.0);
  // off-diagonal sup decreases along the sweep
  for (size_t k = 1; k < est.offdiag_sup.size(); ++k)
    CHECK(est.offdiag_sup[k] < est.offdiag_sup[k - 1]);
  CHECK(est.pass);
}

TEST_CASE("mollifier width change perturbs g boundedly across the sweep") {
  GridSpec s = make_spec({1, 1}, 16, {6.0, 3.0});
  OperatorDescription L = mixed_1p1();
  std::vector<double> change;
  for (double lambda : {-16.0, -64.0}) {
    VariableSolution wide = fundamental_solution_variable(L, lambda, {0.0, 0.0}, s, 0, 4.0);
    VariableSolution narrow = fundamental_solution_variable(L, lambda, {0.0, 0.0}, s, 0, 2.0);
    // compare on a fixed good-variable annulus, away from the bad slice
    double diff = 0.0, scale = 0.0;
    for (size_t i = 0; i < s.size(); ++i)
      for (size_t j = 0; j < s.size(); ++j) {
        double d = std::abs(s.point_at(i)[0] - s.point_at(j)[0]);
        d = std::min(d, 12.0 - d);
        if (d < 1.0 || d > 3.0) continue;
        diff = std::max(diff, std::abs(wide.g.values(static_cast<Eigen::Index>(i),
                                                     static_cast<Eigen::Index>(j)) -
                                       narrow.g.values(static_cast<Eigen::Index>(i),
                                                       static_cast<Eigen::Index>(j))));
        scale = std::max(scale, std::abs(wide.g.values(static_cast<Eigen::Index>(i),
                                                       static_cast<Eigen::Index>(j))));
      }
    change.push_back(diff / std::max(1e-300, scale));
  }
  // bounded: the relative change does not grow with |lambda|
  CHECK(change[1] < 2.0 * change[0] + 0.05);
}

TEST_CASE("residual improves when the grid resolution doubles") {
  OperatorDescription L = schroedinger_1d();
  GridSpec coarse = make_spec({1, 0}, 128, {8.0});
  GridSpec fine = make_spec({1, 0}, 256, {8.0});
  double rc = fundamental_solution_variable(L, -10.0, {0.5}, coarse).residual_l2;
  double rf = fundamental_solution_variable(L, -10.0, {0.5}, fine).residual_l2;
  CHECK(rf <= rc + 1e-12);
}
