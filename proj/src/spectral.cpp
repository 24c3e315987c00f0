#include "hypolab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace hypolab {

namespace {

// Smallest half-width R such that {Re P < lambda_max} stays inside 0.75 R
// (coarse scan on a 129-point axis grid).
double sublevel_box_halfwidth(const SymbolPoly& P, double lambda_max) {
  const int n = P.dimension();
  const int K = 129;
  for (double R = 2.0; R <= 1e12; R *= 2.0) {
    bool margin_ok = true;
    std::vector<double> xi(n, 0.0);
    std::vector<int> idx(n, 0);
    const size_t total = static_cast<size_t>(std::pow(double(K), n));
    for (size_t flat = 0; flat < total && margin_ok; ++flat) {
      size_t rem = flat;
      double maxc = 0.0;
      for (int d = n - 1; d >= 0; --d) {
        int j = static_cast<int>(rem % K);
        rem /= K;
        xi[d] = -R + 2.0 * R * j / (K - 1);
        maxc = std::max(maxc, std::abs(xi[d]));
      }
      if (P.evaluate_real_part(xi) < lambda_max && maxc > 0.75 * R) margin_ok = false;
    }
    if (margin_ok) return R;
  }
  throw std::runtime_error("sublevel_moments: could not bound the sublevel set");
}

double moment_weight(const std::vector<double>& xi, const MultiIndex& alpha) {
  double w = 1.0;
  for (int d = 0; d < alpha.size(); ++d) w *= std::pow(xi[d], 2 * alpha[d]);
  return w;
}

int default_points(int n) {
  switch (n) {
    case 1: return 8193;
    case 2: return 1025;
    default: return 129;
  }
}

}  // namespace

void SpectralDiagonal::validate() const {
  if (lambdas.size() != values.size() || lambdas.empty())
    throw std::invalid_argument("SpectralDiagonal: size mismatch");
  for (size_t k = 0; k < lambdas.size(); ++k) {
    if (lambdas[k] <= 0) throw std::invalid_argument("SpectralDiagonal: lambdas must be positive");
    if (k > 0 && lambdas[k] <= lambdas[k - 1])
      throw std::invalid_argument("SpectralDiagonal: lambdas must be ascending");
    if (values[k] < 0) throw std::invalid_argument("SpectralDiagonal: negative value");
    if (k > 0 && values[k] < values[k - 1] - 1e-12 * (1.0 + values[k - 1]))
      throw std::invalid_argument("SpectralDiagonal: values must be non-decreasing");
  }
}

std::vector<SpectralDiagonal> sublevel_moments(const SymbolPoly& P,
                                               const std::vector<double>& lambdas,
                                               const std::vector<MultiIndex>& alphas,
                                               int points_per_axis) {
  if (lambdas.empty() || alphas.empty())
    throw std::invalid_argument("sublevel_moments: empty lambda or alpha list");
  for (size_t k = 1; k < lambdas.size(); ++k)
    if (lambdas[k] <= lambdas[k - 1])
      throw std::invalid_argument("sublevel_moments: lambdas must be ascending");
  const int n = P.dimension();
  for (const auto& a : alphas)
    if (a.size() != n) throw std::invalid_argument("sublevel_moments: alpha dimension mismatch");
  const double R = sublevel_box_halfwidth(P, lambdas.back());
  const int K = points_per_axis > 0 ? points_per_axis : default_points(n);
  const double dxi = 2.0 * R / K;
  const size_t total = static_cast<size_t>(std::pow(double(K), n));
  const double cell = std::pow(dxi, n);

  // midpoint lattice: value of Re P and per-alpha weight at each cell center
  std::vector<double> vals(total);
  std::vector<std::vector<double>> wts(alphas.size(), std::vector<double>(total));
  std::vector<double> xi(n);
  for (size_t flat = 0; flat < total; ++flat) {
    size_t rem = flat;
    for (int d = n - 1; d >= 0; --d) {
      int j = static_cast<int>(rem % K);
      rem /= K;
      xi[d] = -R + (j + 0.5) * dxi;
    }
    vals[flat] = P.evaluate_real_part(xi);
    for (size_t a = 0; a < alphas.size(); ++a) wts[a][flat] = moment_weight(xi, alphas[a]) * cell;
  }
  std::vector<size_t> order(total);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return vals[a] < vals[b]; });
  std::vector<double> sorted_vals(total);
  for (size_t k = 0; k < total; ++k) sorted_vals[k] = vals[order[k]];

  std::vector<SpectralDiagonal> out;
  for (size_t a = 0; a < alphas.size(); ++a) {
    std::vector<double> prefix(total + 1, 0.0);
    for (size_t k = 0; k < total; ++k) prefix[k + 1] = prefix[k] + wts[a][order[k]];
    SpectralDiagonal d;
    d.lambdas = lambdas;
    d.alpha = alphas[a];
    d.dim = n;
    d.provenance = "sublevel";
    for (double lam : lambdas) {
      auto it = std::lower_bound(sorted_vals.begin(), sorted_vals.end(), lam);
      d.values.push_back(prefix[static_cast<size_t>(it - sorted_vals.begin())]);
    }
    out.push_back(std::move(d));
  }
  return out;
}

double sublevel_moment_mc(const SymbolPoly& P, double lambda, const MultiIndex& alpha,
                          size_t samples, uint64_t seed) {
  const int n = P.dimension();
  const double R = sublevel_box_halfwidth(P, lambda);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-R, R);
  double acc = 0.0;
  std::vector<double> xi(n);
  for (size_t s = 0; s < samples; ++s) {
    for (int d = 0; d < n; ++d) xi[d] = unif(rng);
    if (P.evaluate_real_part(xi) < lambda) acc += moment_weight(xi, alpha);
  }
  return acc * std::pow(2.0 * R, n) / double(samples);
}

AsymptoticFit fit_asymptotics(const SpectralDiagonal& diag) {
  diag.validate();
  if (diag.lambdas.size() < 6 || diag.lambdas.back() < 100.0 * diag.lambdas.front())
    throw std::invalid_argument("fit_asymptotics: need >= 6 lambdas over >= 2 decades");
  AsymptoticFit best;
  double best_res = 1e300;
  for (int t = 0; t <= std::max(0, diag.dim - 1); ++t) {
    std::vector<double> x, y;
    for (size_t k = 0; k < diag.lambdas.size(); ++k) {
      if (diag.values[k] <= 0) continue;
      double ll = std::log(diag.lambdas[k]);
      x.push_back(ll);
      y.push_back(std::log(diag.values[k]) - t * std::log(std::max(ll, 1e-12)));
    }
    if (x.size() < 4) throw std::invalid_argument("fit_asymptotics: too few positive values");
    LineFit f = fit_line(x, y);
    if (f.residual_rms < best_res) {
      best_res = f.residual_rms;
      best = {std::exp(f.intercept), f.slope, t, f.residual_rms};
    }
  }
  return best;
}

double stieltjes_green(const SpectralDiagonal& diag, double lambda) {
  diag.validate();
  if (lambda >= diag.lambdas.front())
    throw std::invalid_argument("stieltjes_green: lambda must lie below the grid");
  double acc = 0.0;
  double prev_v = 0.0;
  for (size_t k = 0; k < diag.lambdas.size(); ++k) {
    acc += (diag.values[k] - prev_v) / (diag.lambdas[k] - lambda);
    prev_v = diag.values[k];
  }
  // tail from the fitted growth law: int_L^inf a C mu^{a-1} / (mu-lambda) dmu;
  // diagonals too short to fit get no tail correction
  AsymptoticFit fit;
  try {
    fit = fit_asymptotics(diag);
  } catch (const std::invalid_argument&) {
    return acc;
  }
  if (fit.a >= 1.0) throw std::runtime_error("stieltjes_green: divergent tail (a >= 1)");
  if (fit.a > 0.0) {
    const double L = diag.lambdas.back();
    const int Np = 512;
    double tail = 0.0;
    for (int j = 0; j < Np; ++j) {  // mu = L/u^2, u in (0,1]
      double u = (j + 0.5) / Np;
      double mu = L / (u * u);
      double dmu = 2.0 * L / (u * u * u) / Np;
      tail += fit.C * fit.a * std::pow(mu, fit.a - 1.0) *
              std::pow(std::max(std::log(mu), 1e-12), fit.t) / (mu - lambda) * dmu;
    }
    acc += tail;
  }
  return acc;
}

GreenDifferenceReport green_difference_check(const SpectralDiagonal& frozen,
                                             const SpectralDiagonal& variable) {
  frozen.validate();
  variable.validate();
  if (frozen.lambdas != variable.lambdas)
    throw std::invalid_argument("green_difference_check: lambda grids differ");
  GreenDifferenceReport rep;
  rep.sigma_monotone = true;
  std::vector<double> rel;
  double prev_sigma = -1e300;
  for (size_t k = 0; k < frozen.lambdas.size(); ++k) {
    double sigma = variable.values[k] - frozen.values[k];
    if (sigma < prev_sigma - 1e-9 * (1.0 + std::abs(prev_sigma))) rep.sigma_monotone = false;
    prev_sigma = sigma;
    rel.push_back(std::abs(sigma) / std::max(1e-300, frozen.values[k]));
  }
  if (*std::max_element(rel.begin(), rel.end()) < 1e-13) return rep;  // identical inputs
  LineFit f = fit_power_law(frozen.lambdas, rel);
  rep.c_hat = -f.slope;
  rep.residual = f.residual_rms;
  return rep;
}

TauberianReport tauberian_compare(const SpectralDiagonal& frozen,
                                  const SpectralDiagonal& variable) {
  frozen.validate();
  variable.validate();
  if (frozen.lambdas != variable.lambdas)
    throw std::invalid_argument("tauberian_compare: lambda grids differ");
  TauberianReport rep;
  rep.lambdas = frozen.lambdas;
  for (size_t k = 0; k < frozen.lambdas.size(); ++k)
    rep.ratio.push_back(variable.values[k] / std::max(1e-300, frozen.values[k]));
  // top decade: y = |ratio-1| * log(lambda) must hug a constant
  std::vector<double> y;
  const double cut = rep.lambdas.back() / 10.0;
  for (size_t k = 0; k < rep.lambdas.size(); ++k)
    if (rep.lambdas[k] >= cut)
      y.push_back(std::abs(rep.ratio[k] - 1.0) * std::log(rep.lambdas[k]));
  if (y.size() < 2) throw std::invalid_argument("tauberian_compare: too few top-decade points");
  double mean = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
  double rss = 0.0;
  for (double v : y) rss += (v - mean) * (v - mean);
  rep.correction_scale = mean;
  rep.residual = std::sqrt(rss / double(y.size()));
  const double ymax = *std::max_element(y.begin(), y.end());
  rep.pass = (rep.residual < 0.3) || (ymax <= 0.5);
  return rep;
}

AprioriReport apriori_bound_check(const SpectralDiagonal& diag, int r) {
  diag.validate();
  if (r < 1) throw std::invalid_argument("apriori_bound_check: r >= 1 required");
  AprioriReport rep;
  bool all_zero = std::all_of(diag.values.begin(), diag.values.end(),
                              [](double v) { return v == 0.0; });
  if (all_zero) {
    rep.pass = true;
    return rep;
  }
  std::vector<double> x, y;
  for (size_t k = 0; k < diag.lambdas.size(); ++k)
    if (diag.values[k] > 0) {
      x.push_back(1.0 + diag.lambdas[k]);
      y.push_back(diag.values[k]);
    }
  LineFit f = fit_power_law(x, y);
  rep.exponent = f.slope;
  rep.pass = rep.exponent <= 1.0 / double(r) + 0.1;
  return rep;
}

double approx_eigenvector_bound(const SymbolPoly& M, double lambda1, double lambda2,
                                const GridSpec& spec) {
  if (lambda2 < lambda1) throw std::invalid_argument("approx_eigenvector_bound: bad interval");
  const double mid = 0.5 * (lambda1 + lambda2);
  double worst = 0.0;
  bool any = false;
  for (const GridFunction& p : probe_family(spec)) {
    GridFunction u = p.multiplier([&](const std::vector<double>& xi) {
      double m = M.evaluate_real_part(xi);
      return (m > lambda1 && m <= lambda2) ? std::complex<double>(1.0)
                                           : std::complex<double>(0.0);
    });
    double nu = u.l2_physical();
    if (nu < 1e-300) continue;
    any = true;
    GridFunction res = u.apply_symbol(M) - u.scaled(mid);
    worst = std::max(worst, res.l2_physical() / nu);
  }
  if (!any) throw std::runtime_error("approx_eigenvector_bound: empty spectral slice");
  return worst;
}

SpectralDiagonal variable_diagonal(const OperatorDescription& L,
                                   const std::vector<double>& lambdas,
                                   const GridSpec& spec, const std::vector<double>& x) {
  spec.validate();
  if (lambdas.empty()) throw std::invalid_argument("variable_diagonal: empty lambda list");
  const auto n = static_cast<Eigen::Index>(spec.size());
  Eigen::MatrixXcd A(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<std::complex<double>> e(spec.size(), 0.0);
    e[static_cast<size_t>(j)] = 1.0;
    GridFunction col = apply_operator_variable(L, 0.0, GridFunction(spec, std::move(e)));
    for (Eigen::Index i = 0; i < n; ++i) A(i, j) = col.at(static_cast<size_t>(i));
  }
  Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());  // drop the skew part (logged convention)
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("variable_diagonal: eigendecomposition failed");

  size_t ix = 0;
  double best = 1e300;
  for (size_t k = 0; k < spec.size(); ++k) {
    auto p = spec.point_at(k);
    double d = 0;
    for (int a = 0; a < spec.dimension(); ++a) d += (p[a] - x[a]) * (p[a] - x[a]);
    if (d < best) best = d, ix = k;
  }
  // eigenvectors are l2-orthonormal; physical normalization divides by h^nu
  SpectralDiagonal diag;
  diag.lambdas = lambdas;
  diag.alpha = MultiIndex::zero(spec.dimension());
  diag.dim = spec.dimension();
  diag.provenance = "variable";
  const double vol = spec.cell_volume();
  for (double lam : lambdas) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
      if (es.eigenvalues()(k) < lam)
        acc += std::norm(es.eigenvectors()(static_cast<Eigen::Index>(ix), k)) / vol;
    diag.values.push_back(acc);
  }
  return diag;
}

BojReport boj_check(const SymbolPoly& Q, const SymbolPoly& M, const GridSpec& spec) {
  spec.validate();
  // precompute |Q|, |M|, |xi| on the frequency grid
  std::vector<double> qv(spec.size()), mv(spec.size()), rv(spec.size());
  for (size_t f = 0; f < spec.size(); ++f) {
    auto xi = spec.freq_at(f);
    std::vector<std::complex<double>> z(xi.begin(), xi.end());
    qv[f] = std::abs(Q.evaluate(z));
    mv[f] = std::abs(M.evaluate(z));
    double norm = 0;
    for (double c : xi) norm += c * c;
    rv[f] = std::sqrt(norm);
  }
  auto rhs = [&](double k, double tau, size_t f) {
    return std::pow(tau, -k) * std::pow(1.0 + rv[f], -k) * (tau + mv[f]);
  };
  // scan k from large to small; keep the largest k whose C (fitted at
  // tau = 1) survives the larger-tau checks
  BojReport rep;
  for (double k : {1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05}) {
    double C = 0.0;
    for (size_t f = 0; f < spec.size(); ++f) C = std::max(C, qv[f] / rhs(k, 1.0, f));
    bool holds = true;
    for (double tau : {1.0, 10.0, 100.0})
      for (size_t f = 0; f < spec.size() && holds; ++f)
        if (qv[f] > C * rhs(k, tau, f) * (1.0 + 1e-9)) holds = false;
    if (holds) {
      rep = {C, k, true};
      break;
    }
  }
  return rep;
}

LocalizedDecayReport localized_decay_check(const SymbolPoly& M,
                                           const std::vector<double>& lambdas,
                                           const GridSpec& spec, double inner_radius,
                                           double kappa, double b, double c) {
  spec.validate();
  LocalizedDecayReport rep;
  rep.lambdas = lambdas;
  for (double lam : lambdas) {
    // slice probe at height lambda: indicator of {lambda/2 < M <= lambda}
    GridFunction base = GridFunction::sample(spec, [&](const std::vector<double>& p) {
      double s = 1.0;
      for (double q : p) s += 0.1 * q;
      return std::complex<double>(s, 0.0);
    });
    GridFunction u = base.multiplier([&](const std::vector<double>& xi) {
      double m = M.evaluate_real_part(xi);
      return (m > 0.5 * lam && m <= lam) ? std::complex<double>(1.0)
                                         : std::complex<double>(0.0);
    });
    // mollify (smooth bump convolution) and split inner/outer by |z|
    GridFunction phi = mollified_delta(spec, std::vector<double>(spec.dimension(), 0.0), 4.0);
    GridFunction um = convolve(u, phi);
    double inner = 0.0, outer = 0.0;
    for (size_t k = 0; k < spec.size(); ++k) {
      auto p = spec.point_at(k);
      double d = 0;
      for (double q : p) d += q * q;
      d = std::sqrt(d);
      if (d <= inner_radius)
        inner += std::norm(um.at(k));
      else
        outer += std::norm(u.at(k));
    }
    const double h = spec.cell_volume();
    GridFunction res = u.apply_symbol(M) - u.scaled(lam);
    rep.lhs.push_back(std::sqrt(inner * h));
    rep.term1.push_back(std::exp(-kappa * std::pow(lam, b)) * std::sqrt(outer * h));
    rep.term2.push_back(std::pow(lam, -c) * res.l2_physical());
  }
  // two-variable non-negative least squares: unconstrained solve, then
  // fall back to the single-variable solves if a coefficient goes negative
  const size_t nl = rep.lhs.size();
  Eigen::MatrixXd X(nl, 2);
  Eigen::VectorXd yv(nl);
  for (size_t k = 0; k < nl; ++k) {
    X(k, 0) = rep.term1[k];
    X(k, 1) = rep.term2[k];
    yv(k) = rep.lhs[k];
  }
  auto rss_of = [&](double c1, double c2) {
    return (yv - c1 * X.col(0) - c2 * X.col(1)).squaredNorm();
  };
  Eigen::Vector2d beta = X.colPivHouseholderQr().solve(yv);
  double c1 = std::max(0.0, beta(0)), c2 = std::max(0.0, beta(1));
  double b1 = std::max(0.0, X.col(0).dot(yv) / std::max(1e-300, X.col(0).squaredNorm()));
  double b2 = std::max(0.0, X.col(1).dot(yv) / std::max(1e-300, X.col(1).squaredNorm()));
  rep.C1 = c1, rep.C2 = c2;
  double best = rss_of(c1, c2);
  if (rss_of(b1, 0.0) < best) best = rss_of(b1, 0.0), rep.C1 = b1, rep.C2 = 0.0;
  if (rss_of(0.0, b2) < best) rep.C1 = 0.0, rep.C2 = b2;
  rep.pass = true;
  for (size_t k = 0; k < rep.lhs.size(); ++k)
    if (rep.lhs[k] > rep.C1 * rep.term1[k] + rep.C2 * rep.term2[k] +
                         0.05 * (rep.term1[k] + rep.term2[k]) + 1e-12)
      rep.pass = false;
  return rep;
}

}  // namespace hypolab
