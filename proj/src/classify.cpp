#include "hypolab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlohmann/json.hpp"

namespace hypolab {

namespace {

using Vec = std::vector<double>;

std::string alpha_key(const MultiIndex& a) {
  std::string s = "(";
  for (int k = 0; k < a.size(); ++k) s += (k ? "," : "") + std::to_string(a[k]);
  return s + ")";
}

Vec scaled(const Vec& omega, double r) {
  Vec p(omega);
  for (double& x : p) x *= r;
  return p;
}

std::vector<std::complex<double>> to_cplx(const Vec& x) {
  return {x.begin(), x.end()};
}

/// Precomputed family of all nonzero derivatives of a symbol.
struct DerivativeFamily {
  std::vector<std::pair<MultiIndex, SymbolPoly>> ders;  // includes alpha = 0 first
  explicit DerivativeFamily(const SymbolPoly& p) {
    for (const auto& a : p.derivative_support()) ders.emplace_back(a, p.derive(a));
  }
  double tilde(const Vec& x) const {
    auto z = to_cplx(x);
    double s2 = 0;
    for (const auto& [a, d] : ders) s2 += std::norm(d.evaluate(z));
    return std::sqrt(s2);
  }
};

/// Projected-gradient descent of |P(r*omega)|^2 on the unit sphere.
Vec refine_min_direction(const SymbolPoly& p, const std::vector<SymbolPoly>& grad, Vec omega,
                         double r, int steps) {
  const int nu = static_cast<int>(omega.size());
  auto value = [&](const Vec& w) { return std::norm(p.evaluate(to_cplx(scaled(w, r)))); };
  auto normalize = [](Vec w) {
    double s = 0;
    for (double x : w) s += x * x;
    s = std::sqrt(s);
    for (double& x : w) x /= s;
    return w;
  };
  double f = value(omega);
  for (int it = 0; it < steps; ++it) {
    auto z = to_cplx(scaled(omega, r));
    std::complex<double> pv = p.evaluate(z);
    Vec g(nu);
    double gdot = 0;
    for (int j = 0; j < nu; ++j) {
      g[j] = 2.0 * std::real(std::conj(pv) * grad[j].evaluate(z)) * r;
      gdot += g[j] * omega[j];
    }
    double gn = 0;
    for (int j = 0; j < nu; ++j) {
      g[j] -= gdot * omega[j];  // tangential component
      gn += g[j] * g[j];
    }
    gn = std::sqrt(gn);
    if (gn == 0.0) break;
    double step = 0.3;
    bool moved = false;
    while (step > 1e-7) {
      Vec trial(nu);
      for (int j = 0; j < nu; ++j) trial[j] = omega[j] - step * g[j] / gn;
      trial = normalize(std::move(trial));
      double ft = value(trial);
      if (ft < f) {
        omega = std::move(trial);
        f = ft;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return omega;
}

LineFit top_half_slope(const std::vector<RatioSample>& samples) {
  const size_t n = samples.size();
  const size_t from = n / 2;
  std::vector<double> r, v;
  for (size_t i = from; i < n; ++i) {
    r.push_back(samples[i].radius);
    v.push_back(samples[i].value);
  }
  return fit_power_law(r, v);
}

/// Continued-fraction rounding of x to a rational with denominator <= qmax.
Rational round_rational(double x, long qmax) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int it = 0; it < 40; ++it) {
    double fl = std::floor(v);
    long a = static_cast<long>(fl);
    long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > qmax || q2 < 0) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = v - fl;
    if (frac < 1e-12) break;
    v = 1.0 / frac;
  }
  return Rational(p1, q1 == 0 ? 1 : q1);
}

/// Does P vanish identically along the exact ray t -> t*eta?
bool vanishes_on_ray(const SymbolPoly& p, const std::vector<Rational>& eta) {
  std::map<int, RationalComplex> by_degree;
  for (const auto& [a, c] : p.terms()) {
    RationalComplex coef = c;
    for (int k = 0; k < p.dimension(); ++k) {
      Rational pw = 1;
      for (int j = 0; j < a[k]; ++j) pw *= eta[k];
      coef *= RationalComplex(pw);
    }
    by_degree[a.order()] += coef;
  }
  for (const auto& [d, c] : by_degree)
    if (!c.is_zero()) return false;
  return true;
}

}  // namespace

std::string to_string(StrengthOrder o) {
  switch (o) {
    case StrengthOrder::EQUIVALENT: return "EQUIVALENT";
    case StrengthOrder::STRICTLY_WEAKER: return "STRICTLY_WEAKER";
    case StrengthOrder::WEAKER: return "WEAKER";
    case StrengthOrder::NOT_WEAKER: return "NOT_WEAKER";
    default: return "INCONCLUSIVE";
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::YES: return "YES";
    case Verdict::NO: return "NO";
    default: return "INCONCLUSIVE";
  }
}

std::vector<double> SamplingSchedule::radii() const {
  std::vector<double> r;
  for (double x = radius_min; x <= radius_max * (1 + 1e-12); x *= radius_factor) r.push_back(x);
  return r;
}

std::vector<std::vector<double>> sphere_design(int nu) {
  std::vector<Vec> pts;
  if (nu == 1) {
    pts.push_back({1.0});
    pts.push_back({-1.0});
    return pts;
  }
  const int count = 2 * nu * nu;
  if (nu == 2) {
    const double golden = 0.6180339887498949;
    for (int k = 0; k < count; ++k) {
      double th = 2.0 * std::numbers::pi * (k + golden) / count;
      pts.push_back({std::cos(th), std::sin(th)});
    }
  } else if (nu == 3) {
    const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / count;
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      pts.push_back({rho * std::cos(ga * k), rho * std::sin(ga * k), z});
    }
  } else {
    // additive quasi-random directions for higher dimensions
    static const double primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    for (int k = 0; k < count; ++k) {
      Vec p(nu);
      double s = 0;
      for (int j = 0; j < nu; ++j) {
        double u = std::fmod((k + 1) * std::sqrt(primes[j % 8]), 1.0);
        p[j] = 2.0 * u - 1.0;
        s += p[j] * p[j];
      }
      if (s == 0) continue;
      for (double& x : p) x /= std::sqrt(s);
      pts.push_back(std::move(p));
    }
  }
  for (int j = 0; j < nu; ++j)
    for (int s : {1, -1}) {
      Vec p(nu, 0.0);
      p[j] = s;
      pts.push_back(std::move(p));
    }
  if (nu <= 6) {
    const double inv = 1.0 / std::sqrt(static_cast<double>(nu));
    for (int mask = 0; mask < (1 << nu); ++mask) {
      Vec p(nu);
      for (int j = 0; j < nu; ++j) p[j] = ((mask >> j) & 1) ? -inv : inv;
      pts.push_back(std::move(p));
    }
  }
  return pts;
}

StrengthReport compare_strength(const SymbolPoly& Q, const SymbolPoly& P,
                                const SamplingSchedule& sched) {
  if (P.is_zero()) throw std::invalid_argument("compare_strength: P identically zero");
  if (Q.dimension() != P.dimension())
    throw std::invalid_argument("compare_strength: dimension mismatch");
  StrengthReport rep;
  if (Q.is_zero()) {
    rep.order = StrengthOrder::STRICTLY_WEAKER;
    return rep;
  }
  DerivativeFamily fq(Q), fp(P);
  auto design = sphere_design(P.dimension());
  for (double r : sched.radii()) {
    double vmax = 0, vmin = std::numeric_limits<double>::infinity();
    for (const auto& omega : design) {
      Vec x = scaled(omega, r);
      double ratio = fq.tilde(x) / fp.tilde(x);
      vmax = std::max(vmax, ratio);
      vmin = std::min(vmin, ratio);
    }
    rep.max_ratio.push_back({r, vmax});
    rep.min_ratio.push_back({r, vmin});
  }
  LineFit fx = top_half_slope(rep.max_ratio);
  LineFit fn = top_half_slope(rep.min_ratio);
  rep.max_slope = fx.slope;
  rep.min_slope = fn.slope;
  const double max_top = rep.max_ratio.back().value;
  const double min_top = rep.min_ratio.back().value;

  if (std::abs(fx.slope) <= sched.slope_tol && std::abs(fn.slope) <= sched.slope_tol &&
      min_top > sched.vanish_tol) {
    rep.order = StrengthOrder::EQUIVALENT;
  } else if (fx.slope < -sched.slope_tol && max_top < sched.vanish_tol) {
    rep.order = StrengthOrder::STRICTLY_WEAKER;
  } else if (fx.slope > sched.slope_tol) {
    rep.order = StrengthOrder::NOT_WEAKER;
  } else if (std::abs(fx.slope) <= sched.slope_tol) {
    rep.order = StrengthOrder::WEAKER;
  } else {
    rep.order = StrengthOrder::INCONCLUSIVE;
  }
  return rep;
}

HypoellipticityReport is_hypoelliptic(const SymbolPoly& P, const SamplingSchedule& sched) {
  HypoellipticityReport rep;
  if (P.is_constant()) {
    // identity-like operators are excluded
    rep.verdict = Verdict::NO;
    rep.witness = NoWitness{"ratio-sequence", {}, {}, "constant symbol"};
    return rep;
  }
  const int nu = P.dimension();
  DerivativeFamily fam(P);
  std::vector<SymbolPoly> grad;
  for (int j = 0; j < nu; ++j) {
    std::vector<int> e(nu, 0);
    e[j] = 1;
    grad.push_back(P.derive(MultiIndex(e)));
  }
  auto design = sphere_design(nu);
  auto radii = sched.radii();

  // refined minima of |P| on each sphere, and the per-radius point set used
  // for the derivative-ratio sweeps (design + refined minima)
  std::vector<std::vector<Vec>> point_sets;
  std::vector<Vec> argmin_dirs;
  for (double r : radii) {
    double best = std::numeric_limits<double>::infinity();
    Vec best_dir;
    std::vector<Vec> pts;
    for (const auto& omega : design) pts.push_back(scaled(omega, r));
    for (const auto& omega : design) {
      Vec w = refine_min_direction(P, grad, omega, r, sched.refine_steps);
      double v = std::abs(P.evaluate(to_cplx(scaled(w, r))));
      if (v < best) {
        best = v;
        best_dir = w;
      }
    }
    pts.push_back(scaled(best_dir, r));
    point_sets.push_back(std::move(pts));
    argmin_dirs.push_back(best_dir);
    rep.min_abs.push_back({r, best});
  }

  // (a) zeros at R^n-infinity, relative to the local strength scale
  const double top_r = radii.back();
  const Vec& top_dir = argmin_dirs.back();
  const double top_min = rep.min_abs.back().value;
  const double top_scale = fam.tilde(scaled(top_dir, top_r));
  if (top_min < 1e-6 * top_scale) {
    // try to certify an exact unbounded zero ray
    double amax = 0;
    for (double x : top_dir) amax = std::max(amax, std::abs(x));
    std::vector<Rational> ray(nu);
    for (int j = 0; j < nu; ++j) ray[j] = round_rational(top_dir[j] / amax, 64);
    NoWitness w;
    if (vanishes_on_ray(P, ray)) {
      w.kind = "zero-ray";
      for (const auto& q : ray) w.direction.push_back(static_cast<double>(q));
      w.note = "P vanishes identically on the ray t*direction";
    } else {
      w.kind = "zero-sequence";
      for (size_t i = 0; i < radii.size(); ++i) w.points.push_back(scaled(argmin_dirs[i], radii[i]));
      w.note = "min |P| on expanding spheres stays near zero";
    }
    rep.verdict = Verdict::NO;
    rep.witness = std::move(w);
    return rep;
  }
  if (top_min < 1e-3 * top_scale) {
    rep.verdict = Verdict::INCONCLUSIVE;
    return rep;
  }

  // (b) all derivative ratios vanish at infinity
  bool all_ok = true, any_ambiguous = false;
  for (const auto& [alpha, deriv] : fam.ders) {
    if (alpha.order() == 0) continue;
    std::vector<RatioSample> samples;
    std::vector<Vec> worst_pts;
    for (size_t i = 0; i < radii.size(); ++i) {
      double vmax = 0;
      Vec worst;
      for (const auto& x : point_sets[i]) {
        auto z = to_cplx(x);
        double den = std::abs(P.evaluate(z));
        double num = std::abs(deriv.evaluate(z));
        double ratio = den > 0 ? num / den : 1e30;
        if (ratio > vmax) {
          vmax = ratio;
          worst = x;
        }
      }
      samples.push_back({radii[i], vmax});
      worst_pts.push_back(std::move(worst));
    }
    LineFit f = top_half_slope(samples);
    const double v_top = samples.back().value;
    const std::string key = alpha_key(alpha);
    rep.derivative_ratios[key] = samples;
    if (v_top >= sched.vanish_tol) {
      all_ok = false;
      if (!rep.witness) {
        NoWitness w;
        w.kind = "ratio-sequence";
        w.points = worst_pts;
        w.note = "derivative ratio P^" + key + "/P does not vanish at infinity";
        rep.witness = std::move(w);
      }
    } else if (f.slope >= -sched.slope_tol) {
      any_ambiguous = true;
    }
  }
  if (!all_ok)
    rep.verdict = Verdict::NO;
  else if (any_ambiguous)
    rep.verdict = Verdict::INCONCLUSIVE;
  else
    rep.verdict = Verdict::YES;
  return rep;
}

PartialHypoReport is_partially_hypoelliptic(const SymbolPoly& P, const SamplingSchedule& sched) {
  if (!P.split()) throw std::invalid_argument("is_partially_hypoelliptic: no split declared");
  if (P.good_degree() == 0)
    throw std::invalid_argument("is_partially_hypoelliptic: degree over good variables is zero");
  PartialHypoReport rep;
  rep.decomposition = P.bad_coefficients();

  auto it0 = rep.decomposition.find(MultiIndex::zero(P.split()->m));
  SymbolPoly p0_full = it0 != rep.decomposition.end()
                           ? it0->second
                           : SymbolPoly(P.dimension(), *P.split());
  if (p0_full.is_zero()) {
    rep.verdict = Verdict::NO;
    rep.head.verdict = Verdict::NO;
    rep.head.witness = NoWitness{"ratio-sequence", {}, {}, "P_0 is identically zero"};
    return rep;
  }
  SymbolPoly p0 = p0_full.restrict_to_good();
  rep.head = is_hypoelliptic(p0, sched);

  bool all_sw = true, any_inconclusive = rep.head.verdict == Verdict::INCONCLUSIVE;
  for (const auto& [beta, pb] : rep.decomposition) {
    if (beta.order() == 0) continue;
    auto order = compare_strength(pb.restrict_to_good(), p0, sched).order;
    rep.coefficient_orders[alpha_key(beta)] = order;
    if (order == StrengthOrder::INCONCLUSIVE) any_inconclusive = true;
    else if (order != StrengthOrder::STRICTLY_WEAKER) all_sw = false;
  }
  if (rep.head.verdict == Verdict::NO || !all_sw)
    rep.verdict = Verdict::NO;
  else if (any_inconclusive)
    rep.verdict = Verdict::INCONCLUSIVE;
  else
    rep.verdict = Verdict::YES;
  return rep;
}

AsymptoticExponents estimate_exponents(const SymbolPoly& M, const SamplingSchedule& sched) {
  if (M.is_constant()) throw std::invalid_argument("estimate_exponents: constant symbol");
  AsymptoticExponents out;
  const int nu = M.dimension();
  DerivativeFamily fam(M);
  std::vector<SymbolPoly> grad;
  for (int j = 0; j < nu; ++j) {
    std::vector<int> e(nu, 0);
    e[j] = 1;
    grad.push_back(M.derive(MultiIndex(e)));
  }
  auto design = sphere_design(nu);
  auto radii = sched.radii();
  out.radius_lo = radii.front();
  out.radius_hi = radii.back();

  std::vector<RatioSample> minabs;
  for (double r : radii) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& omega : design) {
      Vec w = refine_min_direction(M, grad, omega, r, sched.refine_steps);
      best = std::min(best, std::abs(M.evaluate(to_cplx(scaled(w, r)))));
    }
    minabs.push_back({r, best});
  }
  LineFit f = top_half_slope(minabs);
  out.rho = std::min(f.slope, static_cast<double>(M.degree()));
  out.sigma = out.rho;
  out.rho_residual = f.residual_rms;

  // b and c from the two largest radii with a 1/log(R) extrapolation
  auto exponent_at = [&](double r, bool for_b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [alpha, deriv] : fam.ders) {
      if (alpha.order() == 0) continue;
      for (const auto& omega : design) {
        auto z = to_cplx(scaled(omega, r));
        double da = std::abs(deriv.evaluate(z));
        if (da == 0) continue;
        double v;
        if (for_b) {
          double lM = std::log1p(std::abs(M.evaluate(z)));
          v = (1.0 - std::log(da) / lM) / alpha.order();
        } else {
          double num = std::log1p(std::norm(M.evaluate(z))) - 2.0 * std::log(da);
          v = num / std::log1p(r * r);
        }
        best = std::min(best, v);
      }
    }
    return best;
  };
  const double r1 = radii[radii.size() - 2], r2 = radii.back();
  const double l1 = std::log(r1), l2 = std::log(r2);
  auto extrapolate = [&](bool for_b) {
    double v1 = exponent_at(r1, for_b), v2 = exponent_at(r2, for_b);
    return (v2 * l2 - v1 * l1) / (l2 - l1);
  };
  out.b = extrapolate(true);
  out.c = extrapolate(false);
  return out;
}

LinealitySpace lineality(const SymbolPoly& P, bool complex_directions) {
  (void)complex_directions;  // i*t directions give the same real null space
  const int nu = P.dimension();
  // rows: (monomial, re/im) of the gradient coefficient matrix; columns: eta_j
  std::map<MultiIndex, std::vector<RationalComplex>> rows;
  for (int j = 0; j < nu; ++j) {
    std::vector<int> e(nu, 0);
    e[j] = 1;
    SymbolPoly dj = P.derive(MultiIndex(e));
    for (const auto& [a, c] : dj.terms()) {
      auto& row = rows[a];
      row.resize(nu);
      row[j] = c;
    }
  }
  std::vector<std::vector<Rational>> A;
  for (auto& [a, row] : rows) {
    row.resize(nu);
    std::vector<Rational> re(nu), im(nu);
    bool has_im = false;
    for (int j = 0; j < nu; ++j) {
      re[j] = row[j].re;
      im[j] = row[j].im;
      if (im[j] != 0) has_im = true;
    }
    A.push_back(std::move(re));
    if (has_im) A.push_back(std::move(im));
  }

  // exact Gaussian elimination; pivots mark bound columns
  std::vector<int> pivot_col;
  size_t rank = 0;
  for (int col = 0; col < nu && rank < A.size(); ++col) {
    size_t piv = rank;
    while (piv < A.size() && A[piv][col] == 0) ++piv;
    if (piv == A.size()) continue;
    std::swap(A[rank], A[piv]);
    for (size_t r = 0; r < A.size(); ++r) {
      if (r == rank || A[r][col] == 0) continue;
      Rational f = A[r][col] / A[rank][col];
      for (int j = 0; j < nu; ++j) A[r][j] -= f * A[rank][j];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  LinealitySpace out;
  std::vector<bool> bound(nu, false);
  for (int c : pivot_col) bound[c] = true;
  for (int freec = 0; freec < nu; ++freec) {
    if (bound[freec]) continue;
    std::vector<Rational> v(nu, Rational(0));
    v[freec] = 1;
    for (size_t r = 0; r < rank; ++r) {
      int pc = pivot_col[r];
      v[pc] = -A[r][freec] / A[r][pc];
    }
    out.basis.push_back(std::move(v));
  }
  out.is_reduced = out.basis.empty();
  return out;
}

std::vector<std::vector<double>> LinealitySpace::basis_dbl() const {
  std::vector<std::vector<double>> out;
  for (const auto& v : basis) {
    std::vector<double> d;
    for (const auto& q : v) d.push_back(static_cast<double>(q));
    out.push_back(std::move(d));
  }
  return out;
}

std::optional<int> hypoelliptic_iteration_index(const SymbolPoly& P, int N_max,
                                                const SamplingSchedule& sched) {
  if (N_max < 1) throw std::invalid_argument("hypoelliptic_iteration_index: N_max must be >= 1");
  for (int N = 1; N <= N_max; ++N) {
    if (is_hypoelliptic(P.power(N), sched).verdict == Verdict::YES) return N;
  }
  return std::nullopt;
}

SignAtInfinity re_sign_at_infinity(const std::vector<SymbolPoly>& frozen,
                                   const SamplingSchedule& sched) {
  if (frozen.empty()) throw std::invalid_argument("re_sign_at_infinity: no frozen symbols");
  SignAtInfinity out;
  auto split = frozen.front().split().value_or(VariableSplit{frozen.front().dimension(), 0});
  for (const auto& s : frozen)
    if (s.dimension() != split.n + split.m)
      throw std::invalid_argument("re_sign_at_infinity: frozen symbols must share one split");
  const int n = split.n, m = split.m;

  auto good_design = sphere_design(n);
  std::vector<Vec> bad_pts{Vec(m, 0.0)};
  for (int j = 0; j < m; ++j)
    for (int sg : {1, -1}) {
      Vec p(m, 0.0);
      p[j] = sg;
      bad_pts.push_back(std::move(p));
    }
  const double r = sched.radius_max;
  int common = 0;
  int first_idx = -1;
  Vec first_pt;
  for (size_t i = 0; i < frozen.size(); ++i) {
    for (const auto& omega : good_design)
      for (const auto& eta : bad_pts) {
        Vec x = scaled(omega, r);
        x.insert(x.end(), eta.begin(), eta.end());
        double re = frozen[i].evaluate_real_part(x);
        int sg = re > 0 ? 1 : (re < 0 ? -1 : 0);
        if (common == 0) {
          common = sg;
          first_idx = static_cast<int>(i);
          first_pt = x;
        } else if (sg != 0 && sg != common) {
          out.sign = 0;
          out.conflicting_pair = {first_idx, static_cast<int>(i)};
          out.witness_point_a = first_pt;
          out.witness_point_b = x;
          return out;
        }
      }
  }
  out.sign = common;
  return out;
}

ClassificationReport classify_symbol(const SymbolPoly& P, int iteration_N_max,
                                     const SamplingSchedule& sched) {
  ClassificationReport rep;
  rep.lineality = lineality(P);
  rep.hypoelliptic = is_hypoelliptic(P, sched);
  if (P.split() && P.split()->m > 0 && P.good_degree() > 0)
    rep.partially_hypoelliptic = is_partially_hypoelliptic(P, sched);

  if (rep.hypoelliptic.verdict == Verdict::YES) {
    rep.exponents = estimate_exponents(P, sched);
    rep.iteration_index = 1;
  } else if (rep.partially_hypoelliptic &&
             rep.partially_hypoelliptic->verdict == Verdict::YES) {
    auto it0 = rep.partially_hypoelliptic->decomposition.find(MultiIndex::zero(P.split()->m));
    if (it0 != rep.partially_hypoelliptic->decomposition.end())
      rep.exponents = estimate_exponents(it0->second.restrict_to_good(), sched);
    rep.iteration_index = hypoelliptic_iteration_index(P, iteration_N_max, sched);
  }
  return rep;
}

namespace {

nlohmann::json samples_json(const std::vector<RatioSample>& s) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& x : s) arr.push_back({{"radius", x.radius}, {"value", x.value}});
  return arr;
}

nlohmann::json witness_json(const std::optional<NoWitness>& w) {
  if (!w) return nullptr;
  nlohmann::json j;
  j["kind"] = w->kind;
  j["direction"] = w->direction;
  j["points"] = w->points;
  j["note"] = w->note;
  return j;
}

}  // namespace

std::string ClassificationReport::to_json() const {
  nlohmann::json j;
  j["hypoelliptic"]["verdict"] = to_string(hypoelliptic.verdict);
  j["hypoelliptic"]["witness"] = witness_json(hypoelliptic.witness);
  j["hypoelliptic"]["min_abs"] = samples_json(hypoelliptic.min_abs);
  for (const auto& [k, v] : hypoelliptic.derivative_ratios)
    j["hypoelliptic"]["derivative_ratios"][k] = samples_json(v);
  if (partially_hypoelliptic) {
    j["partially_hypoelliptic"]["verdict"] = to_string(partially_hypoelliptic->verdict);
    for (const auto& [k, o] : partially_hypoelliptic->coefficient_orders)
      j["partially_hypoelliptic"]["coefficient_orders"][k] = to_string(o);
    for (const auto& [beta, pb] : partially_hypoelliptic->decomposition)
      j["partially_hypoelliptic"]["decomposition"][alpha_key(beta)] = pb.serialize();
  }
  if (exponents) {
    j["exponents"] = {{"rho", exponents->rho},     {"b", exponents->b},
                      {"sigma", exponents->sigma}, {"c", exponents->c},
                      {"rho_residual", exponents->rho_residual},
                      {"radius_lo", exponents->radius_lo},
                      {"radius_hi", exponents->radius_hi}};
  }
  j["lineality"]["is_reduced"] = lineality.is_reduced;
  j["lineality"]["basis"] = lineality.basis_dbl();
  if (iteration_index) j["iteration_index"] = *iteration_index;
  return j.dump(2);
}

}  // namespace hypolab
