#include "hypolab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hypolab/classify.hpp"
#include "hypolab/fit.hpp"

namespace hypolab {

namespace {

/// Split a full frequency vector into |xi|^2 (good block) and |eta|^2 (bad).
void block_norms2(const GridSpec& spec, const std::vector<double>& f, double& xi2, double& eta2) {
  xi2 = eta2 = 0.0;
  for (int d = 0; d < spec.split.n; ++d) xi2 += f[d] * f[d];
  for (int d = spec.split.n; d < spec.dimension(); ++d) eta2 += f[d] * f[d];
}

double spectral_quadrature(const GridFunction& u,
                           const std::function<double(const std::vector<double>&)>& weight) {
  auto sp = u.spectrum();
  const GridSpec& spec = u.spec();
  double acc = 0.0;
  for (size_t j = 0; j < sp.size(); ++j) acc += std::norm(sp[j]) * weight(spec.freq_at(j));
  const double cell = spec.freq_cell_volume() /
                      std::pow(2.0 * std::numbers::pi, spec.dimension());
  return std::sqrt(std::max(0.0, acc * cell));
}

std::complex<double> eval_good(const SymbolPoly& M, const GridSpec& spec,
                               const std::vector<double>& f) {
  std::vector<std::complex<double>> xi(f.begin(), f.begin() + spec.split.n);
  return M.evaluate(xi);
}

}  // namespace

double sobolev_norm(const GridFunction& u, double s, double t) {
  const GridSpec& spec = u.spec();
  return spectral_quadrature(u, [&](const std::vector<double>& f) {
    double xi2, eta2;
    block_norms2(spec, f, xi2, eta2);
    return std::pow(1.0 + xi2, s) * std::pow(1.0 + eta2, t);
  });
}

double weighted_norm_ps(const GridFunction& u, const SymbolPoly& M, double s, double t) {
  const GridSpec& spec = u.spec();
  if (M.dimension() != spec.split.n)
    throw std::invalid_argument("weighted_norm_ps: M must act on the good block");
  return spectral_quadrature(u, [&](const std::vector<double>& f) {
    double xi2, eta2;
    block_norms2(spec, f, xi2, eta2);
    double ps = std::pow(1.0 + xi2, s / 2.0) * (1.0 + std::norm(eval_good(M, spec, f)));
    return ps * ps * std::pow(1.0 + eta2, t);
  });
}

double generalized_norm(const GridFunction& u, const std::vector<SymbolPoly>& ops, double s,
                        double t) {
  double acc = std::pow(sobolev_norm(u, s, t), 2);
  for (const auto& P : ops) {
    SymbolPoly full = P.dimension() == u.spec().dimension()
                          ? P
                          : P.embed_good(VariableSplit{u.spec().split.n, u.spec().split.m});
    double v = sobolev_norm(u.apply_symbol(full), s, t);
    acc += v * v;
  }
  return std::sqrt(acc);
}

double M_alpha(const GridFunction& u, const MultiIndex& alpha) {
  const GridSpec& spec = u.spec();
  if (alpha.size() != spec.dimension())
    throw std::invalid_argument("M_alpha: multi-index dimension mismatch");
  auto sp = u.spectrum();
  double acc = 0.0;
  for (size_t j = 0; j < sp.size(); ++j) {
    auto f = spec.freq_at(j);
    // |xi|^alpha = sum_{beta <= alpha} |xi^beta| = prod_d sum_{b<=alpha_d} |xi_d|^b
    double w = 1.0;
    for (int d = 0; d < spec.dimension(); ++d) {
      double sum = 0.0, p = 1.0;
      for (int b = 0; b <= alpha[d]; ++b) {
        sum += p;
        p *= std::abs(f[d]);
      }
      w *= sum;
    }
    acc += w * std::abs(sp[j]);
  }
  return acc * spec.freq_cell_volume();
}

OperatorNormEstimate N_alpha_beta(const GridOperator& K, const MultiIndex& alpha,
                                  const MultiIndex& beta,
                                  const std::vector<GridFunction>& probes) {
  if (probes.empty()) throw std::invalid_argument("N_alpha_beta: need probes");
  OperatorNormEstimate est;
  bool any_alive = false;
  for (size_t i = 0; i < probes.size(); ++i) {
    double den = M_alpha(probes[i], alpha);
    if (den == 0.0) throw std::invalid_argument("N_alpha_beta: zero probe");
    GridFunction out = K(probes[i]);
    double num = M_alpha(out, beta);
    if (num > 1e-14 * den) any_alive = true;
    double ratio = num / den;
    if (ratio > est.value) {
      est.value = ratio;
      est.best_probe = static_cast<int>(i);
    }
  }
  est.all_annihilated = !any_alive;
  return est;
}

GridFunction bessel_smooth(const GridFunction& u, double N, Block block) {
  if (N == 0.0) return u;
  const GridSpec& spec = u.spec();
  const int lo = block == Block::GOOD ? 0 : spec.split.n;
  const int hi = block == Block::GOOD ? spec.split.n : spec.dimension();
  return u.multiplier([&, lo, hi](const std::vector<double>& f) {
    double q = 0.0;
    for (int d = lo; d < hi; ++d) q += f[d] * f[d];
    return std::complex<double>(std::pow(1.0 + q, -N / 2.0), 0.0);
  });
}

std::vector<GridFunction> probe_family(const GridSpec& spec) {
  spec.validate();
  const int nu = spec.dimension();
  const double L0 = spec.half_width[0];
  const double widths[] = {L0 / 16.0, L0 / 13.0, L0 / 10.0};
  const int mod_steps[] = {0, spec.points / 16, spec.points / 8, 3 * spec.points / 16,
                           spec.points / 4};
  const double shifts[] = {0.0, L0 / 16.0};
  std::vector<GridFunction> probes;
  for (double w : widths)
    for (int ms : mod_steps)
      for (double sh : shifts) {
        const double k = ms * spec.dxi(0);
        probes.push_back(GridFunction::sample(spec, [&](const std::vector<double>& x) {
          double q = 0.0;
          for (int d = 0; d < nu; ++d) {
            double xd = x[d] - (d == 0 ? sh : 0.0);
            q += xd * xd;
          }
          double g = std::exp(-q / (2.0 * w * w));
          return std::polar(g, k * x[0]);
        }));
      }
  return probes;
}

bool wraparound_warning(const GridFunction& u, double tol, double fraction) {
  const GridSpec& spec = u.spec();
  const double peak = u.max_abs();
  if (peak == 0.0) return false;
  for (size_t k = 0; k < spec.size(); ++k) {
    auto x = spec.point_at(k);
    bool outside_inner = false;
    for (int d = 0; d < spec.dimension(); ++d)
      if (std::abs(x[d]) > fraction * spec.half_width[d]) outside_inner = true;
    if (outside_inner && std::abs(u.at(k)) > tol * peak) return true;
  }
  return false;
}

StrictWeakCheck check_strict_weak_inequality(const SymbolPoly& N_sym, const SymbolPoly& M_sym,
                                             double sigma,
                                             const std::vector<GridFunction>& probes, double s,
                                             double t) {
  if (probes.empty())
    throw std::invalid_argument("check_strict_weak_inequality: need probes");
  StrictWeakCheck out;
  if (N_sym.is_zero()) {
    out.holds = true;
    out.ratios.assign(probes.size(), 0.0);
    return out;
  }
  std::vector<double> peaks;
  for (const auto& f : probes) {
    const GridSpec& spec = f.spec();
    VariableSplit sp{spec.split.n, spec.split.m};
    SymbolPoly Nfull = N_sym.dimension() == spec.dimension() ? N_sym : N_sym.embed_good(sp);
    SymbolPoly Mgood = M_sym;
    double num = sobolev_norm(f.apply_symbol(Nfull), s + sigma, t);
    double den = generalized_norm(f, {Mgood}, s, t);
    out.ratios.push_back(den > 0 ? num / den : 0.0);
    // probe's dominant frequency magnitude, for the growth fit
    auto spcoef = f.spectrum();
    size_t arg = 0;
    double best = -1.0;
    for (size_t j = 0; j < spcoef.size(); ++j)
      if (std::abs(spcoef[j]) > best) {
        best = std::abs(spcoef[j]);
        arg = j;
      }
    auto fr = spec.freq_at(arg);
    double mag = 0.0;
    for (double v : fr) mag += v * v;
    peaks.push_back(std::sqrt(mag));
  }
  out.worst_ratio = *std::max_element(out.ratios.begin(), out.ratios.end());
  // growth of the worst ratio along the modulation sweep
  std::vector<double> lx, ly;
  for (size_t i = 0; i < peaks.size(); ++i) {
    if (out.ratios[i] <= 0) continue;
    lx.push_back(std::log(1.0 + peaks[i]));
    ly.push_back(std::log(out.ratios[i]));
  }
  if (lx.size() >= 2) {
    double spread = *std::max_element(lx.begin(), lx.end()) -
                    *std::min_element(lx.begin(), lx.end());
    if (spread > 1e-9) out.growth_slope = fit_line(lx, ly).slope;
  }
  out.holds = out.growth_slope <= 0.1;
  return out;
}

double m1_worst_constant(const SymbolPoly& M, double k, double r,
                         const std::vector<double>& radii) {
  auto design = sphere_design(M.dimension());
  double worst = 1.0;  // the origin: (1+0)^(kr) / (1+|M(0)|^2)^r <= 1
  for (double rad : radii)
    for (const auto& omega : design) {
      std::vector<std::complex<double>> z;
      double xi2 = 0.0;
      for (double w : omega) {
        z.emplace_back(w * rad, 0.0);
        xi2 += w * rad * w * rad;
      }
      double c = std::pow(1.0 + xi2, k * r) / std::pow(1.0 + std::norm(M.evaluate(z)), r);
      worst = std::max(worst, c);
    }
  return worst;
}

}  // namespace hypolab
