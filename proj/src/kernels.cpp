#include "hypolab/kernels.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hypolab/classify.hpp"

namespace hypolab {

namespace {

GridSpec good_block_spec(const GridSpec& full) {
  GridSpec g;
  g.split = {full.split.n, 0};
  g.points = full.points;
  g.half_width.assign(full.half_width.begin(), full.half_width.begin() + full.split.n);
  return g;
}

GridSpec bad_block_spec(const GridSpec& full) {
  GridSpec b;
  b.split = {0, full.split.m};
  b.points = full.points;
  b.half_width.assign(full.half_width.begin() + full.split.n, full.half_width.end());
  return b;
}

std::vector<std::complex<double>> to_cplx(const std::vector<double>& x) {
  return {x.begin(), x.end()};
}

double sphere_surface(int d, double r) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi * r;
    case 3: return 4.0 * std::numbers::pi * r * r;
    default: {
      // S_{d-1} area = 2 pi^{d/2} / Gamma(d/2) * r^{d-1}
      double g = std::tgamma(d / 2.0);
      return 2.0 * std::pow(std::numbers::pi, d / 2.0) / g * std::pow(r, d - 1);
    }
  }
}

/// Midpoint lattice quadrature over [-R,R]^dim with a boundary-decay tail
/// estimate fitted between radii R/2 and R.
TailedValue lattice_integral(const std::function<double(const std::vector<double>&)>& f, int dim,
                             double R, int pts) {
  TailedValue out;
  const double h = 2.0 * R / pts;
  std::vector<double> x(dim);
  std::vector<int> idx(dim, 0);
  double acc = 0.0;
  for (;;) {
    for (int d = 0; d < dim; ++d) x[d] = -R + (idx[d] + 0.5) * h;
    acc += f(x);
    int d = dim - 1;
    while (d >= 0 && ++idx[d] == pts) idx[d--] = 0;
    if (d < 0) break;
  }
  out.value = acc * std::pow(h, dim);

  auto design = sphere_design(dim);
  auto mean_abs = [&](double r) {
    double s = 0.0;
    for (const auto& omega : design) {
      std::vector<double> p(dim);
      for (int d = 0; d < dim; ++d) p[d] = r * omega[d];
      s += std::abs(f(p));
    }
    return s / design.size();
  };
  const double fR = mean_abs(R), fR2 = mean_abs(R / 2.0);
  if (fR <= 0.0) {
    out.tail = 0.0;
    out.decay_exponent = std::numeric_limits<double>::infinity();
    return out;
  }
  const double p = std::log(fR2 / fR) / std::log(2.0);
  out.decay_exponent = p;
  if (p <= dim + 0.05) {
    out.divergent = true;
    out.tail = std::numeric_limits<double>::infinity();
    return out;
  }
  out.tail = fR * sphere_surface(dim, R) * R / (p - dim);
  if (std::abs(out.value) > 0 && out.tail > 0.1 * std::abs(out.value)) out.divergent = true;
  return out;
}

}  // namespace

GridFunction grid_delta(const GridSpec& spec, const std::vector<double>& center) {
  spec.validate();
  if (static_cast<int>(center.size()) != spec.dimension())
    throw std::invalid_argument("grid_delta: center dimension mismatch");
  size_t flat = 0;
  for (int d = 0; d < spec.dimension(); ++d) {
    double t = (center[d] + spec.half_width[d]) / spec.spacing(d);
    int k = std::clamp(static_cast<int>(std::lround(t)), 0, spec.points - 1);
    flat = flat * spec.points + k;
  }
  std::vector<std::complex<double>> v(spec.size(), 0.0);
  v[flat] = 1.0 / spec.cell_volume();
  return GridFunction(spec, std::move(v));
}

GridFunction mollified_delta(const GridSpec& spec, const std::vector<double>& center,
                             double width_cells) {
  spec.validate();
  const int nu = spec.dimension();
  if (static_cast<int>(center.size()) != nu)
    throw std::invalid_argument("mollified_delta: center dimension mismatch");
  std::vector<double> snapped(nu);
  for (int d = 0; d < nu; ++d) {
    double t = (center[d] + spec.half_width[d]) / spec.spacing(d);
    int k = std::clamp(static_cast<int>(std::lround(t)), 0, spec.points - 1);
    snapped[d] = -spec.half_width[d] + k * spec.spacing(d);
  }
  const double radius = width_cells * spec.spacing(0) / 2.0;
  GridFunction raw = GridFunction::sample(spec, [&](const std::vector<double>& x) {
    double q = 0.0;
    for (int d = 0; d < nu; ++d) {
      double u = (x[d] - snapped[d]) / radius;
      q += u * u;
    }
    return std::complex<double>(q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0, 0.0);
  });
  double mass = 0.0;
  for (const auto& z : raw.values()) mass += z.real();
  mass *= spec.cell_volume();
  if (mass <= 0.0) throw std::logic_error("mollified_delta: empty support");
  return raw.scaled(1.0 / mass);
}

GridFunction convolve(const GridFunction& a, const GridFunction& b) {
  if (!(a.spec() == b.spec())) throw std::invalid_argument("convolve: spec mismatch");
  auto sa = a.spectrum();
  auto sb = b.spectrum();
  for (size_t j = 0; j < sa.size(); ++j) sa[j] *= sb[j];
  return GridFunction::from_spectrum(a.spec(), sa);
}

GridFunction TensorKernel::materialize(const GridSpec& full_spec) const {
  full_spec.validate();
  const int n = full_spec.split.n, m = full_spec.split.m;
  if (good_part.spec().dimension() != n)
    throw std::invalid_argument("TensorKernel: good part dimension mismatch");
  if (m == 0) return good_part;
  GridSpec bspec = bad_block_spec(full_spec);
  GridFunction bad = bad_part ? *bad_part : grid_delta(bspec, std::vector<double>(m, 0.0));
  std::vector<std::complex<double>> v(full_spec.size());
  const size_t bad_size = bspec.size();
  for (size_t k = 0; k < v.size(); ++k) {
    size_t kb = k % bad_size;
    size_t kg = k / bad_size;
    v[k] = good_part.at(kg) * bad.at(kb);
  }
  return GridFunction(full_spec, std::move(v));
}

GridFunction TensorKernel::apply(const GridFunction& u) const {
  return convolve(materialize(u.spec()), u);
}

void LambdaSweep::validate(bool resolvent) const {
  if (lambdas.size() < 2) throw std::invalid_argument("LambdaSweep: need >= 2 points");
  const bool increasing = lambdas[1] > lambdas[0];
  for (size_t i = 0; i + 1 < lambdas.size(); ++i) {
    if (increasing ? lambdas[i + 1] <= lambdas[i] : lambdas[i + 1] >= lambdas[i])
      throw std::invalid_argument("LambdaSweep: not strictly monotone");
  }
  for (double l : lambdas) {
    if (l == 0.0 || (l > 0) != (lambdas[0] > 0))
      throw std::invalid_argument("LambdaSweep: mixed signs");
    if (resolvent && l < 0 && std::abs(l) < lambda_min_abs)
      throw std::invalid_argument("LambdaSweep: |lambda| below the resolvent floor");
  }
}

GridFunction fundamental_solution_const(const SymbolPoly& M, double lambda, const GridSpec& spec,
                                        int fold) {
  spec.validate();
  const int nu = spec.dimension();
  if (M.dimension() != nu)
    throw std::invalid_argument("fundamental_solution_const: dimension mismatch");
  std::vector<double> omega(nu);
  for (int d = 0; d < nu; ++d) omega[d] = 2.0 * std::numbers::pi / spec.spacing(d);

  std::vector<std::complex<double>> mult(spec.size());
  std::vector<int> shift(nu, -fold);
  for (size_t j = 0; j < mult.size(); ++j) {
    auto xi = spec.freq_at(j);
    std::complex<double> base = M.evaluate(to_cplx(xi)) - lambda;
    if (std::abs(base) < 1e-12 * (1.0 + std::abs(lambda)))
      throw std::invalid_argument("fundamental_solution_const: lambda inside the symbol range");
    std::complex<double> acc = 1.0 / base;
    if (fold > 0) {
      std::fill(shift.begin(), shift.end(), -fold);
      for (;;) {
        bool zero_shift = true;
        for (int s : shift) zero_shift = zero_shift && s == 0;
        if (!zero_shift) {
          std::vector<std::complex<double>> z(nu);
          for (int d = 0; d < nu; ++d) z[d] = xi[d] + shift[d] * omega[d];
          acc += 1.0 / (M.evaluate(z) - lambda);
        }
        int d = nu - 1;
        while (d >= 0 && ++shift[d] > fold) shift[d--] = -fold;
        if (d < 0) break;
      }
      if (nu == 1) {
        // integral tail beyond the folded shells, midpoint rule after the
        // substitution s = (fold + 1/2)/u; matches the integer sum to O(f'')
        const double F = fold + 0.5;
        const int q = 64;
        double tail = 0.0;
        for (int k = 0; k < q; ++k) {
          double u = (k + 0.5) / q;
          double ss = F / u;
          for (double sgn : {1.0, -1.0}) {
            std::vector<std::complex<double>> z{xi[0] + sgn * ss * omega[0]};
            tail += std::real(1.0 / (M.evaluate(z) - lambda)) * F / (u * u);
          }
        }
        acc += tail / q;
      }
    }
    mult[j] = acc;
  }
  return GridFunction::from_spectrum(spec, mult);
}

TensorKernel parametrix_Kplus(const SymbolPoly& P_frozen, double lambda,
                              const std::vector<double>& x, const GridSpec& full_spec,
                              int fold) {
  full_spec.validate();
  if (static_cast<int>(x.size()) != full_spec.dimension())
    throw std::invalid_argument("parametrix_Kplus: point dimension mismatch");
  GridSpec gspec = good_block_spec(full_spec);
  SymbolPoly Pg = P_frozen.dimension() == gspec.dimension()
                      ? P_frozen
                      : P_frozen.restrict_to_good();
  if (Pg.dimension() != gspec.dimension())
    throw std::invalid_argument("parametrix_Kplus: frozen symbol must act on good variables");
  TensorKernel k{fundamental_solution_const(Pg, lambda, gspec, fold), std::nullopt, x};
  return k;
}

GridFunction spectral_function_const(const SymbolPoly& M, double lambda, const GridSpec& spec) {
  spec.validate();
  if (M.dimension() != spec.dimension())
    throw std::invalid_argument("spectral_function_const: dimension mismatch");
  std::vector<std::complex<double>> mult(spec.size(), 0.0);
  for (size_t j = 0; j < mult.size(); ++j) {
    auto xi = spec.freq_at(j);
    if (M.evaluate_real_part(xi) < lambda) {
      for (int d = 0; d < spec.dimension(); ++d) {
        double ximax = (spec.points / 2) * spec.dxi(d);
        if (std::abs(xi[d]) > 0.75 * ximax)
          throw std::invalid_argument(
              "spectral_function_const: sublevel set reaches the frequency-box margin");
      }
      mult[j] = 1.0;
    }
  }
  return GridFunction::from_spectrum(spec, mult);
}

TensorKernel spectral_tensor(GridFunction e_good, std::optional<GridFunction> e_bad,
                             std::vector<double> singularity) {
  if (e_bad && e_good.spec().points != e_bad->spec().points)
    throw std::invalid_argument("spectral_tensor: incompatible specs");
  return TensorKernel{std::move(e_good), std::move(e_bad), std::move(singularity)};
}

TailedValue T_integral(const SymbolPoly& M, const MultiIndex& alpha, double t, double lambda,
                       int m_bad, double box_radius, int points_per_axis) {
  const int n = M.dimension();
  if (alpha.size() != n + m_bad) throw std::invalid_argument("T_integral: alpha dimension");
  auto pts_for = [&](int dim) {
    if (dim <= 1) return points_per_axis;
    if (dim == 2) return std::min(points_per_axis, 1024);
    return std::min(points_per_axis, 160);
  };
  auto good = lattice_integral(
      [&](const std::vector<double>& xi) {
        double num = 1.0;
        for (int d = 0; d < n; ++d) num *= std::pow(xi[d], 2 * alpha[d]);
        double den = M.evaluate_real_part(xi) - lambda;
        return num / den;
      },
      n, box_radius, pts_for(n));
  TailedValue out = good;
  if (m_bad > 0) {
    auto bad = lattice_integral(
        [&](const std::vector<double>& eta) {
          double num = 1.0, q = 0.0;
          for (int d = 0; d < m_bad; ++d) {
            num *= std::pow(eta[d], 2 * alpha[n + d]);
            q += eta[d] * eta[d];
          }
          return num / std::pow(1.0 + q, t);
        },
        m_bad, box_radius, pts_for(m_bad));
    out.value = good.value * bad.value;
    out.tail = std::abs(good.tail * bad.value) + std::abs(good.value * bad.tail);
    out.divergent = good.divergent || bad.divergent;
    out.decay_exponent = std::min(good.decay_exponent, bad.decay_exponent);
  }
  return out;
}

TailedValue green_kernel_frozen(const SymbolPoly& P_frozen, const MultiIndex& alpha_good,
                                double lambda, double box_radius, int points_per_axis) {
  const int n = P_frozen.dimension();
  if (alpha_good.size() != n)
    throw std::invalid_argument("green_kernel_frozen: alpha dimension mismatch");
  int pts = n <= 1 ? points_per_axis : (n == 2 ? std::min(points_per_axis, 1024)
                                               : std::min(points_per_axis, 160));
  return lattice_integral(
      [&](const std::vector<double>& xi) {
        double num = 1.0;
        for (int d = 0; d < n; ++d) num *= std::pow(xi[d], 2 * alpha_good[d]);
        double den = P_frozen.evaluate_real_part(xi) - lambda;
        if (den <= 0.0)
          throw std::invalid_argument("green_kernel_frozen: Re P - lambda not positive");
        return num / den;
      },
      n, box_radius, pts);
}

}  // namespace hypolab
