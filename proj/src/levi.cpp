#include "hypolab/levi.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

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

std::vector<int> unflatten(const GridSpec& spec, size_t flat) {
  std::vector<int> idx(spec.dimension());
  for (int d = spec.dimension() - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % spec.points);
    flat /= spec.points;
  }
  return idx;
}

/// Node index of the wrapped coordinate difference x_i - x_j.
size_t wrapped_difference(const GridSpec& spec, size_t i, size_t j) {
  const int N = spec.points;
  auto a = unflatten(spec, i), b = unflatten(spec, j);
  size_t flat = 0;
  for (int d = 0; d < spec.dimension(); ++d) {
    int w = ((a[d] - b[d] + N / 2) % N + N) % N;
    flat = flat * N + w;
  }
  return flat;
}

/// Periodic distance in the good coordinates between nodes i and j.
double good_distance(const GridSpec& spec, size_t i, size_t j) {
  auto a = spec.point_at(i), b = spec.point_at(j);
  double q = 0.0;
  for (int d = 0; d < spec.split.n; ++d) {
    double diff = std::abs(a[d] - b[d]);
    diff = std::min(diff, 2.0 * spec.half_width[d] - diff);
    q += diff * diff;
  }
  return std::sqrt(q);
}

size_t nearest_node(const GridSpec& spec, const std::vector<double>& x) {
  size_t flat = 0;
  for (int d = 0; d < spec.dimension(); ++d) {
    double t = (x[d] + spec.half_width[d]) / spec.spacing(d);
    int k = std::clamp(static_cast<int>(std::lround(t)), 0, spec.points - 1);
    flat = flat * spec.points + k;
  }
  return flat;
}

/// Good-only frozen head P0^y: the beta = 0 bad coefficient of the frozen
/// symbol, restricted to the good block.
SymbolPoly frozen_head(const OperatorDescription& L, const std::vector<double>& y) {
  SymbolPoly frozen = L.symbol_at(y);
  if (L.split.m == 0) return frozen.restrict_to_good();
  auto parts = frozen.bad_coefficients();
  auto it = parts.find(MultiIndex::zero(L.split.m));
  if (it == parts.end() || it->second.is_zero())
    throw std::invalid_argument("levi: frozen head P0 vanishes at the freezing point");
  return it->second.restrict_to_good();
}

bool term_is_good_only(const OperatorDescription& L, const SymbolPoly& S) {
  for (const auto& [a, c] : S.terms())
    for (int d = L.split.n; d < L.split.n + L.split.m; ++d)
      if (a[d] != 0) return false;
  return true;
}

}  // namespace

TwoPointKernel TwoPointKernel::zero(const GridSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.size());
  return {spec, Eigen::MatrixXcd::Zero(n, n)};
}

TwoPointKernel TwoPointKernel::delta(const GridSpec& spec) {
  TwoPointKernel k = zero(spec);
  const double v = 1.0 / spec.cell_volume();
  for (Eigen::Index i = 0; i < k.values.rows(); ++i) k.values(i, i) = v;
  return k;
}

TwoPointKernel TwoPointKernel::from_difference(const GridFunction& k) {
  const GridSpec& spec = k.spec();
  TwoPointKernel out = zero(spec);
  const auto n = static_cast<size_t>(spec.size());
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          k.at(wrapped_difference(spec, i, j));
  return out;
}

GridFunction TwoPointKernel::apply(const GridFunction& u) const {
  if (!(u.spec() == spec)) throw std::invalid_argument("TwoPointKernel: spec mismatch");
  Eigen::Map<const Eigen::VectorXcd> v(u.values().data(),
                                       static_cast<Eigen::Index>(u.values().size()));
  Eigen::VectorXcd out = values * v * spec.cell_volume();
  return GridFunction(spec, std::vector<std::complex<double>>(out.data(), out.data() + out.size()));
}

GridFunction TwoPointKernel::row(size_t i) const {
  std::vector<std::complex<double>> v(spec.size());
  for (size_t j = 0; j < v.size(); ++j)
    v[j] = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return GridFunction(spec, std::move(v));
}

double TwoPointKernel::max_abs() const {
  return values.cwiseAbs().maxCoeff();
}

TwoPointKernel TwoPointKernel::operator+(const TwoPointKernel& o) const {
  if (!(spec == o.spec)) throw std::invalid_argument("TwoPointKernel: spec mismatch");
  return {spec, values + o.values};
}

TwoPointKernel TwoPointKernel::operator-(const TwoPointKernel& o) const {
  if (!(spec == o.spec)) throw std::invalid_argument("TwoPointKernel: spec mismatch");
  return {spec, values - o.values};
}

TwoPointKernel bracket(const TwoPointKernel& f, const TwoPointKernel& g) {
  if (!(f.spec == g.spec)) throw std::invalid_argument("bracket: spec mismatch");
  return {f.spec, (f.values * g.values * f.spec.cell_volume()).eval()};
}

double kernel_norm_estimate(const TwoPointKernel& k) {
  auto probes = probe_family(k.spec);
  MultiIndex zero = MultiIndex::zero(k.spec.dimension());
  auto est = N_alpha_beta([&k](const GridFunction& u) { return k.apply(u); }, zero, zero, probes);
  return est.value;
}

TwoPointKernel kplus_two_point(const OperatorDescription& L, double lambda, const GridSpec& spec,
                               int fold, double moll_width_cells) {
  spec.validate();
  const int m = spec.split.m;
  GridSpec gspec = good_block_spec(spec);
  std::optional<GridFunction> phi;
  GridSpec bspec = gspec;  // placeholder
  if (m > 0) {
    bspec = bad_block_spec(spec);
    phi = mollified_delta(bspec, std::vector<double>(m, 0.0), moll_width_cells);
  }
  TwoPointKernel out = TwoPointKernel::zero(spec);
  const size_t n_nodes = spec.size();
  const size_t bad_size = m > 0 ? bspec.size() : 1;
  // cache per distinct frozen head (rows with equal coefficients share kernels)
  std::vector<std::complex<double>> row_kernel;
  std::string last_key;
  for (size_t i = 0; i < n_nodes; ++i) {
    auto y = spec.point_at(i);
    SymbolPoly head = frozen_head(L, y);
    std::string key = head.serialize();
    if (key != last_key) {
      GridFunction t = fundamental_solution_const(head, lambda, gspec, fold);
      row_kernel.assign(t.values().begin(), t.values().end());
      last_key = key;
    }
    for (size_t j = 0; j < n_nodes; ++j) {
      size_t diff = wrapped_difference(spec, i, j);
      size_t dg = diff / bad_size;
      std::complex<double> v = row_kernel[dg];
      if (m > 0) v *= phi->at(diff % bad_size);
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return out;
}

TwoPointKernel remainder_alpha(const OperatorDescription& L, double lambda,
                               const TwoPointKernel& Kplus) {
  (void)lambda;  // the lambda-dependence lives inside Kplus
  const GridSpec& spec = Kplus.spec;
  const size_t n_nodes = spec.size();
  TwoPointKernel out = TwoPointKernel::zero(spec);
  // per-term coefficient samples over the grid
  std::vector<std::vector<double>> coeff(L.terms.size(), std::vector<double>(n_nodes));
  std::vector<bool> good_only(L.terms.size());
  for (size_t t = 0; t < L.terms.size(); ++t) {
    for (size_t k = 0; k < n_nodes; ++k) coeff[t][k] = L.terms[t].coeff(spec.point_at(k));
    good_only[t] = term_is_good_only(L, L.terms[t].symbol);
  }
  for (size_t i = 0; i < n_nodes; ++i) {
    GridFunction row = Kplus.row(i);
    for (size_t t = 0; t < L.terms.size(); ++t) {
      GridFunction der = row.apply_symbol(L.terms[t].symbol);
      const double cy = good_only[t] ? coeff[t][i] : 0.0;
      for (size_t j = 0; j < n_nodes; ++j)
        out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            (cy - coeff[t][j]) * der.at(j);
    }
  }
  return out;
}

GridFunction apply_operator_variable(const OperatorDescription& L, double lambda,
                                     const GridFunction& u) {
  GridFunction out = u.scaled(-lambda);
  for (const auto& term : L.terms) {
    GridFunction der = u.apply_symbol(term.symbol);
    std::vector<std::complex<double>> v(der.values());
    for (size_t k = 0; k < v.size(); ++k) v[k] *= term.coeff(u.spec().point_at(k));
    out = out + GridFunction(u.spec(), std::move(v));
  }
  return out;
}

NeumannSeries neumann_u(const TwoPointKernel& alpha, double tol, int N_max) {
  NeumannSeries s;
  s.partial_sum = alpha;
  double norm0 = kernel_norm_estimate(alpha);
  s.norm_history.push_back(norm0);
  if (norm0 == 0.0) {
    s.converged = true;
    s.terms_kept = 0;
    return s;
  }
  if (norm0 >= 1.0) {
    s.converged = false;
    return s;
  }
  TwoPointKernel u = alpha;
  TwoPointKernel term = alpha;
  int rising = 0;
  for (int k = 1; k <= N_max; ++k) {
    TwoPointKernel u_next = bracket(u, alpha) + alpha;  // u_N = alpha + [u_{N-1}, alpha]
    TwoPointKernel new_term = u_next - u;
    if (k <= 3) {
      // partial-sum recursion: u_N - u_{N-1} = [term_{N-1}, alpha],
      // measured relative to the scale of alpha
      TwoPointKernel check = bracket(term, alpha) - new_term;
      double rel = check.max_abs() / std::max(1e-300, alpha.max_abs());
      s.recursion_residual = std::max(s.recursion_residual, rel);
    }
    term = new_term;
    u = u_next;
    double tn = kernel_norm_estimate(term);
    rising = tn >= s.norm_history.back() ? rising + 1 : 0;
    s.norm_history.push_back(tn);
    s.terms_kept = k;
    if (tn < tol) {
      s.converged = true;
      break;
    }
    if (rising >= 3) {
      s.converged = false;
      break;
    }
  }
  s.partial_sum = u;
  if (s.converged) {
    TwoPointKernel resid = u - alpha - bracket(u, alpha);
    s.fixed_point_residual = kernel_norm_estimate(resid);
    if (s.fixed_point_residual > 10.0 * tol) s.converged = false;
  }
  return s;
}

VariableSolution fundamental_solution_variable(const OperatorDescription& L, double lambda,
                                               const std::vector<double>& x,
                                               const GridSpec& spec, int fold,
                                               double moll_width_cells, double tol, int N_max) {
  VariableSolution sol;
  sol.kplus = kplus_two_point(L, lambda, spec, fold, moll_width_cells);
  TwoPointKernel alpha = remainder_alpha(L, lambda, sol.kplus);
  sol.series = neumann_u(alpha, tol, N_max);
  if (!sol.series.converged && sol.series.norm_history.front() > 0.0)
    throw std::runtime_error("fundamental_solution_variable: Neumann series did not converge");
  sol.g = sol.series.norm_history.front() == 0.0
              ? sol.kplus
              : sol.kplus + bracket(sol.series.partial_sum, sol.kplus);

  // residual on the row at x: (L - lambda) g(x, .) vs delta_x' (x) phi_x''
  size_t ix = nearest_node(spec, x);
  GridFunction gx = sol.g.row(ix);
  GridFunction resid = apply_operator_variable(L, lambda, gx);
  GridSpec gspec = good_block_spec(spec);
  std::vector<double> node = spec.point_at(ix);
  GridFunction target = [&]() {
    if (spec.split.m == 0) return grid_delta(spec, node);
    GridSpec bspec = bad_block_spec(spec);
    GridFunction dg = grid_delta(gspec, {node.begin(), node.begin() + spec.split.n});
    GridFunction phi = mollified_delta(bspec, {node.begin() + spec.split.n, node.end()},
                                       moll_width_cells);
    std::vector<std::complex<double>> v(spec.size());
    size_t bs = bspec.size();
    for (size_t k = 0; k < v.size(); ++k) v[k] = dg.at(k / bs) * phi.at(k % bs);
    return GridFunction(spec, std::move(v));
  }();
  GridFunction diff = resid - target;
  sol.residual_sup = diff.max_abs();
  sol.residual_l2 = diff.l2_physical() / target.l2_physical();
  return sol;
}

VariableSolution variable_good_kernel(const OperatorDescription& L, double lambda,
                                      const std::vector<double>& x, const GridSpec& good_spec,
                                      int fold, double tol, int N_max) {
  if (good_spec.split.m != 0)
    throw std::invalid_argument("variable_good_kernel: expected a pure good-block spec");
  for (const auto& t : L.terms)
    if (!term_is_good_only(L, t.symbol))
      throw std::invalid_argument("variable_good_kernel: operator has bad-variable derivatives");
  return fundamental_solution_variable(L, lambda, x, good_spec, fold, 4.0, tol, N_max);
}

RemainderEstimate estimate_decay(const OperatorDescription& L, const std::vector<double>& x,
                                 const LambdaSweep& sweep, double b, const GridSpec& spec,
                                 double kappa, double annulus_lo, double annulus_hi, int fold,
                                 double moll_width_cells) {
  sweep.validate();
  if (sweep.lambdas.size() < 4)
    throw std::invalid_argument("estimate_decay: need >= 4 lambda points");
  RemainderEstimate est;
  est.lambdas = sweep.lambdas;
  size_t ix = nearest_node(spec, x);
  bool all_zero = true;
  for (double lambda : sweep.lambdas) {
    TwoPointKernel kplus = kplus_two_point(L, lambda, spec, fold, moll_width_cells);
    TwoPointKernel alpha = remainder_alpha(L, lambda, kplus);
    const double w = kappa * std::pow(std::abs(lambda), b);
    TwoPointKernel weighted = alpha;
    // The weight is capped at the annulus radius: beyond it the band-limited
    // grid kernel's truncation ripple, not the true decay, sets the floor.
    for (Eigen::Index i = 0; i < weighted.values.rows(); ++i)
      for (Eigen::Index j = 0; j < weighted.values.cols(); ++j) {
        double d = good_distance(spec, static_cast<size_t>(i), static_cast<size_t>(j));
        weighted.values(i, j) *= std::exp(w * std::min(d, annulus_hi));
      }
    double nw = kernel_norm_estimate(weighted);
    est.weighted_norms.push_back(nw);
    if (nw > 0) all_zero = false;

    NeumannSeries series = neumann_u(alpha, 1e-6, 30);
    TwoPointKernel g = series.norm_history.front() == 0.0
                           ? kplus
                           : kplus + bracket(series.partial_sum, kplus);
    double sup = 0.0;
    for (size_t j = 0; j < spec.size(); ++j) {
      double d = good_distance(spec, ix, j);
      if (d >= annulus_lo && d <= annulus_hi)
        sup = std::max(sup, std::abs(g.values(static_cast<Eigen::Index>(ix),
                                              static_cast<Eigen::Index>(j))));
    }
    est.offdiag_sup.push_back(sup);
    std::complex<double> gd = g.values(static_cast<Eigen::Index>(ix),
                                       static_cast<Eigen::Index>(ix));
    std::complex<double> kd = kplus.values(static_cast<Eigen::Index>(ix),
                                           static_cast<Eigen::Index>(ix));
    est.diag_ratio.push_back(std::abs(kd) > 0 ? std::abs(gd / kd) : 0.0);
  }
  est.alpha_exact_zero = all_zero;
  if (all_zero) {
    est.pass = true;
    return est;
  }
  std::vector<double> absl;
  for (double l : sweep.lambdas) absl.push_back(std::abs(l));
  LineFit cf = fit_power_law(absl, est.weighted_norms);
  est.c_hat = -cf.slope;
  est.c_residual = cf.residual_rms;
  StretchedExpFit sf = fit_stretched_exp(absl, est.offdiag_sup);
  est.kappa_hat = sf.kappa;
  est.b_hat = sf.b;
  bool ratio_ok = std::abs(est.diag_ratio.back() - 1.0) <= std::abs(est.diag_ratio.front() - 1.0) + 1e-12;
  est.pass = est.c_hat > 0.0 && est.kappa_hat > 0.0 && ratio_ok;
  return est;
}

}  // namespace hypolab
