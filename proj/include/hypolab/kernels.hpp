#ifndef HYPOLAB_KERNELS_HPP
#define HYPOLAB_KERNELS_HPP

#include <optional>
#include <vector>

#include "hypolab/grid.hpp"
#include "hypolab/symbol.hpp"

namespace hypolab {

/// Translation-invariant tensor kernel in the difference variable:
/// k(x,z) = good_part(x'-z') (x) [delta | bad_part](x''-z'').
struct TensorKernel {
  GridFunction good_part;                 // over the good-block spec
  std::optional<GridFunction> bad_part;   // nullopt = DIRAC at the marked slice
  std::vector<double> singularity;        // the point x (full dimension)

  bool dirac_bad() const { return !bad_part.has_value(); }
  /// Apply as an integral operator to a full-grid function (convolution;
  /// DIRAC bad part contracts only the good block per bad slice).
  GridFunction apply(const GridFunction& u) const;
  /// Materialize the full-grid difference kernel (DIRAC becomes the grid
  /// delta 1/cell-volume on the bad block).
  GridFunction materialize(const GridSpec& full_spec) const;
};

struct LambdaSweep {
  std::vector<double> lambdas;
  double lambda_min_abs = 4.0;
  /// Strictly monotone, one sign, |lambda| >= floor for resolvent use.
  void validate(bool resolvent = true) const;
};

/// Grid delta: 1 / cell volume at the node nearest `center`.
GridFunction grid_delta(const GridSpec& spec, const std::vector<double>& center);

/// Normalized compactly-supported bump of the given width (in cells) at the
/// node-aligned center; discrete integral = 1.
GridFunction mollified_delta(const GridSpec& spec, const std::vector<double>& center,
                             double width_cells = 4.0);

/// Circular convolution with physical cell-volume normalization, computed
/// spectrally: F^-1[ahat * bhat].
GridFunction convolve(const GridFunction& a, const GridFunction& b);

/// Resolvent kernel t_lambda = F^-1[1/(M(xi)-lambda)].  With fold > 0 the
/// multiplier is alias-folded: sum over shifts xi + k*Omega, |k_d| <= fold,
/// Omega_d = 2*pi/h_d, which converts the multiplier into exact samples of
/// the periodized continuum kernel.
GridFunction fundamental_solution_const(const SymbolPoly& M, double lambda,
                                        const GridSpec& spec, int fold = 0);

/// K+_lambda: fundamental solution of the frozen good-variable symbol
/// tensored with a Dirac at the bad coordinates of x.
TensorKernel parametrix_Kplus(const SymbolPoly& P_frozen, double lambda,
                              const std::vector<double>& x, const GridSpec& full_spec,
                              int fold = 0);

/// Spectral function e_lambda: inverse transform of the indicator of
/// {Re M(xi) < lambda}.  Errors if the sublevel set reaches within 25% of
/// the frequency-box edge.
GridFunction spectral_function_const(const SymbolPoly& M, double lambda, const GridSpec& spec);

TensorKernel spectral_tensor(GridFunction e_good, std::optional<GridFunction> e_bad,
                             std::vector<double> singularity);

struct TailedValue {
  double value = 0.0;
  double tail = 0.0;     // estimated truncated mass
  bool divergent = false;
  double decay_exponent = 0.0;  // fitted boundary decay rate
};

/// T^{2alpha}_t(lambda) = int xi^{2alpha'} eta^{2alpha''} dxi deta /
/// ((M(xi)-lambda)(1+|eta|^2)^t), tensorized lattice quadrature with a tail
/// estimate.  alpha has dimension n+m with n = M.dimension().
TailedValue T_integral(const SymbolPoly& M, const MultiIndex& alpha, double t, double lambda,
                       int m_bad, double box_radius = 128.0, int points_per_axis = 4096);

/// int xi'^{2alpha'} dxi' / (Re P(xi') - lambda) over the good block.
TailedValue green_kernel_frozen(const SymbolPoly& P_frozen, const MultiIndex& alpha_good,
                                double lambda, double box_radius = 128.0,
                                int points_per_axis = 4096);

}  // namespace hypolab

#endif
