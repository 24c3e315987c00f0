#ifndef HYPOLAB_LEVI_HPP
#define HYPOLAB_LEVI_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hypolab/fit.hpp"
#include "hypolab/kernels.hpp"
#include "hypolab/mizohata.hpp"
#include "hypolab/norms.hpp"

namespace hypolab {

/// Dense two-point kernel k(x,z) over the periodic grid; application is
/// quadrature contraction over z with the cell volume.
struct TwoPointKernel {
  GridSpec spec;
  Eigen::MatrixXcd values;  // rows: x nodes, cols: z nodes

  static TwoPointKernel zero(const GridSpec& spec);
  /// Grid-delta diagonal: the identity element of the bracket.
  static TwoPointKernel delta(const GridSpec& spec);
  /// Translation-invariant kernel k(x-z) with periodic wrapping.
  static TwoPointKernel from_difference(const GridFunction& k);

  GridFunction apply(const GridFunction& u) const;
  GridFunction row(size_t i) const;  // z -> k(x_i, z)
  double max_abs() const;
  TwoPointKernel operator+(const TwoPointKernel& o) const;
  TwoPointKernel operator-(const TwoPointKernel& o) const;
};

/// [f,g](x,z) = int f(x,y) g(y,z) dy.
TwoPointKernel bracket(const TwoPointKernel& f, const TwoPointKernel& g);

/// Probe-based N^{0,0} lower estimate of the operator norm.
double kernel_norm_estimate(const TwoPointKernel& k);

/// Row-frozen parametrix: row y holds the fundamental solution of the
/// symbol frozen at y (good block), tensored with a mollified bad Dirac.
TwoPointKernel kplus_two_point(const OperatorDescription& L, double lambda,
                               const GridSpec& spec, int fold = 0,
                               double moll_width_cells = 4.0);

/// alpha_lambda(y,z) = [P^y(D_z) - L(z,D_z)] K+(y,z), computed term-wise as
/// sum_j (c_j(y) - c_j(z)) (S_j(D_z) K+(y,.))(z).
TwoPointKernel remainder_alpha(const OperatorDescription& L, double lambda,
                               const TwoPointKernel& Kplus);

/// (L(z,D) - lambda) u by spectral differentiation + pointwise coefficients.
GridFunction apply_operator_variable(const OperatorDescription& L, double lambda,
                                     const GridFunction& u);

struct NeumannSeries {
  int terms_kept = 0;
  TwoPointKernel partial_sum;
  std::vector<double> norm_history;
  bool converged = false;
  double fixed_point_residual = 0.0;
  double recursion_residual = 0.0;  // max over iterations of the exact identity check
};

/// u = alpha + [alpha,alpha] + ... until the term norm < tol or N_max.
NeumannSeries neumann_u(const TwoPointKernel& alpha, double tol = 1e-6, int N_max = 30);

struct VariableSolution {
  TwoPointKernel g;
  TwoPointKernel kplus;
  NeumannSeries series;
  double residual_sup = 0.0;
  double residual_l2 = 0.0;  // relative, against the mollified delta
};

/// g_lambda = K+ + [u, K+] with the residual (L - lambda) g - delta_x
/// measured on the row at x.
VariableSolution fundamental_solution_variable(const OperatorDescription& L, double lambda,
                                               const std::vector<double>& x,
                                               const GridSpec& spec, int fold = 0,
                                               double moll_width_cells = 4.0,
                                               double tol = 1e-6, int N_max = 30);

/// Good-block-only Neumann construction (no bad-variable derivatives in L),
/// tensored with an exact Dirac on the bad slice.
VariableSolution variable_good_kernel(const OperatorDescription& L, double lambda,
                                      const std::vector<double>& x, const GridSpec& good_spec,
                                      int fold = 0, double tol = 1e-6, int N_max = 30);

struct RemainderEstimate {
  std::vector<double> lambdas;
  std::vector<double> weighted_norms;    // per-lambda weighted alpha norm
  std::vector<double> offdiag_sup;       // per-lambda sup |g| on the annulus
  std::vector<double> diag_ratio;        // g-diagonal / frozen Green diagonal
  double c_hat = 0.0;                    // power-law fit of the weighted norms
  double c_residual = 0.0;
  double kappa_hat = 0.0, b_hat = 0.0;   // stretched-exponential fit off-diagonal
  bool alpha_exact_zero = false;
  bool pass = false;
};

/// Sweep lambda, weight alpha by exp(kappa |lambda|^b |y'-z'|), fit decay.
RemainderEstimate estimate_decay(const OperatorDescription& L, const std::vector<double>& x,
                                 const LambdaSweep& sweep, double b, const GridSpec& spec,
                                 double kappa = 0.1, double annulus_lo = 1.0,
                                 double annulus_hi = 3.0, int fold = 0,
                                 double moll_width_cells = 4.0);

}  // namespace hypolab

#endif
