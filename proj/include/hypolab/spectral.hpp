#ifndef HYPOLAB_SPECTRAL_HPP
#define HYPOLAB_SPECTRAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hypolab/fit.hpp"
#include "hypolab/levi.hpp"

namespace hypolab {

/// Diagonal of a spectral-kernel moment: lambda-indexed values of
/// e^{(alpha,alpha)}(x,x). Sublevel-set quadrature carries the plain
/// frequency integral (no 2*pi factors), matching green_kernel_frozen.
struct SpectralDiagonal {
  std::vector<double> lambdas;  // ascending, positive
  std::vector<double> values;   // non-negative, non-decreasing
  MultiIndex alpha;
  int dim = 1;                  // frequency-space dimension n
  std::string provenance;       // "sublevel" or "variable"

  void validate() const;  // throws on ordering/sign/monotonicity violations
};

/// Weyl-type growth law C * lambda^a * (log lambda)^t.
struct AsymptoticFit {
  double C = 0.0;
  double a = 0.0;
  int t = 0;
  double residual = 0.0;
};

struct TauberianReport {
  std::vector<double> lambdas;
  std::vector<double> ratio;
  double correction_scale = 0.0;  // fitted bound on |ratio-1|*log(lambda)
  double residual = 0.0;          // RMS about the fitted constant, top decade
  bool pass = false;
};

/// Moments int_{Re P < lambda} xi^{2 alpha} dxi by sorted-lattice prefix
/// sums; the frequency box is auto-sized so the top sublevel set keeps a
/// 25% margin. One diagonal per requested alpha.
std::vector<SpectralDiagonal> sublevel_moments(const SymbolPoly& P,
                                               const std::vector<double>& lambdas,
                                               const std::vector<MultiIndex>& alphas,
                                               int points_per_axis = 0);

/// Monte-Carlo oracle for a single sublevel moment (uniform samples in the
/// same auto-sized box).
double sublevel_moment_mc(const SymbolPoly& P, double lambda, const MultiIndex& alpha,
                          size_t samples, uint64_t seed);

/// Fit C lambda^a (log lambda)^t, scanning t in {0,...,dim-1}.
AsymptoticFit fit_asymptotics(const SpectralDiagonal& diag);

/// Stieltjes sum over diagonal increments plus a fitted-tail correction;
/// requires lambda below the first grid point and tail exponent a < 1.
double stieltjes_green(const SpectralDiagonal& diag, double lambda);

struct GreenDifferenceReport {
  bool sigma_monotone = false;  // sigma(t) = variable - frozen non-decreasing
  double c_hat = 0.0;           // relative difference ~ |lambda|^{-c}
  double residual = 0.0;
};

GreenDifferenceReport green_difference_check(const SpectralDiagonal& frozen,
                                             const SpectralDiagonal& variable);

TauberianReport tauberian_compare(const SpectralDiagonal& frozen,
                                  const SpectralDiagonal& variable);

struct AprioriReport {
  double exponent = 0.0;
  bool pass = false;
};

/// Growth exponent of the diagonal vs the bound (1+lambda)^{1/r}.
AprioriReport apriori_bound_check(const SpectralDiagonal& diag, int r);

/// Max over slice probes of ||(M(D)-lambda_mid)u|| / ||u|| for probes cut by
/// the exact indicator of {lambda1 < M <= lambda2}; throws if the slice is
/// empty on the grid.
double approx_eigenvector_bound(const SymbolPoly& M, double lambda1, double lambda2,
                                const GridSpec& spec);

/// Diagonal of the discrete spectral projection of the variable operator at
/// the node nearest x, from a dense self-adjoint eigendecomposition.
SpectralDiagonal variable_diagonal(const OperatorDescription& L,
                                   const std::vector<double>& lambdas,
                                   const GridSpec& spec, const std::vector<double>& x);

struct BojReport {
  double C = 0.0;
  double k = 0.0;
  bool holds = false;  // inequality at every grid frequency, tau in {1,10,100}
};

/// |Q(xi)| <= C tau^{-k} (1+|xi|)^{-k} (tau + |M(xi)|) with (C,k) fitted at
/// the smallest tau.
BojReport boj_check(const SymbolPoly& Q, const SymbolPoly& M, const GridSpec& spec);

struct LocalizedDecayReport {
  std::vector<double> lambdas;
  std::vector<double> lhs;     // inner-region norm of the mollified probe
  std::vector<double> term1;   // e^{-kappa lambda^b} ||u||_outer
  std::vector<double> term2;   // |lambda|^{-c} ||(M-lambda)u||
  double C1 = 0.0, C2 = 0.0;   // non-negative regression coefficients
  bool pass = false;
};

/// Representation-estimate check: inner norm of the bad-mollified slice
/// probe bounded by C1 e^{-kappa lambda^b}||u||_outer + C2 |lambda|^{-c}
/// ||(M-lambda)u|| across the sweep.
LocalizedDecayReport localized_decay_check(const SymbolPoly& M,
                                           const std::vector<double>& lambdas,
                                           const GridSpec& spec, double inner_radius,
                                           double kappa, double b, double c);

}  // namespace hypolab

#endif
