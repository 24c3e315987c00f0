#ifndef HYPOLAB_NORMS_HPP
#define HYPOLAB_NORMS_HPP

#include <functional>
#include <string>
#include <vector>

#include "hypolab/grid.hpp"
#include "hypolab/symbol.hpp"

namespace hypolab {

struct NormReport {
  std::string name;
  double value = 0.0;
  double s = 0.0, t = 0.0, N = 0.0;
  std::vector<int> alpha;
};

/// Anisotropic Sobolev norm: spectral quadrature of
/// |uhat|^2 (1+|xi|^2)^s (1+|eta|^2)^t over the frequency grid, with the
/// (2*pi)^-nu Parseval factor, square-rooted.  Requires a declared split.
double sobolev_norm(const GridFunction& u, double s, double t);

/// Weighted norm with p_s(xi) = (1+|xi|^2)^(s/2) (1+|M(xi)|^2): quadrature
/// weight p_s(xi)^2 (1+|eta|^2)^t.  M acts on the good block.
double weighted_norm_ps(const GridFunction& u, const SymbolPoly& M, double s, double t);

/// sqrt(||u||_{s,t}^2 + sum_j ||P_j u||_{s,t}^2) with the P_j applied as
/// Fourier multipliers over the full frequency grid.
double generalized_norm(const GridFunction& u, const std::vector<SymbolPoly>& ops, double s,
                        double t);

/// M_alpha(u) = sum |xi|^alpha |uhat(xi)| dxi with |xi|^alpha =
/// sum_{beta <= alpha} |xi^beta| (no 2*pi factor).
double M_alpha(const GridFunction& u, const MultiIndex& alpha);

using GridOperator = std::function<GridFunction(const GridFunction&)>;

struct OperatorNormEstimate {
  double value = 0.0;
  bool all_annihilated = false;  // every probe mapped to (numerically) zero
  int best_probe = -1;
};

/// Probe-based lower estimate of N^{alpha,beta}(K): max over probes of
/// M_beta(K u) / M_alpha(u).  Never an upper bound.
OperatorNormEstimate N_alpha_beta(const GridOperator& K, const MultiIndex& alpha,
                                  const MultiIndex& beta,
                                  const std::vector<GridFunction>& probes);

enum class Block { GOOD, BAD };

/// Fourier multiplier (1 + |xi_block|^2)^(-N/2) on the selected block.
GridFunction bessel_smooth(const GridFunction& u, double N, Block block);

/// Deterministic probe family: Gaussians at 3 widths x 5 modulation
/// frequencies x 2 shifts, modulated along the first axis.
std::vector<GridFunction> probe_family(const GridSpec& spec);

/// True if |u| fails to fall below `tol` inside the inner `fraction` of the
/// box (periodization / wraparound hazard).
bool wraparound_warning(const GridFunction& u, double tol = 1e-8, double fraction = 0.7);

struct StrictWeakCheck {
  bool holds = false;
  double worst_ratio = 0.0;
  double growth_slope = 0.0;  // log-ratio growth across the modulation sweep
  std::vector<double> ratios;
};

/// Probe test of the inequality ||N f||_{s+sigma,t} <= C ||f||_{H(M)}:
/// holds iff the per-probe ratio does not grow along the modulation sweep.
StrictWeakCheck check_strict_weak_inequality(const SymbolPoly& N_sym, const SymbolPoly& M_sym,
                                             double sigma,
                                             const std::vector<GridFunction>& probes, double s,
                                             double t);

/// Worst constant C = max over sampled xi of (1+|xi|^2)^(k r) / (1+|M|^2)^r
/// on spheres of the given radii (sphere design in M's dimension).
double m1_worst_constant(const SymbolPoly& M, double k, double r,
                         const std::vector<double>& radii);

}  // namespace hypolab

#endif
