#ifndef HYPOLAB_CLASSIFY_HPP
#define HYPOLAB_CLASSIFY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypolab/fit.hpp"
#include "hypolab/symbol.hpp"

namespace hypolab {

enum class StrengthOrder { EQUIVALENT, STRICTLY_WEAKER, WEAKER, NOT_WEAKER, INCONCLUSIVE };
std::string to_string(StrengthOrder o);

enum class Verdict { YES, NO, INCONCLUSIVE };
std::string to_string(Verdict v);

/// Geometric radius schedule plus the sphere-design and fit tolerances.
struct SamplingSchedule {
  double radius_min = 16.0;        // 2^4
  double radius_max = 1048576.0;   // 2^20
  double radius_factor = 2.0;
  double slope_tol = 0.05;
  double vanish_tol = 1e-3;        // ratio considered vanished at the top radius
  int refine_steps = 80;           // projected-gradient steps per design point
  std::vector<double> radii() const;
};

/// Deterministic quasi-uniform points on the unit sphere in dimension nu:
/// 2*nu^2 spiral/golden-angle points plus all signed axes and diagonals.
std::vector<std::vector<double>> sphere_design(int nu);

struct RatioSample {
  double radius = 0.0;
  double value = 0.0;
};

struct StrengthReport {
  StrengthOrder order = StrengthOrder::INCONCLUSIVE;
  std::vector<RatioSample> max_ratio;  // max over design of Q~/P~ per radius
  std::vector<RatioSample> min_ratio;
  double max_slope = 0.0;
  double min_slope = 0.0;
};

struct NoWitness {
  std::string kind;  // "zero-ray" | "zero-sequence" | "ratio-sequence"
  std::vector<double> direction;             // exact ray when kind == "zero-ray"
  std::vector<std::vector<double>> points;   // offending sample sequence
  std::string note;
};

struct HypoellipticityReport {
  Verdict verdict = Verdict::INCONCLUSIVE;
  std::optional<NoWitness> witness;
  std::vector<RatioSample> min_abs;              // refined min |P| per radius
  std::map<std::string, std::vector<RatioSample>> derivative_ratios;  // keyed by alpha
};

struct PartialHypoReport {
  Verdict verdict = Verdict::INCONCLUSIVE;
  HypoellipticityReport head;                       // for P_0
  std::map<std::string, StrengthOrder> coefficient_orders;  // per bad monomial
  std::map<MultiIndex, SymbolPoly> decomposition;   // eta^beta -> P_beta(xi)
};

struct AsymptoticExponents {
  double rho = 0.0;
  double b = 0.0;
  double sigma = 0.0;
  double c = 0.0;
  double rho_residual = 0.0;
  double radius_lo = 0.0, radius_hi = 0.0;
};

struct LinealitySpace {
  std::vector<std::vector<Rational>> basis;  // exact null-space basis
  bool is_reduced = true;
  std::vector<std::vector<double>> basis_dbl() const;
};

struct SignAtInfinity {
  int sign = 0;  // +1, -1, or 0 = undetermined
  std::optional<std::pair<int, int>> conflicting_pair;  // indices of frozen symbols
  std::vector<double> witness_point_a, witness_point_b;
};

struct ClassificationReport {
  HypoellipticityReport hypoelliptic;
  std::optional<PartialHypoReport> partially_hypoelliptic;
  std::optional<AsymptoticExponents> exponents;
  LinealitySpace lineality;
  std::optional<int> iteration_index;
  std::string to_json() const;
};

StrengthReport compare_strength(const SymbolPoly& Q, const SymbolPoly& P,
                                const SamplingSchedule& sched = {});

HypoellipticityReport is_hypoelliptic(const SymbolPoly& P, const SamplingSchedule& sched = {});

PartialHypoReport is_partially_hypoelliptic(const SymbolPoly& P,
                                            const SamplingSchedule& sched = {});

AsymptoticExponents estimate_exponents(const SymbolPoly& M, const SamplingSchedule& sched = {});

LinealitySpace lineality(const SymbolPoly& P, bool complex_directions = false);

std::optional<int> hypoelliptic_iteration_index(const SymbolPoly& P, int N_max,
                                                const SamplingSchedule& sched = {});

SignAtInfinity re_sign_at_infinity(const std::vector<SymbolPoly>& frozen,
                                   const SamplingSchedule& sched = {});

ClassificationReport classify_symbol(const SymbolPoly& P, int iteration_N_max = 4,
                                     const SamplingSchedule& sched = {});

}  // namespace hypolab

#endif
