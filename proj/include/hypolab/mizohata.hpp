#ifndef HYPOLAB_MIZOHATA_HPP
#define HYPOLAB_MIZOHATA_HPP

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypolab/classify.hpp"
#include "hypolab/expr.hpp"
#include "hypolab/symbol.hpp"

namespace hypolab {

/// P(xi,eta) = P0(xi) + sum_j P_j(xi) * Q_j(eta), with each Q_j a monic
/// monomial eta^alpha and scalars absorbed into P_j.
struct MizohataForm {
  SymbolPoly P0 = SymbolPoly(1);                   // over good variables only
  std::vector<std::pair<SymbolPoly, SymbolPoly>> terms;  // (P_j over good, Q_j over bad)
  std::optional<std::vector<double>> origin;       // frozen point, if any
  VariableSplit split{0, 0};

  /// Expand back to the full-dimension symbol (exact).
  SymbolPoly reassemble() const;
};

struct FrozenOperator {
  std::vector<double> point;
  SymbolPoly symbol = SymbolPoly(1);  // constant-coefficient, carries the shared split
};

/// Scalar coefficient field: a closed-form expression or a tabulated grid
/// with multilinear interpolation.
class CoefficientField {
 public:
  static CoefficientField constant(double v);
  static CoefficientField expression(Expr e);
  /// Regular grid over `box` (per-axis [lo,hi]), row-major values,
  /// `shape[d]` points along axis d; multilinear interpolation, clamped.
  static CoefficientField table(std::vector<std::pair<double, double>> box,
                                std::vector<int> shape, std::vector<double> values);

  double operator()(const std::vector<double>& point) const;
  const std::string& description() const { return desc_; }

 private:
  std::function<double(const std::vector<double>&)> fn_;
  std::string desc_;
};

/// Finite sum of coefficient-function x constant-symbol terms, plus the type
/// symbol M outside the compact set K (a coordinate box).
struct OperatorDescription {
  SymbolPoly type_symbol = SymbolPoly(1);  // full dimension, shared split
  struct Term {
    CoefficientField coeff;
    SymbolPoly symbol;  // full dimension, shared split
  };
  std::vector<Term> terms;
  std::vector<std::pair<double, double>> compact_box;  // per spatial axis [lo,hi]
  VariableSplit split{0, 0};

  bool inside_compact(const std::vector<double>& point) const;
  /// Frozen symbol at a spatial point: sum of coefficients at the point
  /// inside K, the type symbol outside.
  SymbolPoly symbol_at(const std::vector<double>& point) const;

  static OperatorDescription from_json(const std::string& json_text);
  static OperatorDescription constant(const SymbolPoly& P);
};

MizohataForm decompose_constant(const SymbolPoly& P);

FrozenOperator freeze(const OperatorDescription& L, const std::vector<double>& point);

struct TypeReport {
  bool ok = false;
  StrengthOrder head_order = StrengthOrder::INCONCLUSIVE;        // P0 vs M
  std::vector<StrengthOrder> term_orders;                        // P_j vs M
};

TypeReport verify_type(const MizohataForm& form, const SymbolPoly& M,
                       const SamplingSchedule& sched = {});

/// Constant-strength rewrite around a point: frozen operator plus
/// perturbation terms d_j(x,y) R_j with d_j vanishing at the point.
struct ConstantStrengthForm {
  FrozenOperator frozen;
  struct Perturbation {
    std::function<double(const std::vector<double>&)> d;  // c_j(.) - c_j(point)
    SymbolPoly R;
  };
  std::vector<Perturbation> perturbations;
};

ConstantStrengthForm constant_strength_form(const OperatorDescription& L,
                                            const std::vector<double>& point);

}  // namespace hypolab

#endif
