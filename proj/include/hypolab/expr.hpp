#ifndef HYPOLAB_EXPR_HPP
#define HYPOLAB_EXPR_HPP

#include <memory>
#include <string>
#include <vector>

namespace hypolab {

/// Closed-form scalar coefficient field c(x1..xn, y1..ym) parsed from a small
/// expression grammar: numbers, pi, variables x1.., y1.. (x ≡ x1, y ≡ y1),
/// + - * / ^, parentheses, and the functions sin cos exp sqrt tanh abs bump
/// (bump(u) = exp(-1/(1-u^2)) for |u| < 1, else 0).
class Expr {
 public:
  Expr() = default;

  /// Parse with respect to a spatial split: good variables x1..xn then bad
  /// variables y1..ym; evaluation takes the concatenated point.
  static Expr parse(const std::string& text, int n_good, int m_bad);

  double eval(const std::vector<double>& point) const;
  bool empty() const { return root_ == nullptr; }
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  int arity_ = 0;
};

}  // namespace hypolab

#endif
