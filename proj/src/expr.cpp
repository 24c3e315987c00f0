#include "hypolab/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "hypolab/symbol.hpp"  // for ParseError

namespace hypolab {

struct Expr::Node {
  enum Kind { CONST, VAR, ADD, SUB, MUL, DIV, POW, NEG, FUNC } kind;
  double value = 0.0;                       // CONST
  int var = -1;                             // VAR: index into the point
  std::string func;                         // FUNC
  std::shared_ptr<const Node> a, b;

  double eval(const std::vector<double>& p) const {
    switch (kind) {
      case CONST: return value;
      case VAR: return p[var];
      case ADD: return a->eval(p) + b->eval(p);
      case SUB: return a->eval(p) - b->eval(p);
      case MUL: return a->eval(p) * b->eval(p);
      case DIV: return a->eval(p) / b->eval(p);
      case POW: return std::pow(a->eval(p), b->eval(p));
      case NEG: return -a->eval(p);
      case FUNC: {
        double u = a->eval(p);
        if (func == "sin") return std::sin(u);
        if (func == "cos") return std::cos(u);
        if (func == "exp") return std::exp(u);
        if (func == "sqrt") return std::sqrt(u);
        if (func == "tanh") return std::tanh(u);
        if (func == "abs") return std::abs(u);
        if (func == "bump") return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
        return 0.0;
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Expr::Node n) { return std::make_shared<const Expr::Node>(std::move(n)); }

struct ExprParser {
  const std::string& s;
  size_t pos = 0;
  int n_good, m_bad;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos); }

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool peek(char c) {
    skip();
    return pos < s.size() && s[pos] == c;
  }
  bool eat(char c) {
    if (!peek(c)) return false;
    ++pos;
    return true;
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) {
        lhs = make({Expr::Node::ADD, 0, -1, "", lhs, term()});
      } else if (eat('-')) {
        lhs = make({Expr::Node::SUB, 0, -1, "", lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) {
        lhs = make({Expr::Node::MUL, 0, -1, "", lhs, unary()});
      } else if (eat('/')) {
        lhs = make({Expr::Node::DIV, 0, -1, "", lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (eat('-')) return make({Expr::Node::NEG, 0, -1, "", unary(), nullptr});
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make({Expr::Node::POW, 0, -1, "", base, unary()});
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos >= s.size()) fail("unexpected end of expression");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      NodePtr e = expression();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character");
  }

  NodePtr number() {
    size_t start = pos;
    while (pos < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' || s[pos] == 'e' ||
            s[pos] == 'E' || ((s[pos] == '+' || s[pos] == '-') && pos > start &&
                              (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
      ++pos;
    try {
      return make({Expr::Node::CONST, std::stod(s.substr(start, pos - start)), -1, "", nullptr,
                   nullptr});
    } catch (const std::exception&) {
      pos = start;
      fail("malformed number");
    }
  }

  NodePtr identifier() {
    size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    std::string name = s.substr(start, pos - start);
    if (name == "pi")
      return make({Expr::Node::CONST, std::numbers::pi, -1, "", nullptr, nullptr});
    for (const char* f : {"sin", "cos", "exp", "sqrt", "tanh", "abs", "bump"}) {
      if (name == f) {
        if (!eat('(')) fail("expected '(' after function name");
        NodePtr arg = expression();
        if (!eat(')')) fail("expected ')'");
        return make({Expr::Node::FUNC, 0, -1, name, arg, nullptr});
      }
    }
    int idx = var_index(name);
    if (idx < 0) {
      pos = start;
      fail("unknown identifier '" + name + "'");
    }
    return make({Expr::Node::VAR, 0, idx, "", nullptr, nullptr});
  }

  int var_index(const std::string& name) const {
    auto numbered = [&](char prefix, int count, int offset) -> int {
      if (name.size() < 2 || name[0] != prefix) return -1;
      for (size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return -1;
      int k = std::stoi(name.substr(1));
      if (k < 1 || k > count) return -2;  // right prefix, bad index
      return offset + k - 1;
    };
    if (name == "x") return n_good >= 1 ? 0 : -1;
    if (name == "y") return m_bad >= 1 ? n_good : -1;
    int ix = numbered('x', n_good, 0);
    if (ix >= 0) return ix;
    if (ix == -2) return -1;
    int iy = numbered('y', m_bad, n_good);
    if (iy >= 0) return iy;
    return -1;
  }
};

}  // namespace

Expr Expr::parse(const std::string& text, int n_good, int m_bad) {
  if (n_good < 0 || m_bad < 0) throw std::invalid_argument("Expr::parse: negative arity");
  ExprParser p{text, 0, n_good, m_bad};
  Expr e;
  e.root_ = p.expression();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  e.text_ = text;
  e.arity_ = n_good + m_bad;
  return e;
}

double Expr::eval(const std::vector<double>& point) const {
  if (!root_) throw std::logic_error("Expr::eval: empty expression");
  if (static_cast<int>(point.size()) != arity_)
    throw std::invalid_argument("Expr::eval: wrong point dimension");
  return root_->eval(point);
}

}  // namespace hypolab
