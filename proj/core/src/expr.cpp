#include "ncsg/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "ncsg/errors.hpp"

namespace ncsg {
namespace {

struct Parser {
  const std::string& text;
  const ExprContext& ctx;
  std::size_t pos = 0;
  bool uses_point = false;
  bool uses_dual = false;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' ||
                                 text[pos] == '\n' || text[pos] == '\r')) {
      ++pos;
    }
  }

  // `at` is the 0-based scan offset; reported positions are 1-based.
  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw ParseError(what, at + 1);
  }

  bool peek_is(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  static ExprPtr make(ExprNode n) { return std::make_shared<ExprNode>(std::move(n)); }

  ExprPtr parse_add() {
    ExprPtr lhs = parse_term();
    for (;;) {
      if (consume('+')) {
        lhs = make({ExprNode::Kind::add, 0, {}, 0, {}, lhs, parse_term()});
      } else if (consume('-')) {
        lhs = make({ExprNode::Kind::sub, 0, {}, 0, {}, lhs, parse_term()});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      if (consume('*')) {
        lhs = make({ExprNode::Kind::mul, 0, {}, 0, {}, lhs, parse_unary()});
      } else if (consume('/')) {
        lhs = make({ExprNode::Kind::div, 0, {}, 0, {}, lhs, parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_unary() {
    if (consume('-')) {
      return make({ExprNode::Kind::neg, 0, {}, 0, {}, parse_unary(), nullptr});
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (consume('^')) {
      // right-associative; exponent may carry a unary minus
      return make({ExprNode::Kind::pow, 0, {}, 0, {}, base, parse_unary()});
    }
    return base;
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input", text.size());
    const char c = text[pos];
    if (c == '(') {
      ++pos;
      ExprPtr inner = parse_add();
      skip_ws();
      if (pos >= text.size()) fail("expected ')'", text.size());
      if (text[pos] != ')') fail("expected ')'", pos);
      ++pos;
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      return parse_identifier();
    }
    fail(std::string("unexpected character '") + c + "'", pos);
  }

  ExprPtr parse_number() {
    const char* first = text.data() + pos;
    const char* last = text.data() + text.size();
    double value = 0.0;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{}) fail("malformed number", pos);
    pos = static_cast<std::size_t>(res.ptr - text.data());
    return make({ExprNode::Kind::literal, value, {}, 0, {}, nullptr, nullptr});
  }

  ExprPtr parse_identifier() {
    const std::size_t start = pos;
    while (pos < text.size() &&
           ((text[pos] >= 'a' && text[pos] <= 'z') ||
            (text[pos] >= 'A' && text[pos] <= 'Z') ||
            (text[pos] >= '0' && text[pos] <= '9') || text[pos] == '_')) {
      ++pos;
    }
    const std::string name = text.substr(start, pos - start);
    if (peek_is('(')) {
      if (name != "cos" && name != "sin" && name != "exp" && name != "sqrt" &&
          name != "abs") {
        fail("unknown function '" + name + "'", start);
      }
      ++pos;  // '('
      ExprPtr arg = parse_add();
      skip_ws();
      if (pos >= text.size()) fail("expected ')'", text.size());
      if (text[pos] != ')') fail("expected ')'", pos);
      ++pos;
      return make({ExprNode::Kind::call, 0, {}, 0, name, arg, nullptr});
    }
    if (name == "pi") {
      return make({ExprNode::Kind::literal, std::numbers::pi, {}, 0, {},
                   nullptr, nullptr});
    }
    return resolve_variable(name, start);
  }

  ExprPtr variable(VarKind v, int index, bool dual) {
    (dual ? uses_dual : uses_point) = true;
    return make({ExprNode::Kind::variable, 0, v, index, {}, nullptr, nullptr});
  }

  // x<j> / k<j> with 1-based j up to the torus dimension
  static int component_suffix(const std::string& name) {
    if (name.size() < 2) return -1;
    int value = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
      if (name[i] < '0' || name[i] > '9') return -1;
      value = value * 10 + (name[i] - '0');
    }
    return value;
  }

  ExprPtr resolve_variable(const std::string& name, std::size_t at) {
    if (ctx.group == GroupKind::torus && name[0] == 'x') {
      int j = component_suffix(name);
      if (j >= 1 && j <= ctx.torus_dim) return variable(VarKind::coord, j - 1, false);
    }
    if (ctx.group == GroupKind::su2) {
      if (name == "alpha") return variable(VarKind::alpha, 0, false);
      if (name == "beta") return variable(VarKind::beta, 0, false);
      if (name == "gamma") return variable(VarKind::gamma, 0, false);
      if (name == "re_a") return variable(VarKind::re_a, 0, false);
      if (name == "im_a") return variable(VarKind::im_a, 0, false);
      if (name == "re_b") return variable(VarKind::re_b, 0, false);
      if (name == "im_b") return variable(VarKind::im_b, 0, false);
    }
    if (ctx.allow_dual) {
      if (ctx.group == GroupKind::torus && name[0] == 'k') {
        int j = component_suffix(name);
        if (j >= 1 && j <= ctx.torus_dim) return variable(VarKind::dual_k, j - 1, true);
      }
      if (name == "xi_weight") return variable(VarKind::xi_weight, 0, true);
      if (name == "xi_lambda2") return variable(VarKind::xi_lambda2, 0, true);
      if (name == "xi_dim") return variable(VarKind::xi_dim, 0, true);
    }
    fail("unknown identifier '" + name + "'", at);
  }
};

int precedence(ExprNode::Kind k) {
  switch (k) {
    case ExprNode::Kind::add:
    case ExprNode::Kind::sub: return 1;
    case ExprNode::Kind::mul:
    case ExprNode::Kind::div: return 2;
    case ExprNode::Kind::neg: return 3;
    case ExprNode::Kind::pow: return 4;
    default: return 5;
  }
}

std::string var_name(const ExprNode& n) {
  switch (n.var) {
    case VarKind::coord: return "x" + std::to_string(n.index + 1);
    case VarKind::alpha: return "alpha";
    case VarKind::beta: return "beta";
    case VarKind::gamma: return "gamma";
    case VarKind::re_a: return "re_a";
    case VarKind::im_a: return "im_a";
    case VarKind::re_b: return "re_b";
    case VarKind::im_b: return "im_b";
    case VarKind::dual_k: return "k" + std::to_string(n.index + 1);
    case VarKind::xi_weight: return "xi_weight";
    case VarKind::xi_lambda2: return "xi_lambda2";
    case VarKind::xi_dim: return "xi_dim";
  }
  return "?";
}

void print_node(const ExprNode& n, int min_prec, std::string& out) {
  const int prec = precedence(n.kind);
  const bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (n.kind) {
    case ExprNode::Kind::literal: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      break;
    }
    case ExprNode::Kind::variable:
      out += var_name(n);
      break;
    case ExprNode::Kind::neg:
      out += '-';
      print_node(*n.a, prec, out);
      break;
    case ExprNode::Kind::add:
    case ExprNode::Kind::sub:
      print_node(*n.a, prec, out);
      out += (n.kind == ExprNode::Kind::add) ? '+' : '-';
      print_node(*n.b, prec + 1, out);
      break;
    case ExprNode::Kind::mul:
    case ExprNode::Kind::div:
      print_node(*n.a, prec, out);
      out += (n.kind == ExprNode::Kind::mul) ? '*' : '/';
      print_node(*n.b, prec + 1, out);
      break;
    case ExprNode::Kind::pow:
      print_node(*n.a, prec + 1, out);  // base must sit at atom level
      out += '^';
      print_node(*n.b, 3, out);  // exponent admits unary minus
      break;
    case ExprNode::Kind::call:
      out += n.fn;
      out += '(';
      print_node(*n.a, 0, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

double eval_variable(const ExprNode& n, const EvalEnv& env) {
  if (n.var == VarKind::coord || n.var == VarKind::alpha ||
      n.var == VarKind::beta || n.var == VarKind::gamma ||
      n.var == VarKind::re_a || n.var == VarKind::im_a ||
      n.var == VarKind::re_b || n.var == VarKind::im_b) {
    if (env.x == nullptr) throw NumericError("expression needs a group point");
    const GroupPoint& x = *env.x;
    switch (n.var) {
      case VarKind::coord: return x.angles.at(static_cast<std::size_t>(n.index));
      case VarKind::alpha: return x.euler[0];
      case VarKind::beta: return x.euler[1];
      case VarKind::gamma: return x.euler[2];
      // defining matrix [[a,b],[-conj(b),conj(a)]] with a=w-iz, b=-y-ix
      case VarKind::re_a: return x.quat[0];
      case VarKind::im_a: return -x.quat[3];
      case VarKind::re_b: return -x.quat[2];
      case VarKind::im_b: return -x.quat[1];
      default: break;
    }
  }
  if (env.xi == nullptr) throw NumericError("expression needs a dual label");
  const Irrep& xi = *env.xi;
  switch (n.var) {
    case VarKind::dual_k: return static_cast<double>(xi.k.at(static_cast<std::size_t>(n.index)));
    case VarKind::xi_weight: return xi.weight;
    case VarKind::xi_lambda2: return xi.casimir;
    case VarKind::xi_dim: return static_cast<double>(xi.dim);
    default: break;
  }
  throw NumericError("unhandled expression variable");
}

double eval_node(const ExprNode& n, const EvalEnv& env) {
  switch (n.kind) {
    case ExprNode::Kind::literal: return n.value;
    case ExprNode::Kind::variable: return eval_variable(n, env);
    case ExprNode::Kind::neg: return -eval_node(*n.a, env);
    case ExprNode::Kind::add: return eval_node(*n.a, env) + eval_node(*n.b, env);
    case ExprNode::Kind::sub: return eval_node(*n.a, env) - eval_node(*n.b, env);
    case ExprNode::Kind::mul: return eval_node(*n.a, env) * eval_node(*n.b, env);
    case ExprNode::Kind::div: {
      const double num = eval_node(*n.a, env);
      const double den = eval_node(*n.b, env);
      if (den == 0.0) throw NumericError("division by zero in expression");
      return num / den;
    }
    case ExprNode::Kind::pow: {
      const double base = eval_node(*n.a, env);
      const double ex = eval_node(*n.b, env);
      const double r = std::pow(base, ex);
      if (!std::isfinite(r)) throw NumericError("pow out of domain in expression");
      return r;
    }
    case ExprNode::Kind::call: {
      const double arg = eval_node(*n.a, env);
      if (n.fn == "cos") return std::cos(arg);
      if (n.fn == "sin") return std::sin(arg);
      if (n.fn == "exp") {
        const double r = std::exp(arg);
        if (!std::isfinite(r)) throw NumericError("exp overflow in expression");
        return r;
      }
      if (n.fn == "sqrt") {
        if (arg < 0.0) throw NumericError("sqrt of negative value in expression");
        return std::sqrt(arg);
      }
      if (n.fn == "abs") return std::abs(arg);
      throw NumericError("unknown function '" + n.fn + "'");
    }
  }
  throw NumericError("malformed expression tree");
}

}  // namespace

ExprAst parse_expr(const std::string& text, const ExprContext& ctx) {
  Parser p{text, ctx};
  ExprPtr root = p.parse_add();
  p.skip_ws();
  if (p.pos != text.size()) {
    p.fail("unexpected trailing input", p.pos);
  }
  return {root, p.uses_point, p.uses_dual};
}

std::string print_expr(const ExprAst& ast) {
  std::string out;
  if (ast.root) print_node(*ast.root, 0, out);
  return out;
}

double eval_expr(const ExprAst& ast, const EvalEnv& env) {
  if (!ast.root) throw NumericError("empty expression");
  const double r = eval_node(*ast.root, env);
  if (!std::isfinite(r)) throw NumericError("expression evaluated to a non-finite value");
  return r;
}

}  // namespace ncsg
