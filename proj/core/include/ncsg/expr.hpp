#pragma once

#include <memory>
#include <string>

#include "ncsg/group.hpp"

namespace ncsg {

// Scalar expression DSL used for symbol construction.
//
// Grammar (standard precedence, ^ binds tightest and right-associatively):
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?
//   atom    := number | identifier | identifier '(' expr ')' | '(' expr ')'
// Identifiers:
//   functions  cos sin exp sqrt abs
//   constant   pi
//   point vars torus: x1..xn            su2: alpha beta gamma and the four
//              real coordinates of the defining matrix [[a,b],[−b̄,ā]]:
//              re_a im_a re_b im_b
//   dual vars  (only where a symbol depends on ξ) torus: k1..kn;
//              both groups: xi_weight (⟨ξ⟩), xi_lambda2 (λ_ξ²), xi_dim (d_ξ)
// Errors carry a 1-based byte position (end-of-input errors point one past
// the last byte).

enum class VarKind {
  coord,        // torus angle, index
  alpha, beta, gamma,
  re_a, im_a, re_b, im_b,
  dual_k,       // torus label component, index
  xi_weight, xi_lambda2, xi_dim,
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { literal, variable, neg, add, sub, mul, div, pow, call };
  Kind kind;
  double value = 0.0;       // literal
  VarKind var{};            // variable
  int index = 0;            // variable component
  std::string fn;           // call: cos sin exp sqrt abs
  ExprPtr a, b;
};

struct ExprAst {
  ExprPtr root;
  bool uses_point = false;  // references x-variables
  bool uses_dual = false;   // references ξ-variables
};

/// What identifiers are legal for a given parse.
struct ExprContext {
  GroupKind group = GroupKind::torus;
  int torus_dim = 1;
  bool allow_dual = false;
  static ExprContext for_group(const GroupDescriptor& g, bool allow_dual_vars) {
    return {g.kind, g.torus_dim, allow_dual_vars};
  }
};

/// Throws ParseError (with 1-based position) on syntax errors and unknown
/// identifiers.
ExprAst parse_expr(const std::string& text, const ExprContext& ctx);

/// Canonical rendering; parse(print(parse(t))) reproduces the same tree.
std::string print_expr(const ExprAst& ast);

struct EvalEnv {
  const GroupPoint* x = nullptr;
  const Irrep* xi = nullptr;
};

/// Division, sqrt and pow are guarded: domain violations throw NumericError.
double eval_expr(const ExprAst& ast, const EvalEnv& env);

}  // namespace ncsg
