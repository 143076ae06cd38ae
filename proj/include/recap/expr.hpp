#pragma once
// Expression IR for selective aggregates. One tree drives both the native
// evaluator and the SQL compiler, so every node kind must stay a pure,
// SQL-expressible computation. Null follows SQL semantics: it propagates
// through arithmetic and comparisons and collapses to false in guards.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "recap/graph.hpp"
#include "recap/value.hpp"

namespace recap {

enum class ExprKind {
  Const,
  DictRef,
  EdgeProp,
  EdgeId,
  EdgeLabel,
  FromState,
  ToState,
  Add,
  Sub,
  Mul,
  Div,
  Lt,
  Le,
  Eq,
  Ne,
  Ge,
  Gt,
  And,
  Or,
  Not,
  Min,
  Max,
  ListAppend,
  ListContains,
  ListLen,
  IfNull,
  Case,
  // List reductions for whole-path checks in default-construction phis.
  ListMin,
  ListMax,
  ListAllDistinct,
  ListStrictlyIncreasing,
};

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct CaseBranch {
  Expr guard;
  Expr value;
};

struct ExprNode {
  ExprKind kind;
  Value constant;                   // Const
  std::string key;                  // DictRef / EdgeProp
  std::vector<Expr> args;           // operands, in order
  std::vector<CaseBranch> branches; // Case
  Expr else_value;                  // Case
};

// -- builders ---------------------------------------------------------------

namespace ex {

inline Expr make(ExprKind k, std::vector<Expr> args = {}) {
  return std::make_shared<ExprNode>(ExprNode{k, Value::null(), "", std::move(args), {}, nullptr});
}
inline Expr cnst(Value v) {
  return std::make_shared<ExprNode>(ExprNode{ExprKind::Const, std::move(v), "", {}, {}, nullptr});
}
inline Expr cint(std::int64_t i) { return cnst(Value::integer(i)); }
inline Expr cfloat(double d) { return cnst(Value::real(d)); }
inline Expr cbool(bool b) { return cnst(Value::boolean(b)); }
inline Expr cstr(std::string s) { return cnst(Value::str(std::move(s))); }
inline Expr cnull() { return cnst(Value::null()); }
inline Expr empty_list() { return cnst(Value::empty_list()); }
inline Expr dict(std::string key) {
  return std::make_shared<ExprNode>(
      ExprNode{ExprKind::DictRef, Value::null(), std::move(key), {}, {}, nullptr});
}
inline Expr eprop(std::string key) {
  return std::make_shared<ExprNode>(
      ExprNode{ExprKind::EdgeProp, Value::null(), std::move(key), {}, {}, nullptr});
}
inline Expr eid() { return make(ExprKind::EdgeId); }
inline Expr elabel() { return make(ExprKind::EdgeLabel); }
inline Expr from_state() { return make(ExprKind::FromState); }
inline Expr to_state() { return make(ExprKind::ToState); }
inline Expr add(Expr a, Expr b) { return make(ExprKind::Add, {std::move(a), std::move(b)}); }
inline Expr sub(Expr a, Expr b) { return make(ExprKind::Sub, {std::move(a), std::move(b)}); }
inline Expr mul(Expr a, Expr b) { return make(ExprKind::Mul, {std::move(a), std::move(b)}); }
inline Expr div(Expr a, Expr b) { return make(ExprKind::Div, {std::move(a), std::move(b)}); }
inline Expr lt(Expr a, Expr b) { return make(ExprKind::Lt, {std::move(a), std::move(b)}); }
inline Expr le(Expr a, Expr b) { return make(ExprKind::Le, {std::move(a), std::move(b)}); }
inline Expr eq(Expr a, Expr b) { return make(ExprKind::Eq, {std::move(a), std::move(b)}); }
inline Expr ne(Expr a, Expr b) { return make(ExprKind::Ne, {std::move(a), std::move(b)}); }
inline Expr ge(Expr a, Expr b) { return make(ExprKind::Ge, {std::move(a), std::move(b)}); }
inline Expr gt(Expr a, Expr b) { return make(ExprKind::Gt, {std::move(a), std::move(b)}); }
inline Expr logical_and(Expr a, Expr b) { return make(ExprKind::And, {std::move(a), std::move(b)}); }
inline Expr logical_or(Expr a, Expr b) { return make(ExprKind::Or, {std::move(a), std::move(b)}); }
inline Expr logical_not(Expr a) { return make(ExprKind::Not, {std::move(a)}); }
inline Expr vmin(Expr a, Expr b) { return make(ExprKind::Min, {std::move(a), std::move(b)}); }
inline Expr vmax(Expr a, Expr b) { return make(ExprKind::Max, {std::move(a), std::move(b)}); }
inline Expr list_append(Expr l, Expr e) {
  return make(ExprKind::ListAppend, {std::move(l), std::move(e)});
}
inline Expr list_contains(Expr l, Expr e) {
  return make(ExprKind::ListContains, {std::move(l), std::move(e)});
}
inline Expr list_len(Expr l) { return make(ExprKind::ListLen, {std::move(l)}); }
inline Expr ifnull(Expr a, Expr b) { return make(ExprKind::IfNull, {std::move(a), std::move(b)}); }
inline Expr list_min(Expr l) { return make(ExprKind::ListMin, {std::move(l)}); }
inline Expr list_max(Expr l) { return make(ExprKind::ListMax, {std::move(l)}); }
inline Expr list_all_distinct(Expr l) { return make(ExprKind::ListAllDistinct, {std::move(l)}); }
inline Expr list_strictly_increasing(Expr l) {
  return make(ExprKind::ListStrictlyIncreasing, {std::move(l)});
}
inline Expr case_of(std::vector<CaseBranch> branches, Expr else_value) {
  return std::make_shared<ExprNode>(ExprNode{ExprKind::Case, Value::null(), "", {},
                                             std::move(branches), std::move(else_value)});
}

inline bool is_const_true(const Expr& e) {
  return e && e->kind == ExprKind::Const && e->constant.kind() == ValueKind::Bool &&
         e->constant.as_bool();
}

}  // namespace ex

// -- evaluation -------------------------------------------------------------

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvalContext {
  const std::vector<Value>* dict = nullptr;            // slots in schema order
  const std::map<std::string, int>* slot_index = nullptr;
  const Edge* edge = nullptr;
  int from_state = 0;
  int to_state = 0;
};

namespace detail {

inline bool numeric_int_pair(const Value& a, const Value& b) {
  return a.kind() != ValueKind::Float && b.kind() != ValueKind::Float;
}

inline int compare_values(const Value& a, const Value& b) {
  if (a.is_numeric() && b.is_numeric()) {
    if (numeric_int_pair(a, b)) {
      auto x = a.numeric_as_int(), y = b.numeric_as_int();
      return x < y ? -1 : x > y ? 1 : 0;
    }
    double x = a.numeric_as_double(), y = b.numeric_as_double();
    return x < y ? -1 : x > y ? 1 : 0;
  }
  if (a.kind() == ValueKind::String && b.kind() == ValueKind::String)
    return a.as_string().compare(b.as_string());
  throw EvalError(std::string("cannot order ") + to_string(a.kind()) + " against " +
                  to_string(b.kind()));
}

inline Value arith(ExprKind op, const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return Value::null();
  if (!a.is_numeric() || !b.is_numeric())
    throw EvalError(std::string("arithmetic on ") + to_string(a.kind()) + " and " +
                    to_string(b.kind()));
  if (numeric_int_pair(a, b)) {
    std::int64_t x = a.numeric_as_int(), y = b.numeric_as_int();
    switch (op) {
      case ExprKind::Add: return Value::integer(x + y);
      case ExprKind::Sub: return Value::integer(x - y);
      case ExprKind::Mul: return Value::integer(x * y);
      case ExprKind::Div:
        if (y == 0) throw EvalError("division by zero");
        return Value::integer(x / y);
      default: break;
    }
  } else {
    double x = a.numeric_as_double(), y = b.numeric_as_double();
    switch (op) {
      case ExprKind::Add: return Value::real(x + y);
      case ExprKind::Sub: return Value::real(x - y);
      case ExprKind::Mul: return Value::real(x * y);
      case ExprKind::Div:
        if (y == 0.0) throw EvalError("division by zero");
        return Value::real(x / y);
      default: break;
    }
  }
  throw EvalError("unhandled arithmetic op");
}

// Three-valued AND/OR over {false, null, true} encoded as {0, 1, 2}.
inline int tri_of(const Value& v) {
  if (v.is_null()) return 1;
  if (v.kind() != ValueKind::Bool) throw EvalError("boolean operand expected");
  return v.as_bool() ? 2 : 0;
}
inline Value tri_value(int t) {
  return t == 1 ? Value::null() : Value::boolean(t == 2);
}

}  // namespace detail

inline Value eval_expr(const Expr& e, const EvalContext& ctx) {
  using detail::arith;
  using detail::compare_values;
  switch (e->kind) {
    case ExprKind::Const:
      return e->constant;
    case ExprKind::DictRef: {
      auto it = ctx.slot_index->find(e->key);
      if (it == ctx.slot_index->end()) throw EvalError("unknown dictionary key: " + e->key);
      return (*ctx.dict)[it->second];
    }
    case ExprKind::EdgeProp:
      if (!ctx.edge) throw EvalError("edge reference outside a transition");
      return get_property(*ctx.edge, e->key);
    case ExprKind::EdgeId:
      if (!ctx.edge) throw EvalError("edge reference outside a transition");
      return Value::str(ctx.edge->id);
    case ExprKind::EdgeLabel:
      if (!ctx.edge) throw EvalError("edge reference outside a transition");
      return Value::str(ctx.edge->label);
    case ExprKind::FromState:
      return Value::integer(ctx.from_state);
    case ExprKind::ToState:
      return Value::integer(ctx.to_state);
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div:
      return arith(e->kind, eval_expr(e->args[0], ctx), eval_expr(e->args[1], ctx));
    case ExprKind::Lt:
    case ExprKind::Le:
    case ExprKind::Eq:
    case ExprKind::Ne:
    case ExprKind::Ge:
    case ExprKind::Gt: {
      Value a = eval_expr(e->args[0], ctx);
      Value b = eval_expr(e->args[1], ctx);
      if (a.is_null() || b.is_null()) return Value::null();
      if (e->kind == ExprKind::Eq || e->kind == ExprKind::Ne) {
        bool equal;
        if (a.is_numeric() && b.is_numeric())
          equal = compare_values(a, b) == 0;
        else if (a.kind() == b.kind())
          equal = a == b;
        else
          throw EvalError(std::string("cannot compare ") + to_string(a.kind()) +
                          " against " + to_string(b.kind()));
        return Value::boolean(e->kind == ExprKind::Eq ? equal : !equal);
      }
      int c = compare_values(a, b);
      switch (e->kind) {
        case ExprKind::Lt: return Value::boolean(c < 0);
        case ExprKind::Le: return Value::boolean(c <= 0);
        case ExprKind::Ge: return Value::boolean(c >= 0);
        case ExprKind::Gt: return Value::boolean(c > 0);
        default: break;
      }
      throw EvalError("unhandled comparison");
    }
    case ExprKind::And: {
      int a = detail::tri_of(eval_expr(e->args[0], ctx));
      if (a == 0) return Value::boolean(false);
      int b = detail::tri_of(eval_expr(e->args[1], ctx));
      return detail::tri_value(std::min(a, b));
    }
    case ExprKind::Or: {
      int a = detail::tri_of(eval_expr(e->args[0], ctx));
      if (a == 2) return Value::boolean(true);
      int b = detail::tri_of(eval_expr(e->args[1], ctx));
      return detail::tri_value(std::max(a, b));
    }
    case ExprKind::Not: {
      Value v = eval_expr(e->args[0], ctx);
      if (v.is_null()) return Value::null();
      if (v.kind() != ValueKind::Bool) throw EvalError("NOT on non-boolean");
      return Value::boolean(!v.as_bool());
    }
    case ExprKind::Min:
    case ExprKind::Max: {
      Value a = eval_expr(e->args[0], ctx);
      Value b = eval_expr(e->args[1], ctx);
      if (a.is_null() || b.is_null()) return Value::null();
      int c = compare_values(a, b);
      if (e->kind == ExprKind::Min) return c <= 0 ? a : b;
      return c >= 0 ? a : b;
    }
    case ExprKind::ListAppend: {
      Value l = eval_expr(e->args[0], ctx);
      Value v = eval_expr(e->args[1], ctx);
      if (l.kind() != ValueKind::List) throw EvalError("list_append on non-list");
      if (v.is_null()) throw EvalError("list_append of null element");
      return list_append_value(l, v);
    }
    case ExprKind::ListContains: {
      Value l = eval_expr(e->args[0], ctx);
      Value v = eval_expr(e->args[1], ctx);
      if (l.is_null() || v.is_null()) return Value::null();
      if (l.kind() != ValueKind::List) throw EvalError("list_contains on non-list");
      for (const auto& elem : l.as_list())
        if (elem == v) return Value::boolean(true);
      return Value::boolean(false);
    }
    case ExprKind::ListLen: {
      Value l = eval_expr(e->args[0], ctx);
      if (l.is_null()) return Value::null();
      if (l.kind() != ValueKind::List) throw EvalError("list_len on non-list");
      return Value::integer(static_cast<std::int64_t>(l.as_list().size()));
    }
    case ExprKind::IfNull: {
      Value a = eval_expr(e->args[0], ctx);
      if (!a.is_null()) return a;
      return eval_expr(e->args[1], ctx);
    }
    case ExprKind::Case: {
      for (const auto& br : e->branches) {
        Value g = eval_expr(br.guard, ctx);
        if (!g.is_null() && g.kind() == ValueKind::Bool && g.as_bool())
          return eval_expr(br.value, ctx);
      }
      return eval_expr(e->else_value, ctx);
    }
    case ExprKind::ListMin:
    case ExprKind::ListMax: {
      Value l = eval_expr(e->args[0], ctx);
      if (l.is_null()) return Value::null();
      const auto& elems = l.as_list();
      if (elems.empty()) return Value::null();
      Value best = elems[0];
      for (std::size_t i = 1; i < elems.size(); ++i) {
        int c = compare_values(elems[i], best);
        if ((e->kind == ExprKind::ListMin && c < 0) || (e->kind == ExprKind::ListMax && c > 0))
          best = elems[i];
      }
      return best;
    }
    case ExprKind::ListAllDistinct: {
      Value l = eval_expr(e->args[0], ctx);
      if (l.is_null()) return Value::null();
      const auto& elems = l.as_list();
      for (std::size_t i = 0; i < elems.size(); ++i)
        for (std::size_t j = i + 1; j < elems.size(); ++j)
          if (elems[i] == elems[j]) return Value::boolean(false);
      return Value::boolean(true);
    }
    case ExprKind::ListStrictlyIncreasing: {
      Value l = eval_expr(e->args[0], ctx);
      if (l.is_null()) return Value::null();
      const auto& elems = l.as_list();
      for (std::size_t i = 1; i < elems.size(); ++i)
        if (compare_values(elems[i - 1], elems[i]) >= 0) return Value::boolean(false);
      return Value::boolean(true);
    }
  }
  throw EvalError("unhandled expression kind");
}

// Guard position: null collapses to false.
inline bool eval_guard(const Expr& e, const EvalContext& ctx) {
  Value v = eval_expr(e, ctx);
  if (v.is_null()) return false;
  if (v.kind() != ValueKind::Bool) throw EvalError("guard did not evaluate to a boolean");
  return v.as_bool();
}

// -- structure helpers -------------------------------------------------------

inline void visit_expr(const Expr& e, const std::function<void(const ExprNode&)>& fn) {
  fn(*e);
  for (const auto& a : e->args) visit_expr(a, fn);
  for (const auto& br : e->branches) {
    visit_expr(br.guard, fn);
    visit_expr(br.value, fn);
  }
  if (e->else_value) visit_expr(e->else_value, fn);
}

inline bool references_edge(const Expr& e) {
  bool found = false;
  visit_expr(e, [&](const ExprNode& n) {
    if (n.kind == ExprKind::EdgeProp || n.kind == ExprKind::EdgeId ||
        n.kind == ExprKind::EdgeLabel)
      found = true;
  });
  return found;
}

inline bool references_state(const Expr& e) {
  bool found = false;
  visit_expr(e, [&](const ExprNode& n) {
    if (n.kind == ExprKind::FromState || n.kind == ExprKind::ToState) found = true;
  });
  return found;
}

// Rewrites DictRef keys; used when composing aggregates renames collisions.
inline Expr rewrite_dict_refs(const Expr& e, const std::map<std::string, std::string>& renames) {
  auto rewrite = [&](auto&& self, const Expr& node) -> Expr {
    std::vector<Expr> args;
    args.reserve(node->args.size());
    for (const auto& a : node->args) args.push_back(self(self, a));
    std::vector<CaseBranch> branches;
    branches.reserve(node->branches.size());
    for (const auto& br : node->branches)
      branches.push_back({self(self, br.guard), self(self, br.value)});
    Expr else_value = node->else_value ? self(self, node->else_value) : nullptr;
    std::string key = node->key;
    if (node->kind == ExprKind::DictRef) {
      auto it = renames.find(key);
      if (it != renames.end()) key = it->second;
    }
    return std::make_shared<ExprNode>(ExprNode{node->kind, node->constant, std::move(key),
                                               std::move(args), std::move(branches),
                                               std::move(else_value)});
  };
  return rewrite(rewrite, e);
}

}  // namespace recap
