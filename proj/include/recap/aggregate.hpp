#pragma once
// Selective aggregates: a dictionary schema plus init / update / viable /
// finalize / viable_final expression trees, optionally keyed by NFA
// transition. A factorized aggregate has no per-transition entries and lifts
// to any transition table.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "recap/expr.hpp"
#include "recap/nfa.hpp"

namespace recap {

enum class DictKind { Int, Float, String, Timestamp, Bool, List };

inline const char* to_string(DictKind k) {
  switch (k) {
    case DictKind::Int: return "int";
    case DictKind::Float: return "float";
    case DictKind::String: return "string";
    case DictKind::Timestamp: return "timestamp";
    case DictKind::Bool: return "boolean";
    case DictKind::List: return "list-of-scalar";
  }
  return "?";
}

inline std::optional<DictKind> dict_kind_from_string(std::string_view s) {
  if (s == "int") return DictKind::Int;
  if (s == "float") return DictKind::Float;
  if (s == "string") return DictKind::String;
  if (s == "timestamp") return DictKind::Timestamp;
  if (s == "boolean") return DictKind::Bool;
  if (s == "list-of-scalar") return DictKind::List;
  return std::nullopt;
}

struct DictEntry {
  std::string key;
  DictKind kind;
};

// Ordered: entry order drives flattened SQL column order and slot layout.
struct DictionarySchema {
  std::vector<DictEntry> entries;

  int index_of(const std::string& key) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].key == key) return static_cast<int>(i);
    return -1;
  }
  std::map<std::string, int> slot_index() const {
    std::map<std::string, int> m;
    for (std::size_t i = 0; i < entries.size(); ++i)
      m[entries[i].key] = static_cast<int>(i);
    return m;
  }
};

// Per-transition payload: either one factorized entry that applies to every
// transition, or an explicit map keyed by (from_state, to_state).
template <typename T>
struct TransitionMap {
  std::optional<T> factorized;
  std::map<std::pair<int, int>, T> keyed;

  bool is_factorized() const { return factorized.has_value(); }
  const T* find(int from, int to) const {
    if (factorized) return &*factorized;
    auto it = keyed.find({from, to});
    return it == keyed.end() ? nullptr : &it->second;
  }
};

using UpdateMap = std::map<std::string, Expr>;  // keys absent keep their value

struct SelectiveAggregateSpec {
  DictionarySchema schema;
  std::map<std::string, Expr> init;            // key -> edge-free expression
  TransitionMap<UpdateMap> update;
  TransitionMap<Expr> viable;                  // boolean
  std::vector<std::pair<std::string, Expr>> finalize;  // ordered outputs; empty = identity
  Expr viable_final;

  std::vector<std::pair<std::string, Expr>> effective_finalize() const {
    if (!finalize.empty()) return finalize;
    std::vector<std::pair<std::string, Expr>> out;
    for (const auto& e : schema.entries) out.emplace_back(e.key, ex::dict(e.key));
    return out;
  }
};

struct PathQuerySpec {
  std::vector<std::string> start_vertices;
  std::string regex;
  SelectiveAggregateSpec aggregate;
  int max_length = 1;
};

// -- type checking ------------------------------------------------------------

enum class TypeClass { Bool, Numeric, String, List, Any };

inline const char* to_string(TypeClass c) {
  switch (c) {
    case TypeClass::Bool: return "bool";
    case TypeClass::Numeric: return "numeric";
    case TypeClass::String: return "string";
    case TypeClass::List: return "list";
    case TypeClass::Any: return "any";
  }
  return "?";
}

inline TypeClass type_class_of(DictKind k) {
  switch (k) {
    case DictKind::Int:
    case DictKind::Float:
    case DictKind::Timestamp: return TypeClass::Numeric;
    case DictKind::String: return TypeClass::String;
    case DictKind::Bool: return TypeClass::Bool;
    case DictKind::List: return TypeClass::List;
  }
  return TypeClass::Any;
}

inline TypeClass type_class_of(PropKind k) {
  switch (k) {
    case PropKind::Int:
    case PropKind::Float:
    case PropKind::Timestamp: return TypeClass::Numeric;
    case PropKind::String: return TypeClass::String;
  }
  return TypeClass::Any;
}

inline TypeClass type_class_of(ValueKind k) {
  switch (k) {
    case ValueKind::Bool: return TypeClass::Bool;
    case ValueKind::Int:
    case ValueKind::Float:
    case ValueKind::Timestamp: return TypeClass::Numeric;
    case ValueKind::String: return TypeClass::String;
    case ValueKind::List: return TypeClass::List;
    case ValueKind::Null: return TypeClass::Any;
  }
  return TypeClass::Any;
}

namespace detail {

struct TypeEnv {
  const DictionarySchema* schema;
  const GraphSchema* graph_schema;
  bool allow_edge;
  bool allow_state;
  std::string where;  // diagnostic prefix
  std::vector<std::string>* diags;
};

inline bool class_compatible(TypeClass a, TypeClass b) {
  return a == TypeClass::Any || b == TypeClass::Any || a == b;
}
inline TypeClass unify(TypeClass a, TypeClass b) {
  return a == TypeClass::Any ? b : a;
}

inline TypeClass infer_type(const Expr& e, const TypeEnv& env) {
  auto diag = [&](const std::string& msg) {
    env.diags->push_back(env.where + ": " + msg);
    return TypeClass::Any;
  };
  auto expect = [&](const Expr& child, TypeClass want, const char* what) {
    TypeClass got = infer_type(child, env);
    if (!class_compatible(got, want))
      diag(std::string(what) + " expects " + to_string(want) + ", got " + to_string(got));
    return got;
  };
  switch (e->kind) {
    case ExprKind::Const:
      return type_class_of(e->constant.kind());
    case ExprKind::DictRef: {
      int idx = env.schema->index_of(e->key);
      if (idx < 0) return diag("unknown dictionary key '" + e->key + "'");
      return type_class_of(env.schema->entries[idx].kind);
    }
    case ExprKind::EdgeProp: {
      if (!env.allow_edge) return diag("edge property '" + e->key + "' not allowed here");
      auto kind = env.graph_schema->find(e->key);
      if (!kind) return diag("unknown edge property '" + e->key + "'");
      return type_class_of(*kind);
    }
    case ExprKind::EdgeId:
    case ExprKind::EdgeLabel:
      if (!env.allow_edge) return diag("edge reference not allowed here");
      return TypeClass::String;
    case ExprKind::FromState:
    case ExprKind::ToState:
      if (!env.allow_state) return diag("state reference not allowed here");
      return TypeClass::Numeric;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div:
      expect(e->args[0], TypeClass::Numeric, "arithmetic");
      expect(e->args[1], TypeClass::Numeric, "arithmetic");
      return TypeClass::Numeric;
    case ExprKind::Lt:
    case ExprKind::Le:
    case ExprKind::Ge:
    case ExprKind::Gt: {
      TypeClass a = infer_type(e->args[0], env);
      TypeClass b = infer_type(e->args[1], env);
      if (!class_compatible(a, b) || unify(a, b) == TypeClass::List ||
          unify(a, b) == TypeClass::Bool)
        diag(std::string("cannot order ") + to_string(a) + " against " + to_string(b));
      return TypeClass::Bool;
    }
    case ExprKind::Eq:
    case ExprKind::Ne: {
      TypeClass a = infer_type(e->args[0], env);
      TypeClass b = infer_type(e->args[1], env);
      if (!class_compatible(a, b))
        diag(std::string("cannot compare ") + to_string(a) + " against " + to_string(b));
      return TypeClass::Bool;
    }
    case ExprKind::And:
    case ExprKind::Or:
      expect(e->args[0], TypeClass::Bool, "boolean op");
      expect(e->args[1], TypeClass::Bool, "boolean op");
      return TypeClass::Bool;
    case ExprKind::Not:
      expect(e->args[0], TypeClass::Bool, "not");
      return TypeClass::Bool;
    case ExprKind::Min:
    case ExprKind::Max: {
      TypeClass a = infer_type(e->args[0], env);
      TypeClass b = infer_type(e->args[1], env);
      if (!class_compatible(a, b) || unify(a, b) == TypeClass::List ||
          unify(a, b) == TypeClass::Bool)
        diag(std::string("min/max over ") + to_string(a) + " and " + to_string(b));
      return unify(a, b);
    }
    case ExprKind::ListAppend: {
      expect(e->args[0], TypeClass::List, "list_append");
      TypeClass elem = infer_type(e->args[1], env);
      if (elem == TypeClass::List) diag("list_append of a list element");
      return TypeClass::List;
    }
    case ExprKind::ListContains: {
      expect(e->args[0], TypeClass::List, "list_contains");
      infer_type(e->args[1], env);
      return TypeClass::Bool;
    }
    case ExprKind::ListLen:
      expect(e->args[0], TypeClass::List, "list_len");
      return TypeClass::Numeric;
    case ExprKind::IfNull: {
      TypeClass a = infer_type(e->args[0], env);
      TypeClass b = infer_type(e->args[1], env);
      if (!class_compatible(a, b))
        diag(std::string("ifnull branches disagree: ") + to_string(a) + " vs " + to_string(b));
      return unify(a, b);
    }
    case ExprKind::Case: {
      TypeClass result = TypeClass::Any;
      for (const auto& br : e->branches) {
        expect(br.guard, TypeClass::Bool, "case guard");
        TypeClass v = infer_type(br.value, env);
        if (!class_compatible(result, v))
          diag("case branches disagree");
        result = unify(result, v);
      }
      TypeClass v = infer_type(e->else_value, env);
      if (!class_compatible(result, v)) diag("case else branch disagrees");
      return unify(result, v);
    }
    case ExprKind::ListMin:
    case ExprKind::ListMax:
      expect(e->args[0], TypeClass::List, "list reduction");
      return TypeClass::Any;  // element class is dynamic
    case ExprKind::ListAllDistinct:
    case ExprKind::ListStrictlyIncreasing:
      expect(e->args[0], TypeClass::List, "list reduction");
      return TypeClass::Bool;
  }
  return TypeClass::Any;
}

}  // namespace detail

// Empty result means the spec is runnable against this graph schema + table.
inline std::vector<std::string> validate_spec(const PathQuerySpec& q,
                                              const GraphSchema& g_schema,
                                              const TransitionTable& table) {
  std::vector<std::string> diags;
  const auto& agg = q.aggregate;

  std::set<std::string> keys;
  for (const auto& e : agg.schema.entries)
    if (!keys.insert(e.key).second)
      diags.push_back("schema: duplicate key '" + e.key + "'");

  auto check = [&](const Expr& expr, bool allow_edge, bool allow_state, std::string where,
                   std::optional<TypeClass> want = std::nullopt) {
    if (!expr) {
      diags.push_back(where + ": missing expression");
      return;
    }
    detail::TypeEnv env{&agg.schema, &g_schema, allow_edge, allow_state, where, &diags};
    TypeClass got = detail::infer_type(expr, env);
    if (want && !detail::class_compatible(got, *want))
      diags.push_back(where + ": expected " + to_string(*want) + ", got " + to_string(got));
  };

  for (const auto& e : agg.schema.entries) {
    auto it = agg.init.find(e.key);
    if (it == agg.init.end()) {
      diags.push_back("init: missing expression for key '" + e.key + "'");
      continue;
    }
    check(it->second, /*edge=*/false, /*state=*/false, "init." + e.key,
          type_class_of(e.kind));
  }
  for (const auto& [key, expr] : agg.init)
    if (agg.schema.index_of(key) < 0)
      diags.push_back("init: expression for undeclared key '" + key + "'");

  auto transition_name = [](int f, int t) {
    return std::to_string(f) + "->" + std::to_string(t);
  };

  if (agg.update.is_factorized()) {
    for (const auto& [key, expr] : *agg.update.factorized) {
      if (agg.schema.index_of(key) < 0)
        diags.push_back("update: undeclared key '" + key + "'");
      else
        check(expr, true, true, "update." + key,
              type_class_of(agg.schema.entries[agg.schema.index_of(key)].kind));
    }
  } else {
    for (const auto& row : table.rows)
      if (!agg.update.keyed.count({row.from_state, row.to_state}))
        diags.push_back("update: no entry for transition " +
                        transition_name(row.from_state, row.to_state));
    for (const auto& [key_pair, umap] : agg.update.keyed)
      for (const auto& [key, expr] : umap) {
        if (agg.schema.index_of(key) < 0)
          diags.push_back("update: undeclared key '" + key + "'");
        else
          check(expr, true, true,
                "update[" + transition_name(key_pair.first, key_pair.second) + "]." + key,
                type_class_of(agg.schema.entries[agg.schema.index_of(key)].kind));
      }
  }

  if (agg.viable.is_factorized()) {
    check(*agg.viable.factorized, true, true, "viable", TypeClass::Bool);
  } else {
    for (const auto& row : table.rows) {
      auto it = agg.viable.keyed.find({row.from_state, row.to_state});
      if (it == agg.viable.keyed.end())
        diags.push_back("viable: no entry for transition " +
                        transition_name(row.from_state, row.to_state));
      else
        check(it->second, true, true,
              "viable[" + transition_name(row.from_state, row.to_state) + "]", TypeClass::Bool);
    }
  }

  for (const auto& [key, expr] : agg.finalize)
    check(expr, /*edge=*/false, /*state=*/false, "finalize." + key);
  check(agg.viable_final, /*edge=*/false, /*state=*/false, "viable_final", TypeClass::Bool);

  return diags;
}

// -- composition ---------------------------------------------------------------

namespace detail {

inline std::string uncollide(const std::string& key, const std::set<std::string>& taken) {
  std::string k = key;
  while (taken.count(k)) k += "_2";
  return k;
}

}  // namespace detail

// Conjunction of two aggregates over the same transition table. Colliding
// dictionary keys of `b` get a `_2` suffix and its DictRefs are rewritten.
inline SelectiveAggregateSpec compose(const SelectiveAggregateSpec& a,
                                      const SelectiveAggregateSpec& b) {
  SelectiveAggregateSpec out;
  out.schema = a.schema;

  std::set<std::string> taken;
  for (const auto& e : a.schema.entries) taken.insert(e.key);
  std::map<std::string, std::string> renames;
  for (const auto& e : b.schema.entries) {
    std::string k = detail::uncollide(e.key, taken);
    if (k != e.key) renames[e.key] = k;
    taken.insert(k);
    out.schema.entries.push_back({k, e.kind});
  }

  auto renamed_key = [&](const std::string& k) {
    auto it = renames.find(k);
    return it == renames.end() ? k : it->second;
  };
  auto rewrite = [&](const Expr& e) { return rewrite_dict_refs(e, renames); };

  out.init = a.init;
  for (const auto& [k, e] : b.init) out.init[renamed_key(k)] = rewrite(e);

  auto merge_update = [&](const UpdateMap* ua, const UpdateMap* ub) {
    UpdateMap m;
    if (ua) m = *ua;
    if (ub)
      for (const auto& [k, e] : *ub) m[renamed_key(k)] = rewrite(e);
    return m;
  };
  if (a.update.is_factorized() && b.update.is_factorized()) {
    out.update.factorized = merge_update(&*a.update.factorized, &*b.update.factorized);
  } else {
    std::set<std::pair<int, int>> transitions;
    for (const auto& [k, v] : a.update.keyed) transitions.insert(k);
    for (const auto& [k, v] : b.update.keyed) transitions.insert(k);
    for (const auto& t : transitions)
      out.update.keyed[t] = merge_update(a.update.find(t.first, t.second),
                                         b.update.find(t.first, t.second));
  }

  auto conj = [&](const Expr* ea, const Expr* eb) -> Expr {
    Expr left = ea ? *ea : ex::cbool(true);
    Expr right = eb ? rewrite(*eb) : ex::cbool(true);
    if (ex::is_const_true(left)) return right;
    if (ex::is_const_true(right)) return left;
    return ex::logical_and(left, right);
  };
  if (a.viable.is_factorized() && b.viable.is_factorized()) {
    out.viable.factorized = conj(&*a.viable.factorized, &*b.viable.factorized);
  } else {
    std::set<std::pair<int, int>> transitions;
    for (const auto& [k, v] : a.viable.keyed) transitions.insert(k);
    for (const auto& [k, v] : b.viable.keyed) transitions.insert(k);
    for (const auto& t : transitions)
      out.viable.keyed[t] =
          conj(a.viable.find(t.first, t.second), b.viable.find(t.first, t.second));
  }

  auto fin_a = a.effective_finalize();
  auto fin_b = b.effective_finalize();
  std::set<std::string> fin_taken;
  for (const auto& [k, e] : fin_a) {
    out.finalize.emplace_back(k, e);
    fin_taken.insert(k);
  }
  for (const auto& [k, e] : fin_b) {
    std::string key = detail::uncollide(renamed_key(k), fin_taken);
    fin_taken.insert(key);
    out.finalize.emplace_back(key, rewrite(e));
  }

  out.viable_final = conj(&a.viable_final, &b.viable_final);
  return out;
}

// The no-early-filtering construction: collect one list per property, accept
// every step, and check phi on the complete path. "id" and "label" name the
// edge id and label rather than property columns.
inline SelectiveAggregateSpec default_construction(Expr phi,
                                                   const std::vector<std::string>& collected_props) {
  SelectiveAggregateSpec out;
  UpdateMap update;
  for (const auto& prop : collected_props) {
    out.schema.entries.push_back({prop, DictKind::List});
    out.init[prop] = ex::empty_list();
    Expr source;
    if (prop == "id")
      source = ex::eid();
    else if (prop == "label")
      source = ex::elabel();
    else
      source = ex::eprop(prop);
    update[prop] = ex::list_append(ex::dict(prop), std::move(source));
  }
  out.update.factorized = std::move(update);
  out.viable.factorized = ex::cbool(true);
  out.viable_final = std::move(phi);
  return out;
}

}  // namespace recap
