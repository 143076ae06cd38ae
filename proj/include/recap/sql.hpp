#pragma once
// Recursive-CTE compilation of a path query, in two forms:
//  - standard: the plain skeleton with the five aggregate functions left as
//    placeholder call sites and the dictionary as one JSON column
//  - optimized: dictionary flattened to one column per key and every
//    aggregate function inlined; per-transition viability becomes a CASE
//    over (P.q, T.to_state), factorized aggregates need no CASE at all
// Dialects: duckdb (native list types) and generic (SQLite-compatible,
// lists encoded as JSON text).

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "recap/aggregate.hpp"

namespace recap {

enum class SqlDialect { Generic, DuckDb };

inline const char* to_string(SqlDialect d) {
  return d == SqlDialect::DuckDb ? "duckdb" : "generic";
}

struct SqlArtifact {
  std::vector<std::string> ddl;
  std::string query;
  SqlDialect dialect = SqlDialect::Generic;
};

struct CompileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace sqlgen {

inline std::string quote_ident(const std::string& name) {
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += '"';
  return out;
}

inline std::string quote_string(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "''";
    out += c;
  }
  out += '\'';
  return out;
}

inline std::string sql_type(DictKind k) {
  switch (k) {
    case DictKind::Int: return "BIGINT";
    case DictKind::Float: return "DOUBLE";
    case DictKind::String: return "VARCHAR";
    case DictKind::Timestamp: return "BIGINT";  // epoch seconds
    case DictKind::Bool: return "BOOLEAN";
    case DictKind::List: return "VARCHAR";      // only used for typed NULLs
  }
  return "VARCHAR";
}

inline std::string sql_type(PropKind k) {
  switch (k) {
    case PropKind::Int: return "BIGINT";
    case PropKind::Float: return "DOUBLE";
    case PropKind::String: return "VARCHAR";
    case PropKind::Timestamp: return "BIGINT";  // epoch seconds
  }
  return "VARCHAR";
}

inline std::string float_literal(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    std::ostringstream os;
    os << static_cast<long long>(v) << ".0";
    return os.str();
  }
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Where an expression is rendered decides how dictionary keys resolve.
enum class Placement { Anchor, Recursive, Outer };

struct Renderer {
  SqlDialect dialect;
  Placement placement;

  std::string dict_ref(const std::string& key) const {
    switch (placement) {
      case Placement::Anchor:
        throw CompileError("dictionary reference in init expression: " + key);
      case Placement::Recursive: return "P." + quote_ident(key);
      case Placement::Outer: return quote_ident(key);
    }
    return {};
  }

  std::string constant(const Value& v) const {
    switch (v.kind()) {
      case ValueKind::Null: return "NULL";
      case ValueKind::Bool: return v.as_bool() ? "TRUE" : "FALSE";
      case ValueKind::Int: return std::to_string(v.as_int());
      case ValueKind::Float: return float_literal(v.as_float());
      case ValueKind::String: return quote_string(v.as_string());
      case ValueKind::Timestamp: return std::to_string(v.as_timestamp().seconds);
      case ValueKind::List:
        if (v.as_list().empty())
          return dialect == SqlDialect::DuckDb ? "[]" : "json_array()";
        throw CompileError("non-empty list constants are not supported in SQL");
    }
    return "NULL";
  }

  std::string render(const Expr& e) const {
    auto bin = [&](const char* op) {
      return "(" + render(e->args[0]) + " " + op + " " + render(e->args[1]) + ")";
    };
    switch (e->kind) {
      case ExprKind::Const: return constant(e->constant);
      case ExprKind::DictRef: return dict_ref(e->key);
      case ExprKind::EdgeProp: return "E." + quote_ident(e->key);
      case ExprKind::EdgeId: return "E." + quote_ident("id");
      case ExprKind::EdgeLabel: return "E.label";
      case ExprKind::FromState: return "P.q";
      case ExprKind::ToState: return "T.to_state";
      case ExprKind::Add: return bin("+");
      case ExprKind::Sub: return bin("-");
      case ExprKind::Mul: return bin("*");
      case ExprKind::Div: return bin("/");
      case ExprKind::Lt: return bin("<");
      case ExprKind::Le: return bin("<=");
      case ExprKind::Eq: return bin("=");
      case ExprKind::Ne: return bin("<>");
      case ExprKind::Ge: return bin(">=");
      case ExprKind::Gt: return bin(">");
      case ExprKind::And: return bin("AND");
      case ExprKind::Or: return bin("OR");
      case ExprKind::Not: return "(NOT " + render(e->args[0]) + ")";
      case ExprKind::Min:
        return (dialect == SqlDialect::DuckDb ? "least(" : "min(") + render(e->args[0]) +
               ", " + render(e->args[1]) + ")";
      case ExprKind::Max:
        return (dialect == SqlDialect::DuckDb ? "greatest(" : "max(") + render(e->args[0]) +
               ", " + render(e->args[1]) + ")";
      case ExprKind::ListAppend:
        if (dialect == SqlDialect::DuckDb)
          return "list_append(" + render(e->args[0]) + ", " + render(e->args[1]) + ")";
        return "json_insert(" + render(e->args[0]) + ", '$[#]', " + render(e->args[1]) + ")";
      case ExprKind::ListContains:
        if (dialect == SqlDialect::DuckDb)
          return "list_contains(" + render(e->args[0]) + ", " + render(e->args[1]) + ")";
        return "EXISTS (SELECT 1 FROM json_each(" + render(e->args[0]) +
               ") WHERE value = " + render(e->args[1]) + ")";
      case ExprKind::ListLen:
        if (dialect == SqlDialect::DuckDb) return "len(" + render(e->args[0]) + ")";
        return "json_array_length(" + render(e->args[0]) + ")";
      case ExprKind::IfNull:
        return "COALESCE(" + render(e->args[0]) + ", " + render(e->args[1]) + ")";
      case ExprKind::Case: {
        std::string out = "CASE";
        for (const auto& br : e->branches)
          out += " WHEN " + render(br.guard) + " THEN " + render(br.value);
        out += " ELSE " + render(e->else_value) + " END";
        return out;
      }
      case ExprKind::ListMin:
        if (dialect == SqlDialect::DuckDb) return "list_min(" + render(e->args[0]) + ")";
        throw CompileError("generic dialect cannot render list_min");
      case ExprKind::ListMax:
        if (dialect == SqlDialect::DuckDb) return "list_max(" + render(e->args[0]) + ")";
        throw CompileError("generic dialect cannot render list_max");
      case ExprKind::ListAllDistinct: {
        if (dialect == SqlDialect::DuckDb) {
          std::string l = render(e->args[0]);
          return "(len(list_distinct(" + l + ")) = len(" + l + "))";
        }
        throw CompileError("generic dialect cannot render list_all_distinct");
      }
      case ExprKind::ListStrictlyIncreasing: {
        if (dialect == SqlDialect::DuckDb) {
          std::string l = render(e->args[0]);
          return "((" + l + " = list_sort(" + l + ")) AND (len(list_distinct(" + l +
                 ")) = len(" + l + ")))";
        }
        throw CompileError("generic dialect cannot render list_strictly_increasing");
      }
    }
    throw CompileError("unhandled expression kind");
  }
};

inline std::string accepting_set(const TransitionTable& t) {
  std::string out = "(";
  bool first = true;
  for (int a : t.accepting) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(a);
  }
  out += ")";
  return out;
}

inline std::string anchor_from(const std::vector<std::string>& starts) {
  // single start: plain scalar select, no FROM; several: a values-style union
  if (starts.size() <= 1) return {};
  std::string from = "  FROM (";
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (i) from += " UNION ALL ";
    from += "SELECT " + quote_string(starts[i]) + " AS v";
  }
  from += ") AS S\n";
  return from;
}

inline std::string anchor_vertex(const std::vector<std::string>& starts) {
  if (starts.empty()) throw CompileError("query has no start vertices");
  if (starts.size() == 1) return quote_string(starts[0]);
  return "S.v";
}

}  // namespace sqlgen

// Transitions table DDL plus the composite (from_state, label) index.
inline std::vector<std::string> emit_transitions_ddl(const TransitionTable& t) {
  std::vector<std::string> out;
  out.push_back(
      "CREATE TABLE Transitions (from_state INTEGER, to_state INTEGER, label VARCHAR);");
  if (!t.rows.empty()) {
    std::string ins = "INSERT INTO Transitions (from_state, to_state, label) VALUES\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const auto& r = t.rows[i];
      ins += "  (" + std::to_string(r.from_state) + ", " + std::to_string(r.to_state) + ", " +
             sqlgen::quote_string(r.label) + ")";
      ins += (i + 1 < t.rows.size()) ? ",\n" : ";";
    }
    out.push_back(std::move(ins));
  }
  out.push_back(
      "CREATE INDEX idx_transitions_from_label ON Transitions (from_state, label);");
  return out;
}

// Edges table DDL matching the graph schema plus the src index.
inline std::vector<std::string> emit_edges_index_ddl(const GraphSchema& schema,
                                                     SqlDialect dialect) {
  (void)dialect;  // both dialects share the scalar type mapping
  std::string ddl = "CREATE TABLE Edges (id VARCHAR, src VARCHAR, dst VARCHAR, label VARCHAR";
  for (const auto& [name, kind] : schema.properties)
    ddl += ", " + sqlgen::quote_ident(name) + " " + sqlgen::sql_type(kind);
  ddl += ");";
  std::vector<std::string> out;
  out.push_back(std::move(ddl));
  out.push_back("CREATE INDEX idx_edges_src ON Edges (src);");
  return out;
}

// Listing-4 skeleton: aggregate functions stay as placeholder call sites for
// the target system to bind; D is a single JSON column. Not executable as-is.
inline SqlArtifact emit_standard_sql(const PathQuerySpec& q, const TransitionTable& table,
                                     SqlDialect dialect) {
  using namespace sqlgen;
  std::ostringstream os;
  os << "WITH RECURSIVE Paths AS (\n"
     << "  SELECT\n"
     << "    " << anchor_vertex(q.start_vertices) << " AS v,\n"
     << "    " << table.q0 << " AS q,\n"
     << "    init_d() AS D,\n"
     << "    0 AS path_length\n"
     << anchor_from(q.start_vertices) << "  UNION ALL\n"
     << "  SELECT\n"
     << "    E.dst AS v,\n"
     << "    T.to_state AS q,\n"
     << "    update_d(P.D, P.q, T.to_state, E.*) AS D,\n"
     << "    P.path_length + 1 AS path_length\n"
     << "  FROM Paths P\n"
     << "  JOIN Edges E ON P.v = E.src\n"
     << "  JOIN Transitions T ON P.q = T.from_state\n"
     << "  WHERE T.label = E.label\n"
     << "    AND is_viable_d(P.D, P.q, T.to_state, E.*)\n"
     << "    AND P.path_length < " << q.max_length << "\n"
     << ")\n"
     << "SELECT v, finalize_d(D) AS D\n"
     << "FROM Paths\n"
     << "WHERE q IN " << accepting_set(table) << " AND is_viable_d_final(D)\n";
  SqlArtifact art;
  art.query = os.str();
  art.dialect = dialect;
  return art;
}

// Flattened and fully inlined form; contains none of the five function names.
inline SqlArtifact emit_optimized_sql(const PathQuerySpec& q, const TransitionTable& table,
                                      SqlDialect dialect) {
  using namespace sqlgen;
  const auto& agg = q.aggregate;
  Renderer anchor{dialect, Placement::Anchor};
  Renderer rec{dialect, Placement::Recursive};
  Renderer outer{dialect, Placement::Outer};

  std::ostringstream os;
  os << "WITH RECURSIVE Paths AS (\n  SELECT\n";
  os << "    " << anchor_vertex(q.start_vertices) << " AS v,\n";
  os << "    " << table.q0 << " AS q,\n";
  for (const auto& entry : agg.schema.entries) {
    const Expr& init = agg.init.at(entry.key);
    std::string rendered;
    if (init->kind == ExprKind::Const && init->constant.is_null())
      rendered = "CAST(NULL AS " + sql_type(entry.kind) + ")";
    else
      rendered = anchor.render(init);
    os << "    " << rendered << " AS " << quote_ident(entry.key) << ",\n";
  }
  os << "    0 AS path_length\n";
  os << anchor_from(q.start_vertices);
  os << "  UNION ALL\n  SELECT\n";
  os << "    E.dst AS v,\n";
  os << "    T.to_state AS q,\n";

  for (const auto& entry : agg.schema.entries) {
    std::string carry = "P." + quote_ident(entry.key);
    std::string rendered;
    if (agg.update.is_factorized()) {
      auto it = agg.update.factorized->find(entry.key);
      rendered = it == agg.update.factorized->end() ? carry : rec.render(it->second);
    } else {
      // one arm per transition row; identical arms collapse to a bare expression
      std::vector<std::string> arms;
      bool all_same = true;
      for (const auto& row : table.rows) {
        const UpdateMap* m = agg.update.find(row.from_state, row.to_state);
        auto it = m->find(entry.key);
        std::string arm = (it == m->end()) ? carry : rec.render(it->second);
        if (!arms.empty() && arm != arms.front()) all_same = false;
        arms.push_back(std::move(arm));
      }
      if (all_same && !arms.empty()) {
        rendered = arms.front();
      } else {
        rendered = "CASE";
        for (std::size_t i = 0; i < table.rows.size(); ++i)
          rendered += " WHEN P.q = " + std::to_string(table.rows[i].from_state) +
                      " AND T.to_state = " + std::to_string(table.rows[i].to_state) + " THEN " +
                      arms[i];
        rendered += " ELSE " + carry + " END";
      }
    }
    os << "    " << rendered << " AS " << quote_ident(entry.key) << ",\n";
  }
  os << "    P.path_length + 1 AS path_length\n";
  os << "  FROM Paths P, Edges E, Transitions T\n";
  os << "  WHERE P.v = E.src AND T.label = E.label AND P.q = T.from_state\n";
  os << "    AND P.path_length < " << q.max_length << "\n";

  // viability: factorized collapses to a bare predicate, const-true vanishes
  if (agg.viable.is_factorized()) {
    if (!ex::is_const_true(*agg.viable.factorized))
      os << "    AND " << rec.render(*agg.viable.factorized) << "\n";
  } else {
    bool all_true = true;
    for (const auto& row : table.rows) {
      const Expr* v = agg.viable.find(row.from_state, row.to_state);
      if (!ex::is_const_true(*v)) all_true = false;
    }
    if (!all_true) {
      os << "    AND CASE\n";
      for (const auto& row : table.rows) {
        const Expr* v = agg.viable.find(row.from_state, row.to_state);
        os << "      WHEN P.q = " << row.from_state << " AND T.to_state = " << row.to_state
           << " THEN " << rec.render(*v) << "\n";
      }
      os << "      ELSE FALSE\n    END = TRUE\n";
    }
  }
  os << ")\n";

  os << "SELECT v";
  for (const auto& [key, expr] : agg.effective_finalize()) {
    os << ", ";
    if (expr->kind == ExprKind::DictRef && expr->key == key)
      os << quote_ident(key);
    else
      os << outer.render(expr) << " AS " << quote_ident(key);
  }
  os << "\nFROM Paths\nWHERE q IN " << accepting_set(table) << " AND ";
  if (ex::is_const_true(agg.viable_final))
    os << "TRUE";
  else
    os << outer.render(agg.viable_final);
  os << "\n";

  SqlArtifact art;
  art.query = os.str();
  art.dialect = dialect;
  return art;
}

}  // namespace recap
