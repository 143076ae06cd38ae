#pragma once
// In-memory immutable property graph. Edges come from a CSV file with a
// declared column schema; vertices are synthesized from the src/dst ids.
// After load the graph never changes, so it is safe to share across threads.

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recap/value.hpp"

namespace recap {

enum class PropKind { Int, Float, String, Timestamp };

inline const char* to_string(PropKind k) {
  switch (k) {
    case PropKind::Int: return "int";
    case PropKind::Float: return "float";
    case PropKind::String: return "string";
    case PropKind::Timestamp: return "timestamp";
  }
  return "?";
}

inline std::optional<PropKind> prop_kind_from_string(std::string_view s) {
  if (s == "int") return PropKind::Int;
  if (s == "float") return PropKind::Float;
  if (s == "string") return PropKind::String;
  if (s == "timestamp") return PropKind::Timestamp;
  return std::nullopt;
}

// Column-name -> type declaration for the edge CSV's property columns.
struct GraphSchema {
  std::map<std::string, PropKind> properties;

  std::optional<PropKind> find(const std::string& key) const {
    auto it = properties.find(key);
    if (it == properties.end()) return std::nullopt;
    return it->second;
  }

  static GraphSchema from_json(const nlohmann::json& j) {
    GraphSchema s;
    if (!j.is_object() || !j.contains("properties") || !j["properties"].is_object())
      throw std::runtime_error("graph schema: expected {\"properties\": {...}}");
    for (const auto& [key, val] : j["properties"].items()) {
      if (!val.is_string())
        throw std::runtime_error("graph schema: type of '" + key + "' must be a string");
      auto kind = prop_kind_from_string(val.get<std::string>());
      if (!kind)
        throw std::runtime_error("graph schema: unknown type '" + val.get<std::string>() +
                                 "' for column '" + key + "'");
      s.properties.emplace(key, *kind);
    }
    return s;
  }

  static GraphSchema from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schema file: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
  }
};

struct Vertex {
  std::string id;
  std::string label;  // empty when synthesized from the edge list
  std::map<std::string, Value> properties;
};

struct Edge {
  std::string id;
  std::string src;
  std::string dst;
  std::string label;
  std::map<std::string, Value> properties;
};

// get_property: sigma is a partial function, absent keys yield null.
inline Value get_property(const Edge& e, const std::string& key) {
  auto it = e.properties.find(key);
  if (it == e.properties.end()) return Value::null();
  return it->second;
}

struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class PropertyGraph {
 public:
  PropertyGraph() = default;
  // out_index_ points into edges_; map nodes survive moves but not copies.
  PropertyGraph(const PropertyGraph&) = delete;
  PropertyGraph& operator=(const PropertyGraph&) = delete;
  PropertyGraph(PropertyGraph&&) = default;
  PropertyGraph& operator=(PropertyGraph&&) = default;

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::map<std::string, Vertex>& vertices() const { return vertices_; }
  const std::map<std::string, Edge>& edges() const { return edges_; }

  bool has_vertex(const std::string& id) const { return vertices_.count(id) > 0; }

  const Edge& edge(const std::string& id) const {
    auto it = edges_.find(id);
    if (it == edges_.end()) throw std::out_of_range("no such edge: " + id);
    return it->second;
  }

  // Outgoing edges of v in edge-id order; empty for unknown v.
  const std::vector<const Edge*>& out_edges(const std::string& v) const {
    auto it = out_index_.find(v);
    if (it == out_index_.end()) {
      static const std::vector<const Edge*> kEmpty;
      return kEmpty;
    }
    return it->second;
  }

  friend PropertyGraph load_graph(const std::string&, const GraphSchema&);
  friend class GraphBuilder;

 private:
  std::map<std::string, Vertex> vertices_;
  std::map<std::string, Edge> edges_;
  std::map<std::string, std::vector<const Edge*>> out_index_;

  void freeze() {
    out_index_.clear();
    for (const auto& [id, e] : edges_) out_index_[e.src].push_back(&e);
    // edges_ iterates in id order, so each adjacency list is already sorted
    for (const auto& [id, e] : edges_) {
      if (!vertices_.count(e.src)) vertices_.emplace(e.src, Vertex{e.src, "", {}});
      if (!vertices_.count(e.dst)) vertices_.emplace(e.dst, Vertex{e.dst, "", {}});
    }
  }
};

// Assembles a graph from in-memory edges (tests, generators). The CSV loader
// goes through here as well.
class GraphBuilder {
 public:
  GraphBuilder& add_edge(Edge e) {
    if (g_.edges_.count(e.id)) throw LoadError("duplicate edge id: " + e.id);
    g_.edges_.emplace(e.id, std::move(e));
    return *this;
  }
  GraphBuilder& add_vertex(Vertex v) {
    g_.vertices_.insert_or_assign(v.id, std::move(v));
    return *this;
  }
  PropertyGraph build() {
    g_.freeze();
    return std::move(g_);
  }

 private:
  PropertyGraph g_;
};

namespace detail {

// Minimal CSV: comma separated, optional RFC-4180 double quotes, CRLF tolerant.
inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted)
    throw LoadError("line " + std::to_string(line_no) + ": unterminated quote");
  cells.push_back(std::move(cur));
  return cells;
}

inline Value parse_property(const std::string& cell, PropKind kind, const std::string& col,
                            std::size_t line_no) {
  auto fail = [&](const char* what) -> LoadError {
    return LoadError("line " + std::to_string(line_no) + ": column '" + col + "': " + what +
                     " ('" + cell + "')");
  };
  switch (kind) {
    case PropKind::Int:
    case PropKind::Timestamp: {
      std::size_t used = 0;
      std::int64_t v = 0;
      try {
        v = std::stoll(cell, &used);
      } catch (const std::exception&) {
        throw fail("not an integer");
      }
      if (used != cell.size()) throw fail("not an integer");
      if (kind == PropKind::Timestamp) {
        if (v < 0) throw fail("timestamp must be non-negative");
        return Value::timestamp(v);
      }
      return Value::integer(v);
    }
    case PropKind::Float: {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw fail("not a number");
      }
      if (used != cell.size()) throw fail("not a number");
      return Value::real(v);
    }
    case PropKind::String:
      return Value::str(cell);
  }
  throw fail("unhandled kind");
}

}  // namespace detail

// Loads the edge CSV (header: id,src,dst,label,<prop>...) and synthesizes
// label-less vertices from the union of src/dst ids.
inline PropertyGraph load_graph(const std::string& edge_csv_path, const GraphSchema& schema) {
  std::ifstream in(edge_csv_path);
  if (!in) throw LoadError("cannot open edge file: " + edge_csv_path);

  std::string line;
  std::size_t line_no = 0;

  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  };

  if (!next_line()) throw LoadError("empty file: " + edge_csv_path);
  auto header = detail::split_csv_line(line, line_no);
  static const char* kFixed[] = {"id", "src", "dst", "label"};
  if (header.size() < 4)
    throw LoadError("line 1: header must start with id,src,dst,label");
  for (std::size_t i = 0; i < 4; ++i)
    if (header[i] != kFixed[i])
      throw LoadError("line 1: header column " + std::to_string(i + 1) + " must be '" +
                      kFixed[i] + "', got '" + header[i] + "'");
  std::vector<std::pair<std::string, PropKind>> prop_cols;
  for (std::size_t i = 4; i < header.size(); ++i) {
    auto kind = schema.find(header[i]);
    if (!kind)
      throw LoadError("line 1: column '" + header[i] + "' is not declared in the schema");
    prop_cols.emplace_back(header[i], *kind);
  }

  PropertyGraph g;
  while (next_line()) {
    if (line.empty()) continue;
    auto cells = detail::split_csv_line(line, line_no);
    if (cells.size() != header.size())
      throw LoadError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " cells, got " +
                      std::to_string(cells.size()));
    Edge e;
    e.id = cells[0];
    e.src = cells[1];
    e.dst = cells[2];
    e.label = cells[3];
    if (e.id.empty())
      throw LoadError("line " + std::to_string(line_no) + ": missing edge id");
    if (e.src.empty())
      throw LoadError("line " + std::to_string(line_no) + ": missing src");
    if (e.dst.empty())
      throw LoadError("line " + std::to_string(line_no) + ": missing dst");
    if (g.edges_.count(e.id))
      throw LoadError("line " + std::to_string(line_no) + ": duplicate edge id '" + e.id + "'");
    for (std::size_t i = 0; i < prop_cols.size(); ++i) {
      const auto& cell = cells[4 + i];
      if (cell.empty()) continue;  // absent property
      e.properties.emplace(prop_cols[i].first,
                           detail::parse_property(cell, prop_cols[i].second,
                                                  prop_cols[i].first, line_no));
    }
    g.edges_.emplace(e.id, std::move(e));
  }

  g.freeze();
  return g;
}

}  // namespace recap
