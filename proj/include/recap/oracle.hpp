#pragma once
// Brute-force reference: exhaustive walk enumeration, direct recursive
// matching of the regex AST, and aggregate replay over complete walks. The
// primary mode deliberately ignores per-step viability so that equivalence
// tests against the engine exercise pruning safety instead of assuming it.
// Exponential by design; callers bound |E| and the length limit.

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "recap/aggregate.hpp"
#include "recap/engine.hpp"
#include "recap/graph.hpp"

namespace recap {

struct Walk {
  std::string start;
  std::vector<std::string> edge_ids;
};

// Every walk of length 0..max_len from the given starts, ordered by start id
// then lexicographic edge-id sequence.
inline std::vector<Walk> enumerate_walks(const PropertyGraph& g,
                                         std::span<const std::string> starts, int max_len) {
  std::vector<std::string> sorted(starts.begin(), starts.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Walk> out;
  std::vector<std::string> current;

  auto dfs = [&](auto&& self, const std::string& start, const std::string& at,
                 int remaining) -> void {
    out.push_back({start, current});
    if (remaining == 0) return;
    for (const Edge* e : g.out_edges(at)) {  // edge-id order = lexicographic walks
      current.push_back(e->id);
      self(self, start, e->dst, remaining - 1);
      current.pop_back();
    }
  };
  for (const auto& s : sorted) dfs(dfs, s, s, max_len);
  return out;
}

// Direct recursive-descent matcher over the AST; the language oracle the NFA
// pipeline is tested against.
inline bool ast_matches(const RegexAst& ast, std::span<const std::string> word) {
  switch (ast->kind) {
    case RegexKind::Label:
      return word.size() == 1 && word[0] == ast->label;
    case RegexKind::Empty:
      return word.empty();
    case RegexKind::Concat: {
      for (std::size_t k = 0; k <= word.size(); ++k)
        if (ast_matches(ast->left, word.subspan(0, k)) &&
            ast_matches(ast->right, word.subspan(k)))
          return true;
      return false;
    }
    case RegexKind::Alt:
      return ast_matches(ast->left, word) || ast_matches(ast->right, word);
    case RegexKind::Opt:
      return word.empty() || ast_matches(ast->left, word);
    case RegexKind::Star: {
      if (word.empty()) return true;
      // first block non-empty to guarantee progress
      for (std::size_t k = 1; k <= word.size(); ++k)
        if (ast_matches(ast->left, word.subspan(0, k)) &&
            ast_matches(ast, word.subspan(k)))
          return true;
      return false;
    }
    case RegexKind::Plus: {
      // one block, or a block followed by another Plus
      for (std::size_t k = 1; k <= word.size(); ++k)
        if (ast_matches(ast->left, word.subspan(0, k)) &&
            (k == word.size() || ast_matches(ast, word.subspan(k))))
          return true;
      return false;
    }
  }
  return false;
}

// All accepting state sequences of the table on this word. A sequence has
// word.size()+1 states starting at q0.
inline std::vector<std::vector<int>> accepting_runs(const TransitionTable& t,
                                                    std::span<const std::string> word) {
  std::vector<std::vector<int>> runs;
  if (word.empty()) {
    if (t.accepts_empty) runs.push_back({t.q0});
    return runs;
  }
  std::vector<int> states{t.q0};
  auto dfs = [&](auto&& self, std::size_t i) -> void {
    if (i == word.size()) {
      if (t.accepting.count(states.back())) runs.push_back(states);
      return;
    }
    for (const auto& row : t.rows) {
      if (row.from_state != states.back() || row.label != word[i]) continue;
      states.push_back(row.to_state);
      self(self, i + 1);
      states.pop_back();
    }
  };
  dfs(dfs, 0);
  return runs;
}

inline long long run_count(const TransitionTable& t, std::span<const std::string> word) {
  return static_cast<long long>(accepting_runs(t, word).size());
}

struct OracleOptions {
  // false: primary mode, phi replayed over complete walks only (tests that
  // engine pruning is safe). true: per-step viability also applied, making
  // bag counts comparable with the engine's pruned expansion.
  bool apply_step_viability = false;
};

struct OracleResultRow {
  Walk walk;
  long long multiplicity;  // accepting NFA runs that pass phi
};

inline std::vector<OracleResultRow> brute_force_evaluate(const PropertyGraph& g,
                                                         const PathQuerySpec& q,
                                                         const GraphSchema& schema,
                                                         const OracleOptions& opts = {}) {
  TransitionTable table = table_for_regex(q.regex);
  auto diags = validate_spec(q, schema, table);
  if (!diags.empty()) throw std::invalid_argument("oracle: invalid spec: " + diags.front());

  const auto& agg = q.aggregate;
  auto slots = agg.schema.slot_index();

  std::vector<Value> init;
  {
    EvalContext ctx;
    std::vector<Value> empty(agg.schema.entries.size());
    ctx.dict = &empty;
    ctx.slot_index = &slots;
    for (const auto& entry : agg.schema.entries)
      init.push_back(eval_expr(agg.init.at(entry.key), ctx));
  }

  auto replay = [&](const Walk& w, const std::vector<int>& run) -> bool {
    std::vector<Value> dict = init;
    for (std::size_t i = 0; i < w.edge_ids.size(); ++i) {
      const Edge& e = g.edge(w.edge_ids[i]);
      int from = run[i], to = run[i + 1];
      EvalContext ctx{&dict, &slots, &e, from, to};
      if (opts.apply_step_viability) {
        if (!eval_guard(*agg.viable.find(from, to), ctx)) return false;
      }
      std::vector<Value> next = dict;
      for (const auto& [key, expr] : *agg.update.find(from, to))
        next[slots.at(key)] = eval_expr(expr, ctx);
      dict = std::move(next);
    }
    EvalContext ctx{&dict, &slots, nullptr, run.back(), run.back()};
    return eval_guard(agg.viable_final, ctx);
  };

  std::vector<OracleResultRow> out;
  for (const auto& walk : enumerate_walks(g, q.start_vertices, q.max_length)) {
    std::vector<std::string> word;
    word.reserve(walk.edge_ids.size());
    for (const auto& id : walk.edge_ids) word.push_back(g.edge(id).label);
    long long count = 0;
    for (const auto& run : accepting_runs(table, word))
      if (replay(walk, run)) ++count;
    if (count > 0) out.push_back({walk, count});
  }
  return out;
}

}  // namespace recap
