#pragma once
// Thompson construction over the regex AST and epsilon elimination into the
// tabular transition relation the engine and the SQL compiler both consume.
// No determinization: the product construction runs the NFA directly.

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "recap/regex.hpp"

namespace recap {

struct Nfa {
  struct Transition {
    int from;
    std::optional<std::string> label;  // nullopt = epsilon
    int to;
  };
  int state_count = 0;
  int q0 = 0;
  std::set<int> accepting;
  std::vector<Transition> transitions;
};

// Each AST node contributes at most two fresh states.
inline Nfa build_nfa(const RegexAst& ast) {
  Nfa nfa;
  auto fresh = [&]() { return nfa.state_count++; };
  auto eps = [&](int a, int b) { nfa.transitions.push_back({a, std::nullopt, b}); };

  // Returns (start, accept) of the fragment for `node`.
  auto build = [&](auto&& self, const RegexAst& node) -> std::pair<int, int> {
    switch (node->kind) {
      case RegexKind::Label: {
        int s = fresh(), t = fresh();
        nfa.transitions.push_back({s, node->label, t});
        return {s, t};
      }
      case RegexKind::Empty: {
        int s = fresh(), t = fresh();
        eps(s, t);
        return {s, t};
      }
      case RegexKind::Concat: {
        auto [ls, lt] = self(self, node->left);
        auto [rs, rt] = self(self, node->right);
        eps(lt, rs);
        return {ls, rt};
      }
      case RegexKind::Alt: {
        int s = fresh(), t = fresh();
        auto [ls, lt] = self(self, node->left);
        auto [rs, rt] = self(self, node->right);
        eps(s, ls);
        eps(s, rs);
        eps(lt, t);
        eps(rt, t);
        return {s, t};
      }
      case RegexKind::Star: {
        int s = fresh(), t = fresh();
        auto [cs, ct] = self(self, node->left);
        eps(s, cs);
        eps(s, t);
        eps(ct, cs);
        eps(ct, t);
        return {s, t};
      }
      case RegexKind::Plus: {
        int s = fresh(), t = fresh();
        auto [cs, ct] = self(self, node->left);
        eps(s, cs);
        eps(ct, cs);
        eps(ct, t);
        return {s, t};
      }
      case RegexKind::Opt: {
        int s = fresh(), t = fresh();
        auto [cs, ct] = self(self, node->left);
        eps(s, cs);
        eps(s, t);
        eps(ct, t);
        return {s, t};
      }
    }
    throw std::logic_error("unhandled regex node");
  };

  auto [s, t] = build(build, ast);
  nfa.q0 = s;
  nfa.accepting = {t};
  return nfa;
}

// Epsilon-free tabular NFA. States are renumbered densely from 1 (q0 = 1) in
// BFS discovery order, which keeps emitted SQL stable across runs.
struct TransitionTable {
  struct Row {
    int from_state;
    int to_state;
    std::string label;
    friend auto operator<=>(const Row&, const Row&) = default;
  };
  std::vector<Row> rows;
  int q0 = 1;
  std::set<int> accepting;
  bool accepts_empty = false;

  int state_count() const {
    int m = q0;
    for (const auto& r : rows) m = std::max({m, r.from_state, r.to_state});
    for (int a : accepting) m = std::max(m, a);
    return m;
  }
};

inline TransitionTable eliminate_epsilon(const Nfa& nfa) {
  const int n = nfa.state_count;

  std::vector<std::vector<int>> eps_succ(n);
  // (from, label, to) grouped by from for closure expansion
  std::vector<std::vector<std::pair<std::string, int>>> labeled(n);
  for (const auto& t : nfa.transitions) {
    if (t.label)
      labeled[t.from].emplace_back(*t.label, t.to);
    else
      eps_succ[t.from].push_back(t.to);
  }

  auto closure_of = [&](int s) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{s}, out;
    seen[s] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      out.push_back(u);
      for (int v : eps_succ[u])
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  std::vector<std::vector<int>> closure(n);
  for (int s = 0; s < n; ++s) closure[s] = closure_of(s);

  auto closure_accepts = [&](int s) {
    for (int u : closure[s])
      if (nfa.accepting.count(u)) return true;
    return false;
  };

  // Rows of state s: every labeled transition reachable via epsilon from s.
  auto rows_of = [&](int s) {
    std::set<std::pair<std::string, int>> out;
    for (int u : closure[s])
      for (const auto& [lbl, to] : labeled[u]) out.emplace(lbl, to);
    return out;
  };

  // BFS from q0 over labeled reachability; assigns dense ids starting at 1.
  std::map<int, int> renumber;
  renumber[nfa.q0] = 1;
  std::queue<int> work;
  work.push(nfa.q0);
  TransitionTable table;
  table.q0 = 1;
  table.accepts_empty = closure_accepts(nfa.q0);
  std::vector<std::pair<int, std::set<std::pair<std::string, int>>>> discovered;
  while (!work.empty()) {
    int s = work.front();
    work.pop();
    auto rows = rows_of(s);
    for (const auto& [lbl, to] : rows) {
      if (!renumber.count(to)) {
        renumber[to] = static_cast<int>(renumber.size()) + 1;
        work.push(to);
      }
    }
    discovered.emplace_back(s, std::move(rows));
  }

  for (const auto& [s, rows] : discovered) {
    if (closure_accepts(s)) table.accepting.insert(renumber[s]);
    for (const auto& [lbl, to] : rows)
      table.rows.push_back({renumber[s], renumber[to], lbl});
  }
  std::sort(table.rows.begin(), table.rows.end());
  table.rows.erase(std::unique(table.rows.begin(), table.rows.end()), table.rows.end());
  return table;
}

inline TransitionTable table_for_regex(std::string_view regex) {
  return eliminate_epsilon(build_nfa(parse_regex(regex)));
}

inline bool table_accepts(const TransitionTable& t, std::span<const std::string> word) {
  if (word.empty()) return t.accepts_empty;
  std::set<int> frontier{t.q0};
  for (const auto& sym : word) {
    std::set<int> next;
    for (const auto& row : t.rows)
      if (row.label == sym && frontier.count(row.from_state)) next.insert(row.to_state);
    if (next.empty()) return false;
    frontier = std::move(next);
  }
  for (int s : frontier)
    if (t.accepting.count(s)) return true;
  return false;
}

// CSV rows plus the footer line used by `recap nfa`.
inline std::string format_table_csv(const TransitionTable& t) {
  std::ostringstream os;
  os << "from_state,to_state,label\n";
  for (const auto& r : t.rows)
    os << r.from_state << ',' << r.to_state << ',' << r.label << '\n';
  os << "q0=" << t.q0 << "; accepting={";
  bool first = true;
  for (int a : t.accepting) {
    if (!first) os << ',';
    first = false;
    os << a;
  }
  os << "}; accepts_empty=" << (t.accepts_empty ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace recap
