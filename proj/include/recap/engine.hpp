#pragma once
// Native evaluator: breadth-wise product-construction expansion with
// per-step viability pruning, mirroring the recursive CTE's iteration model
// so intermediate tuple counts are comparable with the SQL plan.

#include <atomic>
#include <exception>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "recap/aggregate.hpp"
#include "recap/graph.hpp"

namespace recap {

enum class EvalMode { CountOnly, Materialize, Trace };
enum class EmptyPathPolicy { RegexDriven, Exclude };

struct EngineOptions {
  EvalMode mode = EvalMode::Materialize;
  EmptyPathPolicy empty_paths = EmptyPathPolicy::RegexDriven;
  bool distinct_paths = false;  // dedupe by trace; requires Trace mode
  int threads = 1;
};

struct ResultRow {
  std::string v;  // last vertex
  std::vector<std::pair<std::string, Value>> output;  // finalized dictionary
  std::vector<std::string> trace;                     // edge ids (Trace mode)
};

struct EvalResult {
  std::vector<ResultRow> results;  // empty in CountOnly mode
  long long result_count = 0;
  long long intermediate_count = 0;           // all tuples incl. anchors
  std::vector<long long> per_depth_counts;    // frontier sizes, index = depth
  std::vector<std::vector<std::string>> pruned_traces;  // Trace mode only
};

namespace detail {

struct PathTuple {
  const std::string* v;  // vertex id owned by graph or start list
  int q;
  std::vector<Value> dict;
  std::vector<std::string> trace;
};

struct CompiledSpec {
  TransitionTable table;
  std::map<std::string, int> slots;
  // out-transitions grouped by (from_state, label)
  std::map<std::pair<int, std::string>, std::vector<int>> delta;
  const SelectiveAggregateSpec* agg;
  std::vector<std::pair<std::string, Expr>> finalize;
};

inline CompiledSpec compile_spec(const PathQuerySpec& q, const GraphSchema& schema) {
  CompiledSpec c;
  c.table = table_for_regex(q.regex);
  auto diags = validate_spec(q, schema, c.table);
  if (!diags.empty()) {
    std::string msg = "invalid query spec:";
    for (const auto& d : diags) msg += "\n  " + d;
    throw std::invalid_argument(msg);
  }
  c.slots = q.aggregate.schema.slot_index();
  for (const auto& row : c.table.rows)
    c.delta[{row.from_state, row.label}].push_back(row.to_state);
  c.agg = &q.aggregate;
  c.finalize = q.aggregate.effective_finalize();
  return c;
}

inline std::vector<Value> initial_dict(const CompiledSpec& c) {
  EvalContext ctx;
  std::vector<Value> dict(c.agg->schema.entries.size());
  ctx.dict = &dict;  // init is dict-free, but keep the context well-formed
  ctx.slot_index = &c.slots;
  std::vector<Value> out;
  out.reserve(c.agg->schema.entries.size());
  for (const auto& entry : c.agg->schema.entries)
    out.push_back(eval_expr(c.agg->init.at(entry.key), ctx));
  return out;
}

// Expansion of one tuple; appends to the caller's buffers.
struct StepOutput {
  std::vector<PathTuple> next;
  std::vector<std::vector<std::string>> pruned;
  long long generated = 0;
};

inline void expand_tuple(const PropertyGraph& g, const CompiledSpec& c, const PathTuple& p,
                         bool tracing, StepOutput& out) {
  for (const Edge* e : g.out_edges(*p.v)) {
    auto it = c.delta.find({p.q, e->label});
    if (it == c.delta.end()) continue;
    for (int to : it->second) {
      const Expr* viable = c.agg->viable.find(p.q, to);
      EvalContext ctx{&p.dict, &c.slots, e, p.q, to};
      bool ok;
      try {
        ok = eval_guard(*viable, ctx);
      } catch (const EvalError& err) {
        throw EvalError(std::string(err.what()) + " (viable at transition " +
                        std::to_string(p.q) + "->" + std::to_string(to) + ", edge " + e->id +
                        ")");
      }
      if (!ok) {
        if (tracing) {
          auto t = p.trace;
          t.push_back(e->id);
          out.pruned.push_back(std::move(t));
        }
        continue;
      }
      PathTuple next;
      next.v = &e->dst;
      next.q = to;
      next.dict = p.dict;
      const UpdateMap* updates = c.agg->update.find(p.q, to);
      try {
        for (const auto& [key, expr] : *updates)
          next.dict[c.slots.at(key)] = eval_expr(expr, ctx);
      } catch (const EvalError& err) {
        throw EvalError(std::string(err.what()) + " (update at transition " +
                        std::to_string(p.q) + "->" + std::to_string(to) + ", edge " + e->id +
                        ")");
      }
      if (tracing) {
        next.trace = p.trace;
        next.trace.push_back(e->id);
      }
      out.next.push_back(std::move(next));
      ++out.generated;
    }
  }
}

}  // namespace detail

inline EvalResult evaluate(const PropertyGraph& g, const PathQuerySpec& q,
                           const GraphSchema& schema, const EngineOptions& opts = {}) {
  if (opts.distinct_paths && opts.mode != EvalMode::Trace)
    throw std::invalid_argument("--distinct-paths requires trace mode");
  if (q.max_length < 0) throw std::invalid_argument("max_length must be >= 0");

  auto c = detail::compile_spec(q, schema);
  const bool tracing = opts.mode == EvalMode::Trace;
  const bool materialize = opts.mode != EvalMode::CountOnly;

  EvalResult result;
  std::vector<detail::PathTuple> frontier;
  frontier.reserve(q.start_vertices.size());
  auto init = detail::initial_dict(c);
  for (const auto& s : q.start_vertices)
    frontier.push_back({&s, c.table.q0, init, {}});
  result.per_depth_counts.push_back(static_cast<long long>(frontier.size()));

  auto emit_results = [&](const std::vector<detail::PathTuple>& tuples, int depth) {
    if (depth == 0 && (opts.empty_paths == EmptyPathPolicy::Exclude || !c.table.accepts_empty))
      return;
    for (const auto& p : tuples) {
      if (!c.table.accepting.count(p.q)) continue;
      EvalContext ctx{&p.dict, &c.slots, nullptr, p.q, p.q};
      if (!eval_guard(c.agg->viable_final, ctx)) continue;
      ++result.result_count;
      if (materialize) {
        ResultRow row;
        row.v = *p.v;
        for (const auto& [key, expr] : c.finalize)
          row.output.emplace_back(key, eval_expr(expr, ctx));
        if (tracing) row.trace = p.trace;
        result.results.push_back(std::move(row));
      }
    }
  };

  emit_results(frontier, 0);

  for (int depth = 1; depth <= q.max_length && !frontier.empty(); ++depth) {
    std::vector<detail::PathTuple> next;
    long long generated = 0;

    int workers = opts.threads;
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers > 1 && frontier.size() >= 64) {
      std::vector<detail::StepOutput> outs(workers);
      std::vector<std::thread> pool;
      std::exception_ptr first_error;
      std::atomic<bool> failed{false};
      std::size_t chunk = (frontier.size() + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(frontier.size(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, w, lo, hi]() {
          try {
            for (std::size_t i = lo; i < hi; ++i)
              detail::expand_tuple(g, c, frontier[i], tracing, outs[w]);
          } catch (...) {
            if (!failed.exchange(true)) first_error = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      if (failed) std::rethrow_exception(first_error);
      // merge in worker order: the multiset is schedule-independent
      for (auto& o : outs) {
        generated += o.generated;
        std::move(o.next.begin(), o.next.end(), std::back_inserter(next));
        std::move(o.pruned.begin(), o.pruned.end(),
                  std::back_inserter(result.pruned_traces));
      }
    } else {
      detail::StepOutput out;
      for (const auto& p : frontier) detail::expand_tuple(g, c, p, tracing, out);
      generated = out.generated;
      next = std::move(out.next);
      std::move(out.pruned.begin(), out.pruned.end(),
                std::back_inserter(result.pruned_traces));
    }

    result.per_depth_counts.push_back(generated);
    emit_results(next, depth);
    frontier = std::move(next);
  }

  for (long long n : result.per_depth_counts) result.intermediate_count += n;

  if (opts.distinct_paths) {
    std::map<std::pair<std::string, std::vector<std::string>>, bool> seen;
    std::vector<ResultRow> unique;
    for (auto& row : result.results) {
      auto key = std::make_pair(row.v, row.trace);
      if (seen.emplace(std::move(key), true).second) unique.push_back(std::move(row));
    }
    result.results = std::move(unique);
    result.result_count = static_cast<long long>(result.results.size());
  }
  return result;
}

// Convenience wrapper: run `phi` over collected lists with no early filtering.
// Its intermediate_count is the no-pruning baseline denominator.
inline EvalResult evaluate_default(const PropertyGraph& g, const std::string& regex, Expr phi,
                                   const std::vector<std::string>& collected_props,
                                   const std::vector<std::string>& start_vertices, int max_length,
                                   const GraphSchema& schema, const EngineOptions& opts = {}) {
  PathQuerySpec q;
  q.start_vertices = start_vertices;
  q.regex = regex;
  q.max_length = max_length;
  q.aggregate = default_construction(std::move(phi), collected_props);
  return evaluate(g, q, schema, opts);
}

inline long long count_paths(const PropertyGraph& g, const PathQuerySpec& q,
                             const GraphSchema& schema) {
  EngineOptions opts;
  opts.mode = EvalMode::CountOnly;
  return evaluate(g, q, schema, opts).result_count;
}

}  // namespace recap
