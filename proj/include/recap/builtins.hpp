#pragma once
// The benchmark queries as selective aggregates. Thresholds default to the
// values used in the paper's experiments and can be overridden per run;
// label and column bindings are parameters so the same query runs against
// any graph schema.
//
//   QA  chronological timestamps, max-min amount range <= U, trail
//   QB  Domestic+ Foreign with per-transition timestamp ranges, trail
//   Q1  (transfer|purchase|sale)+ (phishing|scam)+ with chronological
//       timestamps, same region, risk-range <= 20 in the normal prefix
//       (the edge entering the fraud segment is not counted), last normal
//       risk >= 40, total amount >= 1000 checked on complete paths, trail
//   Q2  two adjacent edges share a color; trail only (no early filtering)
//   Q3  strictly increasing numeric edge property, trail
//   Q4  earliest and latest timestamp within a window, trail

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "recap/aggregate.hpp"

namespace recap {

namespace detail {

class Params {
 public:
  Params(const std::map<std::string, std::string>& given, std::string query)
      : given_(given), query_(std::move(query)) {}

  std::string str(const std::string& name, const std::string& fallback) {
    used_.insert(name);
    auto it = given_.find(name);
    return it == given_.end() ? fallback : it->second;
  }
  std::int64_t integer(const std::string& name, std::int64_t fallback) {
    used_.insert(name);
    auto it = given_.find(name);
    if (it == given_.end()) return fallback;
    try {
      std::size_t used = 0;
      auto v = std::stoll(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument(query_ + ": param " + name + " must be an integer, got '" +
                                  it->second + "'");
    }
  }
  double real(const std::string& name, double fallback) {
    used_.insert(name);
    auto it = given_.find(name);
    if (it == given_.end()) return fallback;
    try {
      std::size_t used = 0;
      double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument(query_ + ": param " + name + " must be a number, got '" +
                                  it->second + "'");
    }
  }
  std::vector<std::string> labels(const std::string& name, const std::string& fallback) {
    std::string raw = str(name, fallback);
    std::vector<std::string> out;
    std::istringstream is(raw);
    std::string item;
    while (std::getline(is, item, ',')) {
      if (!item.empty()) out.push_back(item);
    }
    if (out.empty())
      throw std::invalid_argument(query_ + ": param " + name + " needs at least one label");
    return out;
  }
  void finish() const {
    for (const auto& [k, v] : given_)
      if (!used_.count(k))
        throw std::invalid_argument(query_ + ": unknown param '" + k + "'");
  }

 private:
  const std::map<std::string, std::string>& given_;
  std::string query_;
  std::set<std::string> used_;
};

inline std::string alternation_plus(const std::vector<std::string>& labels) {
  std::string rx = "(";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) rx += "|";
    rx += labels[i];
  }
  rx += ")+";
  return rx;
}

inline Expr trail_check() {
  return ex::logical_not(ex::list_contains(ex::dict("edge_ids"), ex::eid()));
}
inline Expr chronological(const std::string& time_col) {
  return ex::ifnull(ex::gt(ex::eprop(time_col), ex::dict("last_time")), ex::cbool(true));
}

}  // namespace detail

// Builds one of the named queries. start_vertices/max_length are left for the
// caller (CLI flags or test harness) to fill in.
inline PathQuerySpec builtin_query(const std::string& name,
                                   const std::map<std::string, std::string>& params) {
  detail::Params p(params, name);
  PathQuerySpec q;
  q.max_length = 4;
  auto& agg = q.aggregate;

  if (name == "QA") {
    auto labels = p.labels("labels", "Domestic,Foreign");
    std::string amount = p.str("amount_col", "amount");
    std::string time = p.str("time_col", "time");
    double range = p.real("amount_range", 1000);
    p.finish();
    q.regex = detail::alternation_plus(labels);

    agg.schema.entries = {{"last_time", DictKind::Timestamp},
                          {"max_amount", DictKind::Float},
                          {"min_amount", DictKind::Float},
                          {"edge_ids", DictKind::List}};
    agg.init = {{"last_time", ex::cnull()},
                {"max_amount", ex::cnull()},
                {"min_amount", ex::cnull()},
                {"edge_ids", ex::empty_list()}};
    auto new_max = ex::vmax(ex::ifnull(ex::dict("max_amount"), ex::eprop(amount)),
                            ex::eprop(amount));
    auto new_min = ex::vmin(ex::ifnull(ex::dict("min_amount"), ex::eprop(amount)),
                            ex::eprop(amount));
    agg.viable.factorized = ex::logical_and(
        ex::logical_and(detail::chronological(time),
                        ex::le(ex::sub(new_max, new_min), ex::cfloat(range))),
        detail::trail_check());
    agg.update.factorized = UpdateMap{
        {"last_time", ex::eprop(time)},
        {"max_amount", new_max},
        {"min_amount", new_min},
        {"edge_ids", ex::list_append(ex::dict("edge_ids"), ex::eid())}};
    agg.viable_final = ex::cbool(true);
    return q;
  }

  if (name == "QB") {
    std::string domestic = p.str("label_domestic", "Domestic");
    std::string foreign = p.str("label_foreign", "Foreign");
    std::string time = p.str("time_col", "time");
    std::int64_t range_dd = p.integer("range_dd", 2);
    std::int64_t range_df = p.integer("range_df", 3);
    p.finish();
    if (domestic == foreign)
      throw std::invalid_argument("QB: the two labels must differ");
    q.regex = domestic + "+ " + foreign;

    agg.schema.entries = {{"last_time", DictKind::Timestamp}, {"edge_ids", DictKind::List}};
    agg.init = {{"last_time", ex::cnull()}, {"edge_ids", ex::empty_list()}};
    agg.update.factorized = UpdateMap{
        {"last_time", ex::eprop(time)},
        {"edge_ids", ex::list_append(ex::dict("edge_ids"), ex::eid())}};

    auto in_range = [&](std::int64_t r) {
      auto delta = ex::sub(ex::eprop(time), ex::dict("last_time"));
      return ex::logical_and(
          ex::logical_and(ex::le(ex::cint(-r), delta), ex::le(delta, ex::cint(r))),
          detail::trail_check());
    };
    TransitionTable table = table_for_regex(q.regex);
    if (table.rows.size() != 3)
      throw std::logic_error("QB: unexpected transition table shape");
    for (const auto& row : table.rows) {
      Expr v;
      if (row.label == domestic && row.from_state == table.q0)
        v = ex::cbool(true);  // first edge: nothing to compare, nothing repeated
      else if (row.label == domestic)
        v = in_range(range_dd);
      else
        v = in_range(range_df);
      agg.viable.keyed[{row.from_state, row.to_state}] = v;
    }
    agg.viable_final = ex::cbool(true);
    agg.finalize = {{"edge_ids", ex::dict("edge_ids")}};
    return q;
  }

  if (name == "Q1") {
    auto normal = p.labels("normal_labels", "transfer,purchase,sale");
    auto fraud = p.labels("fraud_labels", "phishing,scam");
    std::string time = p.str("time_col", "time");
    std::string region = p.str("region_col", "region");
    std::string risk = p.str("risk_col", "risk");
    std::string amount = p.str("amount_col", "amount");
    double risk_range = p.real("risk_range", 20);
    double min_last_risk = p.real("min_last_risk", 40);
    double min_total = p.real("min_total_amount", 1000);
    p.finish();
    std::set<std::string> normal_set(normal.begin(), normal.end());
    std::set<std::string> fraud_set(fraud.begin(), fraud.end());
    for (const auto& l : fraud)
      if (normal_set.count(l))
        throw std::invalid_argument("Q1: label '" + l + "' is both normal and fraud");
    q.regex = detail::alternation_plus(normal) + " " + detail::alternation_plus(fraud);

    agg.schema.entries = {{"last_time", DictKind::Timestamp},
                          {"region", DictKind::String},
                          {"risk_min", DictKind::Float},
                          {"risk_max", DictKind::Float},
                          {"last_risk", DictKind::Float},
                          {"total_amount", DictKind::Float},
                          {"edge_ids", DictKind::List}};
    agg.init = {{"last_time", ex::cnull()},  {"region", ex::cnull()},
                {"risk_min", ex::cnull()},   {"risk_max", ex::cnull()},
                {"last_risk", ex::cnull()},  {"total_amount", ex::cint(0)},
                {"edge_ids", ex::empty_list()}};

    auto region_ok = ex::ifnull(ex::eq(ex::dict("region"), ex::eprop(region)), ex::cbool(true));
    auto risk_lo = ex::vmin(ex::ifnull(ex::dict("risk_min"), ex::eprop(risk)), ex::eprop(risk));
    auto risk_hi = ex::vmax(ex::ifnull(ex::dict("risk_max"), ex::eprop(risk)), ex::eprop(risk));
    auto shared = ex::logical_and(ex::logical_and(detail::chronological(time), region_ok),
                                  detail::trail_check());
    auto viable_normal = ex::logical_and(
        shared, ex::le(ex::sub(risk_hi, risk_lo), ex::cfloat(risk_range)));
    auto viable_entering = ex::logical_and(
        shared, ex::ge(ex::dict("last_risk"), ex::cfloat(min_last_risk)));
    auto viable_within = shared;

    UpdateMap shared_update{
        {"last_time", ex::eprop(time)},
        {"region", ex::ifnull(ex::dict("region"), ex::eprop(region))},
        {"total_amount", ex::add(ex::dict("total_amount"), ex::eprop(amount))},
        {"edge_ids", ex::list_append(ex::dict("edge_ids"), ex::eid())}};
    UpdateMap normal_update = shared_update;
    normal_update["risk_min"] = risk_lo;
    normal_update["risk_max"] = risk_hi;
    normal_update["last_risk"] = ex::eprop(risk);

    TransitionTable table = table_for_regex(q.regex);
    std::set<int> normal_states{table.q0};
    for (const auto& row : table.rows)
      if (normal_set.count(row.label)) normal_states.insert(row.to_state);
    for (const auto& row : table.rows) {
      auto key = std::make_pair(row.from_state, row.to_state);
      if (normal_set.count(row.label)) {
        agg.viable.keyed[key] = viable_normal;
        agg.update.keyed[key] = normal_update;
      } else if (normal_states.count(row.from_state)) {
        agg.viable.keyed[key] = viable_entering;
        agg.update.keyed[key] = shared_update;
      } else {
        agg.viable.keyed[key] = viable_within;
        agg.update.keyed[key] = shared_update;
      }
    }
    agg.viable_final = ex::ge(ex::dict("total_amount"), ex::cfloat(min_total));
    return q;
  }

  if (name == "Q2") {
    auto labels = p.labels("labels", "Domestic,Foreign");
    std::string color = p.str("color_col", "color");
    p.finish();
    q.regex = detail::alternation_plus(labels);

    agg.schema.entries = {{"last_color", DictKind::String},
                          {"completed", DictKind::Bool},
                          {"edge_ids", DictKind::List}};
    agg.init = {{"last_color", ex::cnull()},
                {"completed", ex::cbool(false)},
                {"edge_ids", ex::empty_list()}};
    // No early filtering on the color constraint: the repeat may arrive with
    // the very last edge. Viability only enforces trail semantics.
    agg.viable.factorized = detail::trail_check();
    agg.update.factorized = UpdateMap{
        {"completed",
         ex::logical_or(ex::dict("completed"),
                        ex::ifnull(ex::eq(ex::dict("last_color"), ex::eprop(color)),
                                   ex::cbool(false)))},
        {"last_color", ex::eprop(color)},
        {"edge_ids", ex::list_append(ex::dict("edge_ids"), ex::eid())}};
    agg.viable_final = ex::dict("completed");
    return q;
  }

  if (name == "Q3") {
    auto labels = p.labels("labels", "Domestic,Foreign");
    std::string value = p.str("value_col", "time");
    p.finish();
    q.regex = detail::alternation_plus(labels);

    agg.schema.entries = {{"last_value", DictKind::Float}, {"edge_ids", DictKind::List}};
    agg.init = {{"last_value", ex::cnull()}, {"edge_ids", ex::empty_list()}};
    agg.viable.factorized = ex::logical_and(
        ex::ifnull(ex::gt(ex::eprop(value), ex::dict("last_value")), ex::cbool(true)),
        detail::trail_check());
    agg.update.factorized = UpdateMap{
        {"last_value", ex::eprop(value)},
        {"edge_ids", ex::list_append(ex::dict("edge_ids"), ex::eid())}};
    agg.viable_final = ex::cbool(true);
    return q;
  }

  if (name == "Q4") {
    auto labels = p.labels("labels", "Domestic,Foreign");
    std::string time = p.str("time_col", "time");
    std::int64_t window = p.integer("window", 14);
    p.finish();
    q.regex = detail::alternation_plus(labels);

    agg.schema.entries = {{"min_time", DictKind::Timestamp},
                          {"max_time", DictKind::Timestamp},
                          {"edge_ids", DictKind::List}};
    agg.init = {{"min_time", ex::cnull()},
                {"max_time", ex::cnull()},
                {"edge_ids", ex::empty_list()}};
    auto lo = ex::vmin(ex::ifnull(ex::dict("min_time"), ex::eprop(time)), ex::eprop(time));
    auto hi = ex::vmax(ex::ifnull(ex::dict("max_time"), ex::eprop(time)), ex::eprop(time));
    agg.viable.factorized = ex::logical_and(
        ex::le(ex::sub(hi, lo), ex::cint(window)), detail::trail_check());
    agg.update.factorized = UpdateMap{
        {"min_time", lo},
        {"max_time", hi},
        {"edge_ids", ex::list_append(ex::dict("edge_ids"), ex::eid())}};
    agg.viable_final = ex::cbool(true);
    return q;
  }

  throw std::invalid_argument("unknown builtin query: " + name);
}

// Whole-path phi over collected lists for the queries whose constraints are
// label-independent. Returns the same query in default-construction form;
// nullopt when the constraint cannot be stated over plain collected lists.
inline std::optional<PathQuerySpec> builtin_default_construction(
    const std::string& name, const std::map<std::string, std::string>& params) {
  auto early = builtin_query(name, params);  // validates params, fixes regex
  detail::Params p(params, name);

  if (name == "QA") {
    p.labels("labels", "Domestic,Foreign");
    std::string amount = p.str("amount_col", "amount");
    std::string time = p.str("time_col", "time");
    double range = p.real("amount_range", 1000);
    Expr phi = ex::logical_and(
        ex::logical_and(
            ex::le(ex::sub(ex::list_max(ex::dict(amount)), ex::list_min(ex::dict(amount))),
                   ex::cfloat(range)),
            ex::list_strictly_increasing(ex::dict(time))),
        ex::list_all_distinct(ex::dict("id")));
    PathQuerySpec q = early;
    q.aggregate = default_construction(phi, {amount, time, "id"});
    return q;
  }
  if (name == "Q3") {
    p.labels("labels", "Domestic,Foreign");
    std::string value = p.str("value_col", "time");
    Expr phi = ex::logical_and(ex::list_strictly_increasing(ex::dict(value)),
                               ex::list_all_distinct(ex::dict("id")));
    PathQuerySpec q = early;
    q.aggregate = default_construction(phi, {value, "id"});
    return q;
  }
  if (name == "Q4") {
    p.labels("labels", "Domestic,Foreign");
    std::string time = p.str("time_col", "time");
    std::int64_t window = p.integer("window", 14);
    Expr phi = ex::logical_and(
        ex::le(ex::sub(ex::list_max(ex::dict(time)), ex::list_min(ex::dict(time))),
               ex::cint(window)),
        ex::list_all_distinct(ex::dict("id")));
    PathQuerySpec q = early;
    q.aggregate = default_construction(phi, {time, "id"});
    return q;
  }
  return std::nullopt;
}

}  // namespace recap
