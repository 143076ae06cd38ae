#pragma once
// Runtime value universe shared by edge properties, dictionary slots and
// expression evaluation. Scalars are 64-bit ints, doubles, strings and
// timestamps (epoch seconds); lists are homogeneous and immutable (shared
// between path tuples, appends copy). Null represents an absent property
// and propagates through expressions SQL-style.

#include <cstdint>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace recap {

struct Timestamp {
  std::int64_t seconds = 0;
  friend bool operator==(Timestamp a, Timestamp b) { return a.seconds == b.seconds; }
  friend auto operator<=>(Timestamp a, Timestamp b) { return a.seconds <=> b.seconds; }
};

enum class ValueKind { Null, Bool, Int, Float, String, Timestamp, List };

inline const char* to_string(ValueKind k) {
  switch (k) {
    case ValueKind::Null: return "null";
    case ValueKind::Bool: return "bool";
    case ValueKind::Int: return "int";
    case ValueKind::Float: return "float";
    case ValueKind::String: return "string";
    case ValueKind::Timestamp: return "timestamp";
    case ValueKind::List: return "list";
  }
  return "?";
}

class Value;
using ValueList = std::vector<Value>;

class Value {
 public:
  using ListPtr = std::shared_ptr<const ValueList>;

  Value() = default;  // null

  static Value null() { return Value(); }
  static Value boolean(bool b) { return Value(Rep(b)); }
  static Value integer(std::int64_t i) { return Value(Rep(i)); }
  static Value real(double d) { return Value(Rep(d)); }
  static Value str(std::string s) { return Value(Rep(std::move(s))); }
  static Value timestamp(std::int64_t secs) { return Value(Rep(Timestamp{secs})); }
  static Value list(ValueList elems) {
    return Value(Rep(std::make_shared<const ValueList>(std::move(elems))));
  }
  static Value empty_list() {
    static const ListPtr kEmpty = std::make_shared<const ValueList>();
    return Value(Rep(kEmpty));
  }

  ValueKind kind() const { return static_cast<ValueKind>(rep_.index()); }
  bool is_null() const { return kind() == ValueKind::Null; }
  bool is_numeric() const {
    auto k = kind();
    return k == ValueKind::Int || k == ValueKind::Float || k == ValueKind::Timestamp;
  }

  bool as_bool() const { return get<bool>("bool"); }
  std::int64_t as_int() const { return get<std::int64_t>("int"); }
  double as_float() const { return get<double>("float"); }
  const std::string& as_string() const { return get<std::string>("string"); }
  Timestamp as_timestamp() const { return get<Timestamp>("timestamp"); }
  const ValueList& as_list() const {
    const auto* p = std::get_if<ListPtr>(&rep_);
    if (!p) throw std::logic_error(kind_error("list"));
    return **p;
  }

  // Numeric view: ints and timestamps share an integer axis, floats are exact.
  std::int64_t numeric_as_int() const {
    if (kind() == ValueKind::Int) return as_int();
    if (kind() == ValueKind::Timestamp) return as_timestamp().seconds;
    throw std::logic_error(kind_error("integer-valued"));
  }
  double numeric_as_double() const {
    if (kind() == ValueKind::Float) return as_float();
    return static_cast<double>(numeric_as_int());
  }

  friend bool operator==(const Value& a, const Value& b) {
    if (a.kind() != b.kind()) return false;
    if (a.kind() == ValueKind::List) {
      const auto& la = a.as_list();
      const auto& lb = b.as_list();
      return la == lb;
    }
    return a.rep_ == b.rep_;
  }

  std::string to_debug_string() const {
    std::ostringstream os;
    switch (kind()) {
      case ValueKind::Null: os << "null"; break;
      case ValueKind::Bool: os << (as_bool() ? "true" : "false"); break;
      case ValueKind::Int: os << as_int(); break;
      case ValueKind::Float: os << as_float(); break;
      case ValueKind::String: os << '"' << as_string() << '"'; break;
      case ValueKind::Timestamp: os << "ts:" << as_timestamp().seconds; break;
      case ValueKind::List: {
        os << '[';
        bool first = true;
        for (const auto& e : as_list()) {
          if (!first) os << ',';
          first = false;
          os << e.to_debug_string();
        }
        os << ']';
        break;
      }
    }
    return os.str();
  }

 private:
  using Rep = std::variant<std::monostate, bool, std::int64_t, double, std::string,
                           Timestamp, ListPtr>;
  explicit Value(Rep rep) : rep_(std::move(rep)) {}

  template <typename T>
  const T& get(const char* want) const {
    const auto* p = std::get_if<T>(&rep_);
    if (!p) throw std::logic_error(kind_error(want));
    return *p;
  }
  std::string kind_error(const char* want) const {
    return std::string("value is ") + to_string(kind()) + ", expected " + want;
  }

  Rep rep_;
};

// Appends to an immutable list, sharing nothing with the original.
inline Value list_append_value(const Value& list, const Value& elem) {
  ValueList out = list.as_list();
  out.push_back(elem);
  return Value::list(std::move(out));
}

}  // namespace recap
