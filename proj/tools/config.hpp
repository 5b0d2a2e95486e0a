#pragma once

// Strict reader for JSON configuration documents: every value is fetched
// through its JSON pointer so schema violations name the offending location.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tracelab::cli {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// A schema violation at a JSON pointer.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : std::runtime_error((pointer.empty() ? std::string("/") : pointer) + ": " + what),
        pointer_(std::move(pointer)) {}
  [[nodiscard]] const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

inline std::string escape_pointer(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

class Node {
 public:
  Node(const json& j, std::string pointer) : j_(&j), ptr_(std::move(pointer)) {}

  [[nodiscard]] const std::string& pointer() const noexcept { return ptr_; }
  [[nodiscard]] const json& raw() const noexcept { return *j_; }
  [[nodiscard]] ConfigError error(const std::string& what) const { return {ptr_, what}; }

  /// Rejects keys outside the allowed set.
  const Node& keys(std::initializer_list<std::string_view> allowed) const {
    object();
    for (const auto& [k, v] : j_->items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || a == k;
      if (!ok) throw ConfigError(ptr_ + "/" + escape_pointer(k), "unknown key");
    }
    return *this;
  }

  [[nodiscard]] bool has(std::string_view key) const {
    object();
    return j_->contains(std::string(key));
  }

  [[nodiscard]] Node at(std::string_view key) const {
    object();
    const auto it = j_->find(std::string(key));
    if (it == j_->end()) {
      throw ConfigError(ptr_ + "/" + escape_pointer(key), "required key is missing");
    }
    return {*it, ptr_ + "/" + escape_pointer(key)};
  }

  [[nodiscard]] std::optional<Node> find(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return at(key);
  }

  [[nodiscard]] std::vector<Node> items() const {
    if (!j_->is_array()) throw error("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_->size(); ++i) {
      out.emplace_back((*j_)[i], ptr_ + "/" + std::to_string(i));
    }
    return out;
  }

  [[nodiscard]] double number() const {
    if (!j_->is_number()) throw error("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) throw error("expected a finite number");
    return v;
  }

  [[nodiscard]] std::int64_t integer() const {
    if (!j_->is_number_integer()) throw error("expected an integer");
    return j_->get<std::int64_t>();
  }

  [[nodiscard]] std::uint64_t unsigned_integer() const {
    if (!j_->is_number_integer() || j_->get<std::int64_t>() < 0) {
      throw error("expected a nonnegative integer");
    }
    return j_->get<std::uint64_t>();
  }

  [[nodiscard]] bool boolean() const {
    if (!j_->is_boolean()) throw error("expected true or false");
    return j_->get<bool>();
  }

  [[nodiscard]] std::string string() const {
    if (!j_->is_string()) throw error("expected a string");
    return j_->get<std::string>();
  }

  /// Number constrained to [lo, hi] (either end may be open).
  [[nodiscard]] double number_in(double lo, double hi, bool lo_open = false,
                                 bool hi_open = false) const {
    const double v = number();
    const bool ok_lo = lo_open ? v > lo : v >= lo;
    const bool ok_hi = hi_open ? v < hi : v <= hi;
    if (!ok_lo || !ok_hi) {
      throw error("value " + std::to_string(v) + " outside " + (lo_open ? "(" : "[") +
                  std::to_string(lo) + ", " + std::to_string(hi) + (hi_open ? ")" : "]"));
    }
    return v;
  }

  [[nodiscard]] std::int64_t integer_in(std::int64_t lo, std::int64_t hi) const {
    const auto v = integer();
    if (v < lo || v > hi) {
      throw error("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                  std::to_string(hi) + "]");
    }
    return v;
  }

  template <class T>
  [[nodiscard]] T choice(std::initializer_list<std::pair<std::string_view, T>> options) const {
    const auto s = string();
    std::string names;
    for (const auto& [name, value] : options) {
      if (name == s) return value;
      names += (names.empty() ? "" : ", ") + std::string(name);
    }
    throw error("unknown value '" + s + "' (expected one of " + names + ")");
  }

 private:
  void object() const {
    if (!j_->is_object()) throw error("expected an object");
  }

  const json* j_;
  std::string ptr_;
};

/// Optional number with a default.
inline double number_or(const Node& n, std::string_view key, double fallback) {
  const auto v = n.find(key);
  return v ? v->number() : fallback;
}

inline void check_schema_version(const Node& root) {
  const auto v = root.at("schema_version");
  if (v.integer() != kSchemaVersion) {
    throw v.error("unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");
  }
}

}  // namespace tracelab::cli
