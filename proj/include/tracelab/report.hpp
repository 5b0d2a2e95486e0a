#pragma once

// Bit-stable serialization of verification reports: fixed field order and
// 17 significant digits for every float.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tracelab/error.hpp"
#include "tracelab/harness.hpp"

namespace tracelab::report {

using harness::MemberResult;
using harness::VerificationReport;

inline constexpr int kSchemaVersion = 1;

enum class Format { Json, Csv };

/// %.17g, with null (JSON) or inf/nan (CSV) for non-finite values.
inline std::string number(double v, bool json = true) {
  if (!std::isfinite(v)) {
    if (json) return "null";
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

/// Minimal ordered JSON writer with two-space indentation.
class JsonWriter {
 public:
  JsonWriter& begin_object(std::string_view key = {}) { return open(key, '{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array(std::string_view key = {}) { return open(key, '['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& value(std::string_view key, double v) { return raw(key, number(v)); }
  /// Exponents that may be infinite, written as the string "inf".
  JsonWriter& exponent(std::string_view key, double v) {
    return std::isinf(v) && v > 0 ? raw(key, "\"inf\"") : raw(key, number(v));
  }
  JsonWriter& value(std::string_view key, int v) { return raw(key, std::to_string(v)); }
  JsonWriter& value(std::string_view key, std::uint64_t v) { return raw(key, std::to_string(v)); }
  JsonWriter& value(std::string_view key, bool v) { return raw(key, v ? "true" : "false"); }
  JsonWriter& value(std::string_view key, std::string_view v) { return raw(key, quoted(v)); }
  JsonWriter& value(std::string_view key, const char* v) { return raw(key, quoted(v)); }

  [[nodiscard]] std::string str() const { return out_ + "\n"; }

 private:
  JsonWriter& open(std::string_view key, char bracket) {
    prefix(key);
    out_ += bracket;
    first_.push_back(true);
    return *this;
  }
  JsonWriter& close(char bracket) {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) {
      out_ += '\n';
      out_.append(2 * first_.size(), ' ');
    }
    out_ += bracket;
    return *this;
  }
  JsonWriter& raw(std::string_view key, const std::string& text) {
    prefix(key);
    out_ += text;
    return *this;
  }
  void prefix(std::string_view key) {
    if (!first_.empty()) {
      if (!first_.back()) out_ += ',';
      first_.back() = false;
      out_ += '\n';
      out_.append(2 * first_.size(), ' ');
    }
    if (!key.empty()) out_ += quoted(key) + ": ";
  }

  std::string out_;
  std::vector<bool> first_;
};

inline std::string to_json(const VerificationReport& r) {
  JsonWriter w;
  w.begin_object();
  w.value("schema_version", kSchemaVersion);
  w.value("report", "verify");
  w.value("check", r.check);
  w.value("family", r.family);
  w.value("seed", r.seed);
  w.value("pass", r.pass);
  w.value("max_ratio", r.max_ratio);
  w.value("min_ratio", r.min_ratio);
  w.value("spread", r.spread);
  w.value("stability", r.stability);
  w.value("max_error", r.max_error);
  w.begin_object("settings");
  for (const auto& [k, v] : r.settings) w.value(k, v);
  w.end_object();
  w.begin_array("failures");
  for (const auto& f : r.failures) w.value({}, f);
  w.end_array();
  w.begin_array("members");
  for (const auto& m : r.rows) {
    w.begin_object();
    w.value("member_id", m.member_id);
    w.value("level", m.level);
    w.value("lhs", m.lhs);
    w.value("rhs", m.rhs);
    w.value("ratio", m.ratio);
    w.begin_object("params");
    for (const auto& [k, v] : m.params) w.value(k, v);
    w.end_object();
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

/// member_id, lhs, rhs, ratio, then the parameter columns of the rows in
/// order of first appearance; missing entries stay empty.
inline std::string to_csv(const VerificationReport& r) {
  std::vector<std::string> cols;
  std::set<std::string> seen;
  for (const auto& m : r.rows) {
    for (const auto& [k, v] : m.params) {
      if (seen.insert(k).second) cols.push_back(k);
    }
  }
  std::ostringstream os;
  os << "member_id,lhs,rhs,ratio";
  for (const auto& c : cols) os << ',' << c;
  os << '\n';
  for (const auto& m : r.rows) {
    os << m.member_id << ',' << number(m.lhs, false) << ',' << number(m.rhs, false) << ','
       << number(m.ratio, false);
    for (const auto& c : cols) {
      os << ',';
      for (const auto& [k, v] : m.params) {
        if (k == c) {
          os << number(v, false);
          break;
        }
      }
    }
    os << '\n';
  }
  return os.str();
}

/// Write text to path, replacing any previous content.
inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline void emit_report(const VerificationReport& r, Format format, const std::string& path) {
  write_file(path, format == Format::Json ? to_json(r) : to_csv(r));
}

namespace detail {

inline double number_from(const nlohmann::ordered_json& j) {
  return j.is_null() ? std::nan("") : j.get<double>();
}

}  // namespace detail

/// Inverse of to_json; null floats come back as NaN (non-finite ratios only
/// occur in failing reports).
inline VerificationReport from_json(const nlohmann::ordered_json& j) {
  VerificationReport r;
  r.check = j.at("check").get<std::string>();
  r.family = j.at("family").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.pass = j.at("pass").get<bool>();
  r.max_ratio = detail::number_from(j.at("max_ratio"));
  r.min_ratio = detail::number_from(j.at("min_ratio"));
  r.spread = detail::number_from(j.at("spread"));
  r.stability = detail::number_from(j.at("stability"));
  r.max_error = detail::number_from(j.at("max_error"));
  for (const auto& [k, v] : j.at("settings").items()) r.settings.emplace_back(k, detail::number_from(v));
  for (const auto& f : j.at("failures")) r.failures.push_back(f.get<std::string>());
  for (const auto& m : j.at("members")) {
    MemberResult row;
    row.member_id = m.at("member_id").get<std::string>();
    row.level = m.at("level").get<int>();
    row.lhs = detail::number_from(m.at("lhs"));
    row.rhs = detail::number_from(m.at("rhs"));
    row.ratio = detail::number_from(m.at("ratio"));
    for (const auto& [k, v] : m.at("params").items()) row.params.emplace_back(k, detail::number_from(v));
    r.rows.push_back(std::move(row));
  }
  return r;
}

}  // namespace tracelab::report
