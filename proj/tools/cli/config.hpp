#pragma once

// Line-oriented run configuration:
//
//   # comment
//   [section]
//   key = value
//
// Values are numbers, bare words, quoted strings, or bracketed arrays of
// values (arrays nest).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sublin/error.hpp"

namespace sublin::cli {

struct Value {
  enum class Kind { scalar, string, array };
  Kind kind = Kind::scalar;
  /// Scalars keep their source text; strings are unquoted.
  std::string text;
  std::vector<Value> items;
  int line = 0;

  bool is_array() const { return kind == Kind::array; }
  double as_number() const;
  long long as_integer() const;
  bool as_bool() const;
  /// Text of a scalar or quoted string.
  const std::string& as_string() const;
  std::vector<double> as_numbers() const;
  std::vector<std::string> as_strings() const;
};

class Section {
 public:
  explicit Section(std::string name = {}) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const Value& at(const std::string& key) const;
  const Value* find(const std::string& key) const;
  void set(const std::string& key, Value v) { values_[key] = std::move(v); }
  const std::map<std::string, Value>& values() const { return values_; }

  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  std::string required_string(const std::string& key) const;
  double required_number(const std::string& key) const;

 private:
  std::string name_;
  std::map<std::string, Value> values_;
};

class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  /// A missing section reads as empty.
  Section section(const std::string& name) const;
  bool has_section(const std::string& name) const { return sections_.count(name) > 0; }
  const std::string& text() const { return text_; }
  /// Directory of the config file, for resolving relative paths.
  const std::string& base_dir() const { return base_dir_; }

 private:
  std::map<std::string, Section> sections_;
  std::string text_;
  std::string base_dir_;
};

}  // namespace sublin::cli
