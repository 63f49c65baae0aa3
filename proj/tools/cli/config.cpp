#include "cli/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sublin::cli {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Cuts a trailing comment, ignoring '#' inside quotes.
std::string strip_comment(const std::string& s) {
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return s.substr(0, i);
    }
  }
  return s;
}

class ValueParser {
 public:
  ValueParser(const std::string& text, const std::string& origin, int line)
      : text_(text), origin_(origin), line_(line) {}

  Value run() {
    Value v = value();
    skip();
    if (pos_ < text_.size()) fail(origin_, line_, "trailing characters in value");
    return v;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Value value() {
    skip();
    Value v;
    v.line = line_;
    if (pos_ >= text_.size()) fail(origin_, line_, "missing value");
    const char c = text_[pos_];
    if (c == '[') {
      ++pos_;
      v.kind = Value::Kind::array;
      skip();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return v;
      }
      for (;;) {
        v.items.push_back(value());
        skip();
        if (pos_ >= text_.size()) fail(origin_, line_, "unterminated array");
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ']') {
          ++pos_;
          return v;
        }
        fail(origin_, line_, "expected ',' or ']' in array");
      }
    }
    if (c == '"' || c == '\'') {
      const std::size_t close = text_.find(c, pos_ + 1);
      if (close == std::string::npos) fail(origin_, line_, "unterminated string");
      v.kind = Value::Kind::string;
      v.text = text_.substr(pos_ + 1, close - pos_ - 1);
      pos_ = close + 1;
      return v;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '[') ++pos_;
    v.text = trim(text_.substr(start, pos_ - start));
    if (v.text.empty()) fail(origin_, line_, "empty value");
    return v;
  }

  const std::string& text_;
  const std::string& origin_;
  int line_;
  std::size_t pos_ = 0;
};

std::string where(const Value& v) { return "line " + std::to_string(v.line) + ": "; }

}  // namespace

double Value::as_number() const {
  if (kind != Kind::scalar) throw ConfigError(where(*this) + "expected a number");
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(d))
    throw ConfigError(where(*this) + "'" + text + "' is not a finite number");
  return d;
}

long long Value::as_integer() const {
  const double d = as_number();
  if (d != std::floor(d) || std::abs(d) > 9e15) throw ConfigError(where(*this) + "'" + text + "' is not an integer");
  return static_cast<long long>(d);
}

bool Value::as_bool() const {
  if (kind == Kind::scalar && (text == "true" || text == "yes" || text == "1")) return true;
  if (kind == Kind::scalar && (text == "false" || text == "no" || text == "0")) return false;
  throw ConfigError(where(*this) + "expected true or false");
}

const std::string& Value::as_string() const {
  if (kind == Kind::array) throw ConfigError(where(*this) + "expected a scalar or string");
  return text;
}

std::vector<double> Value::as_numbers() const {
  if (kind != Kind::array) return {as_number()};
  std::vector<double> out;
  for (const Value& v : items) out.push_back(v.as_number());
  return out;
}

std::vector<std::string> Value::as_strings() const {
  if (kind != Kind::array) return {as_string()};
  std::vector<std::string> out;
  for (const Value& v : items) out.push_back(v.as_string());
  return out;
}

const Value& Section::at(const std::string& key) const {
  const Value* v = find(key);
  if (!v) throw ConfigError("[" + name_ + "] is missing key '" + key + "'");
  return *v;
}

const Value* Section::find(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

double Section::number(const std::string& key, double fallback) const {
  const Value* v = find(key);
  return v ? v->as_number() : fallback;
}

long long Section::integer(const std::string& key, long long fallback) const {
  const Value* v = find(key);
  return v ? v->as_integer() : fallback;
}

bool Section::flag(const std::string& key, bool fallback) const {
  const Value* v = find(key);
  return v ? v->as_bool() : fallback;
}

std::string Section::string(const std::string& key, const std::string& fallback) const {
  const Value* v = find(key);
  return v ? v->as_string() : fallback;
}

std::string Section::required_string(const std::string& key) const { return at(key).as_string(); }

double Section::required_number(const std::string& key) const { return at(key).as_number(); }

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.text_ = text;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[' && s.find('=') == std::string::npos) {
      if (s.back() != ']') fail(origin, line, "malformed section header");
      current = trim(s.substr(1, s.size() - 2));
      if (current.empty()) fail(origin, line, "empty section name");
      if (cfg.sections_.count(current)) fail(origin, line, "duplicate section [" + current + "]");
      cfg.sections_.emplace(current, Section(current));
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(origin, line, "expected 'key = value'");
    if (current.empty()) fail(origin, line, "key outside of any section");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(origin, line, "empty key");
    Section& sec = cfg.sections_.at(current);
    if (sec.has(key)) fail(origin, line, "duplicate key '" + key + "'");
    sec.set(key, ValueParser(s.substr(eq + 1), origin, line).run());
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  Config cfg = parse(ss.str(), path);
  cfg.base_dir_ = std::filesystem::path(path).parent_path().string();
  return cfg;
}

Section Config::section(const std::string& name) const {
  const auto it = sections_.find(name);
  return it == sections_.end() ? Section(name) : it->second;
}

}  // namespace sublin::cli
