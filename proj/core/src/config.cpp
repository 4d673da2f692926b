#include "spdhg/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "spdhg/errors.hpp"

namespace spdhg {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const std::string& source) : text_(text), source_(source) {}

  bool at_end() const { return pos_ >= text_.size(); }
  std::size_t line() const { return line_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + what);
  }

  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  // Spaces, tabs and comments; newlines too when inside an array.
  void skip(bool newlines) {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
        advance();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  void end_line() {
    skip(false);
    if (at_end()) return;
    if (peek() != '\n') fail(std::string("unexpected '") + peek() + "' after value");
    advance();
  }

  std::string bare_word() {
    std::string out;
    while (!at_end()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '+') {
        out += c;
        advance();
      } else {
        break;
      }
    }
    return out;
  }

  ConfigValue value(int depth) {
    skip(depth > 0);
    if (at_end() && depth > 0) fail("unterminated array");
    if (at_end() || peek() == '\n') fail("missing value");
    const char c = peek();
    if (c == '"') return {string_literal()};
    if (c == '[') return {array(depth)};
    const std::string word = bare_word();
    if (word.empty()) fail(std::string("unexpected '") + c + "'");
    if (word == "true") return {true};
    if (word == "false") return {false};
    return {number(word)};
  }

 private:
  std::string string_literal() {
    advance();  // opening quote
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = peek();
      advance();
      if (c == '"') break;
      if (c == '\\') {
        if (at_end()) fail("unterminated string");
        const char e = peek();
        advance();
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail(std::string("unknown escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  ConfigValue::Array array(int depth) {
    if (depth > 8) fail("arrays nested too deeply");
    advance();  // '['
    ConfigValue::Array out;
    skip(true);
    if (at_end()) fail("unterminated array");
    if (peek() == ']') {
      advance();
      return out;
    }
    while (true) {
      out.push_back(value(depth + 1));
      skip(true);
      if (at_end()) fail("unterminated array");
      if (peek() == ',') {
        advance();
        skip(true);
        if (at_end()) fail("unterminated array");
        if (peek() == ']') {  // trailing comma
          advance();
          return out;
        }
        continue;
      }
      if (peek() == ']') {
        advance();
        return out;
      }
      fail(std::string("expected ',' or ']' in array, found '") + peek() + "'");
    }
  }

  double number(const std::string& word) const {
    if (word == "inf" || word == "+inf") return std::numeric_limits<double>::infinity();
    if (word == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* first = word.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, word.data() + word.size(), v);
    if (ec != std::errc() || ptr != word.data() + word.size()) {
      fail("'" + word + "' is not a number, boolean or quoted string");
    }
    return v;
  }

  std::string_view text_;
  const std::string& source_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

const char* type_name(const ConfigValue& v) {
  if (v.is_bool()) return "boolean";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  return "array";
}

}  // namespace

std::string ConfigValue::to_text() const {
  if (is_bool()) return std::get<bool>(data) ? "true" : "false";
  if (is_number()) return format_number(std::get<double>(data));
  if (is_string()) {
    std::string out = "\"";
    for (char c : std::get<std::string>(data)) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
      }
    }
    return out + "\"";
  }
  std::string out = "[";
  const auto& a = std::get<Array>(data);
  for (std::size_t i = 0; i < a.size(); ++i) out += (i ? ", " : "") + a[i].to_text();
  return out + "]";
}

Config Config::parse(std::string_view text, std::string source) {
  Config cfg;
  cfg.source_ = std::move(source);
  Parser p(text, cfg.source_);
  std::string section;
  std::size_t order = 0;
  while (true) {
    p.skip(false);
    if (p.at_end()) break;
    if (p.peek() == '\n') {
      p.advance();
      continue;
    }
    if (p.peek() == '[') {
      p.advance();
      p.skip(false);
      section = p.bare_word();
      if (section.empty() || section.find('.') != std::string::npos) p.fail("bad section name");
      p.skip(false);
      if (p.peek() != ']') p.fail("expected ']' after section name");
      p.advance();
      p.end_line();
      continue;
    }
    const std::size_t line = p.line();
    const std::string name = p.bare_word();
    if (name.empty()) p.fail(std::string("expected a key, found '") + p.peek() + "'");
    if (name.find('.') != std::string::npos) p.fail("keys may not contain '.'");
    p.skip(false);
    if (p.peek() != '=') p.fail("expected '=' after key '" + name + "'");
    p.advance();
    ConfigValue v = p.value(0);
    p.end_line();
    const std::string key = section.empty() ? name : section + "." + name;
    if (cfg.entries_.count(key)) {
      throw ConfigError(cfg.source_ + ":" + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    cfg.entries_[key] = Entry{std::move(v), line, order++, false};
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return parse(os.str(), path.string());
}

void Config::set(const std::string& key, ConfigValue value) {
  auto& e = entries_[key];
  if (e.order == 0 && e.line == 0) e.order = entries_.size();
  e.value = std::move(value);
}

const Config::Entry* Config::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  it->second.used = true;
  return &it->second;
}

void Config::fail(const Entry& e, const std::string& key, const std::string& what) const {
  const std::string where = e.line ? source_ + ":" + std::to_string(e.line) : std::string("override");
  throw ConfigError(where + ": " + key + ": " + what);
}

bool Config::boolean(const std::string& key, bool fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (!e->value.is_bool()) fail(*e, key, std::string("expected boolean, got ") + type_name(e->value));
  return std::get<bool>(e->value.data);
}

double Config::number(const std::string& key, double fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (!e->value.is_number()) fail(*e, key, std::string("expected number, got ") + type_name(e->value));
  return std::get<double>(e->value.data);
}

std::size_t Config::count(const std::string& key, std::size_t fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (!e->value.is_number()) fail(*e, key, std::string("expected integer, got ") + type_name(e->value));
  const double v = std::get<double>(e->value.data);
  if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) fail(*e, key, "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::string Config::string(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (!e->value.is_string()) fail(*e, key, std::string("expected string, got ") + type_name(e->value));
  return std::get<std::string>(e->value.data);
}

Vector Config::numbers(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) return {};
  if (e->value.is_number()) return {std::get<double>(e->value.data)};
  if (!e->value.is_array()) fail(*e, key, std::string("expected array of numbers, got ") + type_name(e->value));
  Vector out;
  for (const auto& v : std::get<ConfigValue::Array>(e->value.data)) {
    if (!v.is_number()) fail(*e, key, "expected array of numbers");
    out.push_back(std::get<double>(v.data));
  }
  return out;
}

std::vector<std::vector<std::size_t>> Config::index_lists(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) return {};
  if (!e->value.is_array()) fail(*e, key, "expected array of index arrays");
  std::vector<std::vector<std::size_t>> out;
  for (const auto& row : std::get<ConfigValue::Array>(e->value.data)) {
    if (!row.is_array()) fail(*e, key, "expected array of index arrays");
    auto& dst = out.emplace_back();
    for (const auto& v : std::get<ConfigValue::Array>(row.data)) {
      const double d = v.is_number() ? std::get<double>(v.data) : -1.0;
      if (!(d >= 0.0) || d != std::floor(d)) fail(*e, key, "block indices must be nonnegative integers");
      dst.push_back(static_cast<std::size_t>(d));
    }
  }
  return out;
}

void Config::reject_unused() const {
  for (const auto& key : keys()) {
    const Entry& e = entries_.at(key);
    if (!e.used) fail(e, key, "unknown key");
  }
}

std::vector<std::string> Config::keys() const {
  std::vector<std::pair<std::size_t, std::string>> ordered;
  for (const auto& [k, e] : entries_) ordered.emplace_back(e.order, k);
  std::sort(ordered.begin(), ordered.end());
  std::vector<std::string> out;
  for (auto& [o, k] : ordered) out.push_back(std::move(k));
  return out;
}

}  // namespace spdhg
