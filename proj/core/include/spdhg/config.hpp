#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spdhg/blockspace.hpp"

namespace spdhg {

/// A value in a run-config file: boolean, number, string or array.
struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<bool, double, std::string, Array> data;

  bool is_bool() const noexcept { return std::holds_alternative<bool>(data); }
  bool is_number() const noexcept { return std::holds_alternative<double>(data); }
  bool is_string() const noexcept { return std::holds_alternative<std::string>(data); }
  bool is_array() const noexcept { return std::holds_alternative<Array>(data); }
  /// Round-trippable config syntax.
  std::string to_text() const;
};

/// Run-config document.
///
///   # comment
///   key = value            (top-level keys)
///   [section]
///   key = value            (addressed as "section.key")
///
/// Values are true/false, numbers (inf allowed), "strings" with \" \\ \n \t
/// escapes, or [arrays] of values, possibly nested. An array may continue
/// over several lines until its closing bracket. Sections do not nest.
/// Errors carry "<source>:<line>:".
class Config {
 public:
  static Config parse(std::string_view text, std::string source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  /// Adds or replaces a key (e.g. a command-line override).
  void set(const std::string& key, ConfigValue value);

  bool boolean(const std::string& key, bool fallback) const;
  double number(const std::string& key, double fallback) const;
  /// Nonnegative integer.
  std::size_t count(const std::string& key, std::size_t fallback) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  Vector numbers(const std::string& key) const;
  std::vector<std::vector<std::size_t>> index_lists(const std::string& key) const;

  /// Throws for keys no getter has asked for, so typos do not pass silently.
  void reject_unused() const;

  const std::string& source() const noexcept { return source_; }
  /// Keys in file order.
  std::vector<std::string> keys() const;

 private:
  struct Entry {
    ConfigValue value;
    std::size_t line = 0;
    std::size_t order = 0;
    mutable bool used = false;
  };

  const Entry* find(const std::string& key) const;
  [[noreturn]] void fail(const Entry& e, const std::string& key, const std::string& what) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
};

}  // namespace spdhg
