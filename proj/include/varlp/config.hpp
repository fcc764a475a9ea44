#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace varlp {

/// Configuration errors carry the offending file/line when known.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One scalar per key, "key = value" lines, '#' comments. Values keep
/// their source line for error reporting; later assignments win.
class ConfigMap {
 public:
  static ConfigMap from_file(const std::string& path);
  static ConfigMap from_text(const std::string& text, const std::string& origin = "<inline>");

  /// Applies "key=value" command-line overrides (line number 0).
  void set_override(const std::string& assignment);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }
  const std::string& origin() const { return origin_; }
  int line_of(const std::string& key) const;

  /// "<origin>:<line>: <message>" when the key came from a file.
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  std::string origin_;
};

/// Declarative schema: every known key with an optional default.
/// Keys without a default are required.
struct KeySpec {
  std::string key;
  std::optional<std::string> default_value;
  std::string description;
};

/// Schema-checked view: rejects unknown keys, fills defaults, offers
/// typed accessors that report the source line on bad values.
class ResolvedConfig {
 public:
  ResolvedConfig(const ConfigMap& map, const std::vector<KeySpec>& schema);

  const std::string& get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;  // 0/1/true/false
  /// Value must be one of the given choices.
  std::string get_choice(const std::string& key, const std::vector<std::string>& choices) const;

  const std::map<std::string, std::string>& values() const { return resolved_; }

  /// Writes the fully-resolved "key = value" list, sorted by key.
  void write(const std::string& path) const;

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;
  std::map<std::string, std::string> resolved_;
  ConfigMap source_;  // owned copy, so the view outlives the parsed map
};

}  // namespace varlp
