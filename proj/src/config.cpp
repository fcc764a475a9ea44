#include "varlp/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace varlp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_') return false;
  return true;
}

}  // namespace

ConfigMap ConfigMap::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), path);
}

ConfigMap ConfigMap::from_text(const std::string& text, const std::string& origin) {
  ConfigMap m;
  m.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (!valid_key(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad key '" + key + "'");
    if (value.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty value for '" + key + "'");
    m.values_[key] = value;
    m.lines_[key] = lineno;
  }
  return m;
}

void ConfigMap::set_override(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' must look like key=value");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (!valid_key(key)) throw ConfigError("override: bad key '" + key + "'");
  if (value.empty()) throw ConfigError("override: empty value for '" + key + "'");
  values_[key] = value;
  lines_[key] = 0;
  if (origin_.empty()) origin_ = "<overrides>";
}

int ConfigMap::line_of(const std::string& key) const {
  const auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

void ConfigMap::fail(const std::string& key, const std::string& message) const {
  const int line = line_of(key);
  if (line > 0)
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + message);
  throw ConfigError(message);
}

ResolvedConfig::ResolvedConfig(const ConfigMap& map, const std::vector<KeySpec>& schema)
    : source_(map) {
  for (const KeySpec& ks : schema) {
    if (map.contains(ks.key))
      resolved_[ks.key] = map.values().at(ks.key);
    else if (ks.default_value)
      resolved_[ks.key] = *ks.default_value;
    else
      throw ConfigError("missing required key '" + ks.key + "'");
  }
  for (const auto& [key, value] : map.values()) {
    (void)value;
    bool known = false;
    for (const KeySpec& ks : schema)
      if (ks.key == key) {
        known = true;
        break;
      }
    if (!known) map.fail(key, "unknown key '" + key + "'");
  }
}

void ResolvedConfig::fail(const std::string& key, const std::string& message) const {
  source_.fail(key, message);
}

const std::string& ResolvedConfig::get_string(const std::string& key) const {
  const auto it = resolved_.find(key);
  if (it == resolved_.end()) throw ConfigError("internal: key '" + key + "' not in schema");
  return it->second;
}

double ResolvedConfig::get_double(const std::string& key) const {
  const std::string& v = get_string(key);
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(key, "value of '" + key + "' is not a number: '" + v + "'");
  }
}

std::int64_t ResolvedConfig::get_int(const std::string& key) const {
  const std::string& v = get_string(key);
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(key, "value of '" + key + "' is not an integer: '" + v + "'");
  }
}

bool ResolvedConfig::get_bool(const std::string& key) const {
  const std::string& v = get_string(key);
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  fail(key, "value of '" + key + "' is not a boolean (0/1/true/false): '" + v + "'");
}

std::string ResolvedConfig::get_choice(const std::string& key,
                                       const std::vector<std::string>& choices) const {
  const std::string& v = get_string(key);
  for (const auto& c : choices)
    if (v == c) return v;
  std::string allowed;
  for (const auto& c : choices) allowed += (allowed.empty() ? "" : "|") + c;
  fail(key, "value of '" + key + "' must be one of " + allowed + ", got '" + v + "'");
}

void ResolvedConfig::write(const std::string& path) const {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw ConfigError("cannot write resolved config to " + path);
  for (const auto& [k, v] : resolved_) std::fprintf(fp, "%s = %s\n", k.c_str(), v.c_str());
  std::fclose(fp);
}

}  // namespace varlp
