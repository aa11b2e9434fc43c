#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gni/types.hpp"

namespace gni::cli {

/// Bad configuration; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat dotted-key configuration. Later sources override earlier ones.
class Config {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback = "") const;
  std::string require_string(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<long> get_long(const std::string& key) const;
  std::optional<Vector> get_vector(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;
  /// Values of every key under "prefix.", keyed by the remainder.
  std::map<std::string, double> numbers_with_prefix(const std::string& prefix) const;

 private:
  std::map<std::string, std::string> values_;
};

/// key=value lines; '#' starts a comment; blank lines ignored.
Config parse_config_text(const std::string& text, const std::string& origin = "<config>");
Config load_config_file(const std::string& path);

struct Invocation {
  std::string subcommand;
  Config config;
};

/// args excludes the program name. Accepts --key value, --key=value and
/// --config path (loaded first, flags override it).
Invocation parse_command_line(const std::vector<std::string>& args);

double parse_double(const std::string& text, const std::string& key);
long parse_long(const std::string& text, const std::string& key);
Vector parse_vector(const std::string& text, const std::string& key);

}  // namespace gni::cli
