#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace bsdelab {

// Sectioned key-value configuration, keys addressed as "section.key".
// Every lookup records the value it resolved to, so a report can carry the
// full effective configuration including defaults.
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(const std::string& text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  long long get_int(const std::string& key, long long def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::optional<std::string> find(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  const std::map<std::string, std::string>& resolved() const { return resolved_; }

  // FNV-1a over the sorted "key=value" lines of the explicit values.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, std::string> resolved_;
};

// seed precedence: explicit override, then BSDELAB_SEED, then sim.seed, then def
std::uint64_t resolve_seed(const Config& cfg, std::optional<std::uint64_t> override_seed,
                           std::uint64_t def);

const char* version_string();

}  // namespace bsdelab
