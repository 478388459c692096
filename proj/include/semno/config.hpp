#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace semno {

/// Flat key/value pipeline configuration.
///
/// File syntax: one `key = value` per line, `#` starts a comment line.
/// Artifact path keys left empty resolve to `<workdir>/<default name>`.
/// Unknown keys are rejected with ConfigError.
class Config {
 public:
  /// Every known key with its default value.
  static Config defaults();

  void load_file(const std::filesystem::path& path);
  void parse(std::string_view text, std::string_view source = "<config>");
  void set(const std::string& key, const std::string& value);

  bool known(const std::string& key) const { return values_.contains(key); }
  const std::string& get(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  char get_char(const std::string& key) const;
  std::filesystem::path path(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace semno
