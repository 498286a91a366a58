#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace fractgv {

/// Plain-text `key = value` file. '#' starts a comment, blank lines are
/// ignored, and '-' in keys is read as '_' so `max-iter` and `max_iter` agree.
class KeyValueConfig {
 public:
  static KeyValueConfig load(const std::filesystem::path& path);
  static KeyValueConfig parse(std::istream& in);

  bool contains(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  std::optional<double> get_double(std::string_view key) const;
  std::optional<long long> get_int(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;

  void set(std::string_view key, std::string value);
  const std::map<std::string, std::string>& entries() const { return entries_; }

  static std::string normalize_key(std::string_view key);

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace fractgv
