#include "fractgv/config.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "fractgv/errors.hpp"
#include "fractgv/numfmt.hpp"

namespace fractgv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string KeyValueConfig::normalize_key(std::string_view key) {
  std::string out(trim(key));
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig config;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos || trim(view.substr(0, eq)).empty())
      throw FormatError("config line " + std::to_string(number) + ": expected key=value", number);
    config.set(view.substr(0, eq), std::string(trim(view.substr(eq + 1))));
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config '" + path.string() + "'", 0);
  return parse(in);
}

bool KeyValueConfig::contains(std::string_view key) const {
  return entries_.count(normalize_key(key)) != 0;
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  const auto it = entries_.find(normalize_key(key));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueConfig::get_double(std::string_view key) const {
  const auto text = get(key);
  if (!text) return std::nullopt;
  try {
    return parse_double(*text);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("config key '" + std::string(key) + "': not a number");
  }
}

std::optional<long long> KeyValueConfig::get_int(std::string_view key) const {
  const auto value = get_double(key);
  if (!value) return std::nullopt;
  if (*value != static_cast<double>(static_cast<long long>(*value)))
    throw std::invalid_argument("config key '" + std::string(key) + "': not an integer");
  return static_cast<long long>(*value);
}

std::optional<bool> KeyValueConfig::get_bool(std::string_view key) const {
  const auto text = get(key);
  if (!text) return std::nullopt;
  if (*text == "1" || *text == "true" || *text == "yes" || *text == "on") return true;
  if (*text == "0" || *text == "false" || *text == "no" || *text == "off") return false;
  throw std::invalid_argument("config key '" + std::string(key) + "': not a boolean");
}

void KeyValueConfig::set(std::string_view key, std::string value) {
  entries_[normalize_key(key)] = std::move(value);
}

}  // namespace fractgv
