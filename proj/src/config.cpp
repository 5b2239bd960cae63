#include "ddfl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ddfl {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
        c != '.')
      return false;
  }
  return true;
}

std::pair<std::string, std::string> split_dotted(const std::string& key) {
  const std::size_t dot = key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == key.size())
    throw ConfigError("config: key '" + key +
                      "' must have the form section.key");
  return {key.substr(0, dot), key.substr(dot + 1)};
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (!valid_name(section))
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": bad section name");
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!valid_name(key))
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": bad key name '" + key + "'");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": key outside any [section]");
    if (cfg.find(section + "." + key) != nullptr)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + section + "." + key + "'");
    cfg.set(section + "." + key, value);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config file not found: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

std::string KeyValueConfig::serialize() const {
  std::string out;
  bool first = true;
  for (const Section& sec : sections_) {
    if (!first) out += '\n';
    first = false;
    out += '[' + sec.name + "]\n";
    for (const auto& [k, v] : sec.entries) out += k + " = " + v + "\n";
  }
  return out;
}

const std::string* KeyValueConfig::find(const std::string& dotted_key) const {
  const auto [section, key] = split_dotted(dotted_key);
  for (const Section& sec : sections_) {
    if (sec.name != section) continue;
    for (const auto& [k, v] : sec.entries)
      if (k == key) return &v;
  }
  return nullptr;
}

bool KeyValueConfig::has(const std::string& dotted_key) const {
  return find(dotted_key) != nullptr;
}

void KeyValueConfig::set(const std::string& dotted_key,
                         const std::string& value) {
  const auto [section, key] = split_dotted(dotted_key);
  if (!valid_name(section) || !valid_name(key))
    throw ConfigError("config: bad key '" + dotted_key + "'");
  for (Section& sec : sections_) {
    if (sec.name != section) continue;
    for (auto& [k, v] : sec.entries) {
      if (k == key) {
        v = value;
        return;
      }
    }
    sec.entries.emplace_back(key, value);
    return;
  }
  sections_.push_back({section, {{key, value}}});
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  const std::string* v = find(key);
  if (!v) throw ConfigError("config: missing key '" + key + "'");
  return *v;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  const char* begin = raw.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ConfigError("config: key '" + key + "' has non-numeric value '" +
                      raw + "'");
  return v;
}

int KeyValueConfig::get_int(const std::string& key) const {
  const std::string raw = get_string(key);
  const char* begin = raw.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw ConfigError("config: key '" + key + "' has non-integer value '" +
                      raw + "'");
  return static_cast<int>(v);
}

std::uint64_t KeyValueConfig::get_uint64(const std::string& key) const {
  const std::string raw = get_string(key);
  const char* begin = raw.c_str();
  char* end = nullptr;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0' || raw[0] == '-')
    throw ConfigError("config: key '" + key +
                      "' has non-unsigned-integer value '" + raw + "'");
  return v;
}

bool KeyValueConfig::get_bool(const std::string& key) const {
  const std::string raw = get_string(key);
  if (raw == "true" || raw == "1" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "off") return false;
  throw ConfigError("config: key '" + key + "' has non-boolean value '" + raw +
                    "'");
}

std::vector<double> KeyValueConfig::get_double_list(
    const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t pos = raw.find(',', start);
    if (pos == std::string::npos) pos = raw.size();
    const std::string field = trim(raw.substr(start, pos - start));
    if (field.empty())
      throw ConfigError("config: key '" + key + "' has an empty list entry");
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
      throw ConfigError("config: key '" + key + "' has non-numeric entry '" +
                        field + "'");
    out.push_back(v);
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> KeyValueConfig::keys() const {
  std::vector<std::string> out;
  for (const Section& sec : sections_)
    for (const auto& [k, v] : sec.entries) out.push_back(sec.name + "." + k);
  return out;
}

bool KeyValueConfig::operator==(const KeyValueConfig& other) const {
  return serialize() == other.serialize();
}

}  // namespace ddfl
