#ifndef DDFL_CONFIG_HPP
#define DDFL_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ddfl/errors.hpp"

namespace ddfl {

// Flat sectioned key = value store with a canonical serialization:
//
//   [section]
//   key = value
//
// Full-line comments start with '#'. Keys are addressed as "section.key".
// Sections and keys keep insertion order so serialize() is deterministic;
// serialize() followed by parse() reproduces the store exactly.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_string(const std::string& text);
  // ConfigError naming the path when the file cannot be read.
  static KeyValueConfig parse_file(const std::string& path);

  std::string serialize() const;

  bool has(const std::string& dotted_key) const;
  void set(const std::string& dotted_key, const std::string& value);

  // Typed getters; ConfigError names the key on a missing entry or a value
  // that does not parse in full.
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_uint64(const std::string& key) const;
  bool get_bool(const std::string& key) const;  // true/false/1/0/on/off

  std::vector<double> get_double_list(const std::string& key) const;  // comma-separated

  // All keys as "section.key", in order. Used for strict unknown-key checks.
  std::vector<std::string> keys() const;

  bool operator==(const KeyValueConfig& other) const;

 private:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };
  std::vector<Section> sections_;

  const std::string* find(const std::string& dotted_key) const;
};

}  // namespace ddfl

#endif  // DDFL_CONFIG_HPP
