#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geom.hpp"

namespace sconclab {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;  // 0 for programmatic overrides
};

struct ConfigSection {
  std::string name;
  std::vector<ConfigEntry> entries;
};

// Sectioned key-value configuration. Lines are `key = value` under a
// `[section]` header; blank lines and lines starting with # or ; are
// ignored. Sections and keys keep file order; a repeated key overwrites its
// earlier value in place.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text, const std::string& origin);

  void set(const std::string& section, const std::string& key, const std::string& value);
  // spec is "section.key=value"; later overrides win over file content.
  void apply_override(const std::string& spec);

  bool has(const std::string& section, const std::string& key) const;

  std::string str(const std::string& section, const std::string& key) const;
  std::string str_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  int integer(const std::string& section, const std::string& key) const;
  int integer_or(const std::string& section, const std::string& key, int fallback) const;
  bool flag_or(const std::string& section, const std::string& key, bool fallback) const;
  std::uint64_t u64_or(const std::string& section, const std::string& key,
                       std::uint64_t fallback) const;

  // Comma or space separated lists.
  std::vector<double> numbers(const std::string& section, const std::string& key) const;
  std::vector<int> integers_or(const std::string& section, const std::string& key,
                               const std::vector<int>& fallback) const;
  std::vector<std::string> words_or(const std::string& section, const std::string& key,
                                    const std::vector<std::string>& fallback) const;
  // A single number broadcasts to all axes.
  Vec vec_or(const std::string& section, const std::string& key, int dim,
             const Vec& fallback) const;

  const std::vector<ConfigSection>& sections() const { return sections_; }
  const ConfigSection* find(const std::string& name) const;
  const std::string& origin() const { return origin_; }

 private:
  const ConfigEntry* lookup(const std::string& section, const std::string& key) const;
  [[noreturn]] void bad_value(const ConfigEntry& e, const std::string& section,
                              const char* want) const;

  std::vector<ConfigSection> sections_;
  std::string origin_ = "<empty>";
};

}  // namespace sconclab
