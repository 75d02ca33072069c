#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sconclab {

namespace {

std::vector<std::string> list_items(const std::string& value) {
  std::string normalized = value;
  for (char& c : normalized)
    if (c == ',') c = ' ';
  std::istringstream in(normalized);
  std::vector<std::string> items;
  std::string item;
  while (in >> item) items.push_back(item);
  return items;
}

double parse_double(const std::string& s, bool& ok) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  ok = end != begin && *end == '\0';
  return v;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::Config, "%s: cannot open config file", path.c_str());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  ConfigSection* current = nullptr;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        fail(Err::Config, "%s:%d: unterminated section header '%s'", origin.c_str(), line,
             s.c_str());
      std::string name = trim(s.substr(1, s.size() - 2));
      if (name.empty()) fail(Err::Config, "%s:%d: empty section name", origin.c_str(), line);
      current = nullptr;
      for (auto& sec : cfg.sections_)
        if (sec.name == name) current = &sec;
      if (!current) {
        cfg.sections_.push_back({name, {}});
        current = &cfg.sections_.back();
      }
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos)
      fail(Err::Config, "%s:%d: expected 'key = value', got '%s'", origin.c_str(), line,
           s.c_str());
    if (!current)
      fail(Err::Config, "%s:%d: key outside any [section]", origin.c_str(), line);
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(Err::Config, "%s:%d: empty key", origin.c_str(), line);
    bool replaced = false;
    for (auto& e : current->entries)
      if (e.key == key) {
        e.value = value;
        e.line = line;
        replaced = true;
      }
    if (!replaced) current->entries.push_back({key, value, line});
  }
  return cfg;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  for (auto& sec : sections_)
    if (sec.name == section) {
      for (auto& e : sec.entries)
        if (e.key == key) {
          e.value = value;
          e.line = 0;
          return;
        }
      sec.entries.push_back({key, value, 0});
      return;
    }
  sections_.push_back({section, {{key, value, 0}}});
}

void Config::apply_override(const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos)
    fail(Err::Config, "override '%s' is not of the form section.key=value", spec.c_str());
  std::string path = trim(spec.substr(0, eq));
  auto dotpos = path.find('.');
  if (dotpos == std::string::npos || dotpos == 0 || dotpos + 1 == path.size())
    fail(Err::Config, "override '%s' is not of the form section.key=value", spec.c_str());
  set(path.substr(0, dotpos), path.substr(dotpos + 1), trim(spec.substr(eq + 1)));
}

const ConfigSection* Config::find(const std::string& name) const {
  for (const auto& sec : sections_)
    if (sec.name == name) return &sec;
  return nullptr;
}

const ConfigEntry* Config::lookup(const std::string& section, const std::string& key) const {
  const ConfigSection* sec = find(section);
  if (!sec) return nullptr;
  for (const auto& e : sec->entries)
    if (e.key == key) return &e;
  return nullptr;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return lookup(section, key) != nullptr;
}

void Config::bad_value(const ConfigEntry& e, const std::string& section,
                       const char* want) const {
  fail(Err::Config, "%s:%d: [%s] %s = '%s' is not %s", origin_.c_str(), e.line,
       section.c_str(), e.key.c_str(), e.value.c_str(), want);
}

std::string Config::str(const std::string& section, const std::string& key) const {
  const ConfigEntry* e = lookup(section, key);
  if (!e)
    fail(Err::Config, "%s: missing required key [%s] %s", origin_.c_str(), section.c_str(),
         key.c_str());
  return e->value;
}

std::string Config::str_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  const ConfigEntry* e = lookup(section, key);
  return e ? e->value : fallback;
}

double Config::number(const std::string& section, const std::string& key) const {
  const ConfigEntry* e = lookup(section, key);
  if (!e)
    fail(Err::Config, "%s: missing required key [%s] %s", origin_.c_str(), section.c_str(),
         key.c_str());
  bool ok = false;
  double v = parse_double(e->value, ok);
  if (!ok) bad_value(*e, section, "a number");
  return v;
}

double Config::number_or(const std::string& section, const std::string& key,
                         double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

int Config::integer(const std::string& section, const std::string& key) const {
  double v = number(section, key);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) bad_value(*lookup(section, key), section, "an integer");
  return i;
}

int Config::integer_or(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? integer(section, key) : fallback;
}

bool Config::flag_or(const std::string& section, const std::string& key, bool fallback) const {
  const ConfigEntry* e = lookup(section, key);
  if (!e) return fallback;
  const std::string& v = e->value;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  bad_value(*e, section, "a boolean (true/false)");
}

std::uint64_t Config::u64_or(const std::string& section, const std::string& key,
                             std::uint64_t fallback) const {
  const ConfigEntry* e = lookup(section, key);
  if (!e) return fallback;
  const char* begin = e->value.c_str();
  char* end = nullptr;
  unsigned long long v = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0') bad_value(*e, section, "an unsigned integer");
  return v;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key) const {
  const ConfigEntry* e = lookup(section, key);
  if (!e)
    fail(Err::Config, "%s: missing required key [%s] %s", origin_.c_str(), section.c_str(),
         key.c_str());
  std::vector<double> out;
  for (const std::string& item : list_items(e->value)) {
    bool ok = false;
    double v = parse_double(item, ok);
    if (!ok) bad_value(*e, section, "a list of numbers");
    out.push_back(v);
  }
  if (out.empty()) bad_value(*e, section, "a non-empty list of numbers");
  return out;
}

std::vector<int> Config::integers_or(const std::string& section, const std::string& key,
                                     const std::vector<int>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<int> out;
  for (double v : numbers(section, key)) {
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) bad_value(*lookup(section, key), section, "integers");
    out.push_back(i);
  }
  return out;
}

std::vector<std::string> Config::words_or(const std::string& section, const std::string& key,
                                          const std::vector<std::string>& fallback) const {
  const ConfigEntry* e = lookup(section, key);
  return e ? list_items(e->value) : fallback;
}

Vec Config::vec_or(const std::string& section, const std::string& key, int dim,
                   const Vec& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<double> vals = numbers(section, key);
  Vec out(dim);
  if (vals.size() == 1) {
    for (int k = 0; k < dim; ++k) out[k] = vals[0];
    return out;
  }
  if (static_cast<int>(vals.size()) != dim)
    bad_value(*lookup(section, key), section, "a vector matching the dimension");
  for (int k = 0; k < dim; ++k) out[k] = vals[static_cast<std::size_t>(k)];
  return out;
}

}  // namespace sconclab
