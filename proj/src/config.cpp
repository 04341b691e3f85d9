#include "curvot/scenario.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace curvot {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

RawConfig parse_config_text(const std::string& text) {
  RawConfig cfg;
  std::istringstream in(text);
  std::string line;
  RawSection* current = nullptr;
  bool saw_version = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    size_t hash = s.find('#');
    if (hash != std::string::npos) s = trim(s.substr(0, hash));
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", lineno);
      RawSection sec;
      sec.name = trim(s.substr(1, s.size() - 2));
      sec.line = lineno;
      if (sec.name.empty()) throw ConfigError("empty section name", lineno);
      cfg.sections.push_back(std::move(sec));
      current = &cfg.sections.back();
      continue;
    }

    size_t eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", lineno);
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", lineno);

    if (!current) {
      if (key == "version") {
        cfg.version = std::atoi(val.c_str());
        saw_version = true;
      } else if (key == "id") {
        cfg.id = val;
      } else {
        cfg.top.emplace_back(key, val);
      }
      continue;
    }
    current->entries.emplace_back(key, val);
  }
  if (!saw_version) throw ConfigError("missing version header", 0);
  if (cfg.version != 1) throw ConfigError("unsupported config version", 0);
  if (cfg.id.empty()) throw ConfigError("missing scenario id", 0);
  return cfg;
}

RawConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const RawConfig& cfg) {
  std::ostringstream os;
  os << "version = " << cfg.version << "\n";
  os << "id = " << cfg.id << "\n";
  for (const auto& [k, v] : cfg.top) os << k << " = " << v << "\n";
  for (const auto& sec : cfg.sections) {
    os << "\n[" << sec.name << "]\n";
    for (const auto& [k, v] : sec.entries) os << k << " = " << v << "\n";
  }
  return os.str();
}

std::vector<double> uniform_times(int times) {
  std::vector<double> t(times);
  for (int j = 0; j < times; ++j) t[j] = static_cast<double>(j) / (times - 1);
  return t;
}

}  // namespace curvot
