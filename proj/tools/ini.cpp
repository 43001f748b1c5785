#include "ini.hpp"

#include <fstream>
#include <sstream>

#include "stlfd/types.hpp"

namespace stlfd::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

IniFile IniFile::parse(std::string_view text) {
  IniFile ini;
  std::string current;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw IoError("config line " + std::to_string(line_no) + ": unterminated section");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      ini.sections_[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw IoError("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw IoError("config line " + std::to_string(line_no) + ": empty key");
    ini.sections_[current][key] = std::string(value);
  }
  return ini;
}

IniFile IniFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const IniFile::Section* IniFile::section(const std::string& name) const {
  const auto it = sections_.find(name);
  return it == sections_.end() ? nullptr : &it->second;
}

std::string IniFile::get(const std::string& section_name, const std::string& key, const std::string& fallback) const {
  const Section* s = section(section_name);
  if (!s) return fallback;
  const auto it = s->find(key);
  return it == s->end() ? fallback : it->second;
}

}  // namespace stlfd::cli
