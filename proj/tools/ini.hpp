#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace stlfd::cli {

/// Sectioned key=value file. Keys before the first [section] go to "".
/// '#' and ';' start comment lines; values may be double-quoted.
class IniFile {
 public:
  using Section = std::map<std::string, std::string>;

  static IniFile parse(std::string_view text);
  static IniFile load(const std::filesystem::path& path);

  const Section* section(const std::string& name) const;
  Section& section_mut(const std::string& name) { return sections_[name]; }
  std::string get(const std::string& section, const std::string& key, const std::string& fallback = {}) const;

 private:
  std::map<std::string, Section> sections_;
};

}  // namespace stlfd::cli
