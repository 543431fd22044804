#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace finegrain {

// One key = value line, tagged with where it came from so schema errors can
// point at the offending file and line.
struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  std::string origin;
  int line = 0;
};

// Line-oriented sectioned key-value text: '[section]' headers, 'key = value'
// entries, '#' starts a comment, blank lines ignored. Keys are case-folded;
// values keep their case (they may be paths). Duplicate keys within a section
// are an error, as are entries before the first section header.
class IniFile {
 public:
  static IniFile load(const std::string& path);
  static IniFile parse(const std::string& text, const std::string& origin);

  const std::vector<IniEntry>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }

  // Section names in order of first appearance.
  std::vector<std::string> section_names() const;
  bool has_section(const std::string& section) const;
  const IniEntry* find(const std::string& section, const std::string& key) const;
  // ParseError naming origin, section and key when absent.
  const std::string& require(const std::string& section, const std::string& key) const;
  std::vector<const IniEntry*> section_entries(const std::string& section) const;

 private:
  std::vector<IniEntry> entries_;
  std::string origin_;
};

// Value conversions; all throw ParseError carrying the entry's origin:line on
// malformed input.
std::int64_t ini_int(const IniEntry& entry);
std::uint64_t ini_u64(const IniEntry& entry);
double ini_double(const IniEntry& entry);
std::vector<double> ini_double_list(const IniEntry& entry);   // whitespace-separated
std::vector<std::int64_t> ini_int_list(const IniEntry& entry);
std::vector<std::uint64_t> ini_u64_list(const IniEntry& entry);

}  // namespace finegrain
