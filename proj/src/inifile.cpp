#include "finegrain/inifile.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "finegrain/errors.hpp"

namespace finegrain {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string fold(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void fail_at(const std::string& origin, int line, const std::string& what) {
  throw ParseError(origin + ":" + std::to_string(line) + ": " + what);
}

[[noreturn]] void fail_entry(const IniEntry& entry, const std::string& what) {
  throw ParseError(entry.origin + ":" + std::to_string(entry.line) + ": [" + entry.section + "] " +
                   entry.key + ": " + what);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

IniFile IniFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

IniFile IniFile::parse(const std::string& text, const std::string& origin) {
  IniFile file;
  file.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail_at(origin, lineno, "unterminated section header");
      section = fold(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) fail_at(origin, lineno, "empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail_at(origin, lineno, "expected 'key = value'");
    if (section.empty()) fail_at(origin, lineno, "entry before any [section] header");
    IniEntry entry;
    entry.section = section;
    entry.key = fold(trim(line.substr(0, eq)));
    entry.value = trim(line.substr(eq + 1));
    entry.origin = origin;
    entry.line = lineno;
    if (entry.key.empty()) fail_at(origin, lineno, "empty key");
    for (const IniEntry& prev : file.entries_) {
      if (prev.section == entry.section && prev.key == entry.key) {
        fail_at(origin, lineno,
                "duplicate key '" + entry.key + "' in [" + section + "] (first at line " +
                    std::to_string(prev.line) + ")");
      }
    }
    file.entries_.push_back(std::move(entry));
  }
  return file;
}

std::vector<std::string> IniFile::section_names() const {
  std::vector<std::string> out;
  for (const IniEntry& e : entries_) {
    if (std::find(out.begin(), out.end(), e.section) == out.end()) out.push_back(e.section);
  }
  return out;
}

bool IniFile::has_section(const std::string& section) const {
  for (const IniEntry& e : entries_)
    if (e.section == section) return true;
  return false;
}

const IniEntry* IniFile::find(const std::string& section, const std::string& key) const {
  for (const IniEntry& e : entries_)
    if (e.section == section && e.key == key) return &e;
  return nullptr;
}

const std::string& IniFile::require(const std::string& section, const std::string& key) const {
  const IniEntry* e = find(section, key);
  if (e == nullptr) throw ParseError(origin_ + ": missing required key [" + section + "] " + key);
  return e->value;
}

std::vector<const IniEntry*> IniFile::section_entries(const std::string& section) const {
  std::vector<const IniEntry*> out;
  for (const IniEntry& e : entries_)
    if (e.section == section) out.push_back(&e);
  return out;
}

std::int64_t ini_int(const IniEntry& entry) {
  const std::string v = trim(entry.value);
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    fail_entry(entry, "expected an integer, got '" + entry.value + "'");
  return out;
}

std::uint64_t ini_u64(const IniEntry& entry) {
  const std::string v = trim(entry.value);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    fail_entry(entry, "expected a non-negative integer, got '" + entry.value + "'");
  return out;
}

double ini_double(const IniEntry& entry) {
  const std::string v = trim(entry.value);
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    fail_entry(entry, "expected a number, got '" + entry.value + "'");
  }
}

std::vector<double> ini_double_list(const IniEntry& entry) {
  std::vector<double> out;
  for (const std::string& tok : split_ws(entry.value)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail_entry(entry, "expected numbers, got '" + tok + "'");
    }
  }
  if (out.empty()) fail_entry(entry, "expected at least one number");
  return out;
}

std::vector<std::int64_t> ini_int_list(const IniEntry& entry) {
  std::vector<std::int64_t> out;
  for (const std::string& tok : split_ws(entry.value)) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      fail_entry(entry, "expected integers, got '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) fail_entry(entry, "expected at least one integer");
  return out;
}

std::vector<std::uint64_t> ini_u64_list(const IniEntry& entry) {
  std::vector<std::uint64_t> out;
  for (const std::string& tok : split_ws(entry.value)) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      fail_entry(entry, "expected non-negative integers, got '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) fail_entry(entry, "expected at least one integer");
  return out;
}

}  // namespace finegrain
