#include "finegrain/labeler.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "finegrain/errors.hpp"

namespace finegrain {

namespace {

bool is_token_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
}

std::string fold(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// True when token = stem + suffix for the given suffix list; empty suffix
// (exact match) is always accepted. A trailing 'e' on the stem elides before
// vowel-initial suffixes, so "improve" covers "improving".
bool matches_with_suffix(const std::string& token, const std::string& stem,
                         const std::vector<std::string>& suffixes) {
  if (token == stem) return true;
  for (const auto& suffix : suffixes) {
    if (token == stem + suffix) return true;
    if (!stem.empty() && stem.back() == 'e' && !suffix.empty() && is_vowel(suffix.front()) &&
        token == stem.substr(0, stem.size() - 1) + suffix) {
      return true;
    }
  }
  return false;
}

void append_section(std::ostringstream& os, const char* name, const std::vector<std::string>& entries) {
  os << '[' << name << "]\n";
  for (const auto& e : entries) os << e << '\n';
}

}  // namespace

const char* to_string(Polarity p) { return p == Polarity::Atypical ? "atypical" : "typical"; }

Polarity parse_polarity(const std::string& name) {
  if (name == "atypical") return Polarity::Atypical;
  if (name == "typical") return Polarity::Typical;
  throw ConfigError("unknown subcategory name: '" + name + "'");
}

Lexicon Lexicon::defaults() {
  Lexicon lex;
  lex.severity_atypical = {"trace", "small", "tiny", "minor", "minimal", "mild", "mild-to-moderate"};
  lex.severity_typical = {"large", "massive", "substantial", "moderate", "moderate-to-severe", "acute", "severe"};
  lex.change_atypical = {"clear", "resolution", "improve", "decrease"};
  lex.change_typical = {"progress", "worsen", "increase"};
  lex.suffixes = {"s", "es", "d", "ed", "ing", "ion", "ment", "ments"};
  return lex;
}

void Lexicon::validate() const {
  std::set<std::string> seen;
  const auto check = [&seen](const std::vector<std::string>& entries, const char* section) {
    for (const auto& e : entries) {
      if (e.empty()) throw ConfigError(std::string("lexicon: empty entry in ") + section);
      if (!seen.insert(e).second) {
        throw ConfigError("lexicon: keyword '" + e + "' appears in more than one set (or twice)");
      }
    }
  };
  check(severity_atypical, "severity.atypical");
  check(severity_typical, "severity.typical");
  check(change_atypical, "change.atypical");
  check(change_typical, "change.typical");
  for (const auto& s : suffixes) {
    if (s.empty()) throw ConfigError("lexicon: empty suffix entry (exact match is always implied)");
  }
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("lexicon: cannot open '" + path + "'");

  Lexicon lex;
  std::vector<std::string>* section = nullptr;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError(path + ":" + std::to_string(lineno) + ": unterminated section header");
      }
      const std::string name = line.substr(1, line.size() - 2);
      if (name == "severity.atypical") section = &lex.severity_atypical;
      else if (name == "severity.typical") section = &lex.severity_typical;
      else if (name == "change.atypical") section = &lex.change_atypical;
      else if (name == "change.typical") section = &lex.change_typical;
      else if (name == "suffixes") section = &lex.suffixes;
      else throw ParseError(path + ":" + std::to_string(lineno) + ": unknown section [" + name + "]");
      continue;
    }
    if (section == nullptr) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": entry before any section header");
    }
    section->push_back(fold(line));
  }
  lex.validate();
  return lex;
}

void Lexicon::save(const std::string& path) const {
  std::ostringstream os;
  append_section(os, "severity.atypical", severity_atypical);
  append_section(os, "severity.typical", severity_typical);
  append_section(os, "change.atypical", change_atypical);
  append_section(os, "change.typical", change_typical);
  append_section(os, "suffixes", suffixes);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("lexicon: cannot write '" + path + "'");
  out << os.str();
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&tokens, &current]() {
    // Trim connector hyphens so "left-sided," and "-stable" tokenize cleanly.
    std::size_t b = 0, e = current.size();
    while (b < e && current[b] == '-') ++b;
    while (e > b && current[e - 1] == '-') --e;
    if (e > b) tokens.push_back(current.substr(b, e - b));
    current.clear();
  };
  for (char raw : text) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
    if (is_token_char(c)) {
      current.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<KeywordHit> match_keywords(const std::vector<std::string>& tokens, const Lexicon& lexicon) {
  lexicon.validate();
  std::vector<KeywordHit> hits;

  const auto try_severity = [&](const std::string& token, std::size_t pos) -> bool {
    for (const auto* set : {&lexicon.severity_atypical, &lexicon.severity_typical}) {
      const Polarity pol = (set == &lexicon.severity_atypical) ? Polarity::Atypical : Polarity::Typical;
      if (std::find(set->begin(), set->end(), token) != set->end()) {
        hits.push_back({token, token, pos, pol, Dimension::Severity});
        return true;
      }
    }
    return false;
  };

  const auto try_change = [&](const std::string& token, std::size_t pos) {
    const std::string* best = nullptr;
    Polarity best_pol = Polarity::Typical;
    for (const auto* set : {&lexicon.change_atypical, &lexicon.change_typical}) {
      const Polarity pol = (set == &lexicon.change_atypical) ? Polarity::Atypical : Polarity::Typical;
      for (const auto& stem : *set) {
        if (matches_with_suffix(token, stem, lexicon.suffixes)) {
          if (best == nullptr || stem.size() > best->size()) {
            best = &stem;
            best_pol = pol;
          }
        }
      }
    }
    if (best != nullptr) hits.push_back({*best, token, pos, best_pol, Dimension::Change});
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!try_severity(tokens[i], i)) try_change(tokens[i], i);
  }
  return hits;
}

FineLabel classify_fine(std::vector<KeywordHit> hits) {
  FineLabel label;
  label.subcategory = hits.empty() ? Polarity::Typical : hits.back().polarity;
  label.hits = std::move(hits);
  return label;
}

FineLabel label_report(const std::string& text, const Lexicon& lexicon) {
  return classify_fine(match_keywords(tokenize(text), lexicon));
}

}  // namespace finegrain
