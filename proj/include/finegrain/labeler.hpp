#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace finegrain {

enum class Polarity { Atypical, Typical };
enum class Dimension { Severity, Change };

const char* to_string(Polarity p);
Polarity parse_polarity(const std::string& name);

// One keyword occurrence inside a report. The surface form is the token as it
// appeared (case-folded); for change keywords it is stem + allowed suffix, for
// severity keywords it equals the stem.
struct KeywordHit {
  std::string stem;
  std::string surface;
  std::size_t position = 0;
  Polarity polarity = Polarity::Typical;
  Dimension dimension = Dimension::Severity;
};

// Fine-grained subcategory decision for one report, with the evidence that
// produced it. No evidence means the default subcategory, typical.
struct FineLabel {
  Polarity subcategory = Polarity::Typical;
  std::vector<KeywordHit> hits;
};

// Keyword table driving the subcategory decision. Severity adjectives match
// tokens exactly; change-in-time stems additionally accept the listed
// inflection suffixes ("improve" also hits "improved", "improvement", and,
// via e-elision before vowel suffixes, "improving").
struct Lexicon {
  std::vector<std::string> severity_atypical;
  std::vector<std::string> severity_typical;
  std::vector<std::string> change_atypical;
  std::vector<std::string> change_typical;
  std::vector<std::string> suffixes;

  // Built-in keyword table.
  static Lexicon defaults();

  // Reads the sectioned text format written by save(). Throws ParseError with
  // file and line on malformed input, ConfigError on semantic violations.
  static Lexicon load(const std::string& path);

  // Writes the canonical form: fixed section order, one entry per line, no
  // comments. save() then load() reproduces the lexicon exactly.
  void save(const std::string& path) const;

  // The four keyword sets must be pairwise disjoint and duplicate-free.
  void validate() const;
};

// Case-folded word tokens. Tokens are maximal runs of [a-z0-9-] with outer
// hyphens trimmed, so hyphenated grades like "mild-to-moderate" stay intact
// while punctuation and blanks separate tokens.
std::vector<std::string> tokenize(const std::string& text);

// All keyword occurrences in token order, at most one per token. Severity is
// tried first (exact), then the longest matching change stem.
std::vector<KeywordHit> match_keywords(const std::vector<std::string>& tokens, const Lexicon& lexicon);

// No hits defaults to typical. Otherwise the polarity of the last hit in
// token order decides: reports read chronologically, so the final graded
// phrase is the closest thing to the report's bottom line.
FineLabel classify_fine(std::vector<KeywordHit> hits);

// classify_fine(match_keywords(tokenize(text), lexicon)).
FineLabel label_report(const std::string& text, const Lexicon& lexicon);

}  // namespace finegrain
