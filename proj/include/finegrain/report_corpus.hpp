#pragma once

#include <vector>

#include "finegrain/labeler.hpp"

namespace finegrain {

// A report sentence with the subcategory its grading keyword implies and the
// lexicon stem expected to fire. Doubles as labeled fixtures for the labeler
// and as the sentence pool attached to synthetic positives.
struct ReportExample {
  const char* text;
  Polarity subcategory;
  Dimension dimension;
  const char* stem;
};

// Sentence with no grading keyword at all; the labeler must default it to
// typical.
inline constexpr const char* kKeywordFreeSentence = "There is consolidation in the right lung.";

// Example sentences covering every keyword in the default lexicon: severity
// grades first, then change-in-time phrasings, each block atypical before
// typical.
const std::vector<ReportExample>& report_corpus();

// The corpus rows of one subcategory (sentence pool for synthetic data).
std::vector<const char*> corpus_sentences(Polarity subcategory);

}  // namespace finegrain
