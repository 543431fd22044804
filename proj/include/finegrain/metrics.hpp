#pragma once

#include <string>
#include <utility>
#include <vector>

#include "finegrain/labeler.hpp"

namespace finegrain {

// One scored instance for ranking metrics; group is the ground-truth side
// (0 = the class expected to score low, 1 = high).
struct ScoredSample {
  double score = 0.0;
  int group = 0;
};

// Aggregate of one metric over repeated runs.
struct MetricReport {
  std::string name;
  double mean = 0.0;
  double std_dev = 0.0;
  std::vector<double> per_run;
};

// Mann-Whitney AUC: the fraction of (group0, group1) pairs ranked correctly,
// ties counting one half. Computed via midranks in O(n log n); the rank sums
// are half-integers, so the result equals exhaustive pair counting exactly.
// Throws MetricError if either group is empty, InvalidInputError on bad input.
double auc(const std::vector<ScoredSample>& samples);

// AUC between the fine subcategories of positive samples, atypical scoring
// as group 0 and typical as group 1. Higher means the model separates them
// better. Throws MetricError if a subcategory is missing.
double auc_fg(const std::vector<std::pair<double, Polarity>>& positives);

// Mean and sample (n-1) standard deviation over per-run values; a single run
// reports std 0. Throws InvalidInputError on empty input.
MetricReport aggregate_runs(const std::string& name, const std::vector<double>& values);

}  // namespace finegrain
