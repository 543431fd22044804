#include "finegrain/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "finegrain/errors.hpp"

namespace finegrain {

double auc(const std::vector<ScoredSample>& samples) {
  std::size_t n0 = 0, n1 = 0;
  for (const auto& s : samples) {
    if (!std::isfinite(s.score)) throw InvalidInputError("auc: non-finite score");
    if (s.group != 0 && s.group != 1) throw InvalidInputError("auc: group must be 0 or 1");
    (s.group == 1 ? n1 : n0) += 1;
  }
  if (n0 == 0 || n1 == 0) {
    throw MetricError("auc: needs at least one sample in each group");
  }

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&samples](std::size_t a, std::size_t b) { return samples[a].score < samples[b].score; });

  // Midranks: every member of a tie block gets the block's average rank. The
  // average of consecutive integers is a half-integer, exact in double, so
  // the rank sum matches pairwise counting bit for bit.
  double rank_sum_1 = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && samples[order[j]].score == samples[order[i]].score) ++j;
    // 1-based ranks i+1 .. j share the midrank ((i+1) + j) / 2.
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (samples[order[k]].group == 1) rank_sum_1 += midrank;
    }
    i = j;
  }

  const double u1 =
      rank_sum_1 - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
  return u1 / (static_cast<double>(n0) * static_cast<double>(n1));
}

double auc_fg(const std::vector<std::pair<double, Polarity>>& positives) {
  std::vector<ScoredSample> scored;
  scored.reserve(positives.size());
  for (const auto& [score, subcategory] : positives) {
    scored.push_back({score, subcategory == Polarity::Typical ? 1 : 0});
  }
  std::size_t n_atypical = positives.size() - static_cast<std::size_t>(std::count_if(
                                                  scored.begin(), scored.end(),
                                                  [](const ScoredSample& s) { return s.group == 1; }));
  if (n_atypical == 0 || n_atypical == positives.size()) {
    throw MetricError("auc_fg: needs both an atypical and a typical sample");
  }
  return auc(scored);
}

MetricReport aggregate_runs(const std::string& name, const std::vector<double>& values) {
  if (values.empty()) throw InvalidInputError("aggregate_runs: no values");
  MetricReport report;
  report.name = name;
  report.per_run = values;
  // An all-equal list gets its exact value back: summing and dividing would
  // otherwise leak rounding noise into the "std 0" case.
  if (std::all_of(values.begin(), values.end(), [&values](double v) { return v == values.front(); })) {
    report.mean = values.front();
    return report;
  }
  const double n = static_cast<double>(values.size());
  report.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - report.mean) * (v - report.mean);
  report.std_dev = std::sqrt(ss / (n - 1.0));
  return report;
}

}  // namespace finegrain
