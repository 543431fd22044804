#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finegrain/labeler.hpp"
#include "finegrain/objective.hpp"

namespace finegrain {

// One dataset record. The fine subcategory models ground truth and is only
// meaningful for positives; report_text carries the sentence it was mined
// from, when there is one.
struct Sample {
  std::string id;
  std::vector<double> features;
  CoarseLabel coarse = CoarseLabel::Negative;
  std::optional<Polarity> fine;
  std::optional<std::string> report_text;

  bool operator==(const Sample&) const = default;
};

// Four isotropic Gaussian clusters in 2-D: negatives, typical positives on
// the far side, a smaller atypical-positive cluster between the classes, and
// an uncertain cluster straddling the midline (offset along it, so its mass
// sits on the class boundary without covering the atypical cloud). The
// defaults are chosen so a plain CE classifier misranks atypical positives
// while uncertainty handling, not cluster overlap, decides the fine-grained
// ranking.
struct SynthConfig {
  int n_negative = 500;
  int n_typical_pos = 500;
  int n_atypical_pos = 300;
  int n_uncertain = 500;
  double negative_mean[2] = {-2.0, 0.0};
  double typical_pos_mean[2] = {2.0, 0.0};
  double atypical_pos_mean[2] = {-1.0, 0.0};
  double uncertain_mean[2] = {0.0, 2.0};
  double stddev = 0.7;
  double noise_rate = 0.0;
  std::uint64_t seed = 1;

  // Counts must be non-negative, stddev positive, noise_rate in [0,1).
  void validate() const;
};

// Draws the clusters in a fixed order (negative, typical positive, atypical
// positive, uncertain) with ids like "neg-0001". Positives carry their fine
// subcategory and a report sentence from the matching corpus rows. Applies
// inject_noise(cfg.noise_rate) before returning. Deterministic given cfg.
std::vector<Sample> generate(const SynthConfig& cfg);

// Flips the coarse label of exactly round(eta * n) of the {0,1}-labeled
// samples, chosen by seeded shuffle; uncertain samples and fine labels are
// untouched. Flipping twice with the same seed restores the input.
std::vector<Sample> inject_noise(const std::vector<Sample>& dataset, double eta, std::uint64_t seed);

// Newline-delimited records, one structured object per line with fields
// id, features, coarse ("0"|"1"|"u"), and optional fine/report_text. Blank
// coarse labels are rejected. Read errors name the offending line.
std::vector<Sample> read_dataset(const std::string& path);
void write_dataset(const std::vector<Sample>& dataset, const std::string& path);

}  // namespace finegrain
