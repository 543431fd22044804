#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "finegrain/losses.hpp"

namespace finegrain {

struct Sample;

// Coarse finding label as it appears in datasets. Blank marks a record where
// the extraction produced nothing; such samples must be filtered out before
// they reach the objective.
enum class CoarseLabel : std::uint8_t { Negative, Positive, Uncertain, Blank };

const char* to_string(CoarseLabel label);
// Parses the dataset encoding: "0", "1", "u", "" (blank).
CoarseLabel parse_coarse_label(const std::string& text);

// How coarse labels are mapped before training:
//   UIgnore   drop uncertain samples
//   UZeros    uncertain -> negative, plain CE
//   UOnes     uncertain -> positive, plain CE
//   URm       uncertain -> positive with the noise-robust loss
//   PRm       positives get the noise-robust loss, uncertain dropped
//   PuRm      positives and uncertain get the noise-robust loss
//   UUniform  uncertain pulled towards the uniform prediction, positives and
//             negatives get the noise-robust loss
enum class Strategy : std::uint8_t { UIgnore, UZeros, UOnes, URm, PRm, PuRm, UUniform };

const char* to_string(Strategy s);
Strategy parse_strategy(const std::string& name);

// Which robust loss replaces CE where a strategy calls for one.
enum class NoiseLoss : std::uint8_t { PCE, GCE };

const char* to_string(NoiseLoss n);
NoiseLoss parse_noise_loss(const std::string& name);

struct ObjectiveConfig {
  Strategy strategy = Strategy::PuRm;
  TauParam tau{0.3};
  GceParam q{0.7};
  NoiseLoss noise_loss = NoiseLoss::PCE;
  // Weight on the noise-loss terms of the UUniform composite; ignored by
  // every other strategy, whose objectives carry unit weights.
  double lambda = 1.0;
};

// In UUniform mode uncertain samples carry no binary target; the uniformity
// loss ignores the label and this sentinel marks the state explicitly.
inline constexpr int kUniformTarget = -1;

// A sample after strategy mapping: features plus the effective label and the
// loss that scores it.
struct TaggedSample {
  std::vector<double> features;
  int label = 0;  // 0, 1, or kUniformTarget (iff kind == UC)
  LossKind kind = LossKind::CE;
};

// Maps coarse labels through cfg.strategy (see Strategy). Negatives score
// plain CE except under UUniform. Throws DatasetError on a blank label.
std::vector<TaggedSample> apply_strategy(const std::vector<Sample>& samples, const ObjectiveConfig& cfg);

// Loss of one tagged sample given the model's probabilities. Under UUniform
// the noise-loss terms are scaled by cfg.lambda (uniformity terms are not).
double sample_loss(const TaggedSample& t, Probabilities p, const ObjectiveConfig& cfg);

// Arithmetic mean of sample_loss over the batch. Throws InvalidInputError on
// an empty or length-mismatched batch.
double batch_loss(const std::vector<TaggedSample>& batch, const std::vector<Probabilities>& probs,
                  const ObjectiveConfig& cfg);

// Gradient of sample_loss w.r.t. the logits, including the UUniform lambda
// scaling. The trainer backpropagates this through the network.
LossGrad tagged_loss_grad(const TaggedSample& t, Logits z, const ObjectiveConfig& cfg);

}  // namespace finegrain
