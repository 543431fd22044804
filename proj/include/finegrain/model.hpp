#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "finegrain/data.hpp"
#include "finegrain/losses.hpp"
#include "finegrain/objective.hpp"

namespace finegrain {

// Fully-connected network parameters. weights[l] is row-major
// [sizes[l+1] x sizes[l]]; hidden layers apply a rectifier, the final layer
// emits the two logits. Doubles as the container for anything shaped like the
// parameters (gradients, moment accumulators).
struct MlpParams {
  std::vector<int> sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  bool operator==(const MlpParams&) const = default;
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double lr = 1e-4;
  double weight_decay = 0.0;
  double eps = 1e-8;

  bool operator==(const AdamHyper&) const = default;
};

// Adam accumulators; m and v mirror the parameter shapes, t counts completed
// steps.
struct AdamState {
  MlpParams m;
  MlpParams v;
  std::uint64_t t = 0;
  AdamHyper hyper;

  static AdamState init(const MlpParams& params, AdamHyper hyper);

  bool operator==(const AdamState&) const = default;
};

struct TrainConfig {
  std::vector<int> layer_sizes = {2, 16, 16, 2};
  int iterations = 5000;
  int batch_size = 32;
  int checkpoint_every = 1000;
  std::uint64_t seed = 1;
  ObjectiveConfig objective;
  AdamHyper adam;

  // checkpoint_every must be positive and divide iterations; batch size
  // positive; layer sizes valid for init_params.
  void validate() const;
};

// Digest of every training-relevant config field; checkpoints carry it so a
// resume against a different config is caught instead of silently diverging.
std::uint64_t config_hash(const TrainConfig& cfg);

struct Checkpoint {
  std::uint64_t iteration = 0;
  MlpParams params;
  AdamState adam;
  std::string rng_state;
  std::uint64_t config_hash = 0;

  bool operator==(const Checkpoint&) const = default;
};

// Binary checkpoint file, all integers and IEEE doubles little-endian:
//   bytes 0-7   magic "FGCKPT" + 0x00 + format version 0x01
//   bytes 8-15  config hash (u64)
//   bytes 16-23 iteration (u64)
//   bytes 24-31 Adam step counter t (u64)
//   bytes 32-71 Adam hyperparameters beta1, beta2, lr, weight_decay, eps (f64 each)
//   u32 layer-size count, then each layer size as u32
//   parameter payload: per layer, weights row-major then biases (f64 each)
//   Adam m payload, then Adam v payload (same layout as parameters)
//   u32 byte length of the serialized rng state, then that many bytes
// Round-trips bit-exactly. load_checkpoint throws ParseError on anything
// malformed.
void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Weights drawn uniform in +/- sqrt(6 / (fan_in + fan_out)), biases zero.
// Layer sizes need at least two entries, all positive, and the final size
// must be 2 (the two logits); violations throw ConfigError.
MlpParams init_params(const std::vector<int>& layer_sizes, std::uint64_t seed);

// Affine + rectifier per hidden layer, affine to two logits, softmax.
// Throws InvalidInputError when x does not match the first layer fan-in.
std::pair<Logits, Probabilities> forward(const MlpParams& params, const std::vector<double>& x);
std::vector<Probabilities> forward_batch(const MlpParams& params,
                                         const std::vector<std::vector<double>>& xs);

// Mean-reduced gradient of the tagged batch loss in parameter space. The
// rectifier uses subgradient 0 at exactly zero pre-activation.
MlpParams backward(const MlpParams& params, const std::vector<TaggedSample>& batch,
                   const ObjectiveConfig& cfg);

// Standard bias-corrected Adam update, in place. Zero gradients (with zero
// weight decay) leave the parameters unchanged; t always advances by one.
void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads);

// Training batch order: the infinite concatenation of per-epoch shuffles,
// where epoch e permutes [0, n) seeded by mix_seed(shuffle_seed, e). A pure
// function of (shuffle_seed, iteration), so a resumed run reproduces the
// exact batch sequence without replaying consumed generator state.
std::vector<std::size_t> batch_indices(std::size_t n, int batch_size, std::uint64_t shuffle_seed,
                                       std::uint64_t iteration);

// Positive-class probability score of every ground-truth positive in val,
// ranked across fine subcategories. A positive without a recorded fine label
// counts as typical (the labeler's default).
double validation_auc_fg(const MlpParams& params, const std::vector<Sample>& val);

struct TrainResult {
  std::vector<Checkpoint> checkpoints;
  std::size_t best_index = 0;  // argmax val_history, ties to the earliest
  std::vector<double> val_history;
};

// Maps train_set through cfg.objective once, then runs minibatch Adam for
// cfg.iterations, checkpointing (and validating) every checkpoint_every
// iterations. Fully deterministic given (cfg, data). Throws MetricError
// before training if val lacks either fine subcategory.
TrainResult train(const TrainConfig& cfg, const std::vector<Sample>& train_set,
                  const std::vector<Sample>& val_set);

// Continues a checkpointed run to cfg.iterations; the trajectory is
// bit-identical to the uninterrupted run. Throws ConfigError when the
// checkpoint was produced under a different config.
TrainResult train_from(const Checkpoint& checkpoint, const TrainConfig& cfg,
                       const std::vector<Sample>& train_set, const std::vector<Sample>& val_set);

}  // namespace finegrain
