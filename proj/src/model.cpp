#include "finegrain/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "finegrain/errors.hpp"
#include "finegrain/metrics.hpp"
#include "finegrain/rng.hpp"

namespace finegrain {

namespace {

// Seed streams derived from TrainConfig::seed.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kShuffleStream = 1;

void validate_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw ConfigError("network needs at least an input and an output layer");
  for (int s : sizes) {
    if (s < 1) throw ConfigError("layer sizes must be positive");
  }
  if (sizes.back() != 2) throw ConfigError("final layer must have exactly 2 outputs");
}

MlpParams zeros_like(const MlpParams& params) {
  MlpParams z;
  z.sizes = params.sizes;
  z.weights.reserve(params.weights.size());
  z.biases.reserve(params.biases.size());
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    z.weights.emplace_back(params.weights[l].size(), 0.0);
    z.biases.emplace_back(params.biases[l].size(), 0.0);
  }
  return z;
}

// Forward pass keeping every layer's pre-activation; activations[0] is the
// input, activations[l+1] the rectified output of layer l (final layer raw).
struct Trace {
  std::vector<std::vector<double>> activations;
  std::vector<std::vector<double>> preacts;
};

Trace traced_forward(const MlpParams& params, const std::vector<double>& x) {
  if (x.size() != static_cast<std::size_t>(params.sizes.front())) {
    throw InvalidInputError("forward: feature length " + std::to_string(x.size()) +
                            " does not match input width " + std::to_string(params.sizes.front()));
  }
  Trace trace;
  trace.activations.push_back(x);
  const std::size_t n_layers = params.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& in = trace.activations.back();
    const auto out_n = static_cast<std::size_t>(params.sizes[l + 1]);
    const auto in_n = static_cast<std::size_t>(params.sizes[l]);
    std::vector<double> z(out_n, 0.0);
    for (std::size_t i = 0; i < out_n; ++i) {
      double acc = params.biases[l][i];
      const double* row = params.weights[l].data() + i * in_n;
      for (std::size_t j = 0; j < in_n; ++j) acc += row[j] * in[j];
      z[i] = acc;
    }
    trace.preacts.push_back(z);
    if (l + 1 < n_layers) {
      for (double& v : z) v = std::max(0.0, v);
    }
    trace.activations.push_back(std::move(z));
  }
  return trace;
}

std::string canonical_config_string(const TrainConfig& cfg) {
  std::ostringstream os;
  os << "sizes=";
  for (int s : cfg.layer_sizes) os << s << ',';
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                ";iterations=%d;batch=%d;ckpt=%d;seed=%llu;strategy=%s;tau=%.17g;q=%.17g;noise=%s;"
                "lambda=%.17g;beta1=%.17g;beta2=%.17g;lr=%.17g;wd=%.17g;eps=%.17g",
                cfg.iterations, cfg.batch_size, cfg.checkpoint_every,
                static_cast<unsigned long long>(cfg.seed), to_string(cfg.objective.strategy),
                cfg.objective.tau.value(), cfg.objective.q.value(), to_string(cfg.objective.noise_loss),
                cfg.objective.lambda, cfg.adam.beta1, cfg.adam.beta2, cfg.adam.lr, cfg.adam.weight_decay,
                cfg.adam.eps);
  os << buf;
  return os.str();
}

// --- little-endian binary checkpoint encoding -------------------------------

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string raw(std::size_t n) {
    need(n);
    std::string out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  void expect_end() const {
    if (pos_ != bytes_.size()) throw ParseError("checkpoint '" + path_ + "': trailing bytes");
  }

 private:
  unsigned char byte() { return static_cast<unsigned char>(bytes_[pos_++]); }
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw ParseError("checkpoint '" + path_ + "': truncated");
  }
  const std::string& bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

void put_params(std::string& out, const MlpParams& p) {
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    for (double w : p.weights[l]) put_f64(out, w);
    for (double b : p.biases[l]) put_f64(out, b);
  }
}

MlpParams read_params(Reader& r, const std::vector<int>& sizes) {
  MlpParams p;
  p.sizes = sizes;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto out_n = static_cast<std::size_t>(sizes[l + 1]);
    const auto in_n = static_cast<std::size_t>(sizes[l]);
    std::vector<double> w(out_n * in_n);
    for (double& v : w) v = r.f64();
    std::vector<double> b(out_n);
    for (double& v : b) v = r.f64();
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

constexpr char kMagic[8] = {'F', 'G', 'C', 'K', 'P', 'T', '\0', '\1'};

}  // namespace

AdamState AdamState::init(const MlpParams& params, AdamHyper hyper) {
  AdamState state;
  state.m = zeros_like(params);
  state.v = zeros_like(params);
  state.t = 0;
  state.hyper = hyper;
  return state;
}

void TrainConfig::validate() const {
  validate_sizes(layer_sizes);
  if (iterations < 1) throw ConfigError("iterations must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (checkpoint_every < 1) throw ConfigError("checkpoint_every must be positive");
  if (iterations % checkpoint_every != 0) {
    throw ConfigError("checkpoint_every must divide iterations (" + std::to_string(checkpoint_every) +
                      " does not divide " + std::to_string(iterations) + ")");
  }
  if (objective.lambda < 0.0) throw ConfigError("lambda must be non-negative");
  if (!(adam.lr > 0.0)) throw ConfigError("learning rate must be positive");
}

std::uint64_t config_hash(const TrainConfig& cfg) {
  // FNV-1a, 64-bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : canonical_config_string(cfg)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

MlpParams init_params(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  validate_sizes(layer_sizes);
  Rng rng(seed);
  MlpParams p;
  p.sizes = layer_sizes;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const auto out_n = static_cast<std::size_t>(layer_sizes[l + 1]);
    const auto in_n = static_cast<std::size_t>(layer_sizes[l]);
    const double bound = std::sqrt(6.0 / static_cast<double>(in_n + out_n));
    std::vector<double> w(out_n * in_n);
    for (double& v : w) v = rng.uniform(-bound, bound);
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(out_n, 0.0);
  }
  return p;
}

std::pair<Logits, Probabilities> forward(const MlpParams& params, const std::vector<double>& x) {
  const Trace trace = traced_forward(params, x);
  const auto& out = trace.activations.back();
  const Logits z{out[0], out[1]};
  return {z, softmax2(z)};
}

std::vector<Probabilities> forward_batch(const MlpParams& params,
                                         const std::vector<std::vector<double>>& xs) {
  std::vector<Probabilities> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(forward(params, x).second);
  return out;
}

MlpParams backward(const MlpParams& params, const std::vector<TaggedSample>& batch,
                   const ObjectiveConfig& cfg) {
  if (batch.empty()) throw InvalidInputError("backward: empty batch");
  MlpParams grads = zeros_like(params);
  const std::size_t n_layers = params.weights.size();

  for (const TaggedSample& t : batch) {
    const Trace trace = traced_forward(params, t.features);
    const auto& out = trace.activations.back();
    const LossGrad top = tagged_loss_grad(t, Logits{out[0], out[1]}, cfg);

    std::vector<double> delta = {top.d_z_neg, top.d_z_pos};
    for (std::size_t li = n_layers; li-- > 0;) {
      const auto out_n = static_cast<std::size_t>(params.sizes[li + 1]);
      const auto in_n = static_cast<std::size_t>(params.sizes[li]);
      const auto& in_act = trace.activations[li];
      for (std::size_t i = 0; i < out_n; ++i) {
        grads.biases[li][i] += delta[i];
        double* grow = grads.weights[li].data() + i * in_n;
        for (std::size_t j = 0; j < in_n; ++j) grow[j] += delta[i] * in_act[j];
      }
      if (li == 0) break;
      std::vector<double> prev(in_n, 0.0);
      for (std::size_t j = 0; j < in_n; ++j) {
        if (trace.preacts[li - 1][j] <= 0.0) continue;  // rectifier gate
        double acc = 0.0;
        for (std::size_t i = 0; i < out_n; ++i) acc += params.weights[li][i * in_n + j] * delta[i];
        prev[j] = acc;
      }
      delta = std::move(prev);
    }
  }

  const double scale = 1.0 / static_cast<double>(batch.size());
  for (auto& w : grads.weights) {
    for (double& v : w) v *= scale;
  }
  for (auto& b : grads.biases) {
    for (double& v : b) v *= scale;
  }
  return grads;
}

void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads) {
  if (params.sizes != grads.sizes || params.sizes != state.m.sizes) {
    throw InvalidInputError("adam_step: shape mismatch");
  }
  state.t += 1;
  const AdamHyper& h = state.hyper;
  const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.t));

  const auto update = [&h, bc1, bc2](std::vector<double>& p, std::vector<double>& m,
                                     std::vector<double>& v, const std::vector<double>& g) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double grad = g[i] + h.weight_decay * p[i];
      m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * grad;
      v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * grad * grad;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= h.lr * m_hat / (std::sqrt(v_hat) + h.eps);
    }
  };

  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    update(params.weights[l], state.m.weights[l], state.v.weights[l], grads.weights[l]);
    update(params.biases[l], state.m.biases[l], state.v.biases[l], grads.biases[l]);
  }
}

std::vector<std::size_t> batch_indices(std::size_t n, int batch_size, std::uint64_t shuffle_seed,
                                       std::uint64_t iteration) {
  if (n == 0) throw InvalidInputError("batch_indices: empty index space");
  if (batch_size < 1) throw InvalidInputError("batch_indices: batch_size must be positive");

  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(batch_size));
  std::vector<std::size_t> perm;
  std::uint64_t perm_epoch = 0;
  bool have_perm = false;

  const std::uint64_t begin = iteration * static_cast<std::uint64_t>(batch_size);
  for (std::uint64_t pos = begin; pos < begin + static_cast<std::uint64_t>(batch_size); ++pos) {
    const std::uint64_t epoch = pos / n;
    if (!have_perm || epoch != perm_epoch) {
      perm.resize(n);
      std::iota(perm.begin(), perm.end(), 0);
      Rng rng(mix_seed(shuffle_seed, epoch));
      rng.shuffle(perm);
      perm_epoch = epoch;
      have_perm = true;
    }
    out.push_back(perm[pos % n]);
  }
  return out;
}

double validation_auc_fg(const MlpParams& params, const std::vector<Sample>& val) {
  std::vector<std::pair<double, Polarity>> positives;
  for (const Sample& s : val) {
    if (s.coarse != CoarseLabel::Positive) continue;
    const Polarity fine = s.fine.value_or(Polarity::Typical);
    positives.emplace_back(forward(params, s.features).second.pos(), fine);
  }
  return auc_fg(positives);
}

namespace {

void require_val_subcategories(const std::vector<Sample>& val) {
  bool has_atypical = false, has_typical = false;
  for (const Sample& s : val) {
    if (s.coarse != CoarseLabel::Positive) continue;
    (s.fine.value_or(Polarity::Typical) == Polarity::Atypical ? has_atypical : has_typical) = true;
  }
  if (!has_atypical || !has_typical) {
    throw MetricError("validation set needs positives of both fine subcategories");
  }
}

TrainResult run_loop(const TrainConfig& cfg, const std::vector<Sample>& train_set,
                     const std::vector<Sample>& val_set, MlpParams params, AdamState adam,
                     std::uint64_t first_iteration) {
  const std::vector<TaggedSample> tagged = apply_strategy(train_set, cfg.objective);
  if (tagged.empty()) throw InvalidInputError("train: no samples left after strategy mapping");

  const std::uint64_t shuffle_seed = mix_seed(cfg.seed, kShuffleStream);
  const std::string rng_state = Rng(shuffle_seed).serialize_state();
  const std::uint64_t digest = config_hash(cfg);

  TrainResult result;
  std::vector<TaggedSample> batch;
  for (std::uint64_t it = first_iteration; it < static_cast<std::uint64_t>(cfg.iterations); ++it) {
    const auto idx = batch_indices(tagged.size(), cfg.batch_size, shuffle_seed, it);
    batch.clear();
    for (std::size_t k : idx) batch.push_back(tagged[k]);
    const MlpParams grads = backward(params, batch, cfg.objective);
    adam_step(adam, params, grads);

    if ((it + 1) % static_cast<std::uint64_t>(cfg.checkpoint_every) == 0) {
      result.val_history.push_back(validation_auc_fg(params, val_set));
      result.checkpoints.push_back({it + 1, params, adam, rng_state, digest});
    }
  }

  result.best_index = 0;
  for (std::size_t i = 1; i < result.val_history.size(); ++i) {
    if (result.val_history[i] > result.val_history[result.best_index]) result.best_index = i;
  }
  return result;
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const std::vector<Sample>& train_set,
                  const std::vector<Sample>& val_set) {
  cfg.validate();
  require_val_subcategories(val_set);
  MlpParams params = init_params(cfg.layer_sizes, mix_seed(cfg.seed, kInitStream));
  AdamState adam = AdamState::init(params, cfg.adam);
  return run_loop(cfg, train_set, val_set, std::move(params), std::move(adam), 0);
}

TrainResult train_from(const Checkpoint& checkpoint, const TrainConfig& cfg,
                       const std::vector<Sample>& train_set, const std::vector<Sample>& val_set) {
  cfg.validate();
  if (checkpoint.config_hash != config_hash(cfg)) {
    throw ConfigError("train_from: checkpoint was produced under a different config");
  }
  if (checkpoint.iteration > static_cast<std::uint64_t>(cfg.iterations)) {
    throw ConfigError("train_from: checkpoint is past the configured iteration count");
  }
  require_val_subcategories(val_set);
  return run_loop(cfg, train_set, val_set, checkpoint.params, checkpoint.adam, checkpoint.iteration);
}

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u64(out, checkpoint.config_hash);
  put_u64(out, checkpoint.iteration);
  put_u64(out, checkpoint.adam.t);
  put_f64(out, checkpoint.adam.hyper.beta1);
  put_f64(out, checkpoint.adam.hyper.beta2);
  put_f64(out, checkpoint.adam.hyper.lr);
  put_f64(out, checkpoint.adam.hyper.weight_decay);
  put_f64(out, checkpoint.adam.hyper.eps);
  put_u32(out, static_cast<std::uint32_t>(checkpoint.params.sizes.size()));
  for (int s : checkpoint.params.sizes) put_u32(out, static_cast<std::uint32_t>(s));
  put_params(out, checkpoint.params);
  put_params(out, checkpoint.adam.m);
  put_params(out, checkpoint.adam.v);
  put_u32(out, static_cast<std::uint32_t>(checkpoint.rng_state.size()));
  out += checkpoint.rng_state;

  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("checkpoint: cannot write '" + path + "'");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("checkpoint: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  const std::string bytes = buf.str();

  Reader r(bytes, path);
  if (r.raw(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw ParseError("checkpoint '" + path + "': bad magic or unsupported version");
  }
  Checkpoint c;
  c.config_hash = r.u64();
  c.iteration = r.u64();
  const std::uint64_t t = r.u64();
  AdamHyper hyper;
  hyper.beta1 = r.f64();
  hyper.beta2 = r.f64();
  hyper.lr = r.f64();
  hyper.weight_decay = r.f64();
  hyper.eps = r.f64();

  const std::uint32_t n_sizes = r.u32();
  if (n_sizes < 2 || n_sizes > 64) throw ParseError("checkpoint '" + path + "': invalid layer count");
  std::vector<int> sizes(n_sizes);
  for (auto& s : sizes) {
    const std::uint32_t v = r.u32();
    if (v == 0 || v > 1u << 20) throw ParseError("checkpoint '" + path + "': invalid layer size");
    s = static_cast<int>(v);
  }
  c.params = read_params(r, sizes);
  c.adam.m = read_params(r, sizes);
  c.adam.v = read_params(r, sizes);
  c.adam.t = t;
  c.adam.hyper = hyper;
  c.rng_state = r.raw(r.u32());
  r.expect_end();
  return c;
}

}  // namespace finegrain
