#include "finegrain/objective.hpp"

#include <string>

#include "finegrain/data.hpp"
#include "finegrain/errors.hpp"

namespace finegrain {

const char* to_string(CoarseLabel label) {
  switch (label) {
    case CoarseLabel::Negative: return "0";
    case CoarseLabel::Positive: return "1";
    case CoarseLabel::Uncertain: return "u";
    case CoarseLabel::Blank: return "";
  }
  return "";
}

CoarseLabel parse_coarse_label(const std::string& text) {
  if (text == "0") return CoarseLabel::Negative;
  if (text == "1") return CoarseLabel::Positive;
  if (text == "u") return CoarseLabel::Uncertain;
  if (text.empty()) return CoarseLabel::Blank;
  throw ConfigError("unknown coarse label: '" + text + "'");
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::UIgnore: return "u-ignore";
    case Strategy::UZeros: return "u-zeros";
    case Strategy::UOnes: return "u-ones";
    case Strategy::URm: return "u-rm";
    case Strategy::PRm: return "p-rm";
    case Strategy::PuRm: return "pu-rm";
    case Strategy::UUniform: return "u-uniform";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "u-ignore") return Strategy::UIgnore;
  if (name == "u-zeros") return Strategy::UZeros;
  if (name == "u-ones") return Strategy::UOnes;
  if (name == "u-rm") return Strategy::URm;
  if (name == "p-rm") return Strategy::PRm;
  if (name == "pu-rm") return Strategy::PuRm;
  if (name == "u-uniform") return Strategy::UUniform;
  throw ConfigError("unknown strategy: '" + name + "'");
}

const char* to_string(NoiseLoss n) { return n == NoiseLoss::PCE ? "pce" : "gce"; }

NoiseLoss parse_noise_loss(const std::string& name) {
  if (name == "pce") return NoiseLoss::PCE;
  if (name == "gce") return NoiseLoss::GCE;
  throw ConfigError("unknown noise loss: '" + name + "'");
}

namespace {

LossKind noise_kind(const ObjectiveConfig& cfg) {
  return cfg.noise_loss == NoiseLoss::PCE ? LossKind::PCE : LossKind::GCE;
}

}  // namespace

std::vector<TaggedSample> apply_strategy(const std::vector<Sample>& samples, const ObjectiveConfig& cfg) {
  if (cfg.lambda < 0.0) throw ConfigError("lambda must be non-negative");
  const LossKind noise = noise_kind(cfg);

  std::vector<TaggedSample> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) {
    switch (s.coarse) {
      case CoarseLabel::Blank:
        throw DatasetError("blank coarse label reached the objective (sample '" + s.id + "')");

      case CoarseLabel::Negative:
        out.push_back({s.features, 0, cfg.strategy == Strategy::UUniform ? noise : LossKind::CE});
        break;

      case CoarseLabel::Positive:
        switch (cfg.strategy) {
          case Strategy::PRm:
          case Strategy::PuRm:
          case Strategy::UUniform:
            out.push_back({s.features, 1, noise});
            break;
          default:
            out.push_back({s.features, 1, LossKind::CE});
        }
        break;

      case CoarseLabel::Uncertain:
        switch (cfg.strategy) {
          case Strategy::UIgnore:
          case Strategy::PRm:
            break;  // dropped
          case Strategy::UZeros:
            out.push_back({s.features, 0, LossKind::CE});
            break;
          case Strategy::UOnes:
            out.push_back({s.features, 1, LossKind::CE});
            break;
          case Strategy::URm:
          case Strategy::PuRm:
            out.push_back({s.features, 1, noise});
            break;
          case Strategy::UUniform:
            out.push_back({s.features, kUniformTarget, LossKind::UC});
            break;
        }
        break;
    }
  }
  return out;
}

double sample_loss(const TaggedSample& t, Probabilities p, const ObjectiveConfig& cfg) {
  double value = 0.0;
  switch (t.kind) {
    case LossKind::CE: value = ce_loss(p, t.label); break;
    case LossKind::PCE: value = pce_loss(p, t.label, cfg.tau); break;
    case LossKind::GCE: value = gce_loss(p, t.label, cfg.q); break;
    case LossKind::UC: return uc_loss(p);  // never lambda-scaled
  }
  if (cfg.strategy == Strategy::UUniform) value *= cfg.lambda;
  return value;
}

double batch_loss(const std::vector<TaggedSample>& batch, const std::vector<Probabilities>& probs,
                  const ObjectiveConfig& cfg) {
  if (batch.empty()) throw InvalidInputError("batch_loss: empty batch");
  if (batch.size() != probs.size()) {
    throw InvalidInputError("batch_loss: batch and probability counts differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) sum += sample_loss(batch[i], probs[i], cfg);
  return sum / static_cast<double>(batch.size());
}

LossGrad tagged_loss_grad(const TaggedSample& t, Logits z, const ObjectiveConfig& cfg) {
  LossGrad g = loss_grad(t.kind, z, t.kind == LossKind::UC ? 1 : t.label, cfg.tau, cfg.q);
  if (cfg.strategy == Strategy::UUniform && t.kind != LossKind::UC) {
    g.d_z_neg *= cfg.lambda;
    g.d_z_pos *= cfg.lambda;
  }
  return g;
}

}  // namespace finegrain
