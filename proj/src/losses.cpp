#include "finegrain/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "finegrain/errors.hpp"

namespace finegrain {

namespace {

double clamped_log(double s) { return std::log(std::clamp(s, kProbFloor, 1.0)); }

void require_binary_label(int y, const char* where) {
  if (y != 0 && y != 1) {
    throw InvalidInputError(std::string(where) + ": label must be 0 or 1, got " + std::to_string(y));
  }
}

}  // namespace

Probabilities Probabilities::from_pos(double p_pos) {
  if (!std::isfinite(p_pos) || p_pos < 0.0 || p_pos > 1.0) {
    throw InvalidInputError("Probabilities::from_pos: p_pos must be finite in [0,1]");
  }
  return Probabilities(1.0 - p_pos, p_pos);
}

Probabilities Probabilities::from_pair(double p_neg, double p_pos) {
  if (!std::isfinite(p_neg) || !std::isfinite(p_pos) || p_neg < 0.0 || p_pos < 0.0) {
    throw InvalidInputError("Probabilities::from_pair: components must be finite and non-negative");
  }
  const double sum = p_neg + p_pos;
  if (sum <= 0.0) {
    throw InvalidInputError("Probabilities::from_pair: components sum to zero");
  }
  return Probabilities(p_neg / sum, p_pos / sum);
}

double Probabilities::of_label(int y) const {
  require_binary_label(y, "Probabilities::of_label");
  return y == 1 ? p_pos_ : p_neg_;
}

TauParam::TauParam(double tau) : tau_(tau) {
  if (!(tau > 0.0) || !(tau < 1.0)) {
    throw ConfigError("tau must lie in (0,1), got " + std::to_string(tau));
  }
}

GceParam::GceParam(double q) : q_(q) {
  if (!(q > 0.0) || !(q <= 1.0)) {
    throw ConfigError("q must lie in (0,1], got " + std::to_string(q));
  }
}

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::CE: return "CE";
    case LossKind::PCE: return "PCE";
    case LossKind::GCE: return "GCE";
    case LossKind::UC: return "UC";
  }
  return "?";
}

Probabilities softmax2(Logits z) {
  if (!std::isfinite(z.z_neg) || !std::isfinite(z.z_pos)) {
    throw InvalidInputError("softmax2: logits must be finite");
  }
  const double m = std::max(z.z_neg, z.z_pos);
  const double en = std::exp(z.z_neg - m);
  const double ep = std::exp(z.z_pos - m);
  return Probabilities::from_pair(en, ep);
}

double ce_loss(Probabilities p, int y) {
  require_binary_label(y, "ce_loss");
  return -clamped_log(p.of_label(y));
}

double pce_loss(Probabilities p, int y, TauParam tau) {
  require_binary_label(y, "pce_loss");
  const double s = p.of_label(y);
  const double t = tau.value();
  if (s <= t) {
    return -(s - t) / t - std::log(t);
  }
  // Above the tangent point PCE is cross entropy, through the same code path
  // so the two agree bit for bit.
  return ce_loss(p, y);
}

double gce_loss(Probabilities p, int y, GceParam q) {
  require_binary_label(y, "gce_loss");
  const double s = p.of_label(y);
  return (1.0 - std::pow(s, q.value())) / q.value();
}

double uc_loss(Probabilities p) {
  return -0.5 * clamped_log(p.neg()) - 0.5 * clamped_log(p.pos());
}

LossGrad loss_grad(LossKind kind, Logits z, int y, TauParam tau, GceParam q) {
  const Probabilities p = softmax2(z);

  if (kind == LossKind::UC) {
    // d/dz_pos [-log(p_neg)/2 - log(p_pos)/2] = (p_pos - p_neg)/2.
    const double g = 0.5 * (p.pos() - p.neg());
    return LossGrad{-g, g};
  }

  require_binary_label(y, "loss_grad");
  const double s = p.of_label(y);

  // Gradient w.r.t. the labeled-class logit; the other logit is its negation.
  // The softmax factor s(1-s) is folded in analytically, so no branch divides
  // by a probability:
  //   CE / PCE log branch:   d/dz [-log s]            = -(1 - s)
  //   PCE linear branch:     d/dz [-(s - tau)/tau]    = -s(1 - s)/tau
  //   GCE:                   d/dz [(1 - s^q)/q]       = -s^q (1 - s)
  double g_label = 0.0;
  switch (kind) {
    case LossKind::CE:
      g_label = -(1.0 - s);
      break;
    case LossKind::PCE:
      g_label = (s <= tau.value()) ? -s * (1.0 - s) / tau.value() : -(1.0 - s);
      break;
    case LossKind::GCE:
      g_label = -std::pow(s, q.value()) * (1.0 - s);
      break;
    case LossKind::UC:
      break;  // handled above
  }

  if (y == 1) {
    return LossGrad{-g_label, g_label};
  }
  return LossGrad{g_label, -g_label};
}

}  // namespace finegrain
