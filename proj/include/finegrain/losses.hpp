#pragma once

#include <cstdint>

namespace finegrain {

// Probability floor applied before any logarithm. Cross-entropy style losses
// are unbounded as the labeled-class probability approaches zero; clamping
// keeps every loss value finite without measurably moving it anywhere else.
inline constexpr double kProbFloor = 1e-12;

// Pre-softmax scores for the two classes.
struct Logits {
  double z_neg = 0.0;
  double z_pos = 0.0;
};

// Softmax pair (p_neg, p_pos). Always sums to 1; construct through the
// factories (or softmax2) so the invariant holds.
class Probabilities {
 public:
  // Builds from the positive-class probability; p must be finite in [0, 1].
  static Probabilities from_pos(double p_pos);
  // Builds from a raw pair; both components must be non-negative and finite,
  // with a positive sum. The pair is renormalized to sum exactly to 1.
  static Probabilities from_pair(double p_neg, double p_pos);

  double neg() const { return p_neg_; }
  double pos() const { return p_pos_; }

  // Probability of the labeled class; y must be 0 or 1.
  double of_label(int y) const;

 private:
  Probabilities(double p_neg, double p_pos) : p_neg_(p_neg), p_pos_(p_pos) {}
  double p_neg_ = 0.5;
  double p_pos_ = 0.5;
};

// Gradient of a scalar loss with respect to the two logits. For any loss that
// is a function of softmax over two logits, d_z_neg == -d_z_pos.
struct LossGrad {
  double d_z_neg = 0.0;
  double d_z_pos = 0.0;
};

// Tangent point of the risk-modulated loss, in (0, 1).
class TauParam {
 public:
  explicit TauParam(double tau);
  double value() const { return tau_; }

 private:
  double tau_;
};

// Exponent of the generalized cross-entropy loss, in (0, 1].
class GceParam {
 public:
  explicit GceParam(double q);
  double value() const { return q_; }

 private:
  double q_;
};

enum class LossKind : std::uint8_t { CE, PCE, GCE, UC };

const char* to_string(LossKind kind);

// Numerically stable two-way softmax. Throws InvalidInputError on non-finite
// input.
Probabilities softmax2(Logits z);

// Plain cross entropy: -log of the labeled-class probability.
double ce_loss(Probabilities p, int y);

// Risk-modulated cross entropy. Below the tangent point tau the logarithm is
// replaced by its tangent line, so both value and slope are continuous at
// s == tau and the loss is bounded by 1 - log(tau):
//
//   s <= tau:  -(s - tau)/tau - log(tau)
//   s >  tau:  -log(s)                       (identical to ce_loss)
double pce_loss(Probabilities p, int y, TauParam tau);

// Generalized cross entropy, (1 - s^q) / q. Interpolates between cross
// entropy (q -> 0) and the linear loss 1 - s (q = 1).
double gce_loss(Probabilities p, int y, GceParam q);

// Uniformity loss for uncertain samples: -log(p_neg)/2 - log(p_pos)/2,
// minimized (value log 2) by the uniform prediction.
double uc_loss(Probabilities p);

// Analytic gradient of the selected loss composed with softmax2. At the PCE
// tangent point both one-sided derivatives agree, so the branch taken there
// (the linear one) only fixes a deterministic code path. The label is
// ignored for LossKind::UC.
LossGrad loss_grad(LossKind kind, Logits z, int y, TauParam tau, GceParam q);

}  // namespace finegrain
