#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "finegrain/errors.hpp"
#include "finegrain/losses.hpp"
#include "finegrain/rng.hpp"

using namespace finegrain;

namespace {

// Loss values recomputed in extended precision, independent of the library
// implementation. Used as the finite-difference oracle for gradient checks:
// plain double FD runs out of mantissa for the tiny gradients that show up at
// extreme logits.
long double softmax_pos_ld(long double z_neg, long double z_pos) {
  const long double m = std::max(z_neg, z_pos);
  const long double en = std::exp(z_neg - m);
  const long double ep = std::exp(z_pos - m);
  return ep / (en + ep);
}

long double loss_value_ld(LossKind kind, long double z_neg, long double z_pos, int y, long double tau,
                          long double q) {
  const long double p_pos = softmax_pos_ld(z_neg, z_pos);
  const long double p_neg = 1.0L - p_pos;
  if (kind == LossKind::UC) {
    return -0.5L * std::log(p_neg) - 0.5L * std::log(p_pos);
  }
  const long double s = (y == 1) ? p_pos : p_neg;
  switch (kind) {
    case LossKind::CE:
      return -std::log(s);
    case LossKind::PCE:
      return (s <= tau) ? -(s - tau) / tau - std::log(tau) : -std::log(s);
    case LossKind::GCE:
      return (1.0L - std::pow(s, q)) / q;
    default:
      return 0.0L;
  }
}

// Central finite difference of the extended-precision loss in z_pos.
double fd_grad_zpos(LossKind kind, double z_neg, double z_pos, int y, double tau, double q) {
  const long double h = 1e-5L;
  const long double up = loss_value_ld(kind, z_neg, static_cast<long double>(z_pos) + h, y, tau, q);
  const long double dn = loss_value_ld(kind, z_neg, static_cast<long double>(z_pos) - h, y, tau, q);
  return static_cast<double>((up - dn) / (2.0L * h));
}

// Relative error with a floor on the denominator: gradients can be exactly
// zero (uniformity loss at its minimizer), where a pure ratio is noise.
double rel_err(double got, double want) {
  const double denom = std::max(std::abs(want), 1e-7);
  return std::abs(got - want) / denom;
}

}  // namespace

TEST_CASE("softmax2 basic values") {
  const Probabilities p = softmax2({0.0, std::log(3.0)});
  CHECK(p.neg() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(p.pos() == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(std::abs(p.neg() + p.pos() - 1.0) <= 1e-15);

  const Probabilities even = softmax2({5.0, 5.0});
  CHECK(even.pos() == 0.5);

  // Large logits must not overflow.
  const Probabilities big = softmax2({1000.0, 1001.0});
  CHECK(std::isfinite(big.pos()));
  CHECK(big.pos() > 0.7);

  CHECK_THROWS_AS(softmax2({std::nan(""), 0.0}), InvalidInputError);
  CHECK_THROWS_AS(softmax2({0.0, std::numeric_limits<double>::infinity()}), InvalidInputError);
}

TEST_CASE("probabilities factories validate") {
  CHECK_THROWS_AS(Probabilities::from_pos(-0.1), InvalidInputError);
  CHECK_THROWS_AS(Probabilities::from_pos(1.1), InvalidInputError);
  CHECK_THROWS_AS(Probabilities::from_pair(-1.0, 2.0), InvalidInputError);
  CHECK_THROWS_AS(Probabilities::from_pair(0.0, 0.0), InvalidInputError);
  const Probabilities p = Probabilities::from_pair(1.0, 3.0);
  CHECK(p.pos() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(p.of_label(0) == p.neg());
  CHECK(p.of_label(1) == p.pos());
  CHECK_THROWS_AS(p.of_label(2), InvalidInputError);
}

TEST_CASE("parameter ranges") {
  CHECK_THROWS_AS(TauParam(0.0), ConfigError);
  CHECK_THROWS_AS(TauParam(1.0), ConfigError);
  CHECK_THROWS_AS(TauParam(-0.3), ConfigError);
  CHECK(TauParam(0.3).value() == 0.3);
  CHECK_THROWS_AS(GceParam(0.0), ConfigError);
  CHECK_THROWS_AS(GceParam(1.5), ConfigError);
  CHECK(GceParam(1.0).value() == 1.0);
}

TEST_CASE("cross entropy values and label symmetry") {
  const Probabilities p = Probabilities::from_pos(0.75);
  CHECK(ce_loss(p, 1) == doctest::Approx(-std::log(0.75)).epsilon(1e-15));
  CHECK(ce_loss(p, 0) == doctest::Approx(-std::log(0.25)).epsilon(1e-15));
  CHECK_THROWS_AS(ce_loss(p, 2), InvalidInputError);
  // Clamped at zero probability, so the value stays finite.
  CHECK(ce_loss(Probabilities::from_pos(0.0), 1) == doctest::Approx(-std::log(1e-12)).epsilon(1e-15));
}

TEST_CASE("risk-modulated loss agrees with cross entropy above the tangent point") {
  const TauParam tau(0.3);
  for (double s : {0.3000001, 0.31, 0.5, 0.75, 0.99, 1.0}) {
    const Probabilities p = Probabilities::from_pos(s);
    CHECK(pce_loss(p, 1, tau) == ce_loss(p, 1));  // bit-exact: same code path
  }
}

TEST_CASE("risk-modulated loss below the tangent point") {
  const TauParam tau(0.3);

  // Tangent point value: -log(tau).
  const Probabilities at = Probabilities::from_pos(0.3);
  CHECK(pce_loss(at, 1, tau) == doctest::Approx(-std::log(0.3)).epsilon(1e-15));
  CHECK(pce_loss(at, 1, tau) == doctest::Approx(1.2039728043259359).epsilon(1e-15));

  // Worst case s = 0 reaches the bound 1 - log(tau) exactly.
  const Probabilities worst = Probabilities::from_pos(0.0);
  CHECK(pce_loss(worst, 1, tau) == doctest::Approx(1.0 - std::log(0.3)).epsilon(1e-15));

  // Strictly below cross entropy on the linear branch, and bounded.
  for (double s = 0.0; s < 0.3; s += 0.01) {
    const Probabilities p = Probabilities::from_pos(s);
    const double v = pce_loss(p, 1, tau);
    CHECK(v < ce_loss(p, 1));
    CHECK(v <= 1.0 - std::log(0.3) + 1e-15);
  }

  // Negative-label variant mirrors through p_neg.
  const Probabilities pn = Probabilities::from_pos(0.9);  // p_neg = 0.1 <= tau
  CHECK(pce_loss(pn, 0, tau) == doctest::Approx(-(0.1 - 0.3) / 0.3 - std::log(0.3)).epsilon(1e-12));
}

TEST_CASE("risk-modulated loss is continuous at the tangent point") {
  for (double t : {0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9}) {
    const TauParam tau(t);
    // The slope near the junction is -1/t, so probes at t +/- h may differ by
    // up to 2h/t even for a perfectly continuous function.
    const double h = 1e-9;
    const double below = pce_loss(Probabilities::from_pos(t - h), 1, tau);
    const double above = pce_loss(Probabilities::from_pos(t + h), 1, tau);
    CHECK(std::abs(below - above) <= 2.0 * h / t + 1e-12);
    // Both branch formulas give -log(t) at the junction itself.
    CHECK(pce_loss(Probabilities::from_pos(t), 1, tau) == doctest::Approx(-std::log(t)).epsilon(1e-12));
  }
}

TEST_CASE("generalized cross entropy values") {
  const GceParam q(0.7);
  const Probabilities p = Probabilities::from_pos(0.5);
  CHECK(gce_loss(p, 1, q) == doctest::Approx((1.0 - std::pow(0.5, 0.7)) / 0.7).epsilon(1e-15));

  // q = 1 is exactly the linear loss 1 - s.
  const GceParam q1(1.0);
  for (double s : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    CHECK(gce_loss(Probabilities::from_pos(s), 1, q1) == 1.0 - s);
  }

  // Small q approaches cross entropy.
  const GceParam qs(1e-4);
  for (double s = 0.05; s <= 1.0; s += 0.05) {
    const Probabilities ps = Probabilities::from_pos(s);
    CHECK(std::abs(gce_loss(ps, 1, qs) - ce_loss(ps, 1)) < 1e-3);
  }
}

TEST_CASE("uniformity loss is symmetric with minimum log 2") {
  const Probabilities half = Probabilities::from_pos(0.5);
  CHECK(uc_loss(half) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  for (double s : {0.01, 0.2, 0.35, 0.49}) {
    const Probabilities p = Probabilities::from_pos(s);
    const Probabilities mirrored = Probabilities::from_pos(1.0 - s);
    CHECK(uc_loss(p) == doctest::Approx(uc_loss(mirrored)).epsilon(1e-12));
    CHECK(uc_loss(p) > std::log(2.0));
  }
}

TEST_CASE("cross-entropy gradient at the origin") {
  const LossGrad g = loss_grad(LossKind::CE, {0.0, 0.0}, 1, TauParam(0.3), GceParam(0.7));
  CHECK(g.d_z_pos == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(g.d_z_neg == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("gradients match a finite-difference oracle") {
  const double tau = 0.3;
  const double q = 0.7;
  Rng rng(20240817);
  const std::vector<LossKind> kinds = {LossKind::CE, LossKind::PCE, LossKind::GCE, LossKind::UC};
  int checked = 0;
  for (int i = 0; i < 4000; ++i) {
    const double z_neg = rng.uniform(-10.0, 10.0);
    const double z_pos = rng.uniform(-10.0, 10.0);
    const int y = static_cast<int>(rng.bounded(2));
    const LossKind kind = kinds[rng.bounded(kinds.size())];

    // Skip probes inside the tangent-point kink band, where one-sided
    // derivatives differ and central differences are meaningless.
    if (kind == LossKind::PCE) {
      const double s = softmax2({z_neg, z_pos}).of_label(y);
      if (std::abs(s - tau) < 1e-4) continue;
    }

    const LossGrad g = loss_grad(kind, {z_neg, z_pos}, y, TauParam(tau), GceParam(q));
    const double fd = fd_grad_zpos(kind, z_neg, z_pos, y, tau, q);
    CHECK(rel_err(g.d_z_pos, fd) < 1e-5);
    CHECK(g.d_z_neg == -g.d_z_pos);  // two-logit softmax: gradients are opposite
    ++checked;
  }
  CHECK(checked > 3500);
}

TEST_CASE("gradient magnitude is capped below the tangent point") {
  // On the linear branch |dL/ds| = 1/tau, so the logit gradient obeys
  // |g| = s(1-s)/tau <= 1/(4 tau) while plain cross entropy approaches 1.
  const TauParam tau(0.3);
  const GceParam q(0.7);
  const Logits z{4.0, -4.0};  // confident wrong prediction for y = 1
  const LossGrad pce = loss_grad(LossKind::PCE, z, 1, tau, q);
  const LossGrad ce = loss_grad(LossKind::CE, z, 1, tau, q);
  CHECK(std::abs(pce.d_z_pos) < std::abs(ce.d_z_pos));
  CHECK(std::abs(pce.d_z_pos) <= 1.0 / (4.0 * 0.3) + 1e-12);
}

TEST_CASE("loss kind names") {
  CHECK(std::string(to_string(LossKind::CE)) == "CE");
  CHECK(std::string(to_string(LossKind::PCE)) == "PCE");
  CHECK(std::string(to_string(LossKind::GCE)) == "GCE");
  CHECK(std::string(to_string(LossKind::UC)) == "UC");
}

TEST_CASE("rng determinism and state round-trip") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng c(7);
  for (int i = 0; i < 17; ++i) c.normal();
  const std::string state = c.serialize_state();
  std::vector<double> expect;
  for (int i = 0; i < 50; ++i) expect.push_back(c.uniform());
  Rng d(999);
  d.restore_state(state);
  for (int i = 0; i < 50; ++i) CHECK(d.uniform() == expect[static_cast<std::size_t>(i)]);
}

TEST_CASE("rng transforms stay in range") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = rng.bounded(7);
    CHECK(v < 7);
  }
  // Box-Muller sanity: mean near 0, variance near 1.
  double sum = 0.0, sumsq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("mix_seed separates streams") {
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
  CHECK(mix_seed(123, 456) == mix_seed(123, 456));
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> v(100);
  for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = i;
  std::vector<int> w = v;
  Rng a(11), b(11);
  a.shuffle(v);
  b.shuffle(w);
  CHECK(v == w);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
}
