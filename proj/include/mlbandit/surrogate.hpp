#pragma once

#include <string>

#include "mlbandit/types.hpp"

namespace mlbandit {

enum class SurrogateKind { Square, Logistic };

/*
 * A convex, nonincreasing margin loss L on the interval [-radius, radius],
 * together with the constants the confidence machinery needs:
 *
 *   c_lip      Lipschitz constant of the induced link p(.)
 *   c_grad_sq  upper bound on (L'(delta))^2 over the interval
 *   c_curv     lower bound on L''(delta) over the interval
 *   loss_at_neg_r  L(-radius)
 *
 * The induced label model is p(delta) = g(-delta) / (g(delta) + g(-delta))
 * with g = -L'.
 */
struct SurrogateSpec {
  SurrogateKind kind;
  double radius;
  double c_lip;
  double c_grad_sq;
  double c_curv;
  double loss_at_neg_r;

  // Square loss (1 - delta)^2 / 2 on [-1, 1].
  static SurrogateSpec square();

  // Logistic loss ln(1 + exp(-delta)) on [-r, r], r > 0.
  static SurrogateSpec logistic(double r);
};

// Margin arguments may overshoot the interval by at most this much.
inline constexpr double kDomainTol = 1e-9;

double eval_loss(const SurrogateSpec& spec, double delta);

// g(delta) = -L'(delta), positive on the open interval.
double eval_g(const SurrogateSpec& spec, double delta);

// Link p(delta) = g(-delta) / (g(delta) + g(-delta)), nondecreasing in delta.
double eval_p(const SurrogateSpec& spec, double delta);

// Clamp x to [-radius, radius].
double clip(const SurrogateSpec& spec, double x);

} // namespace mlbandit
