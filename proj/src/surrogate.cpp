#include "mlbandit/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlbandit {

namespace {

void check_domain(const SurrogateSpec& spec, double delta) {
  if (std::abs(delta) > spec.radius + kDomainTol) {
    throw std::domain_error("margin " + std::to_string(delta) +
                            " outside [-" + std::to_string(spec.radius) +
                            ", " + std::to_string(spec.radius) + "]");
  }
}

} // namespace

SurrogateSpec SurrogateSpec::square() {
  SurrogateSpec spec;
  spec.kind = SurrogateKind::Square;
  spec.radius = 1.0;
  spec.c_lip = 0.5;
  spec.c_grad_sq = 4.0;
  spec.c_curv = 1.0;
  spec.loss_at_neg_r = 2.0;
  return spec;
}

SurrogateSpec SurrogateSpec::logistic(double r) {
  if (!(r > 0.0)) {
    throw std::invalid_argument("logistic surrogate needs a positive radius");
  }
  SurrogateSpec spec;
  spec.kind = SurrogateKind::Logistic;
  spec.radius = r;
  spec.c_lip = 0.25;
  spec.c_grad_sq = 1.0;
  spec.c_curv = 1.0 / (2.0 * (1.0 + std::cosh(r)));
  spec.loss_at_neg_r = r + std::log1p(std::exp(-r));
  return spec;
}

double eval_loss(const SurrogateSpec& spec, double delta) {
  check_domain(spec, delta);
  if (spec.kind == SurrogateKind::Square) {
    const double m = 1.0 - delta;
    return 0.5 * m * m;
  }
  if (delta >= 0.0) {
    return std::log1p(std::exp(-delta));
  }
  return -delta + std::log1p(std::exp(delta));
}

double eval_g(const SurrogateSpec& spec, double delta) {
  check_domain(spec, delta);
  if (spec.kind == SurrogateKind::Square) {
    return 1.0 - delta;
  }
  if (delta >= 0.0) {
    const double e = std::exp(-delta);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(delta));
}

double eval_p(const SurrogateSpec& spec, double delta) {
  check_domain(spec, delta);
  if (spec.kind == SurrogateKind::Square) {
    return 0.5 * (1.0 + delta);
  }
  return eval_g(spec, -delta);
}

double clip(const SurrogateSpec& spec, double x) {
  return std::clamp(x, -spec.radius, spec.radius);
}

} // namespace mlbandit
