#include "mlbandit/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlbandit {

ClassState::ClassState(int dim, MatrixMode mode_in) : mode(mode_in) {
  if (dim < 1) {
    throw std::invalid_argument("state dimension must be positive");
  }
  weight = Vector::Zero(dim);
  if (mode == MatrixMode::Full) {
    gram = Matrix::Identity(dim, dim);
    gram_inv = Matrix::Identity(dim, dim);
  } else {
    gram_diag = Vector::Ones(dim);
  }
}

double ClassState::quad_form(ConstVectorRef x) const {
  if (mode == MatrixMode::Full) {
    return x.dot(gram_inv * x);
  }
  return (x.array().square() / gram_diag.array()).sum();
}

Vector ClassState::inv_times(ConstVectorRef x) const {
  if (mode == MatrixMode::Full) {
    return gram_inv * x;
  }
  return (x.array() / gram_diag.array()).matrix();
}

void ClassState::add_rank_one(ConstVectorRef x) {
  if (mode == MatrixMode::Full) {
    gram.noalias() += x * x.transpose();
    const Vector inv_x = gram_inv * x;
    const double denom = 1.0 + x.dot(inv_x);
    gram_inv.noalias() -= (inv_x * inv_x.transpose()) / denom;
    if (++since_refresh >= kRefreshInterval) {
      gram_inv = gram.llt().solve(Matrix::Identity(gram.rows(), gram.cols()));
      since_refresh = 0;
    }
  } else {
    gram_diag += x.cwiseProduct(x);
  }
  ++updates;
}

Vector project(const ClassState& state, ConstVectorRef x, double radius) {
  const double margin = state.weight.dot(x);
  if (std::abs(margin) <= radius) {
    return state.weight;
  }
  const double quad = state.quad_form(x);
  const double target = margin > radius ? radius : -radius;
  return state.weight - ((margin - target) / quad) * state.inv_times(x);
}

double confidence_width(const ClassState& state, ConstVectorRef x, long t,
                        const LearnerConfig& config) {
  if (config.exploration == ExplorationMode::None) {
    return 0.0;
  }
  if (t < 1) {
    throw std::invalid_argument("round index must be positive");
  }
  if (!(config.delta > 0.0 && config.delta * std::exp(1.0) < 1.0)) {
    throw std::invalid_argument("confidence level delta must lie in (0, 1/e)");
  }
  const SurrogateSpec& spec = config.spec;
  const double dim = static_cast<double>(config.dim);
  const double grow =
      dim * spec.c_grad_sq / (spec.c_curv * spec.c_curv) *
      std::log1p(static_cast<double>(t - 1) / dim);
  const double tail =
      12.0 / spec.c_curv * (spec.c_grad_sq / spec.c_curv + 3.0 * spec.loss_at_neg_r) *
      std::log(static_cast<double>(config.num_classes) *
               static_cast<double>(t + 4) / config.delta);
  double sq = state.quad_form(x);
  if (config.norm_bound) {
    sq *= *config.norm_bound * *config.norm_bound + grow + tail;
  } else {
    sq *= 2.0 * grow + tail;
    const double cap = 4.0 * spec.radius * spec.radius;
    sq = config.adaptive_literal_max ? std::max(sq, cap) : std::min(sq, cap);
  }
  return std::sqrt(sq);
}

Learner::Learner(LearnerConfig config) : config_(std::move(config)) {
  if (config_.num_classes < 1 || config_.dim < 1) {
    throw std::invalid_argument("learner needs positive class count and dimension");
  }
  if (config_.params.costs.num_classes() != config_.num_classes) {
    throw std::invalid_argument("cost table size must match the class count");
  }
  if (config_.task == TaskMode::Subset &&
      !(config_.params.a >= 0.0 && config_.params.a < 1.0)) {
    throw std::invalid_argument("subset mode needs a in [0, 1)");
  }
  if (config_.exploration == ExplorationMode::Ucb &&
      !(config_.delta > 0.0 && config_.delta * std::exp(1.0) < 1.0)) {
    throw std::invalid_argument("confidence level delta must lie in (0, 1/e)");
  }
  if (config_.norm_bound && !(*config_.norm_bound > 0.0)) {
    throw std::invalid_argument("norm bound must be positive");
  }
  states_.assign(static_cast<size_t>(config_.num_classes),
                 ClassState(config_.dim, config_.matrix_mode));
}

PredictionTrace Learner::predict(ConstVectorRef x, long t,
                                 std::optional<int> size_cap) const {
  if (x.size() != config_.dim) {
    throw std::invalid_argument("context dimension mismatch");
  }
  const int num_classes = config_.num_classes;
  PredictionTrace trace;
  trace.margin.resize(num_classes);
  trace.width.resize(num_classes);
  trace.prob.resize(num_classes);
  trace.projected.resize(num_classes, config_.dim);
  for (int i = 0; i < num_classes; ++i) {
    const ClassState& st = states_[static_cast<size_t>(i)];
    const Vector w = project(st, x, config_.spec.radius);
    trace.projected.row(i) = w.transpose();
    trace.margin[i] = w.dot(x);
    trace.width[i] = confidence_width(st, x, t, config_);
    trace.prob[i] = eval_p(
        config_.spec, clip(config_.spec, trace.margin[i] + trace.width[i]));
  }
  if (config_.task == TaskMode::Subset) {
    trace.prediction = bayes_optimal_subset(config_.params, trace.prob, size_cap);
  } else {
    if (!size_cap) {
      throw std::invalid_argument("ranking prediction needs a size cap");
    }
    trace.prediction = bayes_optimal_ranking(
        trace.prob, std::min(*size_cap, num_classes));
  }
  return trace;
}

void Learner::update(ConstVectorRef x, const PredictionTrace& trace,
                     const Feedback& feedback) {
  std::vector<char> in_pred(static_cast<size_t>(config_.num_classes), 0);
  for (int i : trace.prediction) in_pred[static_cast<size_t>(i)] = 1;
  std::vector<char> observed(static_cast<size_t>(config_.num_classes), 0);
  for (int i : feedback.observed) {
    if (i < 0 || i >= config_.num_classes || !in_pred[static_cast<size_t>(i)]) {
      throw std::invalid_argument("feedback contains a label outside the prediction");
    }
    observed[static_cast<size_t>(i)] = 1;
  }
  for (int i : trace.prediction) {
    apply_signed_step(i, x, trace, observed[static_cast<size_t>(i)] ? 1.0 : -1.0);
  }
}

void Learner::obr_update(ConstVectorRef x, const PredictionTrace& trace,
                         const LabelSet& truth) {
  if (config_.exploration != ExplorationMode::None) {
    throw std::invalid_argument(
        "the full-information baseline runs without exploration");
  }
  std::vector<char> in_truth(static_cast<size_t>(config_.num_classes), 0);
  for (int i : truth) {
    if (i < 0 || i >= config_.num_classes) {
      throw std::invalid_argument("label index out of range");
    }
    in_truth[static_cast<size_t>(i)] = 1;
  }
  for (int i = 0; i < config_.num_classes; ++i) {
    apply_signed_step(i, x, trace, in_truth[static_cast<size_t>(i)] ? 1.0 : -1.0);
  }
}

void Learner::apply_signed_step(int i, ConstVectorRef x,
                                const PredictionTrace& trace, double sign) {
  ClassState& st = states_[static_cast<size_t>(i)];
  st.add_rank_one(x);
  const double g = eval_g(config_.spec, sign * trace.margin[i]);
  st.weight = trace.projected.row(i).transpose() +
              (g * sign / config_.spec.c_curv) * st.inv_times(x);
}

} // namespace mlbandit
