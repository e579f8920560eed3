#include "mlbandit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mlbandit {

namespace {

// Offset of row s (1-based) in the packed triangular cost table.
inline int row_offset(int size) { return size * (size - 1) / 2; }

std::vector<char> indicator_of(const LabelSet& labels, int num_classes,
                               const char* what) {
  std::vector<char> ind(num_classes, 0);
  for (int i : labels) {
    if (i < 0 || i >= num_classes) {
      throw std::invalid_argument(std::string(what) + " index " +
                                  std::to_string(i) + " out of range");
    }
    if (ind[i]) {
      throw std::invalid_argument(std::string(what) + " index " +
                                  std::to_string(i) + " repeated");
    }
    ind[i] = 1;
  }
  return ind;
}

void require_reducible(const LossParams& params) {
  if (!(params.a < 1.0)) {
    throw std::invalid_argument("reduced and expected losses need a < 1");
  }
  if (params.a < 0.0) {
    throw std::invalid_argument("loss weight a must lie in [0, 1]");
  }
}

void require_probs(ConstVectorRef probs) {
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) {
      throw std::invalid_argument("marginal probability out of [0, 1]");
    }
  }
}

// Classes sorted by nonincreasing probability, ties by ascending index.
std::vector<int> order_by_prob(ConstVectorRef probs) {
  std::vector<int> order(static_cast<size_t>(probs.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (probs[i] != probs[j]) return probs[i] > probs[j];
    return i < j;
  });
  return order;
}

} // namespace

CostStructure CostStructure::constant(int num_classes) {
  if (num_classes < 1) {
    throw std::invalid_argument("cost table needs at least one class");
  }
  CostStructure c;
  c.num_classes_ = num_classes;
  c.preset_ = CostPreset::Constant;
  c.strictly_decreasing_ = num_classes == 1;
  c.entries_.assign(static_cast<size_t>(row_offset(num_classes + 1)), 1.0);
  return c;
}

CostStructure CostStructure::decreasing(int num_classes) {
  if (num_classes < 1) {
    throw std::invalid_argument("cost table needs at least one class");
  }
  CostStructure c;
  c.num_classes_ = num_classes;
  c.preset_ = CostPreset::Decreasing;
  c.strictly_decreasing_ = true;
  c.entries_.resize(static_cast<size_t>(row_offset(num_classes + 1)));
  for (int s = 1; s <= num_classes; ++s) {
    for (int i = 1; i <= s; ++i) {
      c.entries_[static_cast<size_t>(row_offset(s) + i - 1)] =
          static_cast<double>(s - i + 1) / static_cast<double>(s);
    }
  }
  return c;
}

CostStructure CostStructure::custom(std::vector<std::vector<double>> rows) {
  const int num_classes = static_cast<int>(rows.size());
  if (num_classes < 1) {
    throw std::invalid_argument("cost table needs at least one class");
  }
  CostStructure c;
  c.num_classes_ = num_classes;
  c.preset_ = CostPreset::Custom;
  c.strictly_decreasing_ = true;
  c.entries_.reserve(static_cast<size_t>(row_offset(num_classes + 1)));
  for (int s = 1; s <= num_classes; ++s) {
    const auto& row = rows[static_cast<size_t>(s - 1)];
    if (static_cast<int>(row.size()) != s) {
      throw std::invalid_argument("cost row " + std::to_string(s) +
                                  " must have " + std::to_string(s) +
                                  " entries");
    }
    for (int i = 0; i < s; ++i) {
      const double v = row[static_cast<size_t>(i)];
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("cost entries must lie in [0, 1]");
      }
      if (i > 0) {
        if (v > row[static_cast<size_t>(i - 1)]) {
          throw std::invalid_argument(
              "cost rows must be nonincreasing in the position");
        }
        if (v >= row[static_cast<size_t>(i - 1)]) {
          c.strictly_decreasing_ = false;
        }
      }
      c.entries_.push_back(v);
    }
  }
  return c;
}

double CostStructure::cost(int pos, int size) const {
  if (size < 1 || size > num_classes_ || pos < 1 || pos > size) {
    throw std::invalid_argument("cost lookup (" + std::to_string(pos) + ", " +
                                std::to_string(size) + ") out of range");
  }
  return entries_[static_cast<size_t>(row_offset(size) + pos - 1)];
}

double loss_ac_full(const LossParams& params, const LabelSet& truth,
                    const OrderedPrediction& pred) {
  if (params.a < 0.0 || params.a > 1.0) {
    throw std::invalid_argument("loss weight a must lie in [0, 1]");
  }
  const int num_classes = params.costs.num_classes();
  const auto in_truth = indicator_of(truth, num_classes, "label");
  const auto in_pred = indicator_of(pred, num_classes, "prediction");

  int missed = 0;
  for (int i : truth) {
    if (!in_pred[i]) ++missed;
  }
  const int size = static_cast<int>(pred.size());
  double spurious = 0.0;
  for (int pos = 1; pos <= size; ++pos) {
    const int i = pred[static_cast<size_t>(pos - 1)];
    if (!in_truth[i]) spurious += params.costs.cost(pos, size);
  }
  return params.a * missed + (1.0 - params.a) * spurious;
}

double loss_ac_reduced(const LossParams& params, const LabelSet& truth,
                       const OrderedPrediction& pred) {
  require_reducible(params);
  const int num_classes = params.costs.num_classes();
  const auto in_truth = indicator_of(truth, num_classes, "label");
  indicator_of(pred, num_classes, "prediction");

  const double ratio = params.a / (1.0 - params.a);
  const int size = static_cast<int>(pred.size());
  double sum = 0.0;
  for (int pos = 1; pos <= size; ++pos) {
    const int i = pred[static_cast<size_t>(pos - 1)];
    const double c = params.costs.cost(pos, size);
    sum += c - (ratio + c) * (in_truth[i] ? 1.0 : 0.0);
  }
  return (1.0 - params.a) * sum;
}

double expected_loss_ac(const LossParams& params, ConstVectorRef probs,
                        const OrderedPrediction& pred) {
  require_reducible(params);
  require_probs(probs);
  const int num_classes = params.costs.num_classes();
  if (probs.size() != num_classes) {
    throw std::invalid_argument("probability vector size mismatch");
  }
  indicator_of(pred, num_classes, "prediction");

  const double ratio = params.a / (1.0 - params.a);
  const int size = static_cast<int>(pred.size());
  double sum = 0.0;
  for (int pos = 1; pos <= size; ++pos) {
    const int i = pred[static_cast<size_t>(pos - 1)];
    const double c = params.costs.cost(pos, size);
    sum += c - (ratio + c) * probs[i];
  }
  return (1.0 - params.a) * sum;
}

OrderedPrediction bayes_optimal_subset(const LossParams& params,
                                       ConstVectorRef probs,
                                       std::optional<int> size_cap) {
  require_reducible(params);
  require_probs(probs);
  const int num_classes = params.costs.num_classes();
  if (probs.size() != num_classes) {
    throw std::invalid_argument("probability vector size mismatch");
  }
  if (size_cap && *size_cap < 0) {
    throw std::invalid_argument("size cap must be nonnegative");
  }

  const auto order = order_by_prob(probs);
  const int max_size =
      std::min(num_classes, size_cap ? *size_cap : num_classes);

  OrderedPrediction prefix;
  OrderedPrediction best;
  double best_value = 0.0;
  for (int s = 1; s <= max_size; ++s) {
    prefix.push_back(order[static_cast<size_t>(s - 1)]);
    const double value = expected_loss_ac(params, probs, prefix);
    if (value < best_value) {
      best_value = value;
      best = prefix;
    }
  }
  return best;
}

namespace {

void enumerate_ordered(const LossParams& params, ConstVectorRef probs,
                       int max_size, OrderedPrediction& prefix,
                       std::vector<char>& used, OrderedPrediction& best,
                       double& best_value) {
  if (static_cast<int>(prefix.size()) == max_size) return;
  const int num_classes = params.costs.num_classes();
  for (int i = 0; i < num_classes; ++i) {
    if (used[static_cast<size_t>(i)]) continue;
    used[static_cast<size_t>(i)] = 1;
    prefix.push_back(i);
    const double value = expected_loss_ac(params, probs, prefix);
    if (value < best_value) {
      best_value = value;
      best = prefix;
    }
    enumerate_ordered(params, probs, max_size, prefix, used, best, best_value);
    prefix.pop_back();
    used[static_cast<size_t>(i)] = 0;
  }
}

} // namespace

OrderedPrediction brute_force_bayes(const LossParams& params,
                                    ConstVectorRef probs,
                                    std::optional<int> size_cap) {
  require_reducible(params);
  require_probs(probs);
  const int num_classes = params.costs.num_classes();
  if (num_classes > 7) {
    throw std::length_error("exhaustive search is limited to K <= 7");
  }
  if (probs.size() != num_classes) {
    throw std::invalid_argument("probability vector size mismatch");
  }
  const int max_size =
      std::min(num_classes, size_cap ? std::max(*size_cap, 0) : num_classes);

  OrderedPrediction prefix;
  OrderedPrediction best;
  double best_value = 0.0;
  std::vector<char> used(static_cast<size_t>(num_classes), 0);
  enumerate_ordered(params, probs, max_size, prefix, used, best, best_value);
  return best;
}

double rank_loss_full(const LabelSet& truth, ConstVectorRef scores) {
  const int num_classes = static_cast<int>(scores.size());
  const auto in_truth = indicator_of(truth, num_classes, "label");
  double total = 0.0;
  for (int i = 0; i < num_classes; ++i) {
    if (!in_truth[i]) continue;
    for (int j = 0; j < num_classes; ++j) {
      if (in_truth[j]) continue;
      if (scores[i] < scores[j]) {
        total += 1.0;
      } else if (scores[i] == scores[j]) {
        total += 0.5;
      }
    }
  }
  return total;
}

double p_rank_loss(const LabelSet& truth, const OrderedPrediction& pred,
                   int size_cap) {
  if (size_cap < 0) {
    throw std::invalid_argument("size cap must be nonnegative");
  }
  int num_classes = 0;
  for (int i : truth) num_classes = std::max(num_classes, i + 1);
  for (int i : pred) num_classes = std::max(num_classes, i + 1);
  const auto in_truth = indicator_of(truth, num_classes, "label");
  const auto in_pred = indicator_of(pred, num_classes, "prediction");

  double total = 0.0;
  const int size = static_cast<int>(pred.size());
  for (int u = 0; u < size; ++u) {
    for (int v = u + 1; v < size; ++v) {
      // pred[u] outranks pred[v]; a mistake iff only pred[v] is relevant.
      if (in_truth[pred[static_cast<size_t>(v)]] &&
          !in_truth[pred[static_cast<size_t>(u)]]) {
        total += 1.0;
      }
    }
  }
  int missed = 0;
  for (int i : truth) {
    if (!in_pred[i]) ++missed;
  }
  return total + static_cast<double>(size_cap) * missed;
}

double expected_p_rank(ConstVectorRef probs, const OrderedPrediction& pred,
                       int size_cap) {
  require_probs(probs);
  if (size_cap < 0) {
    throw std::invalid_argument("size cap must be nonnegative");
  }
  const int num_classes = static_cast<int>(probs.size());
  indicator_of(pred, num_classes, "prediction");

  double total = 0.0;
  const int size = static_cast<int>(pred.size());
  double pred_mass = 0.0;
  for (int u = 0; u < size; ++u) {
    const double pu = probs[pred[static_cast<size_t>(u)]];
    pred_mass += pu;
    for (int v = u + 1; v < size; ++v) {
      total += probs[pred[static_cast<size_t>(v)]] * (1.0 - pu);
    }
  }
  return total + static_cast<double>(size_cap) * (probs.sum() - pred_mass);
}

OrderedPrediction bayes_optimal_ranking(ConstVectorRef probs, int size_cap) {
  require_probs(probs);
  const int num_classes = static_cast<int>(probs.size());
  if (size_cap < 0 || size_cap > num_classes) {
    throw std::invalid_argument("size cap must lie in [0, K]");
  }
  auto order = order_by_prob(probs);
  order.resize(static_cast<size_t>(size_cap));
  return order;
}

double regret_round(RegretKind kind, const LossParams& params,
                    ConstVectorRef probs, const OrderedPrediction& pred,
                    std::optional<int> size_cap) {
  double value = 0.0;
  if (kind == RegretKind::Subset) {
    const auto star = bayes_optimal_subset(params, probs, size_cap);
    value = expected_loss_ac(params, probs, pred) -
            expected_loss_ac(params, probs, star);
  } else {
    if (!size_cap) {
      throw std::invalid_argument("ranking regret needs a size cap");
    }
    const auto star = bayes_optimal_ranking(probs, *size_cap);
    value = expected_p_rank(probs, pred, *size_cap) -
            expected_p_rank(probs, star, *size_cap);
  }
  if (value < -1e-12) {
    throw std::logic_error("regret fell below the round-off tolerance");
  }
  return std::max(value, 0.0);
}

} // namespace mlbandit
