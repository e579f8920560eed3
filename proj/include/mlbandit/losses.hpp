#pragma once

#include <optional>
#include <vector>

#include "mlbandit/types.hpp"

namespace mlbandit {

enum class CostPreset { Constant, Decreasing, Custom };

/*
 * Position costs c(i, s) for predictions of size s, 1 <= i <= s <= K,
 * normalized so that 1 >= c(1, s) >= ... >= c(s, s) >= 0 for every s.
 * Positions are 1-based: c(1, s) is the cost of a mistake in the top slot.
 */
class CostStructure {
 public:
  // Empty table over zero classes; every lookup throws.
  CostStructure() = default;

  // c(i, s) = 1 for all slots.
  static CostStructure constant(int num_classes);

  // c(i, s) = (s - i + 1) / s, linearly decreasing over the slots.
  static CostStructure decreasing(int num_classes);

  // rows[s - 1] holds the s entries c(1, s) .. c(s, s).
  static CostStructure custom(std::vector<std::vector<double>> rows);

  double cost(int pos, int size) const;
  int num_classes() const { return num_classes_; }
  CostPreset preset() const { return preset_; }

  // True when every row is strictly decreasing in the position index.
  bool strictly_decreasing() const { return strictly_decreasing_; }

 private:
  int num_classes_ = 0;
  CostPreset preset_ = CostPreset::Custom;
  bool strictly_decreasing_ = false;
  std::vector<double> entries_;
};

struct LossParams {
  double a = 0.5;
  CostStructure costs;
};

/*
 * Multilabel loss a * |truth \ pred| + (1 - a) * sum of c(j_i, |pred|)
 * over predicted classes i outside truth, j_i being i's slot in pred.
 */
double loss_ac_full(const LossParams& params, const LabelSet& truth,
                    const OrderedPrediction& pred);

// Same loss shifted by -a * |truth|; depends on truth only through
// the labels that intersect pred. Requires a < 1.
double loss_ac_reduced(const LossParams& params, const LabelSet& truth,
                       const OrderedPrediction& pred);

// Expectation of the reduced loss under independent labels with the
// given marginals. Requires a < 1.
double expected_loss_ac(const LossParams& params, ConstVectorRef probs,
                        const OrderedPrediction& pred);

/*
 * Minimizer of expected_loss_ac over all ordered subsets: classes sorted
 * by nonincreasing probability (ties by ascending index), best prefix
 * size, smallest size on ties. Optional hard cap on the subset size.
 */
OrderedPrediction bayes_optimal_subset(const LossParams& params,
                                       ConstVectorRef probs,
                                       std::optional<int> size_cap = {});

// Exhaustive minimizer over every ordered subset; K <= 7 only.
OrderedPrediction brute_force_bayes(const LossParams& params,
                                    ConstVectorRef probs,
                                    std::optional<int> size_cap = {});

/*
 * Pairwise ranking loss over all class pairs: one unit per relevant /
 * irrelevant pair scored in the wrong order, half a unit per tie.
 */
double rank_loss_full(const LabelSet& truth, ConstVectorRef scores);

// Ranking loss restricted to the predicted classes (slot order is the
// score), plus size_cap units per relevant class missing from pred.
double p_rank_loss(const LabelSet& truth, const OrderedPrediction& pred,
                   int size_cap);

// Expectation of p_rank_loss under independent labels.
double expected_p_rank(ConstVectorRef probs, const OrderedPrediction& pred,
                       int size_cap);

// Minimizer of expected_p_rank: the size_cap most probable classes in
// nonincreasing probability order, ties by ascending index.
OrderedPrediction bayes_optimal_ranking(ConstVectorRef probs, int size_cap);

enum class RegretKind { Subset, PartialRanking };

// Expected loss of pred minus expected loss of the matching Bayes-optimal
// output; tiny negative round-off (>= -1e-12) clamps to zero.
double regret_round(RegretKind kind, const LossParams& params,
                    ConstVectorRef probs, const OrderedPrediction& pred,
                    std::optional<int> size_cap = {});

} // namespace mlbandit
