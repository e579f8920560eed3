#pragma once

#include <optional>
#include <vector>

#include "mlbandit/losses.hpp"
#include "mlbandit/surrogate.hpp"
#include "mlbandit/types.hpp"

namespace mlbandit {

enum class TaskMode { Subset, Ranking };
enum class MatrixMode { Full, Diagonal };
enum class ExplorationMode { Ucb, None };

struct LearnerConfig {
  SurrogateSpec spec;
  LossParams params;
  int num_classes = 0;
  int dim = 0;
  double delta = 0.1;

  // Known bound on the ground-truth norms. Empty switches the width to
  // the adaptive form, which substitutes a growing log term for the
  // bound and caps the squared width at 4 * radius^2.
  std::optional<double> norm_bound;

  TaskMode task = TaskMode::Subset;
  MatrixMode matrix_mode = MatrixMode::Full;
  ExplorationMode exploration = ExplorationMode::Ucb;

  // Replace the adaptive cap (min) with a floor (max) on 4 * radius^2.
  bool adaptive_literal_max = false;
};

/*
 * Per-class second-order state: the regularized Gram matrix
 * A = I + sum of x x^T over signed updates, its inverse, and the weight
 * vector. Diagonal mode keeps only diag(A). The inverse is maintained
 * with rank-one updates and recomputed directly every
 * kRefreshInterval updates to absorb numerical drift.
 */
struct ClassState {
  ClassState(int dim, MatrixMode mode);

  double quad_form(ConstVectorRef x) const;
  Vector inv_times(ConstVectorRef x) const;
  void add_rank_one(ConstVectorRef x);

  MatrixMode mode;
  Matrix gram;
  Matrix gram_inv;
  Vector gram_diag;
  Vector weight;
  long updates = 0;
  long since_refresh = 0;
};

inline constexpr long kRefreshInterval = 10000;

struct PredictionTrace {
  Vector margin;     // projected margins w'_i . x
  Vector width;      // confidence widths
  Vector prob;       // upper-confidence probabilities
  Matrix projected;  // row i = projected weight w'_i
  OrderedPrediction prediction;
};

struct Feedback {
  LabelSet observed;  // truth restricted to the prediction
};

// Mahalanobis projection of the stored weight onto the slab
// {w : |w^T x| <= radius}, measured in the A-norm.
Vector project(const ClassState& state, ConstVectorRef x, double radius);

// Upper-confidence width for one class at round t (1-based).
double confidence_width(const ClassState& state, ConstVectorRef x, long t,
                        const LearnerConfig& config);

class Learner {
 public:
  explicit Learner(LearnerConfig config);

  // Project, score, and pick the loss-minimizing output for round t.
  // Ranking mode requires a size cap. Does not mutate the learner.
  PredictionTrace predict(ConstVectorRef x, long t,
                          std::optional<int> size_cap = {}) const;

  // Bandit update: +1 signs on observed classes, -1 on the rest of the
  // prediction; classes outside the prediction are untouched.
  void update(ConstVectorRef x, const PredictionTrace& trace,
              const Feedback& feedback);

  // Full-information baseline update: +1 signs on the true labels, -1
  // elsewhere, every class. Requires exploration to be disabled.
  void obr_update(ConstVectorRef x, const PredictionTrace& trace,
                  const LabelSet& truth);

  const ClassState& state(int i) const { return states_[static_cast<size_t>(i)]; }
  const LearnerConfig& config() const { return config_; }

 private:
  void apply_signed_step(int i, ConstVectorRef x, const PredictionTrace& trace,
                         double sign);

  LearnerConfig config_;
  std::vector<ClassState> states_;
};

} // namespace mlbandit
