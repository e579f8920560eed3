#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlbandit/environment.hpp"
#include "mlbandit/learner.hpp"
#include "mlbandit/losses.hpp"

namespace mlbandit {

enum class RunMode { Synthetic, Dataset };
enum class AlgorithmKind { Bandit, Obr };

struct ExperimentConfig {
  RunMode mode = RunMode::Synthetic;
  std::string dataset_path;

  // Round count. Synthetic mode runs exactly this many rounds; dataset
  // mode runs one round per example, truncated to horizon when positive.
  long horizon = 0;

  int num_classes = 0;
  int dim = 0;
  SurrogateKind surrogate = SurrogateKind::Square;
  double radius = 1.0;
  double a = 0.5;
  CostPreset cost_preset = CostPreset::Constant;
  std::optional<int> size_cap;
  TaskMode task = TaskMode::Subset;
  double delta = 0.1;

  // Known norm bound. When neither this nor adaptive_norm is set,
  // synthetic runs use the generator's bound (the radius) and dataset
  // runs fall back to the adaptive width.
  std::optional<double> norm_bound;
  bool adaptive_norm = false;
  bool adaptive_literal_max = false;

  MatrixMode matrix_mode = MatrixMode::Full;
  AlgorithmKind algorithm = AlgorithmKind::Bandit;
  unsigned long long seed = 1;
  std::string output_path;
};

// One CSV row. Metrics that do not apply to the run stay empty:
// rank_loss needs dataset mode, prank_loss needs the ranking task, and
// regret needs synthetic mode (exact marginals).
struct RoundMetrics {
  long t = 0;
  double loss_ac = 0.0;
  double cum_loss_ac = 0.0;
  double hamming = 0.0;
  double cum_hamming = 0.0;
  std::optional<double> rank_loss;
  std::optional<double> cum_rank_loss;
  std::optional<double> prank_loss;
  std::optional<double> cum_prank_loss;
  std::optional<double> regret;
  std::optional<double> cum_regret;
  double mean_eps = 0.0;
  int pred_size = 0;
};

// Everything a test can want to see about one protocol round. The fed
// labels are exactly what reached the learner. The true vectors are
// filled in synthetic runs only.
struct RoundRecord {
  long t = 0;
  Round round;
  PredictionTrace trace;
  LabelSet fed;
  Vector true_probs;
  Vector true_margins;
};

using RoundObserver =
    std::function<void(const RoundRecord&, const RoundMetrics&)>;

SurrogateSpec make_surrogate(SurrogateKind kind, double radius);

// Throws std::invalid_argument on any inconsistent setting.
void validate_config(const ExperimentConfig& config);

// Full online protocol. Writes the CSV when output_path is set and
// returns the per-round metrics. The observer, when given, runs after
// every round.
std::vector<RoundMetrics> run_experiment(const ExperimentConfig& config,
                                         const RoundObserver& observer = {});

// Same protocol against a caller-supplied environment (custom models
// or context streams). Ignores mode, seed, and the synthetic shape
// fields of the config; the environment decides those.
std::vector<RoundMetrics> run_synthetic(const ExperimentConfig& config,
                                        SyntheticEnvironment& env,
                                        const RoundObserver& observer = {});

// Fixed 13-column schema, LF line endings, 12 significant digits,
// absent metrics as empty fields.
void write_csv(const std::vector<RoundMetrics>& metrics,
               const std::string& path);

// Command-line entry point. Returns 0 on success, 2 on usage errors,
// 1 on runtime failures.
int cli_main(int argc, char** argv);

} // namespace mlbandit
