#include "mlbandit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mlbandit {

namespace {

CostStructure make_costs(CostPreset preset, int num_classes) {
  switch (preset) {
    case CostPreset::Constant:
      return CostStructure::constant(num_classes);
    case CostPreset::Decreasing:
      return CostStructure::decreasing(num_classes);
    default:
      throw std::invalid_argument("experiments use the constant or decreasing presets");
  }
}

std::optional<double> resolved_norm_bound(const ExperimentConfig& config) {
  if (config.adaptive_norm) return std::nullopt;
  if (config.norm_bound) return config.norm_bound;
  if (config.mode == RunMode::Synthetic) return config.radius;
  return std::nullopt;
}

// The online protocol shared by both modes: predict, feed back, score
// against the full label set. next_round supplies round t; model is
// null outside synthetic runs.
std::vector<RoundMetrics> run_rounds(const ExperimentConfig& config,
                                     const SurrogateSpec& spec,
                                     int num_classes, int dim, long horizon,
                                     const std::function<Round(long)>& next_round,
                                     const GroundTruthModel* model,
                                     const RoundObserver& observer) {
  LossParams params{config.a, make_costs(config.cost_preset, num_classes)};

  LearnerConfig lcfg;
  lcfg.spec = spec;
  lcfg.params = params;
  lcfg.num_classes = num_classes;
  lcfg.dim = dim;
  lcfg.delta = config.delta;
  lcfg.norm_bound = resolved_norm_bound(config);
  lcfg.task = config.task;
  lcfg.matrix_mode = config.matrix_mode;
  lcfg.exploration = config.algorithm == AlgorithmKind::Bandit
                         ? ExplorationMode::Ucb
                         : ExplorationMode::None;
  lcfg.adaptive_literal_max = config.adaptive_literal_max;
  Learner learner(lcfg);

  std::vector<RoundMetrics> metrics;
  metrics.reserve(static_cast<size_t>(horizon));
  double cum_loss = 0.0, cum_hamming = 0.0, cum_rank = 0.0, cum_prank = 0.0,
         cum_regret = 0.0;

  for (long t = 1; t <= horizon; ++t) {
    Round round = next_round(t);
    std::optional<int> cap = round.size_cap ? round.size_cap : config.size_cap;
    if (cap) cap = std::min(*cap, num_classes);

    const PredictionTrace trace = learner.predict(round.context, t, cap);
    const OrderedPrediction& pred = trace.prediction;

    std::vector<char> in_pred(static_cast<size_t>(num_classes), 0);
    for (int i : pred) in_pred[static_cast<size_t>(i)] = 1;

    LabelSet fed;
    if (config.algorithm == AlgorithmKind::Bandit) {
      Feedback fb;
      for (int i : round.labels) {
        if (in_pred[static_cast<size_t>(i)]) fb.observed.push_back(i);
      }
      fed = fb.observed;
      learner.update(round.context, trace, fb);
    } else {
      fed = round.labels;
      learner.obr_update(round.context, trace, round.labels);
    }

    RoundMetrics m;
    m.t = t;
    m.loss_ac = loss_ac_full(params, round.labels, pred);
    cum_loss += m.loss_ac;
    m.cum_loss_ac = cum_loss;

    int missed = 0;
    for (int i : round.labels) {
      if (!in_pred[static_cast<size_t>(i)]) ++missed;
    }
    m.hamming = static_cast<double>(
        missed + static_cast<int>(pred.size()) -
        (static_cast<int>(round.labels.size()) - missed));
    cum_hamming += m.hamming;
    m.cum_hamming = cum_hamming;

    if (config.mode == RunMode::Dataset) {
      m.rank_loss = rank_loss_full(round.labels, trace.prob);
      cum_rank += *m.rank_loss;
      m.cum_rank_loss = cum_rank;
    }
    if (config.task == TaskMode::Ranking) {
      m.prank_loss = p_rank_loss(round.labels, pred, *cap);
      cum_prank += *m.prank_loss;
      m.cum_prank_loss = cum_prank;
    }

    Vector true_probs, true_margins;
    if (model != nullptr) {
      true_probs = marginals(*model, round.context);
      true_margins = model->vectors * round.context;
      const RegretKind kind = config.task == TaskMode::Subset
                                  ? RegretKind::Subset
                                  : RegretKind::PartialRanking;
      m.regret = regret_round(kind, params, true_probs, pred, cap);
      cum_regret += *m.regret;
      m.cum_regret = cum_regret;
    }

    if (!pred.empty()) {
      double sum = 0.0;
      for (int i : pred) sum += trace.width[i];
      m.mean_eps = sum / static_cast<double>(pred.size());
    }
    m.pred_size = static_cast<int>(pred.size());

    if (observer) {
      RoundRecord record;
      record.t = t;
      record.round = round;
      record.trace = trace;
      record.fed = fed;
      record.true_probs = true_probs;
      record.true_margins = true_margins;
      observer(record, m);
    }
    metrics.push_back(m);
  }
  return metrics;
}

} // namespace

SurrogateSpec make_surrogate(SurrogateKind kind, double radius) {
  if (kind == SurrogateKind::Square) {
    if (radius != 1.0) {
      throw std::invalid_argument("the square surrogate fixes the radius to 1");
    }
    return SurrogateSpec::square();
  }
  return SurrogateSpec::logistic(radius);
}

void validate_config(const ExperimentConfig& config) {
  if (config.mode == RunMode::Synthetic) {
    if (config.num_classes < 1 || config.dim < 1) {
      throw std::invalid_argument(
          "synthetic mode needs a positive class count and dimension");
    }
  } else if (config.dataset_path.empty()) {
    throw std::invalid_argument("dataset mode needs a dataset path");
  }
  if (config.horizon < 0) {
    throw std::invalid_argument("the horizon cannot be negative");
  }
  if (!(config.a >= 0.0 && config.a < 1.0)) {
    throw std::invalid_argument("the loss weight a must lie in [0, 1)");
  }
  if (config.surrogate == SurrogateKind::Square && config.radius != 1.0) {
    throw std::invalid_argument("the square surrogate fixes the radius to 1");
  }
  if (!(config.radius > 0.0)) {
    throw std::invalid_argument("the radius must be positive");
  }
  if (config.algorithm == AlgorithmKind::Bandit &&
      !(config.delta > 0.0 && config.delta * std::exp(1.0) < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1/e)");
  }
  if (config.norm_bound && config.adaptive_norm) {
    throw std::invalid_argument(
        "a known norm bound and the adaptive width exclude each other");
  }
  if (config.norm_bound && !(*config.norm_bound > 0.0)) {
    throw std::invalid_argument("the norm bound must be positive");
  }
  if (config.size_cap && *config.size_cap < 0) {
    throw std::invalid_argument("the size cap cannot be negative");
  }
  if (config.task == TaskMode::Ranking) {
    if (!config.size_cap) {
      throw std::invalid_argument("the ranking task needs a size cap");
    }
    if (config.cost_preset != CostPreset::Decreasing) {
      throw std::invalid_argument(
          "the ranking task needs strictly decreasing position costs");
    }
  }
}

std::vector<RoundMetrics> run_experiment(const ExperimentConfig& config,
                                         const RoundObserver& observer) {
  validate_config(config);
  const SurrogateSpec spec = make_surrogate(config.surrogate, config.radius);

  if (config.mode == RunMode::Synthetic) {
    std::mt19937_64 rng(config.seed);
    GroundTruthModel model =
        gen_ground_truth(spec, config.num_classes, config.dim, rng);
    SyntheticEnvironment env(std::move(model), rng);
    return run_synthetic(config, env, observer);
  }

  const DatasetLoadResult data = load_dataset(config.dataset_path, true);
  long horizon = static_cast<long>(data.rounds.size());
  if (config.horizon > 0) horizon = std::min(horizon, config.horizon);

  std::vector<RoundMetrics> metrics;
  if (horizon > 0) {
    if (data.num_classes < 1) {
      throw std::runtime_error("dataset declares no labels");
    }
    metrics = run_rounds(
        config, spec, data.num_classes, data.dim, horizon,
        [&](long t) { return data.rounds[static_cast<size_t>(t - 1)]; },
        nullptr, observer);
  }
  if (!config.output_path.empty()) write_csv(metrics, config.output_path);
  return metrics;
}

std::vector<RoundMetrics> run_synthetic(const ExperimentConfig& config,
                                        SyntheticEnvironment& env,
                                        const RoundObserver& observer) {
  const SurrogateSpec spec = env.model().spec;
  const int num_classes = static_cast<int>(env.model().vectors.rows());
  const int dim = static_cast<int>(env.model().vectors.cols());
  auto metrics = run_rounds(
      config, spec, num_classes, dim, config.horizon,
      [&](long t) { return env.next(t); }, &env.model(), observer);
  if (!config.output_path.empty()) write_csv(metrics, config.output_path);
  return metrics;
}

void write_csv(const std::vector<RoundMetrics>& metrics,
               const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << "t,loss_ac,cum_loss_ac,hamming,cum_hamming,rank_loss,cum_rank_loss,"
         "prank_loss,cum_prank_loss,regret,cum_regret,mean_eps,pred_size\n";
  char buf[400];
  auto field = [&buf](const std::optional<double>& v) {
    if (!v) return std::string();
    std::snprintf(buf, sizeof buf, "%.12g", *v);
    return std::string(buf);
  };
  for (const auto& m : metrics) {
    std::snprintf(buf, sizeof buf, "%ld,%.12g,%.12g,%.12g,%.12g", m.t,
                  m.loss_ac, m.cum_loss_ac, m.hamming, m.cum_hamming);
    std::string line(buf);
    line += ',' + field(m.rank_loss) + ',' + field(m.cum_rank_loss);
    line += ',' + field(m.prank_loss) + ',' + field(m.cum_prank_loss);
    line += ',' + field(m.regret) + ',' + field(m.cum_regret);
    std::snprintf(buf, sizeof buf, ",%.12g,%d\n", m.mean_eps, m.pred_size);
    line += buf;
    out << line;
  }
  if (!out) {
    throw std::runtime_error("failed while writing " + path);
  }
}

} // namespace mlbandit
