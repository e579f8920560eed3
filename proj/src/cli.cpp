#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mlbandit/harness.hpp"

namespace mlbandit {

namespace {

void print_summary(const std::vector<RoundMetrics>& metrics) {
  const size_t n = metrics.size();
  std::cout << "rounds=" << n;
  if (n == 0) {
    std::cout << "\n";
    return;
  }
  const RoundMetrics& last = metrics.back();
  const double scale = 1.0 / static_cast<double>(n);
  char buf[64];
  auto put = [&](const char* name, double value) {
    std::snprintf(buf, sizeof buf, " %s=%.6g", name, value);
    std::cout << buf;
  };
  put("avg_loss_ac", last.cum_loss_ac * scale);
  put("avg_hamming", last.cum_hamming * scale);
  if (last.cum_rank_loss) put("avg_rank_loss", *last.cum_rank_loss * scale);
  if (last.cum_prank_loss) put("avg_prank_loss", *last.cum_prank_loss * scale);
  if (last.cum_regret) put("avg_regret", *last.cum_regret * scale);
  std::cout << "\n";
}

} // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Online multilabel prediction and ranking from partial feedback"};

  std::string mode = "synthetic";
  std::string data_path;
  long horizon = 0;
  int num_classes = 0;
  int dim = 0;
  std::string surrogate = "square";
  double radius = 1.0;
  double a = 0.5;
  std::string costs = "constant";
  int size_cap = -1;
  std::string task = "subset";
  double delta = 0.1;
  double norm_bound = 0.0;
  std::string algo = "bandit";
  unsigned long long seed = 1;
  std::string out_path;

  app.add_option("--mode", mode, "Run mode")
      ->required()
      ->check(CLI::IsMember({"synthetic", "dataset"}));
  auto* opt_data = app.add_option("--data", data_path, "Dataset file (dataset mode)");
  auto* opt_t = app.add_option("--T", horizon, "Number of rounds");
  auto* opt_k = app.add_option("--K", num_classes, "Number of classes (synthetic mode)");
  auto* opt_d = app.add_option("--d", dim, "Context dimension (synthetic mode)");
  app.add_option("--surrogate", surrogate, "Surrogate loss")
      ->check(CLI::IsMember({"square", "logistic"}));
  app.add_option("--R", radius, "Margin interval radius (logistic)");
  app.add_option("--a", a, "Weight between missed and spurious labels");
  app.add_option("--costs", costs, "Position cost preset")
      ->check(CLI::IsMember({"constant", "decreasing"}));
  auto* opt_cap = app.add_option("--size-cap", size_cap, "Hard cap on the prediction size");
  app.add_option("--task", task, "Prediction task")
      ->check(CLI::IsMember({"subset", "ranking"}));
  app.add_option("--delta", delta, "Confidence level, in (0, 1/e)");
  auto* opt_u = app.add_option("--U", norm_bound, "Known bound on the ground-truth norms");
  auto* opt_adaptive = app.add_flag("--adaptive-U", "Use the adaptive confidence width");
  auto* opt_diag = app.add_flag("--diag", "Keep only the diagonal of the Gram matrices");
  app.add_option("--algo", algo, "Learning algorithm")
      ->check(CLI::IsMember({"bandit", "obr"}));
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--out", out_path, "Output CSV path")->required();
  opt_u->excludes(opt_adaptive);
  opt_adaptive->excludes(opt_u);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\nrun with --help for usage\n";
    return 2;
  }

  ExperimentConfig config;
  config.mode = mode == "synthetic" ? RunMode::Synthetic : RunMode::Dataset;
  config.dataset_path = data_path;
  config.horizon = horizon;
  config.num_classes = num_classes;
  config.dim = dim;
  config.surrogate = surrogate == "square" ? SurrogateKind::Square
                                           : SurrogateKind::Logistic;
  config.radius = radius;
  config.a = a;
  config.cost_preset = costs == "constant" ? CostPreset::Constant
                                           : CostPreset::Decreasing;
  if (opt_cap->count() > 0) config.size_cap = size_cap;
  config.task = task == "subset" ? TaskMode::Subset : TaskMode::Ranking;
  config.delta = delta;
  if (opt_u->count() > 0) config.norm_bound = norm_bound;
  config.adaptive_norm = opt_adaptive->count() > 0;
  config.matrix_mode = opt_diag->count() > 0 ? MatrixMode::Diagonal
                                             : MatrixMode::Full;
  config.algorithm = algo == "bandit" ? AlgorithmKind::Bandit
                                      : AlgorithmKind::Obr;
  config.seed = seed;
  config.output_path = out_path;

  try {
    if (config.mode == RunMode::Synthetic) {
      if (opt_data->count() > 0) {
        throw std::invalid_argument("--data only applies to dataset mode");
      }
      if (opt_t->count() == 0 || opt_k->count() == 0 || opt_d->count() == 0) {
        throw std::invalid_argument("synthetic mode needs --T, --K, and --d");
      }
    } else {
      if (opt_data->count() == 0) {
        throw std::invalid_argument("dataset mode needs --data");
      }
      if (opt_k->count() > 0 || opt_d->count() > 0) {
        throw std::invalid_argument(
            "--K and --d are inferred from the dataset file");
      }
    }
    validate_config(config);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\nrun with --help for usage\n";
    return 2;
  }

  try {
    print_summary(run_experiment(config));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

} // namespace mlbandit
