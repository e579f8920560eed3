#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlbandit/harness.hpp"

using namespace mlbandit;

namespace {

ExperimentConfig synthetic_config(long horizon, int num_classes, int dim,
                                  unsigned long long seed = 1) {
  ExperimentConfig config;
  config.mode = RunMode::Synthetic;
  config.horizon = horizon;
  config.num_classes = num_classes;
  config.dim = dim;
  config.seed = seed;
  return config;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

long count_lines(const std::string& text) {
  return std::count(text.begin(), text.end(), '\n');
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::vector<std::string> csv_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) rows.push_back(line);
  return rows;
}

bool close_rel(double seen, double expected) {
  return std::abs(seen - expected) <=
         1e-10 * std::max(1.0, std::abs(expected));
}

// argv adapter for cli_main.
int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.push_back("mlbandit");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : full) argv.push_back(s.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

const char* kHeader =
    "t,loss_ac,cum_loss_ac,hamming,cum_hamming,rank_loss,cum_rank_loss,"
    "prank_loss,cum_prank_loss,regret,cum_regret,mean_eps,pred_size";

} // namespace

TEST_CASE("make_surrogate pins the square radius to one") {
  CHECK(make_surrogate(SurrogateKind::Square, 1.0).kind == SurrogateKind::Square);
  CHECK_THROWS_AS(make_surrogate(SurrogateKind::Square, 2.0),
                  std::invalid_argument);
  const SurrogateSpec spec = make_surrogate(SurrogateKind::Logistic, 2.5);
  CHECK(spec.radius == 2.5);
}

TEST_CASE("validate_config rejects inconsistent experiments") {
  CHECK_NOTHROW(validate_config(synthetic_config(10, 2, 2)));

  ExperimentConfig config = synthetic_config(10, 0, 2);
  CHECK_THROWS_AS(validate_config(config), std::invalid_argument);

  config = synthetic_config(10, 2, 2);
  config.mode = RunMode::Dataset;
  CHECK_THROWS_AS(validate_config(config), std::invalid_argument);

  config = synthetic_config(-1, 2, 2);
  CHECK_THROWS_AS(validate_config(config), std::invalid_argument);

  config = synthetic_config(10, 2, 2);
  config.a = 1.0;
  CHECK_THROWS_AS(validate_config(config), std::invalid_argument);

  config = synthetic_config(10, 2, 2);
  config.radius = 2.0;
  CHECK_THROWS_AS(validate_config(config), std::invalid_argument);

  config = synthetic_config(10, 2, 2);
  config.surrogate = SurrogateKind::Logistic;
  config.radius = 0.0;
  CHECK_THROWS_AS(validate_config(config), std::invalid_argument);

  config = synthetic_config(10, 2, 2);
  config.delta = 0.5;
  CHECK_THROWS_AS(validate_config(config), std::invalid_argument);

  config = synthetic_config(10, 2, 2);
  config.delta = 0.5;
  config.algorithm = AlgorithmKind::Obr;
  CHECK_NOTHROW(validate_config(config));

  config = synthetic_config(10, 2, 2);
  config.norm_bound = 1.0;
  config.adaptive_norm = true;
  CHECK_THROWS_AS(validate_config(config), std::invalid_argument);

  config = synthetic_config(10, 2, 2);
  config.norm_bound = -1.0;
  CHECK_THROWS_AS(validate_config(config), std::invalid_argument);

  config = synthetic_config(10, 2, 2);
  config.size_cap = -2;
  CHECK_THROWS_AS(validate_config(config), std::invalid_argument);

  config = synthetic_config(10, 2, 2);
  config.task = TaskMode::Ranking;
  config.cost_preset = CostPreset::Decreasing;
  CHECK_THROWS_AS(validate_config(config), std::invalid_argument);
  config.size_cap = 2;
  CHECK_NOTHROW(validate_config(config));
  config.cost_preset = CostPreset::Constant;
  CHECK_THROWS_AS(validate_config(config), std::invalid_argument);
}

TEST_CASE("a zero-round experiment produces an empty table") {
  ExperimentConfig config = synthetic_config(0, 2, 2);
  config.output_path = "harness_empty.csv";
  const auto metrics = run_experiment(config);
  CHECK(metrics.empty());
  const std::string text = read_file(config.output_path);
  CHECK(count_lines(text) == 1);
  CHECK(csv_rows(text)[0] == kHeader);
}

TEST_CASE("a one-round experiment writes a header and one row") {
  ExperimentConfig config = synthetic_config(1, 3, 2);
  config.output_path = "harness_one.csv";
  const auto metrics = run_experiment(config);
  REQUIRE(metrics.size() == 1);
  const auto rows = csv_rows(read_file(config.output_path));
  REQUIRE(rows.size() == 2);
  CHECK(split_fields(rows[0]).size() == 13);
  CHECK(split_fields(rows[1]).size() == 13);
}

TEST_CASE("identical seeds give byte-identical output and different seeds diverge") {
  ExperimentConfig config = synthetic_config(80, 3, 3, 9);
  config.output_path = "harness_det_a.csv";
  run_experiment(config);
  config.output_path = "harness_det_b.csv";
  run_experiment(config);
  CHECK(read_file("harness_det_a.csv") == read_file("harness_det_b.csv"));

  config.seed = 10;
  config.output_path = "harness_det_c.csv";
  run_experiment(config);
  CHECK(read_file("harness_det_a.csv") != read_file("harness_det_c.csv"));
}

TEST_CASE("the CSV round-trips its values") {
  ExperimentConfig config = synthetic_config(60, 3, 2, 4);
  config.output_path = "harness_roundtrip.csv";
  const auto metrics = run_experiment(config);
  const auto rows = csv_rows(read_file(config.output_path));
  REQUIRE(rows.size() == metrics.size() + 1);

  for (size_t k = 0; k < metrics.size(); ++k) {
    const auto fields = split_fields(rows[k + 1]);
    REQUIRE(fields.size() == 13);
    const RoundMetrics& m = metrics[k];
    CHECK(std::stol(fields[0]) == m.t);
    CHECK(close_rel(std::stod(fields[1]), m.loss_ac));
    CHECK(close_rel(std::stod(fields[2]), m.cum_loss_ac));
    CHECK(close_rel(std::stod(fields[3]), m.hamming));
    CHECK(close_rel(std::stod(fields[4]), m.cum_hamming));
    CHECK(fields[5].empty());
    CHECK(fields[6].empty());
    CHECK(fields[7].empty());
    CHECK(fields[8].empty());
    REQUIRE(m.regret.has_value());
    CHECK(close_rel(std::stod(fields[9]), *m.regret));
    CHECK(close_rel(std::stod(fields[10]), *m.cum_regret));
    CHECK(close_rel(std::stod(fields[11]), m.mean_eps));
    CHECK(std::stoi(fields[12]) == m.pred_size);
  }
}

TEST_CASE("cumulative columns are prefix sums and regrets are nonnegative") {
  const auto metrics = run_experiment(synthetic_config(150, 4, 3, 5));
  double loss = 0.0, hamming = 0.0, regret = 0.0;
  for (const auto& m : metrics) {
    loss += m.loss_ac;
    hamming += m.hamming;
    REQUIRE(m.regret.has_value());
    CHECK(*m.regret >= 0.0);
    regret += *m.regret;
    CHECK(std::abs(m.cum_loss_ac - loss) <= 1e-9);
    CHECK(std::abs(m.cum_hamming - hamming) <= 1e-9);
    CHECK(std::abs(*m.cum_regret - regret) <= 1e-9);
    CHECK(!m.rank_loss.has_value());
    CHECK(!m.prank_loss.has_value());
  }
}

TEST_CASE("bandit runs only ever feed the intersection to the learner") {
  ExperimentConfig config = synthetic_config(200, 4, 3, 6);
  config.size_cap = 2;
  long rounds_seen = 0;
  const auto metrics = run_experiment(config, [&](const RoundRecord& record,
                                                  const RoundMetrics& m) {
    ++rounds_seen;
    CHECK(record.trace.prediction.size() <= 2);
    CHECK(m.pred_size == static_cast<int>(record.trace.prediction.size()));

    LabelSet expected;
    for (int i : record.round.labels) {
      if (std::find(record.trace.prediction.begin(),
                    record.trace.prediction.end(),
                    i) != record.trace.prediction.end()) {
        expected.push_back(i);
      }
    }
    CHECK(record.fed == expected);

    REQUIRE(record.true_probs.size() == 4);
    REQUIRE(record.true_margins.size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(record.true_probs[i] >= 0.0);
      CHECK(record.true_probs[i] <= 1.0);
      CHECK(std::abs(record.true_margins[i]) <= 1.0 + 1e-9);
    }
  });
  CHECK(rounds_seen == 200);
  CHECK(metrics.size() == 200);
}

TEST_CASE("ranking runs emit fixed-size predictions and the partial ranking loss") {
  ExperimentConfig config = synthetic_config(120, 5, 3, 7);
  config.task = TaskMode::Ranking;
  config.cost_preset = CostPreset::Decreasing;
  config.size_cap = 3;
  const auto metrics = run_experiment(
      config, [&](const RoundRecord& record, const RoundMetrics& m) {
        CHECK(record.trace.prediction.size() == 3);
        REQUIRE(m.prank_loss.has_value());
        CHECK(*m.prank_loss >= 0.0);
        REQUIRE(m.regret.has_value());
        CHECK(*m.regret >= 0.0);
      });
  REQUIRE(!metrics.empty());
  CHECK(metrics.back().cum_prank_loss.has_value());
}

TEST_CASE("a hopeless environment stops costing regret once widths shrink") {
  const SurrogateSpec spec = SurrogateSpec::square();
  GroundTruthModel model;
  model.spec = spec;
  model.norm_bound = 1.0;
  model.vectors = Eigen::MatrixXd::Zero(2, 2);
  model.vectors(0, 0) = -1.0;
  model.vectors(1, 0) = -1.0;

  Eigen::VectorXd fixed = Eigen::VectorXd::Zero(2);
  fixed[0] = 1.0;
  SyntheticEnvironment env(
      std::move(model), std::mt19937_64(2),
      [fixed](long, int, std::mt19937_64&) { return fixed; });

  ExperimentConfig config = synthetic_config(6000, 2, 2, 2);
  const auto metrics = run_synthetic(config, env, [](const RoundRecord& record,
                                                     const RoundMetrics& m) {
    CHECK(record.round.labels.empty());
    REQUIRE(m.regret.has_value());
    CHECK(std::abs(*m.regret - m.loss_ac) <= 1e-12);
  });
  REQUIRE(metrics.size() == 6000);

  const long tenth = 600;
  double first = 0.0, last = 0.0;
  for (long k = 0; k < tenth; ++k) {
    first += *metrics[static_cast<size_t>(k)].regret;
    last += *metrics[metrics.size() - 1 - static_cast<size_t>(k)].regret;
  }
  CHECK(first > 0.0);
  CHECK(last <= 0.1 * first);
}

TEST_CASE("the full-information baseline runs without exploration") {
  ExperimentConfig config = synthetic_config(80, 3, 3, 8);
  config.algorithm = AlgorithmKind::Obr;
  const auto metrics = run_experiment(
      config, [](const RoundRecord& record, const RoundMetrics&) {
        CHECK(record.fed == record.round.labels);
      });
  REQUIRE(metrics.size() == 80);
  for (const auto& m : metrics) {
    CHECK(m.mean_eps == 0.0);
  }
}

TEST_CASE("dataset runs score ranking against scores and skip regret") {
  const std::string data = "harness_data.txt";
  write_file(data,
             "1 1:1\n"
             "2 2:1\n"
             "1,2 1:0.6 2:0.8\n"
             "  1:0.5 2:0.5\n");

  ExperimentConfig config;
  config.mode = RunMode::Dataset;
  config.dataset_path = data;
  config.output_path = "harness_data.csv";
  const auto metrics = run_experiment(config);
  REQUIRE(metrics.size() == 4);
  for (const auto& m : metrics) {
    REQUIRE(m.rank_loss.has_value());
    CHECK(*m.rank_loss >= 0.0);
    CHECK(!m.regret.has_value());
    CHECK(!m.prank_loss.has_value());
  }
  const auto rows = csv_rows(read_file(config.output_path));
  REQUIRE(rows.size() == 5);
  CHECK(!split_fields(rows[1])[5].empty());
  CHECK(split_fields(rows[1])[9].empty());

  SUBCASE("the horizon truncates the stream") {
    config.horizon = 2;
    config.output_path.clear();
    CHECK(run_experiment(config).size() == 2);
  }
  SUBCASE("a horizon beyond the file reads everything") {
    config.horizon = 50;
    config.output_path.clear();
    CHECK(run_experiment(config).size() == 4);
  }
}

TEST_CASE("a dataset with no labeled example is rejected") {
  const std::string data = "harness_unlabeled.txt";
  write_file(data, "  1:1\n  2:0.5\n");
  ExperimentConfig config;
  config.mode = RunMode::Dataset;
  config.dataset_path = data;
  CHECK_THROWS_AS(run_experiment(config), std::runtime_error);
}

TEST_CASE("write_csv surfaces IO failures with the path") {
  try {
    write_csv({}, "no_such_dir/impossible.csv");
    FAIL_CHECK("expected a write failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("no_such_dir") != std::string::npos);
  }
}

TEST_CASE("the command line rejects bad usage with exit code two") {
  CHECK(run_cli({"--help"}) == 0);
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"--mode", "synthetic", "--T", "5", "--K", "2", "--d", "2"}) == 2);
  CHECK(run_cli({"--mode", "warp", "--out", "cli_x.csv"}) == 2);
  CHECK(run_cli({"--mode", "synthetic", "--T", "5", "--K", "2", "--d", "2",
                 "--out", "cli_x.csv", "--frobnicate"}) == 2);
  CHECK(run_cli({"--mode", "synthetic", "--T", "5", "--K", "2", "--d", "2",
                 "--out", "cli_x.csv", "--U", "1", "--adaptive-U"}) == 2);
  CHECK(run_cli({"--mode", "synthetic", "--K", "2", "--d", "2",
                 "--out", "cli_x.csv"}) == 2);
  CHECK(run_cli({"--mode", "synthetic", "--T", "5", "--K", "2", "--d", "2",
                 "--out", "cli_x.csv", "--data", "whatever.txt"}) == 2);
  CHECK(run_cli({"--mode", "dataset", "--out", "cli_x.csv"}) == 2);
  CHECK(run_cli({"--mode", "dataset", "--data", "harness_data.txt",
                 "--K", "2", "--out", "cli_x.csv"}) == 2);
  CHECK(run_cli({"--mode", "synthetic", "--T", "5", "--K", "2", "--d", "2",
                 "--out", "cli_x.csv", "--delta", "0.5"}) == 2);
  CHECK(run_cli({"--mode", "synthetic", "--T", "5", "--K", "2", "--d", "2",
                 "--out", "cli_x.csv", "--task", "ranking",
                 "--costs", "decreasing"}) == 2);
  CHECK(run_cli({"--mode", "synthetic", "--T", "5", "--K", "2", "--d", "2",
                 "--out", "cli_x.csv", "--task", "ranking",
                 "--size-cap", "2"}) == 2);
  CHECK(run_cli({"--mode", "synthetic", "--T", "5", "--K", "2", "--d", "2",
                 "--out", "cli_x.csv", "--surrogate", "square", "--R", "2"}) == 2);
}

TEST_CASE("the command line reports runtime failures with exit code one") {
  CHECK(run_cli({"--mode", "dataset", "--data", "really_not_here.txt",
                 "--out", "cli_missing.csv"}) == 1);
  const std::string data = "harness_unlabeled.txt";
  write_file(data, "  1:1\n");
  CHECK(run_cli({"--mode", "dataset", "--data", data,
                 "--out", "cli_unlabeled.csv"}) == 1);
}

TEST_CASE("the command line runs synthetic and dataset experiments end to end") {
  CHECK(run_cli({"--mode", "synthetic", "--T", "50", "--K", "3", "--d", "3",
                 "--surrogate", "square", "--a", "0.5", "--costs", "constant",
                 "--delta", "0.1", "--seed", "7", "--out", "cli_run.csv"}) == 0);
  CHECK(count_lines(read_file("cli_run.csv")) == 51);

  CHECK(run_cli({"--mode", "synthetic", "--T", "30", "--K", "3", "--d", "3",
                 "--task", "ranking", "--costs", "decreasing", "--size-cap",
                 "2", "--seed", "7", "--out", "cli_rank.csv"}) == 0);
  CHECK(count_lines(read_file("cli_rank.csv")) == 31);

  CHECK(run_cli({"--mode", "synthetic", "--T", "30", "--K", "3", "--d", "3",
                 "--algo", "obr", "--seed", "7", "--out", "cli_obr.csv"}) == 0);

  CHECK(run_cli({"--mode", "synthetic", "--T", "30", "--K", "3", "--d", "3",
                 "--surrogate", "logistic", "--R", "1.5", "--adaptive-U",
                 "--diag", "--seed", "7", "--out", "cli_logit.csv"}) == 0);

  write_file("cli_data.txt",
             "1 1:1\n"
             "2 2:1\n"
             "1,2 1:0.6 2:0.8\n");
  CHECK(run_cli({"--mode", "dataset", "--data", "cli_data.txt",
                 "--out", "cli_ds.csv"}) == 0);
  CHECK(count_lines(read_file("cli_ds.csv")) == 4);
  CHECK(run_cli({"--mode", "dataset", "--data", "cli_data.txt", "--T", "2",
                 "--out", "cli_ds2.csv"}) == 0);
  CHECK(count_lines(read_file("cli_ds2.csv")) == 3);
}
