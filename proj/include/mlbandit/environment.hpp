#pragma once

#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlbandit/surrogate.hpp"
#include "mlbandit/types.hpp"

namespace mlbandit {

/*
 * Linear ground truth: row i of vectors is u_i, and the probability of
 * label i given a unit-norm context x is the link value p(u_i^T x).
 * Labels are drawn independently across classes given the context.
 */
struct GroundTruthModel {
  Matrix vectors;
  SurrogateSpec spec;
  double norm_bound = 0.0;
};

struct Round {
  Vector context;
  LabelSet labels;
  std::optional<int> size_cap;
};

// Per-class label probabilities for one context.
Vector marginals(const GroundTruthModel& model, ConstVectorRef context);

// One independent Bernoulli draw per class, ascending indices.
LabelSet sample_labels(const GroundTruthModel& model, ConstVectorRef context,
                       std::mt19937_64& rng);

// Isotropically random unit vector.
Vector gen_context(int dim, std::mt19937_64& rng);

// Random model: each u_i is an isotropic direction scaled by a uniform
// radius in [0, spec.radius]; norm_bound is set to spec.radius.
GroundTruthModel gen_ground_truth(const SurrogateSpec& spec, int num_classes,
                                  int dim, std::mt19937_64& rng);

/*
 * Streams (context, labels) rounds from a ground-truth model. The
 * context generator is pluggable; the default draws isotropic unit
 * vectors. One generator call and one label draw per round, in that
 * order, so a fixed seed fixes the whole stream.
 */
class SyntheticEnvironment {
 public:
  using ContextGen = std::function<Vector(long t, int dim, std::mt19937_64&)>;

  SyntheticEnvironment(GroundTruthModel model, std::mt19937_64 rng,
                       ContextGen gen = {});

  Round next(long t);
  const GroundTruthModel& model() const { return model_; }

 private:
  GroundTruthModel model_;
  std::mt19937_64 rng_;
  ContextGen gen_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

struct DatasetLoadResult {
  std::vector<Round> rounds;
  int num_classes = 0;
  int dim = 0;
  std::vector<std::string> warnings;
};

/*
 * Sparse text format, one example per line:
 *
 *   labels feature:value feature:value ...
 *
 * labels is a comma-separated list of 1-based class indices; lines with
 * no labels start with whitespace. Features are 1-based index:value
 * pairs. Lines starting with '#' are comments; blank lines are skipped.
 * Class and feature counts are the largest indices seen. With normalize
 * set, contexts are scaled to unit norm and zero-vector records are
 * skipped with a warning.
 */
DatasetLoadResult load_dataset(const std::string& path, bool normalize);

} // namespace mlbandit
