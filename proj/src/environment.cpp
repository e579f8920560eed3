#include "mlbandit/environment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <utility>

namespace mlbandit {

Vector marginals(const GroundTruthModel& model, ConstVectorRef context) {
  const int num_classes = static_cast<int>(model.vectors.rows());
  if (model.vectors.cols() != context.size()) {
    throw std::invalid_argument("context dimension mismatch");
  }
  Vector probs(num_classes);
  for (int i = 0; i < num_classes; ++i) {
    const double delta = model.vectors.row(i).dot(context);
    if (std::abs(delta) > model.spec.radius + kDomainTol) {
      throw std::domain_error("ground-truth margin outside the loss domain");
    }
    probs[i] = eval_p(model.spec, clip(model.spec, delta));
  }
  return probs;
}

LabelSet sample_labels(const GroundTruthModel& model, ConstVectorRef context,
                       std::mt19937_64& rng) {
  const Vector probs = marginals(model, context);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LabelSet labels;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (unit(rng) < probs[i]) labels.push_back(static_cast<int>(i));
  }
  return labels;
}

Vector gen_context(int dim, std::mt19937_64& rng) {
  if (dim < 1) {
    throw std::invalid_argument("context dimension must be positive");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  double norm = 0.0;
  do {
    for (int r = 0; r < dim; ++r) v[r] = gauss(rng);
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

GroundTruthModel gen_ground_truth(const SurrogateSpec& spec, int num_classes,
                                  int dim, std::mt19937_64& rng) {
  if (num_classes < 1) {
    throw std::invalid_argument("need at least one class");
  }
  GroundTruthModel model;
  model.spec = spec;
  model.norm_bound = spec.radius;
  model.vectors.resize(num_classes, dim);
  std::uniform_real_distribution<double> radius(0.0, spec.radius);
  for (int i = 0; i < num_classes; ++i) {
    const Vector dir = gen_context(dim, rng);
    model.vectors.row(i) = radius(rng) * dir.transpose();
  }
  return model;
}

SyntheticEnvironment::SyntheticEnvironment(GroundTruthModel model,
                                           std::mt19937_64 rng, ContextGen gen)
    : model_(std::move(model)), rng_(rng), gen_(std::move(gen)) {}

Round SyntheticEnvironment::next(long t) {
  const int dim = static_cast<int>(model_.vectors.cols());
  Round round;
  round.context = gen_ ? gen_(t, dim, rng_) : gen_context(dim, rng_);
  round.labels = sample_labels(model_, round.context, rng_);
  return round;
}

namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    if (end > pos) tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

int parse_index(const std::string& text, int line_no, const char* what) {
  size_t consumed = 0;
  long value = 0;
  try {
    value = std::stol(text, &consumed);
  } catch (const std::exception&) {
    throw ParseError(line_no, std::string("bad ") + what + " '" + text + "'");
  }
  if (consumed != text.size() || value < 1) {
    throw ParseError(line_no, std::string("bad ") + what + " '" + text + "'");
  }
  return static_cast<int>(value);
}

double parse_value(const std::string& text, int line_no) {
  size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw ParseError(line_no, "bad feature value '" + text + "'");
  }
  if (consumed != text.size() || !std::isfinite(value)) {
    throw ParseError(line_no, "bad feature value '" + text + "'");
  }
  return value;
}

struct SparseExample {
  int line_no = 0;
  LabelSet labels;
  std::vector<std::pair<int, double>> features;
};

} // namespace

DatasetLoadResult load_dataset(const std::string& path, bool normalize) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open dataset file " + path);
  }

  std::vector<SparseExample> examples;
  int max_label = 0;
  int max_feature = 0;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;

    size_t first = line.find_first_not_of(" \t");
    if (line[first] == '#') continue;

    const bool has_labels = first == 0;
    const auto tokens = split_ws(line);

    SparseExample ex;
    ex.line_no = line_no;
    size_t token_at = 0;
    if (has_labels) {
      const std::string& field = tokens[token_at++];
      size_t pos = 0;
      while (pos <= field.size()) {
        const size_t comma = std::min(field.find(',', pos), field.size());
        const int label = parse_index(field.substr(pos, comma - pos), line_no,
                                      "label index");
        if (std::find(ex.labels.begin(), ex.labels.end(), label - 1) !=
            ex.labels.end()) {
          throw ParseError(line_no,
                           "repeated label " + std::to_string(label));
        }
        ex.labels.push_back(label - 1);
        max_label = std::max(max_label, label);
        pos = comma + 1;
      }
      std::sort(ex.labels.begin(), ex.labels.end());
    }
    for (; token_at < tokens.size(); ++token_at) {
      const std::string& tok = tokens[token_at];
      const size_t colon = tok.find(':');
      if (colon == std::string::npos) {
        throw ParseError(line_no, "bad feature token '" + tok + "'");
      }
      const int feature =
          parse_index(tok.substr(0, colon), line_no, "feature index");
      const double value = parse_value(tok.substr(colon + 1), line_no);
      for (const auto& fv : ex.features) {
        if (fv.first == feature) {
          throw ParseError(line_no,
                           "repeated feature " + std::to_string(feature));
        }
      }
      ex.features.emplace_back(feature, value);
      max_feature = std::max(max_feature, feature);
    }
    examples.push_back(std::move(ex));
  }

  DatasetLoadResult result;
  result.num_classes = max_label;
  result.dim = max_feature;
  result.rounds.reserve(examples.size());
  for (const auto& ex : examples) {
    Vector context = Vector::Zero(std::max(result.dim, 1));
    for (const auto& fv : ex.features) context[fv.first - 1] = fv.second;
    if (normalize) {
      const double norm = context.norm();
      if (norm == 0.0) {
        result.warnings.push_back("line " + std::to_string(ex.line_no) +
                                  ": zero feature vector, record skipped");
        continue;
      }
      context /= norm;
    }
    Round round;
    round.context = std::move(context);
    round.labels = ex.labels;
    result.rounds.push_back(std::move(round));
  }
  return result;
}

} // namespace mlbandit
