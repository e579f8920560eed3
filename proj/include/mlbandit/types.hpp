#pragma once

#include <Eigen/Dense>
#include <vector>

/*
 * Shared dense types for the multilabel bandit library.
 * Class indices are 0-based everywhere in code; the dataset file
 * format is 1-based and the loader converts at the boundary.
 */

namespace mlbandit {

typedef Eigen::VectorXd Vector;
typedef Eigen::MatrixXd Matrix;
typedef Eigen::Ref<const Eigen::VectorXd> ConstVectorRef;

// Label subset, ascending class indices, no repeats.
typedef std::vector<int> LabelSet;

// Ranked class list, most relevant first, no repeats.
typedef std::vector<int> OrderedPrediction;

} // namespace mlbandit
