#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssvep/core.hpp"

namespace ssvep {

enum class ClassifierKind { svm_linear, svm_poly, random_forest };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

struct TrainableSpec {
  ClassifierKind kind = ClassifierKind::svm_linear;
  // SVM
  double svm_c = 1.0;
  int poly_degree = 3;
  double poly_coef0 = 1.0;
  double svm_tolerance = 1e-3;
  long svm_max_iterations = 200000;
  // Random forest
  int rf_trees = 100;
  int rf_max_depth = 0;  // 0 = unlimited
  int rf_min_leaf = 1;
  bool rf_bootstrap = true;
  std::uint64_t seed = 0;
};

// One one-vs-rest maximum-margin head: f(x) = sum_i coeff_i K(sv_i, x) + bias
// with coeff_i = alpha_i * y_i over the support vectors.
struct SvmHead {
  Matrix support_vectors;  // one row per support vector
  Vector coefficients;
  double bias = 0.0;
};

struct SvmModel {
  std::vector<SvmHead> heads;  // one per label, in label order
};

// Flat-array decision tree; children index into `nodes`, -1 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  CommandLabel label = 0;  // majority label (valid at leaves)

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct ForestModel {
  std::vector<DecisionTree> trees;
};

struct TrainedModel {
  TrainableSpec spec;
  int n_features = 0;
  int n_labels = 0;
  SvmModel svm;        // populated for svm_* kinds
  ForestModel forest;  // populated for random_forest
  double training_accuracy = 0.0;
  bool convergence_warning = false;
};

// Fit one classifier. SVM heads are solved in the dual by sequential minimal
// optimization until no KKT violation exceeds svm_tolerance (or the iteration
// cap trips, which sets convergence_warning). Forests bootstrap-sample per
// tree and split greedily on Gini impurity over sqrt(d) candidate features;
// everything is deterministic under spec.seed.
TrainedModel train(const TrainableSpec& spec, const Matrix& features,
                   const std::vector<CommandLabel>& labels);

CommandLabel predict(const TrainedModel& model, const Vector& features);
std::vector<CommandLabel> predict(const TrainedModel& model, const Matrix& features);

// Per-label scores: one-vs-rest margins for SVM, vote fractions for forests.
// predict() takes the argmax, breaking exact ties toward the lowest label.
Vector decision_values(const TrainedModel& model, const Vector& features);

CommandLabel argmax_lowest_tie(const Vector& values);

double kernel_value(const TrainableSpec& spec, const Vector& a, const Vector& b);
CommandLabel tree_predict(const DecisionTree& tree, const Vector& features);

}  // namespace ssvep
