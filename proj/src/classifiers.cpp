#include "ssvep/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ssvep/rng.hpp"

namespace ssvep {

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::svm_linear: return "svm_linear";
    case ClassifierKind::svm_poly: return "svm_poly";
    case ClassifierKind::random_forest: return "random_forest";
  }
  return "unknown";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
  if (name == "svm_linear") return ClassifierKind::svm_linear;
  if (name == "svm_poly") return ClassifierKind::svm_poly;
  if (name == "random_forest") return ClassifierKind::random_forest;
  throw std::invalid_argument("unknown classifier kind: " + name);
}

double kernel_value(const TrainableSpec& spec, const Vector& a, const Vector& b) {
  const double dot = a.dot(b);
  if (spec.kind == ClassifierKind::svm_poly) {
    return std::pow(dot + spec.poly_coef0, spec.poly_degree);
  }
  return dot;
}

CommandLabel argmax_lowest_tie(const Vector& values) {
  CommandLabel best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = static_cast<CommandLabel>(i);
  }
  return best;
}

namespace {

// ---------------------------------------------------------------------------
// SVM: Platt-style SMO on one binary one-vs-rest subproblem.

struct SmoProblem {
  const Matrix& kernel;  // precomputed n x n Gram matrix
  const std::vector<double>& y;
  double c;
  double tolerance;
  long max_iterations;

  std::vector<double> alpha;
  std::vector<double> error;  // f(x_i) - y_i, maintained incrementally
  double bias = 0.0;
  long iterations = 0;
  bool hit_cap = false;
};

bool take_step(SmoProblem& p, std::size_t i1, std::size_t i2) {
  if (i1 == i2) return false;
  const double alpha1 = p.alpha[i1];
  const double alpha2 = p.alpha[i2];
  const double y1 = p.y[i1];
  const double y2 = p.y[i2];
  const double e1 = p.error[i1];
  const double e2 = p.error[i2];
  const double s = y1 * y2;

  double lo, hi;
  if (y1 != y2) {
    lo = std::max(0.0, alpha2 - alpha1);
    hi = std::min(p.c, p.c + alpha2 - alpha1);
  } else {
    lo = std::max(0.0, alpha1 + alpha2 - p.c);
    hi = std::min(p.c, alpha1 + alpha2);
  }
  if (lo >= hi) return false;

  const double k11 = p.kernel(static_cast<Eigen::Index>(i1), static_cast<Eigen::Index>(i1));
  const double k12 = p.kernel(static_cast<Eigen::Index>(i1), static_cast<Eigen::Index>(i2));
  const double k22 = p.kernel(static_cast<Eigen::Index>(i2), static_cast<Eigen::Index>(i2));
  const double eta = k11 + k22 - 2.0 * k12;

  double a2;
  if (eta > 0.0) {
    a2 = alpha2 + y2 * (e1 - e2) / eta;
    a2 = std::clamp(a2, lo, hi);
  } else {
    // Flat direction: evaluate the dual objective at both clip ends.
    const double f1 = y1 * e1 - alpha1 * k11 - s * alpha2 * k12;
    const double f2 = y2 * e2 - alpha2 * k22 - s * alpha1 * k12;
    const double l1 = alpha1 + s * (alpha2 - lo);
    const double h1 = alpha1 + s * (alpha2 - hi);
    const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                          s * lo * l1 * k12;
    const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                          s * hi * h1 * k12;
    if (obj_lo < obj_hi - 1e-12) {
      a2 = lo;
    } else if (obj_lo > obj_hi + 1e-12) {
      a2 = hi;
    } else {
      return false;
    }
  }
  if (std::abs(a2 - alpha2) < 1e-12 * (a2 + alpha2 + 1e-12)) return false;

  const double a1 = alpha1 + s * (alpha2 - a2);
  const double d1 = a1 - alpha1;
  const double d2 = a2 - alpha2;

  const double b1 = p.bias - e1 - y1 * d1 * k11 - y2 * d2 * k12;
  const double b2 = p.bias - e2 - y1 * d1 * k12 - y2 * d2 * k22;
  double new_bias;
  if (a1 > 0.0 && a1 < p.c) {
    new_bias = b1;
  } else if (a2 > 0.0 && a2 < p.c) {
    new_bias = b2;
  } else {
    new_bias = 0.5 * (b1 + b2);
  }
  const double delta_bias = new_bias - p.bias;

  p.alpha[i1] = a1;
  p.alpha[i2] = a2;
  p.bias = new_bias;
  const std::size_t n = p.y.size();
  for (std::size_t i = 0; i < n; ++i) {
    p.error[i] += y1 * d1 * p.kernel(static_cast<Eigen::Index>(i1), static_cast<Eigen::Index>(i)) +
                  y2 * d2 * p.kernel(static_cast<Eigen::Index>(i2), static_cast<Eigen::Index>(i)) +
                  delta_bias;
  }
  return true;
}

bool examine_example(SmoProblem& p, std::size_t i2) {
  const double y2 = p.y[i2];
  const double alpha2 = p.alpha[i2];
  const double e2 = p.error[i2];
  const double r2 = e2 * y2;
  const bool violates = (r2 < -p.tolerance && alpha2 < p.c) ||
                        (r2 > p.tolerance && alpha2 > 0.0);
  if (!violates) return false;

  const std::size_t n = p.y.size();
  // Second-choice heuristic: maximize |E1 - E2| over non-bound examples.
  std::size_t best = n;
  double best_gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p.alpha[i] > 0.0 && p.alpha[i] < p.c) {
      const double gap = std::abs(p.error[i] - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
  }
  if (best < n && take_step(p, best, i2)) return true;
  for (std::size_t i = 0; i < n; ++i) {
    if (p.alpha[i] > 0.0 && p.alpha[i] < p.c && take_step(p, i, i2)) return true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (take_step(p, i, i2)) return true;
  }
  return false;
}

void solve_smo(SmoProblem& p) {
  const std::size_t n = p.y.size();
  p.alpha.assign(n, 0.0);
  p.error.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.error[i] = -p.y[i];
  p.bias = 0.0;

  long changed = 0;
  bool examine_all = true;
  while (changed > 0 || examine_all) {
    changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (examine_all || (p.alpha[i] > 0.0 && p.alpha[i] < p.c)) {
        if (examine_example(p, i)) ++changed;
        if (++p.iterations > p.max_iterations) {
          p.hit_cap = true;
          return;
        }
      }
    }
    if (examine_all) {
      examine_all = false;  // terminates if this full sweep changed nothing
    } else if (changed == 0) {
      examine_all = true;   // quiet non-bound sweep: re-check everything
    }
  }
}

SvmHead head_from_problem(const SmoProblem& p, const Matrix& features) {
  SvmHead head;
  std::vector<std::size_t> sv;
  for (std::size_t i = 0; i < p.alpha.size(); ++i) {
    if (p.alpha[i] > 0.0) sv.push_back(i);
  }
  head.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), features.cols());
  head.coefficients.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t i = 0; i < sv.size(); ++i) {
    head.support_vectors.row(static_cast<Eigen::Index>(i)) =
        features.row(static_cast<Eigen::Index>(sv[i]));
    head.coefficients[static_cast<Eigen::Index>(i)] = p.alpha[sv[i]] * p.y[sv[i]];
  }
  head.bias = p.bias;
  return head;
}

// ---------------------------------------------------------------------------
// Random forest.

struct TreeBuilder {
  const Matrix& features;
  const std::vector<CommandLabel>& labels;
  int n_labels;
  int max_depth;
  int min_leaf;
  int mtry;
  Rng& rng;
  DecisionTree tree;

  double gini(const std::vector<int>& counts, int total) const {
    if (total == 0) return 0.0;
    double sum_sq = 0.0;
    for (const int c : counts) {
      const double p = static_cast<double>(c) / total;
      sum_sq += p * p;
    }
    return 1.0 - sum_sq;
  }

  CommandLabel majority(const std::vector<int>& counts) const {
    CommandLabel best = 0;
    for (int l = 1; l < n_labels; ++l) {
      if (counts[static_cast<std::size_t>(l)] > counts[static_cast<std::size_t>(best)]) {
        best = l;
      }
    }
    return best;
  }

  int build(std::vector<std::size_t>& indices, int depth) {
    std::vector<int> counts(static_cast<std::size_t>(n_labels), 0);
    for (const std::size_t i : indices) {
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    const int total = static_cast<int>(indices.size());
    const double node_impurity = gini(counts, total);

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[static_cast<std::size_t>(node_id)].label = majority(counts);

    const bool pure = node_impurity <= 0.0;
    const bool depth_capped = max_depth > 0 && depth >= max_depth;
    if (pure || depth_capped || total < 2 * min_leaf || total < 2) return node_id;

    // Random feature subset without replacement.
    const int d = static_cast<int>(features.cols());
    std::vector<int> candidates(static_cast<std::size_t>(d));
    std::iota(candidates.begin(), candidates.end(), 0);
    for (int i = 0; i < mtry && i < d; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(i) +
          static_cast<std::size_t>(uniform_index(rng, static_cast<std::uint64_t>(d - i)));
      std::swap(candidates[static_cast<std::size_t>(i)], candidates[j]);
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_impurity = node_impurity - 1e-12;

    std::vector<std::pair<double, CommandLabel>> column(indices.size());
    for (int ci = 0; ci < mtry && ci < d; ++ci) {
      const int f = candidates[static_cast<std::size_t>(ci)];
      for (std::size_t i = 0; i < indices.size(); ++i) {
        column[i] = {features(static_cast<Eigen::Index>(indices[i]), f), labels[indices[i]]};
      }
      std::sort(column.begin(), column.end());

      std::vector<int> left_counts(static_cast<std::size_t>(n_labels), 0);
      std::vector<int> right_counts = counts;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        ++left_counts[static_cast<std::size_t>(column[i].second)];
        --right_counts[static_cast<std::size_t>(column[i].second)];
        if (column[i].first == column[i + 1].first) continue;
        const int n_left = static_cast<int>(i) + 1;
        const int n_right = total - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        const double weighted =
            (n_left * gini(left_counts, n_left) + n_right * gini(right_counts, n_right)) /
            total;
        if (weighted < best_impurity) {
          best_impurity = weighted;
          best_feature = f;
          best_threshold = column[i].first +
                           0.5 * (column[i + 1].first - column[i].first);
        }
      }
    }

    if (best_feature < 0) return node_id;

    std::vector<std::size_t> left_idx, right_idx;
    for (const std::size_t i : indices) {
      if (features(static_cast<Eigen::Index>(i), best_feature) <= best_threshold) {
        left_idx.push_back(i);
      } else {
        right_idx.push_back(i);
      }
    }
    if (left_idx.empty() || right_idx.empty()) return node_id;

    tree.nodes[static_cast<std::size_t>(node_id)].feature = best_feature;
    tree.nodes[static_cast<std::size_t>(node_id)].threshold = best_threshold;
    const int left_id = build(left_idx, depth + 1);
    tree.nodes[static_cast<std::size_t>(node_id)].left = left_id;
    const int right_id = build(right_idx, depth + 1);
    tree.nodes[static_cast<std::size_t>(node_id)].right = right_id;
    return node_id;
  }
};

}  // namespace

CommandLabel tree_predict(const DecisionTree& tree, const Vector& features) {
  int node = 0;
  while (!tree.nodes[static_cast<std::size_t>(node)].is_leaf()) {
    const auto& n = tree.nodes[static_cast<std::size_t>(node)];
    node = features[n.feature] <= n.threshold ? n.left : n.right;
  }
  return tree.nodes[static_cast<std::size_t>(node)].label;
}

TrainedModel train(const TrainableSpec& spec, const Matrix& features,
                   const std::vector<CommandLabel>& labels) {
  const Eigen::Index n = features.rows();
  if (n != static_cast<Eigen::Index>(labels.size())) {
    throw std::invalid_argument("train: feature rows do not match label count");
  }
  if (n < 2) throw std::invalid_argument("train: need at least 2 examples");
  if (!features.allFinite()) {
    throw std::invalid_argument("train: features contain NaN or Inf");
  }
  int n_labels = 0;
  for (const CommandLabel l : labels) {
    if (l < 0) throw std::invalid_argument("train: negative label");
    n_labels = std::max(n_labels, l + 1);
  }
  {
    std::vector<bool> present(static_cast<std::size_t>(n_labels), false);
    for (const CommandLabel l : labels) present[static_cast<std::size_t>(l)] = true;
    if (std::count(present.begin(), present.end(), true) < 2) {
      throw std::invalid_argument("train: need at least 2 classes present");
    }
  }

  TrainedModel model;
  model.spec = spec;
  model.n_features = static_cast<int>(features.cols());
  model.n_labels = n_labels;

  if (spec.kind == ClassifierKind::random_forest) {
    if (spec.rf_trees < 1) throw std::invalid_argument("train: tree count must be >= 1");
    model.forest.trees.reserve(static_cast<std::size_t>(spec.rf_trees));
    const int mtry = std::max(
        1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(features.cols())))));
    for (int t = 0; t < spec.rf_trees; ++t) {
      Rng rng = substream(spec.seed, static_cast<std::uint64_t>(t));
      std::vector<std::size_t> indices(static_cast<std::size_t>(n));
      if (spec.rf_bootstrap) {
        for (auto& i : indices) {
          i = static_cast<std::size_t>(uniform_index(rng, static_cast<std::uint64_t>(n)));
        }
      } else {
        std::iota(indices.begin(), indices.end(), 0);
      }
      TreeBuilder builder{features, labels,        n_labels, spec.rf_max_depth,
                          spec.rf_min_leaf, mtry,  rng,      {}};
      builder.build(indices, 0);
      model.forest.trees.push_back(std::move(builder.tree));
    }
  } else {
    if (spec.svm_c <= 0.0) throw std::invalid_argument("train: C must be > 0");
    if (spec.kind == ClassifierKind::svm_poly && spec.poly_degree < 2) {
      throw std::invalid_argument("train: polynomial degree must be >= 2");
    }
    Matrix gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double k = kernel_value(spec, features.row(i), features.row(j));
        gram(i, j) = k;
        gram(j, i) = k;
      }
    }
    for (CommandLabel head_label = 0; head_label < n_labels; ++head_label) {
      std::vector<double> y(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        y[static_cast<std::size_t>(i)] =
            labels[static_cast<std::size_t>(i)] == head_label ? 1.0 : -1.0;
      }
      SmoProblem problem{gram, y, spec.svm_c, spec.svm_tolerance,
                         spec.svm_max_iterations, {}, {}, 0.0, 0, false};
      solve_smo(problem);
      if (problem.hit_cap) model.convergence_warning = true;
      model.svm.heads.push_back(head_from_problem(problem, features));
    }
  }

  const auto train_preds = predict(model, features);
  int correct = 0;
  for (std::size_t i = 0; i < train_preds.size(); ++i) {
    if (train_preds[i] == labels[i]) ++correct;
  }
  model.training_accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return model;
}

Vector decision_values(const TrainedModel& model, const Vector& features) {
  if (features.size() != model.n_features) {
    throw std::invalid_argument("predict: feature width does not match training width");
  }
  Vector values(model.n_labels);
  if (model.spec.kind == ClassifierKind::random_forest) {
    values.setZero();
    for (const auto& tree : model.forest.trees) {
      values[tree_predict(tree, features)] += 1.0;
    }
    values /= static_cast<double>(model.forest.trees.size());
  } else {
    for (int l = 0; l < model.n_labels; ++l) {
      const auto& head = model.svm.heads[static_cast<std::size_t>(l)];
      double f = head.bias;
      for (Eigen::Index i = 0; i < head.support_vectors.rows(); ++i) {
        f += head.coefficients[i] *
             kernel_value(model.spec, head.support_vectors.row(i).transpose(), features);
      }
      values[l] = f;
    }
  }
  return values;
}

CommandLabel predict(const TrainedModel& model, const Vector& features) {
  return argmax_lowest_tie(decision_values(model, features));
}

std::vector<CommandLabel> predict(const TrainedModel& model, const Matrix& features) {
  std::vector<CommandLabel> out;
  out.reserve(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    const Vector row = features.row(r).transpose();
    out.push_back(predict(model, row));
  }
  return out;
}

}  // namespace ssvep
