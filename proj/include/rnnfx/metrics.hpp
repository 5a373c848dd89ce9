#pragma once

#include <span>
#include <vector>

namespace rnnfx::metrics {

// Scores for n samples over k columns plus integer labels.  A single column
// is read as the positive-class score of a binary problem; otherwise column c
// scores class c.
struct ScoredDataset {
  std::vector<std::vector<double>> scores;
  std::vector<int> labels;

  int size() const { return int(labels.size()); }
  int columns() const { return scores.empty() ? 0 : int(scores.front().size()); }
  int n_classes() const { return columns() <= 1 ? 2 : columns(); }
  void validate() const;  // throws std::invalid_argument
};

// Probability that a random positive outscores a random negative, ties
// counted half.  Rank-based; agrees exactly with the pairwise count because
// both reduce to the same integer numerator over 2 * n_pos * n_neg.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// Per-class one-vs-rest AUC; a single score column yields one binary AUC.
std::vector<double> one_vs_rest_auc(const ScoredDataset& s);

// Elementwise AUC(quantized) / AUC(reference) per class.  Shapes and labels
// must match; a reference AUC of zero is an error.
std::vector<double> auc_ratio(const ScoredDataset& quantized,
                              const ScoredDataset& reference);

// Argmax accuracy; ties resolve to the lowest class index.  A single column
// predicts class 1 when the score reaches 0.5.
double accuracy(const ScoredDataset& s);

}  // namespace rnnfx::metrics
