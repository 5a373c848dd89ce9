#include "rnnfx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rnnfx::metrics {

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

void ScoredDataset::validate() const {
  if (labels.empty()) bad("scored dataset is empty");
  if (scores.size() != labels.size())
    bad("scores hold " + std::to_string(scores.size()) + " rows for " +
        std::to_string(labels.size()) + " labels");
  const std::size_t k = scores.front().size();
  if (k == 0) bad("score rows are empty");
  const int classes = n_classes();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].size() != k)
      bad("score row " + std::to_string(i) + " has " + std::to_string(scores[i].size()) +
          " columns, expected " + std::to_string(k));
    for (const double v : scores[i])
      if (!std::isfinite(v)) bad("score row " + std::to_string(i) + " is not finite");
    if (labels[i] < 0 || labels[i] >= classes)
      bad("label " + std::to_string(labels[i]) + " outside [0, " +
          std::to_string(classes) + ")");
  }
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    bad("scores and labels differ in length");
  std::int64_t n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!std::isfinite(scores[i])) bad("scores must be finite");
    if (labels[i] == 1)
      ++n_pos;
    else if (labels[i] == 0)
      ++n_neg;
    else
      bad("binary labels must be 0 or 1, got " + std::to_string(labels[i]));
  }
  if (n_pos == 0 || n_neg == 0) bad("degenerate labels: both classes must be present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Doubled midranks keep the numerator an integer: a tie group occupying
  // one-based ranks i+1..j contributes i+1+j per member.
  std::int64_t pos_rank_sum2 = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const std::int64_t rank2 = std::int64_t(i) + 1 + std::int64_t(j);
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) pos_rank_sum2 += rank2;
    i = j;
  }
  const std::int64_t u2 = pos_rank_sum2 - n_pos * (n_pos + 1);
  return double(u2) / (2.0 * double(n_pos) * double(n_neg));
}

std::vector<double> one_vs_rest_auc(const ScoredDataset& s) {
  s.validate();
  const int n = s.size();
  std::vector<double> out;
  if (s.columns() == 1) {
    std::vector<double> col(n);
    for (int i = 0; i < n; ++i) col[i] = s.scores[i][0];
    out.push_back(roc_auc(col, s.labels));
    return out;
  }
  std::vector<double> col(n);
  std::vector<int> is_class(n);
  for (int c = 0; c < s.columns(); ++c) {
    for (int i = 0; i < n; ++i) {
      col[i] = s.scores[i][c];
      is_class[i] = s.labels[i] == c ? 1 : 0;
    }
    out.push_back(roc_auc(col, is_class));
  }
  return out;
}

std::vector<double> auc_ratio(const ScoredDataset& quantized,
                              const ScoredDataset& reference) {
  quantized.validate();
  reference.validate();
  if (quantized.size() != reference.size() ||
      quantized.columns() != reference.columns())
    bad("scored datasets differ in shape");
  if (quantized.labels != reference.labels)
    bad("scored datasets differ in labels");
  const auto q = one_vs_rest_auc(quantized);
  const auto r = one_vs_rest_auc(reference);
  std::vector<double> out(q.size());
  for (std::size_t c = 0; c < q.size(); ++c) {
    if (r[c] == 0.0)
      bad("reference AUC for class " + std::to_string(c) + " is zero");
    out[c] = q[c] / r[c];
  }
  return out;
}

double accuracy(const ScoredDataset& s) {
  s.validate();
  std::int64_t correct = 0;
  for (int i = 0; i < s.size(); ++i) {
    int pred = 0;
    if (s.columns() == 1) {
      pred = s.scores[i][0] >= 0.5 ? 1 : 0;
    } else {
      for (int c = 1; c < s.columns(); ++c)
        if (s.scores[i][c] > s.scores[i][pred]) pred = c;
    }
    if (pred == s.labels[i]) ++correct;
  }
  return double(correct) / double(s.size());
}

}  // namespace rnnfx::metrics
