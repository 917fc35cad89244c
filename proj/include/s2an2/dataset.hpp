#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace s2an2 {

/// Row-major tabular samples with integer class labels.
struct TabularDataset {
  std::size_t n_features = 0;
  std::vector<double> features;  // n() * n_features values
  std::vector<std::size_t> labels;
  std::vector<std::string> feature_names;  // empty or one per feature

  std::size_t n() const { return labels.size(); }

  std::span<const double> sample(std::size_t i) const {
    return {features.data() + i * n_features, n_features};
  }

  std::size_t max_label() const {
    if (labels.empty()) throw std::runtime_error("TabularDataset: empty dataset");
    std::size_t m = 0;
    for (std::size_t v : labels) m = v > m ? v : m;
    return m;
  }

  void validate() const;
};

}  // namespace s2an2
