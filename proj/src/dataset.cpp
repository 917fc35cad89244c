#include "s2an2/dataset.hpp"

#include <cmath>

namespace s2an2 {

void TabularDataset::validate() const {
  if (n_features == 0) throw std::runtime_error("TabularDataset: no feature columns");
  if (features.size() != n() * n_features) {
    throw std::runtime_error("TabularDataset: feature storage does not match n * n_features");
  }
  if (!feature_names.empty() && feature_names.size() != n_features) {
    throw std::runtime_error("TabularDataset: feature name count mismatch");
  }
  for (double v : features) {
    if (!std::isfinite(v)) throw std::runtime_error("TabularDataset: non-finite feature value");
  }
}

}  // namespace s2an2
