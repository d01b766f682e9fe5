#pragma once

// Learning/evaluation separation of a dataset by identity and by sample.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "gaitlab/error.hpp"
#include "gaitlab/mocap.hpp"

namespace gaitlab {

struct DataSplit {
  LabeledDataset learning;
  LabeledDataset evaluation;
  std::vector<std::size_t> learning_indices;    // into the source dataset
  std::vector<std::size_t> evaluation_indices;
};

namespace detail {

inline std::vector<IdentityClass> pick_classes(const LabeledDataset& dataset, std::size_t count, std::mt19937_64& rng) {
  auto classes = dataset.classes();
  if (classes.size() < count)
    throw InvalidArgument("dataset has " + std::to_string(classes.size()) + " classes, setup needs " +
                          std::to_string(count));
  std::shuffle(classes.begin(), classes.end(), rng);
  classes.resize(count);
  return classes;
}

}  // namespace detail

// Same identities on both sides: ceil(ratio * N_c) samples of every chosen
// class go to learning, the rest to evaluation.
inline DataSplit split_homogeneous(const LabeledDataset& dataset, std::size_t classes, double ratio,
                                   std::mt19937_64& rng) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("split ratio must lie in (0, 1)");
  DataSplit split;
  for (auto& c : detail::pick_classes(dataset, classes, rng)) {
    std::shuffle(c.members.begin(), c.members.end(), rng);
    const double want = ratio * static_cast<double>(c.members.size());
    // Guard against 1/3 * 9 landing a hair above 3.
    const auto learn = static_cast<std::size_t>(std::ceil(want - 1e-9));
    if (learn == 0 || learn >= c.members.size())
      throw InvalidArgument("class '" + c.label + "' with " + std::to_string(c.members.size()) +
                            " samples leaves one side of the split empty");
    split.learning_indices.insert(split.learning_indices.end(), c.members.begin(), c.members.begin() + static_cast<std::ptrdiff_t>(learn));
    split.evaluation_indices.insert(split.evaluation_indices.end(), c.members.begin() + static_cast<std::ptrdiff_t>(learn), c.members.end());
  }
  std::sort(split.learning_indices.begin(), split.learning_indices.end());
  std::sort(split.evaluation_indices.begin(), split.evaluation_indices.end());
  split.learning = dataset.subset(split.learning_indices);
  split.evaluation = dataset.subset(split.evaluation_indices);
  return split;
}

// Disjoint identities: the first learn_classes drawn identities with all
// their samples learn, the next eval_classes evaluate.
inline DataSplit split_heterogeneous(const LabeledDataset& dataset, std::size_t learn_classes,
                                     std::size_t eval_classes, std::mt19937_64& rng) {
  if (learn_classes == 0 || eval_classes == 0) throw InvalidArgument("both sides need at least one class");
  auto chosen = detail::pick_classes(dataset, learn_classes + eval_classes, rng);
  DataSplit split;
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    auto& side = k < learn_classes ? split.learning_indices : split.evaluation_indices;
    side.insert(side.end(), chosen[k].members.begin(), chosen[k].members.end());
  }
  std::sort(split.learning_indices.begin(), split.learning_indices.end());
  std::sort(split.evaluation_indices.begin(), split.evaluation_indices.end());
  split.learning = dataset.subset(split.learning_indices);
  split.evaluation = dataset.subset(split.evaluation_indices);
  return split;
}

}  // namespace gaitlab
