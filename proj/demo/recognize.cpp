// Learn MMC on a third of each identity's synthetic walks and identify the
// rest by nearest template.

#include <iostream>
#include <random>

#include "gaitlab/gaitlab.hpp"

using namespace gaitlab;

int main() {
  auto data = synthesize({.classes = 10, .samples_per_class = 12, .joints = 15, .frames = 60, .seed = 11}).dataset;
  std::mt19937_64 rng(5);
  auto split = split_homogeneous(data, 10, 1.0 / 3.0, rng);

  const auto t = learn_mmc(split.learning);
  const MahalanobisMetric metric(t.scatter_inverse);
  std::cout << "learned " << t.feature_dim() << " directions from " << t.input_dim() << " inputs\n";

  // Gallery: the learning samples; probes: the evaluation samples.
  const auto gallery = project_all(t, split.learning);
  std::size_t correct = 0;
  for (const auto& probe : project_all(t, split.evaluation)) {
    std::vector<double> d;
    std::vector<std::string> labels;
    for (const auto& g : gallery) {
      d.push_back(metric(probe.features, g.features));
      labels.push_back(g.label);
    }
    correct += rank_classes(d, labels).front().label == probe.label;
  }
  std::cout << correct << " of " << split.evaluation.size() << " probes identified\n";
}
