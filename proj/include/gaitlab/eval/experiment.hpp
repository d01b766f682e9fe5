#pragma once

// One evaluation run: split, learn or extract, match, and score, repeated
// with fresh identities and averaged.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gaitlab/error.hpp"
#include "gaitlab/eval/classification.hpp"
#include "gaitlab/eval/distance_matrix.hpp"
#include "gaitlab/eval/separability.hpp"
#include "gaitlab/eval/splits.hpp"
#include "gaitlab/eval/verification.hpp"
#include "gaitlab/geometric.hpp"
#include "gaitlab/learning.hpp"
#include "gaitlab/transform.hpp"

namespace gaitlab {

enum class SetupKind { homogeneous, heterogeneous };

inline std::string to_string(SetupKind k) { return k == SetupKind::homogeneous ? "homogeneous" : "heterogeneous"; }
inline SetupKind setup_kind_from_string(const std::string& s) {
  if (s == "homogeneous") return SetupKind::homogeneous;
  if (s == "heterogeneous") return SetupKind::heterogeneous;
  throw InvalidArgument("unknown setup '" + s + "' (expected homogeneous or heterogeneous)");
}

inline const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"mmc", "pcalda", "random", "raw", "alis", "balla", "preisj"};
  return names;
}

struct SetupConfig {
  SetupKind kind = SetupKind::homogeneous;
  std::size_t cl = 2;
  std::size_t ce = 2;
  double ratio = 1.0 / 3.0;  // homogeneous learning share
  std::size_t repetitions = 3;
  std::uint64_t seed = 0;
  CvMode cv = CvMode::nested;
  std::size_t folds = 10;
  std::string method = "mmc";
  JointMap joints = JointMap::cmu();

  void validate(std::size_t dataset_classes) const {
    if (repetitions < 1) throw InvalidArgument("repetitions must be at least 1");
    if (cl < 2 || ce < 2) throw InvalidArgument("setups need at least 2 learning and 2 evaluation classes");
    if (std::find(method_names().begin(), method_names().end(), method) == method_names().end()) {
      // Surfaces "not implemented" for the listed-but-missing extractors.
      ExtractorRegistry::builtin().find(method);
    }
    if (kind == SetupKind::homogeneous) {
      if (cl != ce) throw InvalidArgument("homogeneous setup needs C_L = C_E");
      if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("split ratio must lie in (0, 1)");
      if (cl > dataset_classes)
        throw InvalidArgument("setup needs " + std::to_string(cl) + " classes, dataset has " +
                              std::to_string(dataset_classes));
    } else if (cl + ce > dataset_classes) {
      throw InvalidArgument("setup needs " + std::to_string(cl + ce) + " classes, dataset has " +
                            std::to_string(dataset_classes));
    }
  }
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RepetitionResult {
  std::uint64_t seed = 0;
  std::size_t learning_samples = 0;
  std::size_t evaluation_samples = 0;
  Separability separability{kNaN, kNaN, kNaN, kNaN};
  double ccr = kNaN, eer = kNaN, auc = kNaN, map = kNaN;
  double dct_ms = kNaN;
  double td = 0.0;
  std::vector<double> cmc;
  FarFrr far_frr;
  Roc roc;
  PrecisionRecall rcl_pcn;
};

struct EvaluationReport {
  std::string method;
  std::string distance;
  SetupConfig setup;
  // Averages over the repetitions.
  Separability separability{kNaN, kNaN, kNaN, kNaN};
  double ccr = kNaN, eer = kNaN, auc = kNaN, map = kNaN;
  double dct_ms = kNaN;
  double td = 0.0;
  std::vector<double> cmc;
  std::vector<RepetitionResult> runs;
};

// Seed of repetition r, mixed from the run seed.
inline std::uint64_t repetition_seed(std::uint64_t seed, std::size_t r) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(r)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace detail {

inline std::vector<std::string> sequence_ids(const LabeledDataset& d) {
  std::vector<std::string> out;
  out.reserve(d.size());
  for (const auto& s : d.samples()) out.push_back(s.subject + "/" + s.sequence);
  return out;
}

inline FrameMatrix as_row(const Eigen::VectorXd& v) {
  return Eigen::Map<const FrameMatrix>(v.data(), 1, v.size());
}

// Random baseline: every probe gets a random ordering of the gallery
// classes. Rank-1 of that ordering is the prediction.
inline void run_random(const LabeledDataset& evaluation, const std::vector<std::size_t>& folds, std::uint64_t seed,
                       RepetitionResult& out) {
  const auto labels = evaluation.labels();
  const std::size_t n = labels.size(), classes = distinct_count(labels);
  RandomClassifier rc(seed);
  std::vector<std::size_t> ranks(n);
  std::size_t correct = 0;
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<std::string> gallery;
    for (std::size_t g = 0; g < n; ++g)
      if (folds[g] != folds[p]) gallery.push_back(labels[g]);
    auto order = rc.rank(gallery);
    if (order.front() == labels[p]) ++correct;
    std::vector<RankedClass> ranking;
    for (const auto& l : order) ranking.push_back({l, 0.0, 0});
    ranks[p] = true_rank(ranking, labels[p], classes);
  }
  out.ccr = static_cast<double>(correct) / static_cast<double>(n);
  out.cmc = cmc_from_ranks(ranks, classes);
  out.td = 0.0;
}

}  // namespace detail

struct Templates {
  std::vector<FrameMatrix> features;
  FeatureDistance distance;
  std::string distance_name;
  double dimension = 0.0;
};

// Evaluation templates of a non-random method. Learned methods fit on
// `learning`; extractors ignore it.
inline Templates make_templates(const std::string& method, const LabeledDataset& learning,
                                const LabeledDataset& evaluation, const JointMap& joints) {
  Templates t;
  if (method == "mmc" || method == "pcalda") {
    auto transform = learn(learn_method_from_string(method), learning);
    MahalanobisMetric metric(transform.scatter_inverse);
    for (const auto& tpl : project_all(transform, evaluation)) t.features.push_back(detail::as_row(tpl.features));
    t.distance = [metric](const FrameMatrix& a, const FrameMatrix& b) {
      return metric(Eigen::Map<const Eigen::VectorXd>(a.data(), a.size()),
                    Eigen::Map<const Eigen::VectorXd>(b.data(), b.size()));
    };
    t.distance_name = "Mahalanobis";
    t.dimension = static_cast<double>(transform.feature_dim());
    return t;
  }
  const auto& spec = ExtractorRegistry::builtin().find(method);
  if (spec.needs_joints && evaluation.modality() != Modality::JC)
    throw InvalidArgument("extractor '" + method + "' needs a joint-coordinate dataset");
  std::optional<JointLookup> lookup;
  if (spec.needs_joints) lookup.emplace(joints, evaluation.joint_names());
  else lookup.emplace(JointMap{}, std::vector<std::string>{});
  for (const auto& s : evaluation.samples()) t.features.push_back(spec.extract(s, *lookup));
  t.distance = make_distance(spec.distance);
  t.distance_name = to_string(spec.distance);
  t.dimension = static_cast<double>(t.features.front().size());
  return t;
}

inline RepetitionResult run_repetition(const LabeledDataset& dataset, const SetupConfig& setup, std::size_t r,
                                       std::string* distance_name = nullptr) {
  RepetitionResult out;
  out.seed = repetition_seed(setup.seed, r);
  std::mt19937_64 rng(out.seed);
  DataSplit split = setup.kind == SetupKind::homogeneous
                        ? split_homogeneous(dataset, setup.cl, setup.ratio, rng)
                        : split_heterogeneous(dataset, setup.cl, setup.ce, rng);
  out.learning_samples = split.learning.size();
  out.evaluation_samples = split.evaluation.size();
  const auto labels = split.evaluation.labels();
  const auto folds = assign_folds(labels.size(), setup.folds, setup.cv, detail::sequence_ids(split.evaluation), rng);

  if (setup.method == "random") {
    detail::run_random(split.evaluation, folds, rng(), out);
    return out;
  }
  Templates t = make_templates(setup.method, split.learning, split.evaluation, setup.joints);
  if (distance_name) *distance_name = t.distance_name;
  out.td = t.dimension;
  const auto dm = distance_matrix(
      t.features.size(), [&](std::size_t i, std::size_t j) { return t.distance(t.features[i], t.features[j]); },
      labels);
  out.dct_ms = dm.mean_ms;
  out.separability = separability(t.features, labels, t.distance, dm);
  auto cv = cross_validate(dm, labels, folds);
  out.ccr = cv.ccr;
  out.cmc = std::move(cv.cmc);
  const auto pairs = pair_distances(dm, labels);
  out.far_frr = far_frr_eer(pairs);
  out.eer = out.far_frr.eer;
  out.roc = roc_auc(pairs);
  out.auc = out.roc.auc;
  out.rcl_pcn = rcl_pcn_map(pairs);
  out.map = out.rcl_pcn.map;
  return out;
}

inline EvaluationReport run_experiment(const LabeledDataset& dataset, const SetupConfig& setup) {
  setup.validate(dataset.class_count());
  EvaluationReport rep;
  rep.method = setup.method;
  rep.setup = setup;
  for (std::size_t r = 0; r < setup.repetitions; ++r) {
    try {
      rep.runs.push_back(run_repetition(dataset, setup, r, &rep.distance));
    } catch (const Error& e) {
      throw Error("repetition " + std::to_string(r + 1) + " of " + setup.method + " (" + to_string(setup.kind) +
                  ", C_L=" + std::to_string(setup.cl) + ", C_E=" + std::to_string(setup.ce) + "): " + e.what());
    }
  }
  const double R = static_cast<double>(rep.runs.size());
  auto avg = [&](auto field) {
    double s = 0.0;
    for (const auto& run : rep.runs) s += field(run);
    return s / R;
  };
  rep.separability.dbi = avg([](const RepetitionResult& x) { return x.separability.dbi; });
  rep.separability.di = avg([](const RepetitionResult& x) { return x.separability.di; });
  rep.separability.sc = avg([](const RepetitionResult& x) { return x.separability.sc; });
  rep.separability.fdr = avg([](const RepetitionResult& x) { return x.separability.fdr; });
  rep.ccr = avg([](const RepetitionResult& x) { return x.ccr; });
  rep.eer = avg([](const RepetitionResult& x) { return x.eer; });
  rep.auc = avg([](const RepetitionResult& x) { return x.auc; });
  rep.map = avg([](const RepetitionResult& x) { return x.map; });
  rep.dct_ms = avg([](const RepetitionResult& x) { return x.dct_ms; });
  rep.td = avg([](const RepetitionResult& x) { return x.td; });
  rep.cmc.assign(rep.runs.front().cmc.size(), 0.0);
  for (const auto& run : rep.runs)
    for (std::size_t k = 0; k < rep.cmc.size(); ++k) rep.cmc[k] += run.cmc[k] / R;
  return rep;
}

// Named configuration sweeps. `half` is the largest learning size, half the
// dataset's identities (27 of 54 on the full CMU-derived set).
//   A  homogeneous, C_L = C_E = c
//   B  heterogeneous, C_L = C_E = c
//   C  heterogeneous, C_L = c, C_E = half
//   D  heterogeneous, C_L = c, C_E = classes - c
inline std::vector<SetupConfig> preset(const std::string& name, std::size_t classes, const SetupConfig& base) {
  if (name != "A" && name != "B" && name != "C" && name != "D")
    throw InvalidArgument("unknown preset '" + name + "' (expected A, B, C or D)");
  const std::size_t half = classes / 2;
  std::vector<SetupConfig> out;
  const std::size_t top = name == "A" ? classes : half;
  for (std::size_t c = 2; c <= std::min<std::size_t>(top, 27); ++c) {
    SetupConfig s = base;
    s.cl = c;
    if (name == "A") {
      s.kind = SetupKind::homogeneous;
      s.ce = c;
    } else if (name == "B") {
      s.kind = SetupKind::heterogeneous;
      s.ce = c;
    } else if (name == "C") {
      s.kind = SetupKind::heterogeneous;
      s.ce = half;
    } else {
      s.kind = SetupKind::heterogeneous;
      s.ce = classes - c;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace gaitlab
