// gaitlab command-line tool: ingest, synth, learn, evaluate, classify, report.
//
// Exit codes: 0 success, 1 invalid input or configuration, 2 runtime failure.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gaitlab/gaitlab.hpp"

namespace fs = std::filesystem;
using namespace gaitlab;

namespace {

constexpr int kValidation = 1;
constexpr int kRuntime = 2;

// Raised for bad command-line combinations that CLI11 cannot express.
struct UsageError : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

std::uint64_t materialize_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  std::cerr << "seed: " << s << " (from entropy)\n";
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoError::Kind::open, "cannot write " + path.string());
  out << text;
  if (!out) throw IoError(IoError::Kind::open, "write to " + path.string() + " failed");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void check_threads_env() {
  if (const char* env = std::getenv("GAITLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw UsageError(std::string("GAITLAB_THREADS must be a positive integer, got '") + env + "'");
  }
}

// ---- ingest

struct IngestArgs {
  std::string corpus, exemplar_asf, exemplar_amc, out, modality = "BR";
  std::vector<std::size_t> exemplar_range;
  double threshold = 0.0;
  std::optional<std::size_t> frames;
  std::size_t min_samples = 10, stride = 5;
  double window_lo = 0.7, window_hi = 1.3, frame_rate = 120.0;
  bool average_geometry = false;
};

int cmd_ingest(const IngestArgs& a) {
  IngestConfig cfg;
  cfg.modality = modality_from_string(a.modality);
  cfg.search.threshold = a.threshold;
  cfg.search.window_lo = a.window_lo;
  cfg.search.window_hi = a.window_hi;
  cfg.search.stride = a.stride;
  cfg.frames = a.frames;
  cfg.min_samples = a.min_samples;
  cfg.frame_rate = a.frame_rate;
  cfg.prototype.average_geometry = a.average_geometry;

  std::optional<std::pair<std::size_t, std::size_t>> range;
  if (!a.exemplar_range.empty()) {
    if (a.exemplar_range.size() != 2) throw UsageError("--exemplar-range takes two frame indices");
    range = std::pair{a.exemplar_range[0], a.exemplar_range[1]};
  }
  const Skeleton ex_skeleton = parse_asf(read_text(a.exemplar_asf));
  cfg.exemplar = load_exemplar(ex_skeleton, read_text(a.exemplar_amc), range);

  std::vector<RawMotionFilePair> pairs;
  for (const auto& [asf, amc, subject, sequence] : discover_corpus(a.corpus))
    pairs.push_back({read_text(asf), read_text(amc), subject, sequence});
  if (pairs.empty()) throw InvalidArgument("no .amc files under " + a.corpus);

  auto result = build_dataset(std::move(pairs), cfg);
  for (const auto& f : result.files) {
    std::cout << f.subject << "/" << f.sequence << ": ";
    if (f.error.empty()) std::cout << f.cycles << " cycle(s)\n";
    else std::cout << "FAILED " << f.error << "\n";
  }
  for (const auto& e : result.manifest.excluded)
    std::cout << "excluded subject " << e.subject << " (" << e.samples << " < " << cfg.min_samples << " samples)\n";
  std::cout << "kept " << result.manifest.subjects.size() << " subject(s), " << result.manifest.total_samples()
            << " sample(s), T=" << result.manifest.frames << ", " << result.manifest.channels << " channel(s)\n";

  save_dataset(result.dataset, result.manifest, a.out);
  write_text(a.out + ".manifest.json", to_json(result.manifest).dump(2) + "\n");
  if (result.failures() > 0) {
    std::cerr << "error: " << result.failures() << " file(s) failed to ingest\n";
    return kRuntime;
  }
  return 0;
}

// ---- synth

struct SynthArgs {
  SynthSpec spec;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_synth(SynthArgs a) {
  a.spec.seed = materialize_seed(a.seed);
  auto s = synthesize(a.spec);
  save_dataset(s.dataset, a.out);
  std::cout << "wrote " << s.dataset.size() << " samples of " << a.spec.classes << " identities, T=" << a.spec.frames
            << ", " << s.dataset.channels() << " channels; signal spread " << s.signal_spread << ", noise sigma "
            << s.noise_sigma << "\n";
  return 0;
}

// ---- learn

struct LearnArgs {
  std::string dataset, method = "mmc", out;
  std::optional<std::size_t> pca_dims;
};

int cmd_learn(const LearnArgs& a) {
  const auto method = learn_method_from_string(a.method);
  auto data = load_dataset(a.dataset).dataset;
  FeatureTransform t;
  if (method == LearnMethod::PCALDA) {
    PcaLdaOptions opts;
    opts.pca_dims = a.pca_dims;
    t = learn_pcalda(data, opts);
  } else {
    if (a.pca_dims) throw UsageError("--pca-dims applies to pcalda only");
    t = learn_mmc(data);
  }
  save_transform(t, a.out);
  std::cout << to_string(t.method) << ": D=" << t.input_dim() << " D_hat=" << t.feature_dim() << " classes=" << t.classes
            << " samples=" << t.samples << (t.regularized ? " (scatter regularized)" : "") << "\n";
  std::cout << "eigenvalues:";
  std::cout << std::setprecision(10);
  for (double e : t.eigenvalues) std::cout << " " << e;
  std::cout << "\n";
  return 0;
}

// ---- evaluate

struct EvaluateArgs {
  std::string dataset, methods = "mmc", setup = "homogeneous", cv = "nested", out, joint_map;
  std::optional<std::string> preset;
  std::optional<std::size_t> cl, ce;
  double ratio = 1.0 / 3.0;
  std::size_t repetitions = 3, folds = 10;
  std::optional<std::uint64_t> seed;
};

int cmd_evaluate(const EvaluateArgs& a) {
  SetupConfig base;
  base.kind = setup_kind_from_string(a.setup);
  base.cv = cv_mode_from_string(a.cv);
  base.ratio = a.ratio;
  base.repetitions = a.repetitions;
  base.folds = a.folds;
  if (!a.joint_map.empty()) base.joints = JointMap::load(a.joint_map);
  const auto methods = split_list(a.methods);
  if (methods.empty()) throw UsageError("--method needs at least one name");
  for (const auto& m : methods) {
    SetupConfig probe = base;
    probe.method = m;
    probe.cl = probe.ce = 2;
    probe.validate(static_cast<std::size_t>(-1) / 2);  // names only; sizes are checked per setup
  }
  base.seed = materialize_seed(a.seed);

  auto data = load_dataset(a.dataset).dataset;
  std::vector<SetupConfig> setups;
  if (a.preset) {
    if (a.cl || a.ce) throw UsageError("--preset and --cl/--ce are exclusive");
    setups = preset(*a.preset, data.class_count(), base);
  } else {
    if (!a.cl) throw UsageError("give --cl (and --ce for heterogeneous) or --preset");
    SetupConfig s = base;
    s.cl = *a.cl;
    s.ce = a.ce.value_or(*a.cl);
    setups.push_back(s);
  }
  for (auto& s : setups) s.validate(data.class_count());

  std::vector<EvaluationReport> reports;
  for (const auto& m : methods)
    for (auto s : setups) {
      s.method = m;
      reports.push_back(run_experiment(data, s));
      const auto& r = reports.back();
      std::cout << m << " " << to_string(s.kind) << " C_L=" << s.cl << " C_E=" << s.ce << ": CCR=" << r.ccr
                << " EER=" << r.eer << " AUC=" << r.auc << " TD=" << r.td << "\n";
    }
  const fs::path dir(a.out);
  write_text(dir / "report.csv", to_csv(reports));
  write_text(dir / "report.json", to_json(reports).dump(2) + "\n");
  return 0;
}

// ---- classify

struct ClassifyArgs {
  std::string transform, gallery, probe;
  std::size_t index = 0;
  std::optional<double> threshold;
};

void check_compatible(const FeatureTransform& t, const LabeledDataset& d, const std::string& what) {
  if (d.empty()) throw InvalidArgument(what + " dataset is empty");
  if (d.modality() != t.modality || d.frames() != t.frames || d.channels() != t.channels)
    throw ShapeError(what + " is " + to_string(d.modality()) + " " + std::to_string(d.frames()) + "x" +
                     std::to_string(d.channels()) + ", transform expects " + to_string(t.modality) + " " +
                     std::to_string(t.frames) + "x" + std::to_string(t.channels));
}

int cmd_classify(const ClassifyArgs& a) {
  const auto t = load_transform(a.transform);
  const auto gallery = load_dataset(a.gallery).dataset;
  const auto probes = load_dataset(a.probe).dataset;
  check_compatible(t, gallery, "gallery");
  check_compatible(t, probes, "probe");
  if (a.index >= probes.size())
    throw InvalidArgument("probe index " + std::to_string(a.index) + " out of range (" +
                          std::to_string(probes.size()) + " samples)");
  const MahalanobisMetric metric(t.scatter_inverse);
  const auto probe = project(t, probes[a.index]);
  std::vector<double> distances;
  std::vector<std::string> labels;
  for (const auto& g : project_all(t, gallery)) {
    distances.push_back(metric(probe.features, g.features));
    labels.push_back(g.label);
  }
  const auto ranking = rank_classes(distances, labels);
  std::cout << std::setprecision(12);
  for (std::size_t r = 0; r < ranking.size(); ++r)
    std::cout << r + 1 << " " << ranking[r].label << " " << ranking[r].distance << "\n";
  const bool rejected = a.threshold && ranking.front().distance > *a.threshold;
  std::cout << "prediction: " << (rejected ? "unknown" : ranking.front().label) << "\n";
  return 0;
}

// ---- report

struct ReportArgs {
  std::string input;
  std::string format = "table";
};

int cmd_report(const ReportArgs& a) {
  const auto reports = parse_csv(read_text(a.input));
  if (a.format == "json") {
    std::cout << to_json(reports).dump(2) << "\n";
    return 0;
  }
  std::cout << std::left << std::setw(8) << "method" << std::setw(15) << "setup" << std::setw(5) << "C_L"
            << std::setw(5) << "C_E" << std::right;
  for (const char* h : {"DBI", "DI", "SC", "FDR", "CCR", "EER", "AUC", "MAP", "DCT", "TD"}) std::cout << std::setw(10) << h;
  std::cout << "\n";
  auto cell = [](double v) {
    std::ostringstream s;
    if (std::isnan(v)) s << "-";
    else s << std::fixed << std::setprecision(3) << v;
    return s.str();
  };
  for (const auto& r : reports) {
    std::cout << std::left << std::setw(8) << r.method << std::setw(15) << to_string(r.setup.kind) << std::setw(5)
              << r.setup.cl << std::setw(5) << r.setup.ce << std::right;
    for (double v : {r.separability.dbi, r.separability.di, r.separability.sc, r.separability.fdr, r.ccr, r.eer, r.auc,
                     r.map, r.dct_ms, r.td})
      std::cout << std::setw(10) << cell(v);
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gait recognition from motion capture: learning, extraction and evaluation"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ing = app.add_subcommand("ingest", "Extract gait cycles from an ASF/AMC corpus into a dataset file");
  ing->add_option("--corpus", ingest.corpus, "Directory searched recursively for .amc files")->required()->check(CLI::ExistingDirectory);
  ing->add_option("--exemplar-asf", ingest.exemplar_asf, "Skeleton of the exemplar motion")->required()->check(CLI::ExistingFile);
  ing->add_option("--exemplar-amc", ingest.exemplar_amc, "Exemplar gait cycle")->required()->check(CLI::ExistingFile);
  ing->add_option("--exemplar-range", ingest.exemplar_range, "Half-open frame range of the exemplar motion")->expected(2);
  ing->add_option("--threshold", ingest.threshold, "Largest DTW distance to the exemplar")->required()->check(CLI::PositiveNumber);
  ing->add_option("--modality", ingest.modality, "BR or JC")->check(CLI::IsMember({"BR", "JC"}));
  ing->add_option("--frames", ingest.frames, "Frames per normalized cycle (default: mean cycle length)");
  ing->add_option("--min-samples", ingest.min_samples, "Drop subjects with fewer cycles");
  ing->add_option("--stride", ingest.stride, "Candidate start/length step in frames")->check(CLI::PositiveNumber);
  ing->add_option("--window-lo", ingest.window_lo, "Shortest candidate as a fraction of the exemplar");
  ing->add_option("--window-hi", ingest.window_hi, "Longest candidate as a fraction of the exemplar");
  ing->add_option("--frame-rate", ingest.frame_rate, "Capture rate in Hz")->check(CLI::PositiveNumber);
  ing->add_flag("--average-geometry", ingest.average_geometry, "Average bone directions across skeletons");
  ing->add_option("--out", ingest.out, "Dataset file")->required();

  SynthArgs synth;
  auto* syn = app.add_subcommand("synth", "Write a synthetic joint-coordinate dataset");
  syn->add_option("--classes", synth.spec.classes, "Identities")->capture_default_str();
  syn->add_option("--samples", synth.spec.samples_per_class, "Samples per identity")->capture_default_str();
  syn->add_option("--joints", synth.spec.joints, "Joints (prefix of the CMU skeleton)")->capture_default_str();
  syn->add_option("--frames", synth.spec.frames, "Frames per sample")->capture_default_str();
  syn->add_option("--harmonics", synth.spec.harmonics, "Sinusoids in the identity signal")->capture_default_str();
  syn->add_option("--noise", synth.spec.noise, "Noise sigma relative to the identity spread")->capture_default_str();
  syn->add_option("--sequences", synth.spec.sequences_per_class, "Sequences per identity")->capture_default_str();
  syn->add_option("--seed", synth.seed, "RNG seed");
  syn->add_option("--out", synth.out, "Dataset file")->required();

  LearnArgs learn_args;
  auto* lrn = app.add_subcommand("learn", "Learn an MMC or PCA+LDA transform");
  lrn->add_option("--dataset", learn_args.dataset)->required()->check(CLI::ExistingFile);
  lrn->add_option("--method", learn_args.method, "mmc or pcalda")->check(CLI::IsMember({"mmc", "pcalda"}));
  lrn->add_option("--pca-dims", learn_args.pca_dims, "PCA dimensions before LDA");
  lrn->add_option("--out", learn_args.out, "Transform file")->required();

  EvaluateArgs eval;
  auto* evl = app.add_subcommand("evaluate", "Run the evaluation protocol and write report.csv and report.json");
  evl->add_option("--dataset", eval.dataset)->required()->check(CLI::ExistingFile);
  evl->add_option("--method", eval.methods, "Comma-separated methods: mmc, pcalda, random, raw, alis, balla, preisj");
  evl->add_option("--preset", eval.preset, "A, B, C or D");
  evl->add_option("--setup", eval.setup, "homogeneous or heterogeneous")->check(CLI::IsMember({"homogeneous", "heterogeneous"}));
  evl->add_option("--cl", eval.cl, "Learning identities");
  evl->add_option("--ce", eval.ce, "Evaluation identities");
  evl->add_option("--ratio", eval.ratio, "Learning share of each identity's samples (homogeneous)");
  evl->add_option("--cv", eval.cv, "nested or grouped")->check(CLI::IsMember({"nested", "grouped"}));
  evl->add_option("--folds", eval.folds, "Cross-validation folds");
  evl->add_option("--repetitions", eval.repetitions, "Repetitions with fresh identities");
  evl->add_option("--seed", eval.seed, "RNG seed");
  evl->add_option("--joint-map", eval.joint_map, "JSON role-to-joint map")->check(CLI::ExistingFile);
  evl->add_option("--out", eval.out, "Output directory")->required();

  ClassifyArgs cls;
  auto* cla = app.add_subcommand("classify", "Rank gallery identities for one probe sample");
  cla->add_option("--transform", cls.transform)->required()->check(CLI::ExistingFile);
  cla->add_option("--gallery", cls.gallery, "Gallery dataset file")->required()->check(CLI::ExistingFile);
  cla->add_option("--probe", cls.probe, "Dataset file holding the probe")->required()->check(CLI::ExistingFile);
  cla->add_option("--index", cls.index, "Probe sample index");
  cla->add_option("--threshold", cls.threshold, "Reject when the best distance exceeds this");

  ReportArgs rep;
  auto* rpt = app.add_subcommand("report", "Print a report CSV as a table or JSON");
  rpt->add_option("input", rep.input, "report.csv")->required()->check(CLI::ExistingFile);
  rpt->add_option("--format", rep.format)->check(CLI::IsMember({"table", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidation;
  }

  try {
    check_threads_env();
    if (*ing) return cmd_ingest(ingest);
    if (*syn) return cmd_synth(synth);
    if (*lrn) return cmd_learn(learn_args);
    if (*evl) return cmd_evaluate(eval);
    if (*cla) return cmd_classify(cls);
    if (*rpt) return cmd_report(rep);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const ConfigurationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const NotImplemented& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kRuntime;
}
