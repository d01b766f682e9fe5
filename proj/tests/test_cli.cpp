#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "support.hpp"

using namespace gaitlab;

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the CLI with stdout captured to a file.
Run cli(const fixtures::TempDir& dir, const std::string& args) {
  const auto log = dir.path / "stdout.txt";
  const std::string cmd = std::string("\"") + GAITLAB_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2> \"" +
                          (dir.path / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, {}};
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string path(const fixtures::TempDir& d, const std::string& name) { return "\"" + (d.path / name).string() + "\""; }

}  // namespace

TEST(Cli, ExitCodes) {
  fixtures::TempDir dir;
  EXPECT_EQ(cli(dir, "--help").code, 0);
  EXPECT_EQ(cli(dir, "").code, 1);
  EXPECT_EQ(cli(dir, "frobnicate").code, 1);
  EXPECT_EQ(cli(dir, "learn --dataset " + path(dir, "missing.gld") + " --out x").code, 1);
  EXPECT_EQ(cli(dir, "synth --classes 1 --out " + path(dir, "d.gld")).code, 1);
  // A file that exists but is not an archive is a runtime failure.
  fixtures::write_file(dir.path / "junk.gld", "not an archive");
  EXPECT_EQ(cli(dir, "learn --dataset " + path(dir, "junk.gld") + " --out " + path(dir, "t.glt")).code, 2);
}

TEST(Cli, SynthIsDeterministicAndSeedSensitive) {
  fixtures::TempDir dir;
  const std::string common = "synth --classes 4 --samples 5 --joints 3 --frames 12 ";
  ASSERT_EQ(cli(dir, common + "--seed 3 --out " + path(dir, "a.gld")).code, 0);
  ASSERT_EQ(cli(dir, common + "--seed 3 --out " + path(dir, "b.gld")).code, 0);
  ASSERT_EQ(cli(dir, common + "--seed 4 --out " + path(dir, "c.gld")).code, 0);
  EXPECT_EQ(slurp(dir.path / "a.gld"), slurp(dir.path / "b.gld"));
  EXPECT_NE(slurp(dir.path / "a.gld"), slurp(dir.path / "c.gld"));
  auto a = load_dataset(dir.path / "a.gld").dataset, c = load_dataset(dir.path / "c.gld").dataset;
  EXPECT_EQ(a.size(), 20u);
  EXPECT_EQ(a.frames(), c.frames());
  EXPECT_EQ(a.channels(), c.channels());
}

TEST(Cli, LearnReportsRankBoundAndRejectsOneClass) {
  fixtures::TempDir dir;
  ASSERT_EQ(cli(dir, "synth --classes 5 --samples 6 --joints 3 --frames 10 --seed 1 --out " + path(dir, "d.gld")).code, 0);
  auto r = cli(dir, "learn --dataset " + path(dir, "d.gld") + " --out " + path(dir, "t1.glt"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto t = load_transform(dir.path / "t1.glt");
  EXPECT_LE(t.feature_dim(), 4u);
  EXPECT_NE(r.out.find("D_hat=" + std::to_string(t.feature_dim())), std::string::npos) << r.out;
  ASSERT_EQ(cli(dir, "learn --dataset " + path(dir, "d.gld") + " --out " + path(dir, "t2.glt")).code, 0);
  EXPECT_EQ(slurp(dir.path / "t1.glt"), slurp(dir.path / "t2.glt"));

  auto one = synthesize({.classes = 2, .samples_per_class = 4, .joints = 2, .frames = 8}).dataset;
  std::vector<std::size_t> first{0, 1, 2, 3};
  save_dataset(one.subset(first), dir.path / "one.gld");
  EXPECT_NE(cli(dir, "learn --dataset " + path(dir, "one.gld") + " --out " + path(dir, "t3.glt")).code, 0);
}

TEST(Cli, EvaluateWritesGoldenCsvAndRandomHasNoDimension) {
  fixtures::TempDir dir;
  ASSERT_EQ(cli(dir, "synth --classes 6 --samples 12 --joints 3 --frames 12 --seed 2 --out " + path(dir, "d.gld")).code, 0);
  auto r = cli(dir, "evaluate --dataset " + path(dir, "d.gld") +
                        " --method mmc,random --cl 3 --repetitions 1 --seed 5 --out " + path(dir, "rep"));
  ASSERT_EQ(r.code, 0) << slurp(dir.path / "stderr.txt");
  const std::string csv = slurp(dir.path / "rep" / "report.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "method,setup,cl,ce,cv,repetitions,seed,dbi,di,sc,fdr,ccr,eer,auc,map,dct_ms,td");
  auto rows = parse_csv(csv);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].method, "random");
  EXPECT_EQ(rows[1].td, 0.0);
  EXPECT_EQ(rows[0].setup.seed, 5u);
  auto j = nlohmann::json::parse(slurp(dir.path / "rep" / "report.json"));
  EXPECT_EQ(j.size(), 2u);

  EXPECT_EQ(cli(dir, "report " + path(dir, "rep/report.csv")).code, 0);
  EXPECT_EQ(cli(dir, "evaluate --dataset " + path(dir, "d.gld") + " --method nope --cl 3 --out " + path(dir, "x")).code, 1);
  EXPECT_EQ(cli(dir, "evaluate --dataset " + path(dir, "d.gld") + " --cl 9 --seed 1 --out " + path(dir, "x")).code, 1);
  EXPECT_EQ(cli(dir, "evaluate --dataset " + path(dir, "d.gld") + " --cv sideways --cl 2 --out " + path(dir, "x")).code, 1);
}

TEST(Cli, PresetEmitsOneRowPerSize) {
  fixtures::TempDir dir;
  ASSERT_EQ(cli(dir, "synth --classes 4 --samples 10 --joints 2 --frames 10 --seed 2 --out " + path(dir, "d.gld")).code, 0);
  auto r = cli(dir, "evaluate --dataset " + path(dir, "d.gld") +
                        " --method raw --preset A --repetitions 1 --folds 5 --seed 1 --out " + path(dir, "rep"));
  ASSERT_EQ(r.code, 0) << slurp(dir.path / "stderr.txt");
  auto rows = parse_csv(slurp(dir.path / "rep" / "report.csv"));
  ASSERT_EQ(rows.size(), 3u);  // C_L = C_E = 2, 3, 4
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].setup.cl, k + 2);
    EXPECT_EQ(rows[k].setup.ce, k + 2);
  }
}

TEST(Cli, EvaluateReproducible) {
  fixtures::TempDir dir;
  ASSERT_EQ(cli(dir, "synth --classes 5 --samples 10 --joints 2 --frames 10 --seed 9 --out " + path(dir, "d.gld")).code, 0);
  for (const char* out : {"r1", "r2"})
    ASSERT_EQ(cli(dir, "evaluate --dataset " + path(dir, "d.gld") + " --method mmc --cl 4 --repetitions 2 --seed 3 --out " +
                           path(dir, out))
                  .code,
              0);
  auto a = parse_csv(slurp(dir.path / "r1" / "report.csv")), b = parse_csv(slurp(dir.path / "r2" / "report.csv"));
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].ccr, b[0].ccr);
  EXPECT_EQ(a[0].eer, b[0].eer);
  EXPECT_EQ(a[0].separability.sc, b[0].separability.sc);
}

TEST(Cli, ClassifyMatchesInProcessRanking) {
  fixtures::TempDir dir;
  ASSERT_EQ(cli(dir, "synth --classes 4 --samples 6 --joints 3 --frames 10 --seed 7 --out " + path(dir, "d.gld")).code, 0);
  ASSERT_EQ(cli(dir, "learn --dataset " + path(dir, "d.gld") + " --out " + path(dir, "t.glt")).code, 0);
  auto r = cli(dir, "classify --transform " + path(dir, "t.glt") + " --gallery " + path(dir, "d.gld") + " --probe " +
                        path(dir, "d.gld") + " --index 7");
  ASSERT_EQ(r.code, 0) << slurp(dir.path / "stderr.txt");

  // Oracle: the same ranking recomputed here.
  const auto t = load_transform(dir.path / "t.glt");
  const auto d = load_dataset(dir.path / "d.gld").dataset;
  const MahalanobisMetric metric(t.scatter_inverse);
  const auto probe = project(t, d[7]);
  std::vector<double> dist;
  std::vector<std::string> labels;
  for (const auto& g : project_all(t, d)) {
    dist.push_back(metric(probe.features, g.features));
    labels.push_back(g.label);
  }
  const auto ranking = rank_classes(dist, labels);
  std::istringstream lines(r.out);
  for (const auto& expected : ranking) {
    std::size_t rank;
    std::string label;
    double distance;
    ASSERT_TRUE(lines >> rank >> label >> distance);
    EXPECT_EQ(label, expected.label);
    EXPECT_NEAR(distance, expected.distance, 1e-9 * (1 + expected.distance));
  }
  EXPECT_EQ(ranking.front().label, d[7].subject);
  EXPECT_EQ(ranking.front().distance, 0.0);
  EXPECT_NE(r.out.find("prediction: " + d[7].subject), std::string::npos);

  r = cli(dir, "classify --transform " + path(dir, "t.glt") + " --gallery " + path(dir, "d.gld") + " --probe " +
                   path(dir, "d.gld") + " --index 7 --threshold -1");
  EXPECT_NE(r.out.find("prediction: unknown"), std::string::npos);

  // Probe from another shape is rejected.
  ASSERT_EQ(cli(dir, "synth --classes 2 --samples 2 --joints 2 --frames 10 --seed 1 --out " + path(dir, "p.gld")).code, 0);
  EXPECT_EQ(cli(dir, "classify --transform " + path(dir, "t.glt") + " --gallery " + path(dir, "d.gld") + " --probe " +
                         path(dir, "p.gld"))
                .code,
            1);
}

TEST(Cli, IngestTinyCorpus) {
  fixtures::TempDir dir;
  const Skeleton sk = parse_asf(fixtures::cmu_asf());
  fixtures::write_file(dir.path / "corpus" / "01" / "01.asf", fixtures::cmu_asf());
  fixtures::write_file(dir.path / "corpus" / "01" / "01_01.amc", fixtures::walking_amc(sk, 12 * 40, 40.0));
  fixtures::write_file(dir.path / "corpus" / "02" / "02.asf", fixtures::cmu_asf());
  fixtures::write_file(dir.path / "corpus" / "02" / "02_01.amc", fixtures::walking_amc(sk, 12 * 40, 40.0));
  fixtures::write_file(dir.path / "ex.amc", fixtures::walking_amc(sk, 40, 40.0));
  const std::string args = "ingest --corpus " + path(dir, "corpus") + " --exemplar-asf " + path(dir, "corpus/01/01.asf") +
                           " --exemplar-amc " + path(dir, "ex.amc") + " --threshold 1e-6 --stride 5 --out ";
  auto r = cli(dir, args + path(dir, "a.gld"));
  ASSERT_EQ(r.code, 0) << r.out << slurp(dir.path / "stderr.txt");
  ASSERT_EQ(cli(dir, args + path(dir, "b.gld")).code, 0);
  EXPECT_EQ(slurp(dir.path / "a.gld"), slurp(dir.path / "b.gld"));
  auto stored = load_dataset(dir.path / "a.gld");
  EXPECT_EQ(stored.dataset.class_count(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir.path / "a.gld.manifest.json"));

  // A corrupt file among good ones: dataset still written, exit non-zero.
  fixtures::write_file(dir.path / "corpus" / "02" / "02_02.amc", ":FULLY-SPECIFIED\n:DEGREES\n1\nroot 1 2\n");
  r = cli(dir, args + path(dir, "c.gld"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("FAILED"), std::string::npos);
}
