// Artifact-serialization tests: SHA-1 against published test vectors, git
// blob hashing against the well-known hash of "hello\n", dataset content
// hashing sensitivity, atomic writes, shortest-round-trip float formatting,
// and exact CSV/JSON output bytes.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "gfgn/io.hpp"

namespace fs = std::filesystem;

using gfgn::Dataset;
using gfgn::Rng;
using gfgn::ScoreRecord;
using gfgn::Tensor;
using gfgn::TrainConfig;
using gfgn::Variant;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gfgn_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Dataset tiny_dataset() {
  Dataset d;
  d.graph = gfgn::load_edges({{0, 1}, {1, 2}}, 3);
  Tensor x(3, 2);
  x.at(0, 0) = 1.0;
  x.at(1, 1) = 0.5;
  x.at(2, 0) = 0.25;
  d.features = gfgn::FeatureMatrix::from_dense(x);
  d.labels = {0, 1, 0};
  d.num_classes = 2;
  d.name = "tiny";
  return d;
}

// -------------------------------- hashing -----------------------------------

TEST(Hashing, Sha1PublishedTestVectors) {
  // FIPS 180 example strings
  EXPECT_EQ(gfgn::sha1_hex("", 0), "da39a3ee5e6b4b0d3255bfef95601890afd80709");
  const std::string abc = "abc";
  EXPECT_EQ(gfgn::sha1_hex(abc.data(), abc.size()), "a9993e364706816aba3e25717850c26c9cd0d89d");
}

TEST(Hashing, GitBlobHashMatchesGit) {
  // `echo hello | git hash-object --stdin`
  EXPECT_EQ(gfgn::git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(gfgn::git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST(Hashing, DatasetContentHashTracksFileContent) {
  const fs::path dir = fresh_dir("hash");
  gfgn::write_dataset(tiny_dataset(), dir.string());
  const std::string h1 = gfgn::dataset_content_hash(dir);
  const std::string h2 = gfgn::dataset_content_hash(dir);
  EXPECT_EQ(h1, h2);
  EXPECT_EQ(h1.size(), 40u);

  // touching any file changes the hash
  gfgn::write_file_atomic(dir / "labels.tsv", "0\n1\n1\n");
  const std::string h3 = gfgn::dataset_content_hash(dir);
  EXPECT_NE(h1, h3);

  EXPECT_THROW(gfgn::dataset_content_hash(dir / "absent"), gfgn::DataError);
}

// ----------------------------- atomic writes ---------------------------------

TEST(AtomicWrite, WritesOverwritesAndLeavesNoTempFile) {
  const fs::path dir = fresh_dir("atomic");
  const fs::path file = dir / "sub" / "out.txt";
  gfgn::write_file_atomic(file, "first\n");
  EXPECT_EQ(gfgn::read_file_bytes(file), "first\n");
  gfgn::write_file_atomic(file, "second\n");
  EXPECT_EQ(gfgn::read_file_bytes(file), "second\n");
  EXPECT_FALSE(fs::exists(file.string() + ".tmp"));
}

// ------------------------------ formatting -----------------------------------

TEST(Formatting, ShortestFormRoundTrips) {
  EXPECT_EQ(gfgn::fmt_double(0.5), "0.5");
  EXPECT_EQ(gfgn::fmt_double(0.1), "0.1");
  EXPECT_EQ(gfgn::fmt_double(1.0), "1");
  EXPECT_EQ(gfgn::fmt_double(0.0), "0");
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const double v = (rng.next_double() - 0.5) * std::pow(10.0, rng.uniform(-12.0, 12.0));
    const std::string s = gfgn::fmt_double(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
}

// --------------------------------- CSVs --------------------------------------

nlohmann::ordered_json tiny_config() {
  nlohmann::ordered_json j;
  j["model"] = "gfgn-graph";
  return j;
}

TEST(Csv, GraphScores) {
  ScoreRecord rec;
  rec.variant = Variant::gfgn_graph;
  rec.values = Tensor(1, 3);
  rec.values.at(0, 0) = 0.5;
  rec.values.at(0, 1) = 0.25;
  rec.values.at(0, 2) = 1.0;
  EXPECT_EQ(gfgn::scores_csv(rec, tiny_config()),
            "# gfgn dump-scores\n# config {\"model\":\"gfgn-graph\"}\n"
            "dim,score\n0,0.5\n1,0.25\n2,1\n");
}

TEST(Csv, NeighborScores) {
  ScoreRecord rec;
  rec.variant = Variant::gfgn_neighbor;
  rec.values = Tensor(2, 2);
  rec.values.at(0, 0) = 0.5;
  rec.values.at(0, 1) = 0.125;
  rec.values.at(1, 0) = 0.75;
  rec.values.at(1, 1) = 1.0;
  const std::string csv = gfgn::scores_csv(rec, tiny_config());
  EXPECT_NE(csv.find("node,dim,score\n0,0,0.5\n0,1,0.125\n1,0,0.75\n1,1,1\n"), std::string::npos);
}

TEST(Csv, PairScoresCarrySrcDst) {
  ScoreRecord rec;
  rec.variant = Variant::gfgn_pair;
  rec.values = Tensor(2, 1);
  rec.values.at(0, 0) = 0.5;
  rec.values.at(1, 0) = 0.25;
  rec.src = {0, 0};
  rec.dst = {0, 1};
  const std::string csv = gfgn::scores_csv(rec, tiny_config());
  EXPECT_NE(csv.find("src,dst,dim,score\n0,0,0,0.5\n0,1,0,0.25\n"), std::string::npos);
}

TEST(Csv, UngatedVariantsRejected) {
  ScoreRecord rec;
  rec.variant = Variant::gcn;
  rec.values = Tensor(1, 1);
  EXPECT_THROW(gfgn::scores_csv(rec, tiny_config()), gfgn::ConfigError);
}

TEST(Csv, SpectralAndNoiseSweepLayout) {
  const std::string spectral =
      gfgn::spectral_csv({{0.0, 0.2, 2, 1.0, 1e-16}, {2.0, 0.2, 2, 0.36, 2e-16}}, tiny_config());
  EXPECT_NE(spectral.find("eigenvalue,s,K,coefficient,residual\n"), std::string::npos);
  EXPECT_NE(spectral.find("0,0.2,2,1,1e-16\n"), std::string::npos);
  EXPECT_NE(spectral.find("2,0.2,2,0.36,2e-16\n"), std::string::npos);

  const std::string noise =
      gfgn::noise_sweep_csv({{0.0, "gcn", 0.87, 0.01}, {0.2, "gfgn-graph", 0.86, 0.02}},
                            tiny_config());
  EXPECT_NE(noise.find("ratio,model,mean,std\n"), std::string::npos);
  EXPECT_NE(noise.find("0,gcn,0.87,0.01\n"), std::string::npos);
  EXPECT_NE(noise.find("0.2,gfgn-graph,0.86,0.02\n"), std::string::npos);
}

// --------------------------------- JSON --------------------------------------

TEST(Json, TrainResultsRoundTripAndDeterminism) {
  const fs::path dir = fresh_dir("json");
  const Dataset d = tiny_dataset();
  gfgn::write_dataset(d, dir.string());
  const std::string hash = gfgn::dataset_content_hash(dir);

  TrainConfig cfg;
  cfg.variant = Variant::gfgn_pair;
  cfg.epochs = 5;
  cfg.patience = 5;
  cfg.splits = 1;
  cfg.repeats = 2;
  cfg.heads = 2;
  cfg.units = 2;
  const gfgn::RunResult result = gfgn::train_full(d, cfg);

  const std::string a = gfgn::train_results_json(d, dir.string(), hash, cfg, result);
  const std::string b = gfgn::train_results_json(d, dir.string(), hash, cfg, result);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("wall"), std::string::npos);  // wall time never serialized

  const nlohmann::json parsed = nlohmann::json::parse(a);
  EXPECT_EQ(parsed["command"], "train");
  EXPECT_EQ(parsed["dataset"]["content_hash"], hash);
  EXPECT_EQ(parsed["dataset"]["nodes"], 3);
  EXPECT_EQ(parsed["config"]["model"], "gfgn-pair");
  EXPECT_EQ(parsed["config"]["hidden"], 4);
  EXPECT_EQ(parsed["optimizer"]["name"], "adam");
  ASSERT_EQ(parsed["runs"].size(), 2u);
  EXPECT_EQ(parsed["runs"][1]["repeat"], 1);
  EXPECT_DOUBLE_EQ(parsed["mean"].get<double>(), result.mean);
  EXPECT_DOUBLE_EQ(parsed["std"].get<double>(), result.stddev);
}

TEST(Json, SweepResultsCarryGridRowsAndBest) {
  const fs::path dir = fresh_dir("sweepjson");
  const Dataset d = tiny_dataset();
  gfgn::write_dataset(d, dir.string());
  const std::string hash = gfgn::dataset_content_hash(dir);

  TrainConfig base;
  base.variant = Variant::gcn;
  base.epochs = 3;
  base.patience = 3;
  base.splits = 1;
  base.repeats = 1;
  base.heads = 2;
  base.units = 2;
  const gfgn::SweepResult s = gfgn::sweep(d, base, {0.05, 0.005}, {0.5}, {1.0}, {5e-4});

  const nlohmann::json parsed =
      nlohmann::json::parse(gfgn::sweep_results_json(d, dir.string(), hash, base, {0.05, 0.005},
                                                     {0.5}, {1.0}, {5e-4}, s));
  EXPECT_EQ(parsed["command"], "sweep");
  ASSERT_EQ(parsed["rows"].size(), 2u);
  EXPECT_EQ(parsed["grid"]["lr"].size(), 2u);
  EXPECT_EQ(parsed["best_index"].get<std::size_t>(), s.best_index);
  EXPECT_DOUBLE_EQ(parsed["rows"][0]["config"]["lr"].get<double>(), 0.05);
  EXPECT_DOUBLE_EQ(parsed["best_config"]["lr"].get<double>(),
                   s.rows[s.best_index].config.lr);
}

}  // namespace
