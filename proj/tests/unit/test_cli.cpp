#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "afse/cli.hpp"
#include "afse/image_io.hpp"
#include "afse/manifest.hpp"
#include "support/synth.hpp"

using namespace afse;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { seq_ = synth::drifting_disk(dir_.path(), 10); }
  std::string in() const { return seq_.images.string(); }
  std::string masks() const { return seq_.masks.string(); }
  std::string out(const std::string& name) const { return (dir_ / name).string(); }

  synth::TempDir dir_;
  synth::Sequence seq_;
};

}  // namespace

TEST_F(CliTest, ScoreWritesOneRowPerFrame) {
  synth::TempDir small;
  const auto three = synth::drifting_disk(small.path(), 3);
  const CliRun r = run({"score", "--input", three.images.string(), "--out", out("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(out("s") + "/scores.csv");
  EXPECT_EQ(count_lines(csv), 4);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "id,B,C,E,H,S,F,cluster,distance,rank");
  EXPECT_NE(r.err.find("canny=50/150"), std::string::npos) << "run header lists defaults";
  const auto m = load_selection_manifest(out("s") + "/scores.json");
  EXPECT_EQ(m.strategy, "none");
  EXPECT_EQ(m.frames[0].features.hist_corr, 1.0);
}

TEST_F(CliTest, ScoreIsByteIdenticalOnRerun) {
  ASSERT_EQ(run({"score", "--input", in(), "--reference", "frame_004", "--out", out("a")}).code, 0);
  ASSERT_EQ(run({"score", "--input", in(), "--reference", "frame_004", "--out", out("b"), "--jobs", "4"}).code, 0);
  EXPECT_EQ(slurp(out("a") + "/scores.csv"), slurp(out("b") + "/scores.csv"));
  EXPECT_EQ(slurp(out("a") + "/scores.json"), slurp(out("b") + "/scores.json"));
}

TEST_F(CliTest, UnknownReferenceIsUsageError) {
  const CliRun r = run({"score", "--input", in(), "--reference", "nope_17", "--out", out("x")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope_17"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"score", "--input", in(), "--bogus"}).code, 2);
  EXPECT_EQ(run({"select", "--input", in(), "--k", "11", "--out", out("x")}).code, 2);
  EXPECT_EQ(run({"select", "--input", in(), "--k", "0", "--out", out("x")}).code, 2);
  EXPECT_EQ(run({"select", "--input", in(), "--weights", "1,2", "--out", out("x")}).code, 2);
  EXPECT_EQ(run({"select", "--input", in(), "--strategy", "best", "--out", out("x")}).code, 2);
  EXPECT_EQ(run({"score", "--input", in(), "--canny-low", "200", "--out", out("x")}).code, 2);
  EXPECT_EQ(run({"score", "--input", in(), "--split", "test", "--out", out("x")}).code, 2);
  EXPECT_EQ(run({"score", "--input", in(), "--jobs", "0", "--out", out("x")}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST_F(CliTest, RuntimeErrors) {
  EXPECT_EQ(run({"score", "--input", out("missing"), "--out", out("x")}).code, 1);
  fs::create_directories(dir_ / "empty");
  EXPECT_EQ(run({"score", "--input", out("empty"), "--out", out("x")}).code, 1);
}

TEST_F(CliTest, HelpListsEveryFlag) {
  const CliRun r = run({"select", "--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* flag : {"--input", "--masks", "--reference", "--k", "--seed", "--strategy", "--weights",
                           "--canny-low", "--canny-high", "--bins-h", "--bins-s", "--normalize-features",
                           "--split", "--jobs", "--out"}) {
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  }
}

TEST_F(CliTest, UniformPicksSpreadFrames) {
  const CliRun r = run({"select", "--input", in(), "--strategy", "uniform", "--k", "5", "--out", out("u")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("frame_000 frame_002 frame_005 frame_007 frame_009"), std::string::npos) << r.out;
}

TEST_F(CliTest, AfseWithKEqualToN) {
  ASSERT_EQ(run({"select", "--input", in(), "--k", "10", "--out", out("all")}).code, 0);
  const auto m = load_selection_manifest(out("all") + "/selection.json");
  for (const auto& f : m.frames) EXPECT_TRUE(f.is_representative);
}

TEST_F(CliTest, SelectionManifestContracts) {
  ASSERT_EQ(run({"select", "--input", in(), "--k", "3", "--out", out("s")}).code, 0);
  const auto m = load_selection_manifest(out("s") + "/selection.json");
  EXPECT_EQ(m.strategy, "afse");
  EXPECT_EQ(*m.k, 3);
  int reps = 0;
  std::vector<int> ranks;
  for (const auto& f : m.frames) {
    if (f.is_representative) {
      ++reps;
      EXPECT_FALSE(f.rank.has_value());
    } else {
      ranks.push_back(*f.rank);
    }
    EXPECT_TRUE(f.cluster.has_value());
  }
  EXPECT_EQ(reps, 3);
  std::sort(ranks.begin(), ranks.end());
  for (std::size_t i = 0; i < ranks.size(); ++i) EXPECT_EQ(ranks[i], static_cast<int>(i + 1));
}

TEST_F(CliTest, RandomIsStable) {
  ASSERT_EQ(run({"select", "--input", in(), "--strategy", "random", "--seed", "5", "--out", out("r1")}).code, 0);
  ASSERT_EQ(run({"select", "--input", in(), "--strategy", "random", "--seed", "5", "--out", out("r2")}).code, 0);
  EXPECT_EQ(slurp(out("r1") + "/selection.json"), slurp(out("r2") + "/selection.json"));
}

TEST_F(CliTest, BBoxPromptsForRepresentatives) {
  const CliRun r = run({"prompts", "--input", in(), "--masks", masks(), "--prompt-strategy", "bbox", "--out", out("p")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(slurp(out("p") + "/prompts.json"));
  ASSERT_EQ(doc["prompts"].size(), 5u);
  for (const auto& p : doc["prompts"]) {
    EXPECT_EQ(p["strategy"], "bbox");
    EXPECT_EQ(p["bbox"].size(), 4u);
    EXPECT_TRUE(p["points"].empty());
  }
}

TEST_F(CliTest, PromptFailuresAreListed) {
  synth::TempDir d;
  fs::create_directories(d / "img");
  fs::create_directories(d / "msk");
  for (int i = 0; i < 3; ++i) {
    save_image(synth::noise(16, 16, 3, i), d / fmt::format("img/f{}.png", i));
    Mask two(16, 16);
    two.set(3, 3, true);
    two.set(4, 3, true);
    save_mask(two, d / fmt::format("msk/f{}.png", i));
  }
  const CliRun r = run({"prompts", "--input", (d / "img").string(), "--masks", (d / "msk").string(), "--k", "2",
                     "--prompt-strategy", "four_pos", "--out", (d / "o").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("skipped"), std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(d / "o/prompts.json"));
  EXPECT_EQ(doc["skipped"].size(), 2u);
}

TEST_F(CliTest, PromptsWithoutMasksAreSkipped) {
  const CliRun r = run({"prompts", "--input", in(), "--prompt-strategy", "bbox", "--out", out("nm")});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, EvalCommands) {
  CliRun r = run({"eval", "--pred", masks(), "--gt", masks(), "--out", out("e")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("mean_dice 1 mean_iou 1"), std::string::npos) << r.out;
  EXPECT_EQ(count_lines(slurp(out("e") + "/eval.csv")), 11);
  fs::create_directories(dir_ / "nothing");
  r = run({"eval", "--pred", out("nothing"), "--gt", masks(), "--out", out("e2")});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, IngestWritesDatasetManifest) {
  const CliRun r = run({"ingest", "--input", in(), "--masks", masks(), "--modality", "US", "--out", out("i")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = load_dataset_manifest(out("i") + "/dataset.json");
  EXPECT_EQ(m.frames.size(), 10u);
  EXPECT_EQ(m.split.train.size(), 7u);
  EXPECT_EQ(m.modality, "US");
}

TEST_F(CliTest, TrainSplitRestrictsFrames) {
  ASSERT_EQ(run({"score", "--input", in(), "--split", "val", "--out", out("v")}).code, 0);
  EXPECT_EQ(count_lines(slurp(out("v") + "/scores.csv")), 4);
}
