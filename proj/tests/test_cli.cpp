#include "helpers.hpp"

#include "cli.hpp"

#include "awarekit/cgw1.hpp"
#include "awarekit/model.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <sstream>

using namespace awarekit;
using awarekit::testing::scratch_dir;
using awarekit::testing::small_planted_spec;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "awarekit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  const auto bytes = read_file(p);
  return {bytes.begin(), bytes.end()};
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

/// Writes the small planted spec and plants it once; returns the model path.
const fs::path& small_model() {
  static const fs::path model = [] {
    const fs::path dir = scratch_dir("cli_model");
    write_text(dir / "spec.json", to_json(small_planted_spec(0)).dump());
    const RunResult r = run_cli({"plant", "--spec", (dir / "spec.json").string(), "--out", (dir / "small.cgw1").string()});
    REQUIRE(r.code == 0);
    return dir / "small.cgw1";
  }();
  return model;
}

}  // namespace

TEST_CASE("plant is byte-identical across runs and the seed changes the weights") {
  const fs::path dir = scratch_dir("cli_plant");
  write_text(dir / "spec.json", to_json(small_planted_spec(0)).dump());
  const std::string spec = (dir / "spec.json").string();
  REQUIRE(run_cli({"plant", "--spec", spec, "--out", (dir / "a.cgw1").string()}).code == 0);
  REQUIRE(run_cli({"plant", "--spec", spec, "--out", (dir / "b.cgw1").string()}).code == 0);
  CHECK(slurp(dir / "a.cgw1") == slurp(dir / "b.cgw1"));
  CHECK(slurp(dir / "a.truth.json") == slurp(dir / "b.truth.json"));
  REQUIRE(run_cli({"plant", "--spec", spec, "--seed", "7", "--out", (dir / "s7.cgw1").string()}).code == 0);
  REQUIRE(run_cli({"plant", "--spec", spec, "--seed", "8", "--out", (dir / "s8.cgw1").string()}).code == 0);
  CHECK(slurp(dir / "s7.cgw1") != slurp(dir / "s8.cgw1"));

  const nlohmann::json truth = load_json(dir / "a.truth.json");
  CHECK(truth["provenance"]["model_hash"] == load_model(dir / "a.cgw1").model_hash);
  CHECK(truth.contains("spec"));
  CHECK(truth.contains("truth"));
}

TEST_CASE("plant rejects an invalid spec and names the invariant") {
  const fs::path dir = scratch_dir("cli_plant_bad");
  nlohmann::json spec = to_json(small_planted_spec(0));
  spec["b_suppressed"] = -10.0;
  write_text(dir / "spec.json", spec.dump());
  const RunResult r = run_cli({"plant", "--spec", (dir / "spec.json").string(), "--out", (dir / "x.cgw1").string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("b_active > 0 > b_suppressed > b_dead") != std::string::npos);
  CHECK(!fs::exists(dir / "x.cgw1"));
  CHECK(run_cli({"plant"}).code == cli::kExitUsage);
}

TEST_CASE("awareness output is deterministic and independent of worker count") {
  const fs::path dir = scratch_dir("cli_awareness");
  const std::string model = small_model().string();
  const auto args = [&](const std::string& name, const std::string& workers) {
    return std::vector<std::string>{"awareness", "--model", model, "--class", "2", "--samples", "128", "--seed", "5",
                                    "--out", (dir / (name + ".json")).string(), "--csv", (dir / (name + ".csv")).string(),
                                    "--workers", workers};
  };
  REQUIRE(run_cli(args("a", "1")).code == 0);
  REQUIRE(run_cli(args("b", "4")).code == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a.csv").rfind("block,channel,category_awareness,latent_awareness,inactive\n", 0) == 0);
  const nlohmann::json j = load_json(dir / "a.json");
  CHECK(j["provenance"]["seed"] == 5);
  CHECK(j["provenance"]["samples"] == 128);

  const RunResult stdout_run = run_cli({"awareness", "--model", model, "--class", "2", "--samples", "128", "--seed", "5"});
  CHECK(stdout_run.code == 0);
  CHECK(nlohmann::json::parse(stdout_run.out) == j);

  CHECK(run_cli({"awareness", "--model", (dir / "missing.cgw1").string(), "--class", "0"}).code == cli::kExitRuntime);
  CHECK(run_cli({"awareness", "--model", model, "--class", "9"}).code == cli::kExitUsage);
  CHECK(run_cli({"awareness", "--model", model, "--class", "0", "--samples", "1"}).code == cli::kExitUsage);
}

TEST_CASE("intervene: empty selection, grouping and top versus bottom") {
  const std::string model = small_model().string();
  const auto run_iv = [&](const std::string& name, std::vector<std::string> extra) {
    const fs::path dir = scratch_dir("cli_iv_" + name);
    std::vector<std::string> args{"intervene", "--model", model, "--class", "1", "--samples", "128", "--seed", "3",
                                  "--out-dir", dir.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    const RunResult r = run_cli(args);
    REQUIRE(r.code == 0);
    return std::make_pair(dir, load_json(dir / "intervene.json"));
  };
  const auto [dir0, empty] = run_iv("empty", {"--k", "0"});
  REQUIRE(empty["records"].size() == 1);
  CHECK(empty["records"][0]["aggregate"] == 0.0);
  CHECK(fs::exists(dir0 / "base.png"));

  const auto [dirg, grouped] = run_iv("grouped", {"--k", "12", "--group-size", "5"});
  REQUIRE(grouped["records"].size() == 3);
  CHECK(grouped["records"][2]["channels"].size() == 2);
  CHECK(fs::exists(dirg / "group_002.png"));
  CHECK(fs::exists(dirg / "group_002_diff.png"));

  const auto [dirt, top] = run_iv("top", {"--k", "4"});
  const auto [dirb, bottom] = run_iv("bottom", {"--k", "4", "--select", "bottom"});
  CHECK(top["records"][0]["aggregate"].get<double>() > bottom["records"][0]["aggregate"].get<double>());

  const auto [dirm, neutral] = run_iv("neutral", {"--k", "4", "--mode", "modulate", "--magnitude", "1"});
  CHECK(neutral["records"][0]["aggregate"] == 0.0);

  const auto [dirp, ppm] = run_iv("ppm", {"--k", "2", "--format", "ppm"});
  CHECK(fs::exists(dirp / "group_000.ppm"));
  CHECK(fs::exists(dirp / "group_000_diff.png"));

  const auto [dirt2, top2] = run_iv("top2", {"--k", "4"});
  CHECK(slurp(dirt / "intervene.json") == slurp(dirt2 / "intervene.json"));
  CHECK(slurp(dirt / "group_000.png") == slurp(dirt2 / "group_000.png"));
}

TEST_CASE("hybridize writes all four images and a self-hybrid reproduces the input") {
  const std::string model = small_model().string();
  const fs::path dir = scratch_dir("cli_hybrid");
  REQUIRE(run_cli({"hybridize", "--model", model, "--input-class", "0", "--reference-class", "2", "--k", "4",
                   "--samples", "128", "--out-dir", (dir / "a").string()})
              .code == 0);
  for (const char* name : {"input.png", "reference.png", "hybrid.png", "style_mix.png", "hybridize.json"}) {
    CHECK(fs::exists(dir / "a" / name));
  }
  REQUIRE(run_cli({"hybridize", "--model", model, "--input-class", "0", "--reference-class", "2", "--k", "4",
                   "--samples", "128", "--out-dir", (dir / "b").string()})
              .code == 0);
  CHECK(slurp(dir / "a" / "hybridize.json") == slurp(dir / "b" / "hybridize.json"));
  CHECK(slurp(dir / "a" / "hybrid.png") == slurp(dir / "b" / "hybrid.png"));

  REQUIRE(run_cli({"hybridize", "--model", model, "--input-class", "3", "--reference-class", "3", "--samples", "128",
                   "--out-dir", (dir / "self").string()})
              .code == 0);
  const nlohmann::json self = load_json(dir / "self" / "hybridize.json");
  CHECK(self["difference"]["hybrid_vs_input"] == 0.0);
  CHECK(slurp(dir / "self" / "hybrid.png") == slurp(dir / "self" / "input.png"));
  CHECK(run_cli({"hybridize", "--model", model, "--input-class", "0", "--reference-class", "1", "--mix-block", "5"}).code ==
        cli::kExitUsage);
}

TEST_CASE("segment writes both variants and bounds k") {
  const std::string model = small_model().string();
  const fs::path dir = scratch_dir("cli_segment");
  const auto args = [&](const std::string& sub) {
    return std::vector<std::string>{"segment", "--model", model, "--class", "1", "--weighted", "both", "--samples", "64",
                                    "--layers", "second-half", "--out-dir", (dir / sub).string()};
  };
  REQUIRE(run_cli(args("a")).code == 0);
  REQUIRE(run_cli(args("b")).code == 0);
  CHECK(fs::exists(dir / "a" / "labels_weighted.png"));
  CHECK(fs::exists(dir / "a" / "labels_unweighted.png"));
  CHECK(slurp(dir / "a" / "segment.json") == slurp(dir / "b" / "segment.json"));
  const nlohmann::json j = load_json(dir / "a" / "segment.json");
  CHECK(j["results"].contains("weighted"));
  CHECK(j["results"].contains("unweighted"));
  CHECK(run_cli({"segment", "--model", model, "--class", "1", "--k", "17"}).code == cli::kExitUsage);
  CHECK(run_cli({"segment", "--model", model, "--class", "1", "--k", "1"}).code == cli::kExitUsage);
}

TEST_CASE("evaluate: self-reference, metric names and sorted CSV") {
  const std::string model = small_model().string();
  const fs::path dir = scratch_dir("cli_evaluate");
  const auto args = [&](const std::string& sub) {
    return std::vector<std::string>{"evaluate", "--model", model, "--samples", "64", "--fake-samples", "200",
                                    "--real-samples", "200", "--ms-ssim-images", "8", "--ms-ssim-pairs", "20",
                                    "--seed", "4", "--out", (dir / sub).string()};
  };
  REQUIRE(run_cli(args("a")).code == 0);
  REQUIRE(run_cli(args("b")).code == 0);
  CHECK(slurp(dir / "a" / "evaluation.csv") == slurp(dir / "b" / "evaluation.csv"));
  CHECK(slurp(dir / "a" / "correlation.json") == slurp(dir / "b" / "correlation.json"));

  const nlohmann::json j = load_json(dir / "a" / "correlation.json");
  for (const char* name : {"precision", "recall", "ms_ssim", "frechet"}) CHECK(j["correlation"].contains(name));
  REQUIRE(j["classes"].size() == 4);
  for (const auto& c : j["classes"]) {
    CHECK(c["precision"] == 1.0);
    CHECK(c["recall"] == 1.0);
  }

  std::istringstream csv(slurp(dir / "a" / "evaluation.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "class_id,total_awareness,precision,recall,ms_ssim,frechet");
  double previous = -1e300;
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto first = line.find(',');
    const double total = std::stod(line.substr(first + 1, line.find(',', first + 1) - first - 1));
    CHECK(total >= previous);
    previous = total;
    ++rows;
  }
  CHECK(rows == 4);
  CHECK(run_cli({"evaluate", "--model", model, "--classes", "0,9"}).code == cli::kExitUsage);
}

TEST_CASE("usage errors") {
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run_cli({"serve", "--model", small_model().string(), "--port", "70000"}).code == cli::kExitUsage);
  CHECK(run_cli({"--version"}).code == cli::kExitOk);
}
