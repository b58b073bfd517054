#include <cstdlib>
#include <string>

#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>

#include "pseudovoc/pseudovoc.hpp"
#include "support/gen.hpp"

using namespace pseudovoc;
using testsupport::TempDir;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string binary() {
  const char* path = std::getenv("PSEUDOVOC_BIN");
  REQUIRE(path != nullptr);
  return path;
}

RunResult run(const std::string& args, const std::filesystem::path& scratch) {
  const auto out_path = scratch / "stdout.txt";
  const std::string command =
      binary() + " " + args + " > " + out_path.string() + " 2> " +
      (scratch / "stderr.txt").string();
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = testsupport::read_file(out_path);
  return result;
}

Dataset make_tree(const std::filesystem::path& dir, std::uint64_t seed,
                  std::size_t images = 12) {
  SplitMix64 rng(seed);
  testsupport::DatasetSpec spec;
  spec.images = images;
  spec.min_objects = 1;
  spec.max_objects = 4;
  spec.distinct_boxes = true;
  const auto dataset = testsupport::random_dataset(rng, spec, "train");
  testsupport::make_devkit_tree(dir, dataset);
  return dataset;
}

}  // namespace

TEST_CASE("simulate writes deterministic dumps with manifests") {
  TempDir dir;
  const auto gt = dir.path() / "devkit";
  make_tree(gt, 101);

  const std::string flags = "simulate --gt " + gt.string() +
                            " --split train --seed 5 --jitter 2 --miss 0.2 --flip 0.2"
                            " --spurious 1.0 --score-tp 0.5 1.0 --score-noise 0.1 0.9";
  const auto first = run(flags + " --out " + (dir.path() / "a.jsonl").string(), dir.path());
  REQUIRE(first.exit_code == 0);
  const auto second = run(flags + " --out " + (dir.path() / "b.jsonl").string(), dir.path());
  REQUIRE(second.exit_code == 0);

  const auto dump_a = testsupport::read_file(dir.path() / "a.jsonl");
  const auto dump_b = testsupport::read_file(dir.path() / "b.jsonl");
  REQUIRE_FALSE(dump_a.empty());
  REQUIRE(dump_a == dump_b);
  REQUIRE(std::filesystem::exists(dir.path() / "a.jsonl.manifest.json"));

  // replaying the exact command reproduces output and manifest byte-for-byte
  const auto manifest_before = testsupport::read_file(dir.path() / "a.jsonl.manifest.json");
  const auto replay = run(flags + " --out " + (dir.path() / "a.jsonl").string(), dir.path());
  REQUIRE(replay.exit_code == 0);
  REQUIRE(testsupport::read_file(dir.path() / "a.jsonl") == dump_a);
  REQUIRE(testsupport::read_file(dir.path() / "a.jsonl.manifest.json") == manifest_before);

  // library equivalence
  const auto dataset = load_dataset(gt / "Annotations",
                                    gt / "ImageSets" / "Main" / "train.txt");
  NoiseParams params;
  params.jitter_sigma = 2.0;
  params.miss_prob = 0.2;
  params.flip_prob = 0.2;
  params.spurious_rate = 1.0;
  params.score_tp = {0.5, 1.0};
  params.score_noise = {0.1, 0.9};
  REQUIRE(dump_a == dump_to_string(corrupt_dataset(dataset, params, 5)));
}

TEST_CASE("simulate rejects invalid noise params") {
  TempDir dir;
  const auto gt = dir.path() / "devkit";
  make_tree(gt, 102, 2);
  const auto result = run("simulate --gt " + gt.string() +
                              " --split train --seed 1 --flip 1.5 --out " +
                              (dir.path() / "x.jsonl").string(),
                          dir.path());
  REQUIRE(result.exit_code == 2);
}

TEST_CASE("eval prints the table and matches the library") {
  TempDir dir;
  const auto gt = dir.path() / "devkit";
  const auto dataset = make_tree(gt, 103);

  // perfect dump: simulate with zero noise
  const auto sim = run("simulate --gt " + gt.string() +
                           " --split train --seed 3 --out " +
                           (dir.path() / "perfect.jsonl").string(),
                       dir.path());
  REQUIRE(sim.exit_code == 0);

  const auto eval = run("eval --gt " + gt.string() + " --split train --dets " +
                            (dir.path() / "perfect.jsonl").string() + " --report " +
                            (dir.path() / "report.json").string(),
                        dir.path());
  REQUIRE(eval.exit_code == 0);
  REQUIRE(eval.out.find("mAP = 100.0") != std::string::npos);

  const auto report_text = testsupport::read_file(dir.path() / "report.json");
  std::ifstream dump_in(dir.path() / "perfect.jsonl", std::ios::binary);
  const auto dets = read_dump(dump_in, "perfect.jsonl");
  REQUIRE(report_text == report_to_json(evaluate(dets, dataset)));
  REQUIRE(std::filesystem::exists(dir.path() / "report.json.manifest.json"));
}

TEST_CASE("eval of a noisy dump matches library-level evaluate") {
  TempDir dir;
  const auto gt = dir.path() / "devkit";
  const auto dataset = make_tree(gt, 110, 30);

  const auto sim = run("simulate --gt " + gt.string() +
                           " --split train --seed 17 --jitter 3 --miss 0.2 --flip 0.3"
                           " --spurious 1.5 --score-tp 0.4 1.0 --score-noise 0.2 0.9 --out " +
                           (dir.path() / "noisy.jsonl").string(),
                       dir.path());
  REQUIRE(sim.exit_code == 0);

  const auto eval = run("eval --gt " + gt.string() + " --split train --dets " +
                            (dir.path() / "noisy.jsonl").string() + " --workers 4 --report " +
                            (dir.path() / "noisy_report.json").string(),
                        dir.path());
  REQUIRE(eval.exit_code == 0);

  std::ifstream dump_in(dir.path() / "noisy.jsonl", std::ios::binary);
  const auto dets = read_dump(dump_in, "noisy.jsonl");
  const auto expected = evaluate(dets, dataset);
  REQUIRE(testsupport::read_file(dir.path() / "noisy_report.json") == report_to_json(expected));
  REQUIRE(eval.out.find("mAP = " + format_percent(expected.map)) != std::string::npos);
}

TEST_CASE("eval with a missing dump exits 2") {
  TempDir dir;
  const auto gt = dir.path() / "devkit";
  make_tree(gt, 104, 2);
  const auto result = run("eval --gt " + gt.string() + " --split train --dets " +
                              (dir.path() / "missing.jsonl").string(),
                          dir.path());
  REQUIRE(result.exit_code == 2);
}

TEST_CASE("filter applies the default threshold and is idempotent") {
  TempDir dir;
  const auto gt = dir.path() / "devkit";
  const auto dataset = make_tree(gt, 105);

  const auto sim = run("simulate --gt " + gt.string() +
                           " --split train --seed 9 --jitter 1 --flip 0.4 --spurious 2"
                           " --score-tp 0.05 1.0 --score-noise 0.05 0.9 --out " +
                           (dir.path() / "noisy.jsonl").string(),
                       dir.path());
  REQUIRE(sim.exit_code == 0);

  const auto filter = run("filter --dets " + (dir.path() / "noisy.jsonl").string() +
                              " --gt " + gt.string() + " --split train --out " +
                              (dir.path() / "filtered.jsonl").string(),
                          dir.path());
  REQUIRE(filter.exit_code == 0);

  // library equivalence with the default tau = 0.1
  std::ifstream noisy_in(dir.path() / "noisy.jsonl", std::ios::binary);
  const auto noisy = read_dump(noisy_in, "noisy.jsonl");
  const auto expected = class_consistency_filter(threshold_filter(noisy, 0.1),
                                                 image_level_labels(dataset));
  REQUIRE(testsupport::read_file(dir.path() / "filtered.jsonl") == dump_to_string(expected));

  // idempotence: re-filtering the output changes nothing
  const auto refilter = run("filter --dets " + (dir.path() / "filtered.jsonl").string() +
                                " --gt " + gt.string() + " --split train --out " +
                                (dir.path() / "refiltered.jsonl").string(),
                            dir.path());
  REQUIRE(refilter.exit_code == 0);
  REQUIRE(testsupport::read_file(dir.path() / "refiltered.jsonl") ==
          testsupport::read_file(dir.path() / "filtered.jsonl"));
}

TEST_CASE("filter with NMS matches the library composition") {
  TempDir dir;
  const auto gt = dir.path() / "devkit";
  const auto dataset = make_tree(gt, 106);
  const auto sim = run("simulate --gt " + gt.string() +
                           " --split train --seed 2 --jitter 4 --spurious 2"
                           " --score-tp 0.3 1.0 --out " +
                           (dir.path() / "noisy.jsonl").string(),
                       dir.path());
  REQUIRE(sim.exit_code == 0);
  const auto filter = run("filter --dets " + (dir.path() / "noisy.jsonl").string() +
                              " --gt " + gt.string() +
                              " --split train --tau 0.2 --nms 0.4 --out " +
                              (dir.path() / "f.jsonl").string(),
                          dir.path());
  REQUIRE(filter.exit_code == 0);

  std::ifstream noisy_in(dir.path() / "noisy.jsonl", std::ios::binary);
  const auto noisy = read_dump(noisy_in, "noisy.jsonl");
  const auto expected =
      nms(class_consistency_filter(threshold_filter(noisy, 0.2), image_level_labels(dataset)),
          0.4);
  REQUIRE(testsupport::read_file(dir.path() / "f.jsonl") == dump_to_string(expected));

  // --nms without a value is a usage error
  const auto bare = run("filter --dets " + (dir.path() / "noisy.jsonl").string() +
                            " --gt " + gt.string() + " --split train --nms --out " +
                            (dir.path() / "bare.jsonl").string(),
                        dir.path());
  REQUIRE(bare.exit_code == 2);
}

TEST_CASE("export writes annotations that load back") {
  TempDir dir;
  DetectionSet dets;
  dets.items = {Detection{"img_b", ClassLabel::dog, 0.9, {1, 1, 20, 20}},
                Detection{"img_a", ClassLabel::cat, 0.8, {3, 3, 40, 40}},
                Detection{"img_b", ClassLabel::dog, 0.7, {5, 5, 60, 60}}};
  testsupport::write_file(dir.path() / "dump.jsonl", dump_to_string(dets));

  const auto result = run("export --dets " + (dir.path() / "dump.jsonl").string() +
                              " --out " + (dir.path() / "voc").string(),
                          dir.path());
  REQUIRE(result.exit_code == 0);
  REQUIRE(std::filesystem::exists(dir.path() / "voc" / "Annotations" / "img_a.xml"));
  REQUIRE(std::filesystem::exists(dir.path() / "voc" / "Annotations" / "img_b.xml"));
  REQUIRE(std::filesystem::exists(dir.path() / "voc" / "manifest.json"));

  const auto loaded = load_dataset(dir.path() / "voc" / "Annotations",
                                   dir.path() / "voc" / "ImageSets" / "Main" / "pseudo.txt");
  REQUIRE(loaded.images.size() == 2);
  REQUIRE(loaded.images[0].image_id == "img_a");
  REQUIRE(loaded.images[1].objects.size() == 2);

  // per-class cap keeps the top scorer
  const auto capped = run("export --dets " + (dir.path() / "dump.jsonl").string() +
                              " --out " + (dir.path() / "voc_cap").string() +
                              " --max-per-class 1",
                          dir.path());
  REQUIRE(capped.exit_code == 0);
  const auto reloaded =
      load_dataset(dir.path() / "voc_cap" / "Annotations",
                   dir.path() / "voc_cap" / "ImageSets" / "Main" / "pseudo.txt");
  REQUIRE(reloaded.images[1].objects.size() == 1);
  REQUIRE(reloaded.images[1].objects[0].box == BoundingBox{1, 1, 20, 20});
}

TEST_CASE("export of an empty dump succeeds") {
  TempDir dir;
  testsupport::write_file(dir.path() / "empty.jsonl", "");
  const auto result = run("export --dets " + (dir.path() / "empty.jsonl").string() +
                              " --out " + (dir.path() / "voc").string(),
                          dir.path());
  REQUIRE(result.exit_code == 0);
  REQUIRE(testsupport::read_file(dir.path() / "voc" / "ImageSets" / "Main" / "pseudo.txt")
              .empty());
}

TEST_CASE("compare renders the named reports") {
  TempDir dir;
  const auto gt = dir.path() / "devkit";
  const auto dataset = make_tree(gt, 107);
  const auto dets = testsupport::perfect_detections(dataset);
  testsupport::write_file(dir.path() / "r1.json", report_to_json(evaluate(dets, dataset)));
  testsupport::write_file(dir.path() / "r2.json",
                          report_to_json(evaluate(DetectionSet{}, dataset)));

  const auto result = run("compare --report perfect=" + (dir.path() / "r1.json").string() +
                              " --report empty=" + (dir.path() / "r2.json").string(),
                          dir.path());
  REQUIRE(result.exit_code == 0);
  REQUIRE(result.out.find("perfect") != std::string::npos);
  REQUIRE(result.out.find("empty") != std::string::npos);
  REQUIRE(result.out.find("100.0") != std::string::npos);
}

TEST_CASE("unknown subcommand exits 2") {
  TempDir dir;
  REQUIRE(run("frobnicate", dir.path()).exit_code == 2);
  REQUIRE(run("--help", dir.path()).exit_code == 0);
}
