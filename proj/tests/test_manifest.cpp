#include <catch2/catch_amalgamated.hpp>

#include "pseudovoc/manifest.hpp"
#include "support/gen.hpp"

using namespace pseudovoc;
using testsupport::TempDir;

TEST_CASE("fnv1a64 matches the published vectors") {
  REQUIRE(fnv1a64("") == 0xcbf29ce484222325ULL);
  REQUIRE(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  REQUIRE(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  REQUIRE(digest_string("") == "fnv1a64:cbf29ce484222325");
}

TEST_CASE("manifests are deterministic and timestamp-free") {
  TempDir dir;
  testsupport::write_file(dir.path() / "in.txt", "input bytes\n");
  testsupport::write_file(dir.path() / "out.txt", "output bytes\n");

  RunManifest manifest;
  manifest.command = "filter";
  manifest.params["tau"] = 0.1;
  manifest.inputs = {dir.path() / "in.txt"};
  manifest.outputs = {dir.path() / "out.txt"};

  const auto first = manifest_to_json(manifest);
  const auto second = manifest_to_json(manifest);
  REQUIRE(first == second);
  REQUIRE(first.find("\"command\": \"filter\"") != std::string::npos);
  REQUIRE(first.find("fnv1a64:") != std::string::npos);

  write_manifest(manifest, dir.path() / "m.json");
  REQUIRE(testsupport::read_file(dir.path() / "m.json") == first);
}

TEST_CASE("manifest fails loudly on unreadable files") {
  RunManifest manifest;
  manifest.command = "eval";
  manifest.inputs = {"/nonexistent/input.bin"};
  REQUIRE_THROWS_AS(manifest_to_json(manifest), Error);
}
