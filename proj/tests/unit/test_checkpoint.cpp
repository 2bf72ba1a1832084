#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "opsum/checkpoint.hpp"
#include "opsum/error.hpp"

using namespace opsum;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("opsum_test_" + name);
}

Checkpoint sample() {
  Rng rng(5);
  Checkpoint c;
  c.params.add("a.w", uniform_tensor({3, 4}, 1.0, rng));
  c.params.add("b", uniform_tensor({7}, 1.0, rng));
  for (auto& [name, t] : c.params) {
    PrecisionScope scope(Precision::kFloat32);
    t.round_to_precision();
  }
  c.meta["vocab_size"] = "12";
  return c;
}

}  // namespace

TEST(Checkpoint, RoundTripIsExactForFloatValues) {
  const auto path = temp_file("roundtrip.ckpt");
  Checkpoint c = sample();
  save_checkpoint(path.string(), c);
  Checkpoint back = load_checkpoint(path.string());
  EXPECT_EQ(back.params, c.params);
  EXPECT_EQ(back.meta, c.meta);
  fs::remove(path);
}

TEST(Checkpoint, TruncatedPayloadIsRejected) {
  const auto path = temp_file("truncated.ckpt");
  save_checkpoint(path.string(), sample());
  fs::resize_file(path, fs::file_size(path) - 4);
  try {
    load_checkpoint(path.string());
    FAIL() << "expected a data error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
  }
  fs::remove(path);
}

TEST(Checkpoint, TrailingBytesAreRejected) {
  const auto path = temp_file("trailing.ckpt");
  save_checkpoint(path.string(), sample());
  std::ofstream(path, std::ios::app | std::ios::binary) << "xx";
  EXPECT_THROW(load_checkpoint(path.string()), Error);
  fs::remove(path);
}

TEST(Checkpoint, BadHeaderAndMissingFileAreRejected) {
  const auto path = temp_file("bad.ckpt");
  std::ofstream(path) << "not a checkpoint\n";
  EXPECT_THROW(load_checkpoint(path.string()), Error);
  fs::remove(path);
  EXPECT_THROW(load_checkpoint(temp_file("does_not_exist.ckpt").string()), Error);
}
