#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "cli/io.hpp"
#include "support.hpp"

using namespace sublin;
using namespace sublin::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sublin_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Io, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int k = 0; k < 10000; ++k) {
    double v;
    const std::uint64_t b = bits(rng);
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const double back = std::strtod(format_double(v).c_str(), nullptr);
    ASSERT_EQ(std::memcmp(&v, &back, sizeof v), 0) << format_double(v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Io, FieldCsvRoundTripIsBitIdentical) {
  const fs::path dir = scratch("csv");
  auto mask = fixtures::ball_mask(2, 15, 0.8);
  const Field f = Field::from_function(mask, [](const Point& x) { return std::exp(x[0]) / 3.0 + 1e-300 * x[1]; });
  write_csv(dir / "f.csv", field_table(f, "u"));
  const Table t = read_csv(dir / "f.csv");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"x1", "x2", "u"}));
  const Field g = field_from_table(t, mask);
  for (std::size_t i = 0; i < mask->grid().size(); ++i) {
    if (!mask->is_active(i)) continue;
    ASSERT_EQ(std::memcmp(&f.values()[i], &g.values()[i], sizeof(double)), 0);
  }
  write_csv(dir / "g.csv", field_table(g, "u"));
  EXPECT_EQ(slurp(dir / "f.csv"), slurp(dir / "g.csv"));
}

TEST(Io, BinaryFieldRoundTrip) {
  const fs::path dir = scratch("bin");
  auto mask = fixtures::ball_mask(3, 7, 0.9);
  const Field f = Field::from_function(mask, [](const Point& x) { return x[0] - 2 * x[2]; });
  write_field_binary(dir / "f.bin", f);
  std::vector<std::size_t> shape;
  const std::vector<double> v = read_field_binary(dir / "f.bin", &shape);
  EXPECT_EQ(shape, (std::vector<std::size_t>{7, 7, 7}));
  ASSERT_EQ(v.size(), 343u);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask->is_active(i)) EXPECT_EQ(v[i], f[i]);
    else EXPECT_TRUE(std::isnan(v[i]));
  }
}

TEST(Io, MaskText) {
  auto mask = fixtures::box_mask(2, 4);
  EXPECT_EQ(mask_text(*mask), "dim 2\nshape 4 4\nbounds 0 1 0 1\nBBBB\nBIIB\nBIIB\nBBBB\n");
}

TEST(Io, Sha256KnownVector) {
  EXPECT_EQ(sha256_string("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Io, ManifestListsArtifactsWithChecksums) {
  const fs::path dir = scratch("manifest");
  Manifest m(dir, "solve", "[a]\nx = 1\n", 42);
  m.write_text("note.txt", "hello", "text");
  m.set_status(0, "ok");
  m.finish();
  const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(j["seed"], 42);
  EXPECT_EQ(j["config_sha256"], sha256_string("[a]\nx = 1\n"));
  ASSERT_EQ(j["artifacts"].size(), 1u);
  EXPECT_EQ(j["artifacts"][0]["sha256"], sha256_string("hello"));
  EXPECT_EQ(j["artifacts"][0]["bytes"], 5);
}
