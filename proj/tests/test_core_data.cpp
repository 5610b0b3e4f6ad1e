#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"
#include "trueset/feature_table.hpp"
#include "trueset/manifest.hpp"
#include "trueset/png_io.hpp"

namespace trueset {
namespace {

using testing::TempDir;

TEST(ManifestTest, PreservesFileOrder) {
  std::istringstream in(
      "# header comment\n"
      "c\timg/c.png\tmask/c.png\ttrain\n"
      "a\timg/a.png\t-\tval\n"
      "b\timg/b.png\tmask/b.png\ttest\n");
  const DatasetManifest m = parse_manifest(in, "/data");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.ids(), (std::vector<std::string>{"c", "a", "b"}));
  EXPECT_FALSE(m.entries()[1].mask_path.has_value());
  EXPECT_EQ(m.entries()[2].split, Split::test);
  EXPECT_EQ(m.resolve(m.entries()[0].image_path), std::filesystem::path("/data/img/c.png"));
}

TEST(ManifestTest, DuplicateIdNamesTheId) {
  std::istringstream in("a\tx.png\t-\ttrain\na\ty.png\t-\ttrain\n");
  try {
    parse_manifest(in);
    FAIL() << "expected DuplicateIdError";
  } catch (const DuplicateIdError& e) {
    EXPECT_EQ(e.id(), "a");
  }
}

TEST(ManifestTest, EmptyFileIsValid) {
  std::istringstream in("");
  EXPECT_TRUE(parse_manifest(in).empty());
}

TEST(ManifestTest, ParseErrorsCarryLineNumbers) {
  std::istringstream bad_fields("a\tx.png\t-\ttrain\n# c\nb\tx.png\ttrain\n");
  try {
    parse_manifest(bad_fields);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream bad_id("a b\tx.png\t-\ttrain\n");
  EXPECT_THROW(parse_manifest(bad_id), ParseError);
  std::istringstream bad_split("a\tx.png\t-\tholdout\n");
  EXPECT_THROW(parse_manifest(bad_split), ParseError);
}

TEST(ManifestTest, MissingFile) {
  EXPECT_THROW(load_manifest("/nonexistent/dir/manifest.tsv"), IoError);
}

TEST(ManifestTest, SaveRebasesRelativePaths) {
  TempDir dir;
  std::filesystem::create_directories(dir / "sub");
  DatasetManifest m(dir.path());
  m.add({"a", "img/a.png", std::filesystem::path("mask/a.png"), Split::train});
  save_manifest(m, dir / "sub" / "m.tsv");
  EXPECT_EQ(testing::read_file(dir / "sub" / "m.tsv"), "a\t../img/a.png\t../mask/a.png\ttrain\n");
  const DatasetManifest back = load_manifest(dir / "sub" / "m.tsv");
  EXPECT_EQ(std::filesystem::weakly_canonical(back.resolve(back.entries()[0].image_path)),
            std::filesystem::weakly_canonical(dir / "img" / "a.png"));
}

TEST(ManifestTest, PairDimensionCheck) {
  TempDir dir;
  write_gray(GrayImage(4, 3), dir / "i.png");
  write_mask(BinaryMask(4, 3), dir / "ok.png");
  write_mask(BinaryMask(3, 4), dir / "bad.png");
  DatasetManifest good(dir.path());
  good.add({"a", "i.png", std::filesystem::path("ok.png"), Split::train});
  EXPECT_NO_THROW(check_pair_dimensions(good));
  DatasetManifest bad(dir.path());
  bad.add({"a", "i.png", std::filesystem::path("bad.png"), Split::train});
  EXPECT_THROW(check_pair_dimensions(bad), DimensionMismatch);
}

TEST(PngTest, UniformMasks) {
  TempDir dir;
  write_gray(GrayImage(5, 4, 0), dir / "zero.png");
  write_gray(GrayImage(5, 4, 255), dir / "full.png");
  EXPECT_EQ(read_mask(dir / "zero.png").count(), 0u);
  EXPECT_EQ(read_mask(dir / "full.png").count(), 20u);
}

TEST(PngTest, ThresholdBoundary) {
  TempDir dir;
  write_gray(GrayImage(2, 1, std::vector<std::uint8_t>{127, 128}), dir / "edge.png");
  const BinaryMask m = read_mask(dir / "edge.png");
  EXPECT_EQ(m.data, (std::vector<std::uint8_t>{0, 1}));
  EXPECT_EQ(read_mask(dir / "edge.png", true).data, (std::vector<std::uint8_t>{1, 0}));
}

TEST(PngTest, RgbUsesBt601Luma) {
  TempDir dir;
  // (200, 100, 50): 0.299*200 + 0.587*100 + 0.114*50 = 124.2 -> 124 -> 0
  // (100, 200, 50): 29.9 + 117.4 + 5.7 = 153.0 -> 1
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = 2;
  image.height = 1;
  image.format = PNG_FORMAT_RGB;
  const std::uint8_t px[] = {200, 100, 50, 100, 200, 50};
  const std::string name = (dir / "rgb.png").string();
  ASSERT_TRUE(png_image_write_to_file(&image, name.c_str(), 0, px, 0, nullptr));
  EXPECT_EQ(read_gray(dir / "rgb.png").data, (std::vector<std::uint8_t>{124, 153}));
  EXPECT_EQ(read_mask(dir / "rgb.png").data, (std::vector<std::uint8_t>{0, 1}));
}

TEST(PngTest, ProbabilityScale) {
  TempDir dir;
  write_gray(GrayImage(3, 1, std::vector<std::uint8_t>{255, 0, 51}), dir / "p.png");
  const ProbabilityMap p = read_probability_map(dir / "p.png");
  EXPECT_EQ(p.data[0], 1.0);
  EXPECT_EQ(p.data[1], 0.0);
  EXPECT_DOUBLE_EQ(p.data[2], 0.2);
}

TEST(PngTest, WrittenMaskBytes) {
  TempDir dir;
  write_mask(BinaryMask(2, 2, 1), dir / "ones.png");
  EXPECT_EQ(read_gray(dir / "ones.png").data, (std::vector<std::uint8_t>(4, 255)));
  write_mask(BinaryMask(1, 1, 0), dir / "zero.png");
  EXPECT_EQ(read_gray(dir / "zero.png").data, (std::vector<std::uint8_t>{0}));
}

TEST(PngTest, UnreadableFile) {
  TempDir dir;
  testing::write_file(dir / "junk.png", "not a png");
  EXPECT_THROW(read_mask(dir / "junk.png"), IoError);
  EXPECT_THROW(read_mask(dir / "missing.png"), IoError);
}

TEST(PngTest, MaskRoundTripProperty) {
  TempDir dir;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(1, 17);
  for (int trial = 0; trial < 60; ++trial) {
    const BinaryMask m = testing::random_mask(rng, dim(rng), dim(rng), 0.4);
    write_mask(m, dir / "m.png");
    const BinaryMask back = read_mask(dir / "m.png");
    ASSERT_EQ(back, m) << "trial " << trial;
    ASSERT_TRUE(back.is_binary());
  }
}

TEST(FeatureTableTest, RoundTrip) {
  TempDir dir;
  FeatureTable t(2);
  const float v[] = {1.0f, 2.0f};
  t.add("a", v);
  write_feature_table(t, dir / "t.tdf");
  EXPECT_EQ(read_feature_table(dir / "t.tdf"), t);
}

TEST(FeatureTableTest, EmptyTableIsTwelveBytes) {
  TempDir dir;
  write_feature_table(FeatureTable(0), dir / "e.tdf");
  const std::string bytes = testing::read_file(dir / "e.tdf");
  EXPECT_EQ(bytes.size(), 12u);
  EXPECT_EQ(bytes, std::string("TDF1\0\0\0\0\0\0\0\0", 12));
  EXPECT_EQ(read_feature_table(dir / "e.tdf"), FeatureTable(0));
}

TEST(FeatureTableTest, ExactByteLayout) {
  FeatureTable t(1);
  const float v[] = {1.0f};  // 0x3f800000
  t.add("ab", v);
  const std::string expected("TDF1\x01\0\0\0\x01\0\0\0\x02\0ab\0\0\x80\x3f", 20);
  EXPECT_EQ(encode_feature_table(t), expected);
}

TEST(FeatureTableTest, BadMagicAndTruncation) {
  TempDir dir;
  testing::write_file(dir / "x.tdf", std::string("XXXX\0\0\0\0\0\0\0\0", 12));
  EXPECT_THROW(read_feature_table(dir / "x.tdf"), FormatError);

  FeatureTable t(3);
  const float v[] = {1, 2, 3};
  t.add("id", v);
  std::string bytes = encode_feature_table(t);
  bytes.pop_back();
  testing::write_file(dir / "short.tdf", bytes);
  EXPECT_THROW(read_feature_table(dir / "short.tdf"), FormatError);
}

TEST(FeatureTableTest, RejectsLongIdsAndNonFinite) {
  FeatureTable t(1);
  const float v[] = {0.0f};
  EXPECT_THROW(t.add(std::string(65536, 'x'), v), FormatError);
  EXPECT_NO_THROW(t.add(std::string(65535, 'x'), v));
  const float nan[] = {std::numeric_limits<float>::quiet_NaN()};
  EXPECT_THROW(t.add("n", nan), FormatError);
  EXPECT_THROW(t.add(std::string(65535, 'x'), v), DuplicateIdError);
}

TEST(FeatureTableTest, RoundTripProperty) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> small(0, 6);
  std::uniform_int_distribution<std::uint32_t> bits;
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint32_t dim = small(rng);
    FeatureTable t(dim);
    const int n = small(rng);
    for (int i = 0; i < n; ++i) {
      std::vector<float> vec(dim);
      for (auto& x : vec) {
        do {
          x = std::bit_cast<float>(bits(rng));
        } while (!std::isfinite(x));
      }
      t.add("id" + std::to_string(i) + std::string(small(rng), '_'), vec);
    }
    const std::string bytes = encode_feature_table(t);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    ASSERT_EQ(decode_feature_table({p, bytes.size()}), t);
  }
}

}  // namespace
}  // namespace trueset
