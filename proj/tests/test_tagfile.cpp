#include <gtest/gtest.h>

#include <sstream>

#include "qtele/errors.hpp"
#include "qtele/rng.hpp"
#include "qtele/tagfile.hpp"

using namespace qtele;

namespace {

TagFile sample_file() {
  TagFile f;
  f.header.channel_names = {{1, "bsm_a"}, {2, "bsm_b"}, {3, "signal"}};
  f.header.metadata = R"({"scenario":"local","seed":1})";
  Rng rng(1);
  std::int64_t t = 0;
  for (int i = 0; i < 5000; ++i) {
    t += static_cast<std::int64_t>(uniform01(rng) * 1e6);
    f.tags.push_back({static_cast<std::uint8_t>(1 + i % 3), t});
  }
  f.tags.push_back({3, std::int64_t{1} << 52});  // well past 32 bits
  return f;
}

std::string serialized(const TagFile& f) {
  std::ostringstream out(std::ios::binary);
  write_tag_file(out, f);
  return out.str();
}

}  // namespace

TEST(TagFile, BinaryRoundTrip) {
  const TagFile f = sample_file();
  std::istringstream in(serialized(f), std::ios::binary);
  const TagFile g = read_tag_file(in);
  EXPECT_EQ(g.header.version, kTagFileVersion);
  EXPECT_EQ(g.header.channel_names, f.header.channel_names);
  EXPECT_EQ(g.header.metadata, f.header.metadata);
  EXPECT_EQ(g.tags, f.tags);
}

TEST(TagFile, RecordsAreLittleEndianNineBytes) {
  TagFile f;
  f.tags = {{3, 0x0102030405060708}};
  const std::string bytes = serialized(f);
  ASSERT_GE(bytes.size(), 9u);
  const std::string rec = bytes.substr(bytes.size() - 9);
  EXPECT_EQ(static_cast<unsigned char>(rec[0]), 3);
  EXPECT_EQ(static_cast<unsigned char>(rec[1]), 0x08);
  EXPECT_EQ(static_cast<unsigned char>(rec[8]), 0x01);
  EXPECT_EQ(bytes.substr(0, 6), "QTTAGS");
}

TEST(TagFile, FileRoundTripOnDisk) {
  const auto path = std::filesystem::temp_directory_path() / "qtele_tagfile_test.qtt";
  const TagFile f = sample_file();
  write_tag_file(path, f);
  EXPECT_EQ(read_tag_file(path).tags, f.tags);
  std::filesystem::remove(path);
}

TEST(TagFile, RejectsBadMagic) {
  std::string bytes = serialized(sample_file());
  bytes[0] = 'X';
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_THROW(read_tag_file(in), Error);
}

TEST(TagFile, RejectsUnknownVersion) {
  std::string bytes = serialized(sample_file());
  bytes[8] = 9;
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_THROW(read_tag_file(in), Error);
}

TEST(TagFile, RejectsTruncation) {
  const std::string bytes = serialized(sample_file());
  for (std::size_t cut : {std::size_t{4}, std::size_t{20}, bytes.size() - 1, bytes.size() - 9 - 3}) {
    std::istringstream in(bytes.substr(0, cut), std::ios::binary);
    EXPECT_THROW(read_tag_file(in), Error) << cut;
  }
}

TEST(TagText, RoundTripWithComments) {
  const TagFile f = sample_file();
  std::stringstream s;
  s << "# channel,t_ps\n";
  write_tag_text(s, f.tags);
  EXPECT_EQ(read_tag_text(s), f.tags);
  std::istringstream bad("1,abc\n");
  EXPECT_THROW(read_tag_text(bad), Error);
}
