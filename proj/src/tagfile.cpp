#include "qtele/tagfile.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "qtele/errors.hpp"

namespace qtele {

namespace {

constexpr std::array<char, 8> kMagic = {'Q', 'T', 'T', 'A', 'G', 'S', '\0', '\0'};

template <typename T>
void put_le(std::ostream& out, T v) {
  std::array<char, sizeof(T)> b;
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF);
  out.write(b.data(), b.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) throw Error("tag file is truncated");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<T>(v);
}

std::string get_bytes(std::istream& in, std::size_t n) {
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) throw Error("tag file is truncated");
  return s;
}

}  // namespace

void write_tag_file(std::ostream& out, const TagFile& file) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kTagFileVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(file.header.channel_names.size()));
  for (const auto& [id, name] : file.header.channel_names) {
    put_le<std::uint8_t>(out, id);
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(file.header.metadata.size()));
  out.write(file.header.metadata.data(), static_cast<std::streamsize>(file.header.metadata.size()));
  put_le<std::uint64_t>(out, file.tags.size());
  for (const TimeTag& t : file.tags) {
    if (t.t_ps < 0) throw DomainError("negative timestamps cannot be stored");
    put_le<std::uint8_t>(out, t.channel);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(t.t_ps));
  }
  if (!out) throw Error("failed writing tag file");
}

void write_tag_file(const std::filesystem::path& path, const TagFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_tag_file(out, file);
}

TagFile read_tag_file(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw Error("not a tag file (bad magic)");
  TagFile f;
  f.header.version = get_le<std::uint32_t>(in);
  if (f.header.version != kTagFileVersion)
    throw Error("unsupported tag file version " + std::to_string(f.header.version));
  const auto n_channels = get_le<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n_channels; ++i) {
    const auto id = get_le<std::uint8_t>(in);
    const auto len = get_le<std::uint16_t>(in);
    f.header.channel_names[id] = get_bytes(in, len);
  }
  f.header.metadata = get_bytes(in, get_le<std::uint32_t>(in));
  const auto n = get_le<std::uint64_t>(in);
  f.tags.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 24)));
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto ch = get_le<std::uint8_t>(in);
    const auto t = get_le<std::uint64_t>(in);
    if (t > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      throw Error("tag timestamp out of range");
    f.tags.push_back({ch, static_cast<std::int64_t>(t)});
  }
  return f;
}

TagFile read_tag_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_tag_file(in);
}

void write_tag_text(std::ostream& out, const std::vector<TimeTag>& tags) {
  out << "# channel,t_ps\n";
  for (const TimeTag& t : tags) out << static_cast<int>(t.channel) << ',' << t.t_ps << '\n';
}

std::vector<TimeTag> read_tag_text(std::istream& in) {
  std::vector<TimeTag> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    int ch = -1;
    long long t = -1;
    const char* b = line.data();
    const char* e = b + line.size();
    if (comma == std::string::npos || std::from_chars(b, b + comma, ch).ec != std::errc{} ||
        std::from_chars(b + comma + 1, e, t).ec != std::errc{} || ch < 0 || ch > 255 || t < 0)
      throw Error("malformed tag line " + std::to_string(lineno) + ": '" + line + "'");
    out.push_back({static_cast<std::uint8_t>(ch), static_cast<std::int64_t>(t)});
  }
  return out;
}

}  // namespace qtele
