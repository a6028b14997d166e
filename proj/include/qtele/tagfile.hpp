#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qtele/timetag.hpp"

namespace qtele {

// Binary layout (all integers little-endian):
//   "QTTAGS\0\0"                 8-byte magic
//   u32 version                  currently 1
//   u32 channel_count, then per channel: u8 id, u16 name_len, name bytes
//   u32 metadata_len, metadata bytes (free-form, JSON by convention)
//   u64 record_count, then records of (u8 channel, u64 t_ps)
struct TagFileHeader {
  std::uint32_t version = 1;
  std::map<std::uint8_t, std::string> channel_names;
  std::string metadata;
};

struct TagFile {
  TagFileHeader header;
  std::vector<TimeTag> tags;
};

inline constexpr std::uint32_t kTagFileVersion = 1;

void write_tag_file(std::ostream& out, const TagFile& file);
void write_tag_file(const std::filesystem::path& path, const TagFile& file);
// Throws Error on bad magic, unsupported version, truncation, or negative times.
TagFile read_tag_file(std::istream& in);
TagFile read_tag_file(const std::filesystem::path& path);

// Debug text format: one "channel,t_ps" per line; '#' starts a comment line.
void write_tag_text(std::ostream& out, const std::vector<TimeTag>& tags);
std::vector<TimeTag> read_tag_text(std::istream& in);

}  // namespace qtele
