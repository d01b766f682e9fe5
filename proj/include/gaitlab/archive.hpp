#pragma once

// Self-describing binary archive shared by datasets and transforms:
//
//   magic "GAITARC\0" | u32 version | u64 header bytes | UTF-8 JSON header
//   | u64 value count | little-endian float64 values | u32 CRC-32
//
// The CRC covers every byte before it.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#include "json.hpp"

#include "gaitlab/error.hpp"

namespace gaitlab {

inline constexpr std::uint32_t kArchiveVersion = 1;
inline constexpr char kArchiveMagic[8] = {'G', 'A', 'I', 'T', 'A', 'R', 'C', '\0'};

struct Archive {
  nlohmann::json header;
  std::vector<double> values;
};

namespace detail {

template <typename T>
void put_le(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::string_view in, std::size_t& pos) {
  if (in.size() - pos < sizeof(T)) throw IoError(IoError::Kind::malformed, "archive ends early");
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

inline std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t n = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace detail

inline std::string encode_archive(const Archive& archive) {
  std::string out(kArchiveMagic, sizeof kArchiveMagic);
  detail::put_le<std::uint32_t>(out, kArchiveVersion);
  const std::string header = archive.header.dump();
  detail::put_le<std::uint64_t>(out, header.size());
  out += header;
  detail::put_le<std::uint64_t>(out, archive.values.size());
  out.reserve(out.size() + 8 * archive.values.size() + 4);
  for (double v : archive.values) detail::put_le<double>(out, v);
  detail::put_le<std::uint32_t>(out, detail::crc32_of(out));
  return out;
}

inline Archive decode_archive(std::string_view bytes) {
  if (bytes.size() < sizeof kArchiveMagic + 4 + 8 + 8 + 4)
    throw IoError(IoError::Kind::checksum, "archive is truncated");
  std::size_t crc_pos = bytes.size() - 4;
  std::uint32_t stored = detail::get_le<std::uint32_t>(bytes, crc_pos);
  if (stored != detail::crc32_of(bytes.substr(0, bytes.size() - 4)))
    throw IoError(IoError::Kind::checksum, "archive checksum mismatch (truncated or corrupted file)");
  if (std::memcmp(bytes.data(), kArchiveMagic, sizeof kArchiveMagic) != 0)
    throw IoError(IoError::Kind::malformed, "not a gaitlab archive");
  std::size_t pos = sizeof kArchiveMagic;
  auto version = detail::get_le<std::uint32_t>(bytes, pos);
  if (version != kArchiveVersion)
    throw IoError(IoError::Kind::version, "archive version " + std::to_string(version) + " is not supported (expected " +
                                              std::to_string(kArchiveVersion) + ")");
  auto header_size = detail::get_le<std::uint64_t>(bytes, pos);
  if (header_size > bytes.size() - pos) throw IoError(IoError::Kind::malformed, "archive header overruns file");
  Archive archive;
  try {
    archive.header = nlohmann::json::parse(bytes.substr(pos, header_size));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(IoError::Kind::malformed, std::string("archive header is not valid JSON: ") + e.what());
  }
  pos += header_size;
  auto count = detail::get_le<std::uint64_t>(bytes, pos);
  if (count != (bytes.size() - 4 - pos) / 8 || (bytes.size() - 4 - pos) % 8 != 0)
    throw IoError(IoError::Kind::malformed, "archive value block has the wrong size");
  archive.values.resize(count);
  for (auto& v : archive.values) v = detail::get_le<double>(bytes, pos);
  return archive;
}

inline void write_archive(const std::filesystem::path& path, const Archive& archive) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoError::Kind::open, "cannot write " + path.string());
  const std::string bytes = encode_archive(archive);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(IoError::Kind::open, "write failed for " + path.string());
}

inline Archive read_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoError::Kind::open, "cannot read " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_archive(bytes);
}

}  // namespace gaitlab
