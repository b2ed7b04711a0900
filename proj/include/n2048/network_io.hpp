#pragma once

// Little-endian binary I/O with a running CRC32, and the network file format:
//
//   "NTNW" | version u32 | c u8 | g u8 | tuple count u16
//   per tuple: n u8 | n cells u8 | redundant u8 | fold parent u16 (0xFFFF = none)
//   per tuple, per stage: 16^n float32 weights
//   CRC32 of everything above, u32

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>

#include "n2048/errors.hpp"
#include "n2048/network.hpp"

namespace n2048 {

inline constexpr std::uint32_t kNetworkFormatVersion = 1;

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path);
  void bytes(const void* data, std::size_t size);
  template <class T>
  void put(T value) {
    bytes(&value, sizeof(T));
  }
  void floats(std::span<const float> values) { bytes(values.data(), values.size_bytes()); }
  void string(const std::string& s);
  // Appends the CRC of all bytes written so far and closes the file.
  void finish();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::uint32_t crc_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path);
  void bytes(void* data, std::size_t size);
  template <class T>
  T get() {
    T value;
    bytes(&value, sizeof(T));
    return value;
  }
  void floats(std::span<float> values) { bytes(values.data(), values.size_bytes()); }
  std::string string(std::size_t max_size = 1 << 24);
  // Reads the trailing CRC and checks it and that the file ends there.
  void finish();

 private:
  std::ifstream in_;
  std::uint32_t crc_;
};

void write_network_body(BinaryWriter& w, const NTupleNetwork& network);
NTupleNetwork read_network_body(BinaryReader& r);

void save_network(const NTupleNetwork& network, const std::filesystem::path& path);
// Throws FormatError on bad magic, version, truncation or CRC mismatch and
// IoError if the file cannot be opened.
NTupleNetwork load_network(const std::filesystem::path& path);

}  // namespace n2048
