#include "n2048/network_io.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <cstring>

namespace n2048 {

static_assert(std::endian::native == std::endian::little, "file formats assume a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic = {'N', 'T', 'N', 'W'};
constexpr std::uint16_t kNoParent = 0xFFFF;

std::uint32_t crc_update(std::uint32_t crc, const void* data, std::size_t size) {
  const auto* p = static_cast<const Bytef*>(data);
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1U << 30));
    crc = static_cast<std::uint32_t>(::crc32(crc, p, chunk));
    p += chunk;
    size -= chunk;
  }
  return crc;
}

}  // namespace

BinaryWriter::BinaryWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), crc_(static_cast<std::uint32_t>(::crc32(0, nullptr, 0))) {
  if (!out_) throw IoError("cannot open for writing: " + path.string());
}

void BinaryWriter::bytes(const void* data, std::size_t size) {
  crc_ = crc_update(crc_, data, size);
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out_) throw IoError("write failed: " + path_.string());
}

void BinaryWriter::string(const std::string& s) {
  put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
  bytes(s.data(), s.size());
}

void BinaryWriter::finish() {
  const std::uint32_t crc = crc_;
  out_.write(reinterpret_cast<const char*>(&crc), sizeof crc);
  out_.close();
  if (!out_) throw IoError("write failed: " + path_.string());
}

BinaryReader::BinaryReader(const std::filesystem::path& path)
    : in_(path, std::ios::binary), crc_(static_cast<std::uint32_t>(::crc32(0, nullptr, 0))) {
  if (!in_) throw IoError("cannot open for reading: " + path.string());
}

void BinaryReader::bytes(void* data, std::size_t size) {
  in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(in_.gcount()) != size) throw FormatError("truncated file");
  crc_ = crc_update(crc_, data, size);
}

std::string BinaryReader::string(std::size_t max_size) {
  const auto n = get<std::uint32_t>();
  if (n > max_size) throw FormatError("string field too long");
  std::string s(n, '\0');
  bytes(s.data(), n);
  return s;
}

void BinaryReader::finish() {
  const std::uint32_t expected = crc_;
  std::uint32_t stored = 0;
  in_.read(reinterpret_cast<char*>(&stored), sizeof stored);
  if (in_.gcount() != sizeof stored) throw FormatError("truncated file: missing CRC");
  if (stored != expected) throw FormatError("CRC mismatch");
  if (in_.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after CRC");
}

void write_network_body(BinaryWriter& w, const NTupleNetwork& network) {
  w.bytes(kMagic.data(), kMagic.size());
  w.put<std::uint32_t>(kNetworkFormatVersion);
  w.put<std::uint8_t>(16);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(network.stage_bits()));
  const auto& tuples = network.architecture().tuples;
  w.put<std::uint16_t>(static_cast<std::uint16_t>(tuples.size()));
  for (const auto& t : tuples) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(t.length()));
    w.bytes(t.cells.data(), t.cells.size());
    w.put<std::uint8_t>(t.redundant ? 1 : 0);
    w.put<std::uint16_t>(t.fold_parent.value_or(kNoParent));
  }
  for (std::size_t i = 0; i < tuples.size(); ++i) w.floats(network.table(i));
}

NTupleNetwork read_network_body(BinaryReader& r) {
  std::array<char, 4> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw FormatError("not a network file (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kNetworkFormatVersion) throw FormatError("unsupported network format version " + std::to_string(version));
  const auto c = r.get<std::uint8_t>();
  if (c != 16) throw FormatError("unsupported alphabet size");
  const auto g = r.get<std::uint8_t>();
  if (g > kMaxStageBits) throw FormatError("stage bits out of range");
  const auto m = r.get<std::uint16_t>();
  if (m == 0) throw FormatError("network has no tuples");
  Architecture arch;
  for (std::uint16_t i = 0; i < m; ++i) {
    TupleShape t;
    const auto n = r.get<std::uint8_t>();
    if (n == 0 || n > 8) throw FormatError("tuple length out of range");
    t.cells.resize(n);
    r.bytes(t.cells.data(), n);
    t.kind = std::to_string(n) + "-tuple";
    t.redundant = r.get<std::uint8_t>() != 0;
    const auto parent = r.get<std::uint16_t>();
    if (parent != kNoParent) t.fold_parent = parent;
    arch.tuples.push_back(std::move(t));
  }
  const auto stored_parents = arch.tuples;
  try {
    resolve_fold_parents(arch.tuples);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid tuple geometry: ") + e.what());
  }
  for (std::size_t i = 0; i < arch.tuples.size(); ++i) {
    if (arch.tuples[i].fold_parent != stored_parents[i].fold_parent) throw FormatError("fold parent mismatch");
  }
  if (auto name = identify_architecture(arch.tuples)) {
    const auto reg = architecture(*name);
    for (std::size_t i = 0; i < arch.tuples.size(); ++i) arch.tuples[i].kind = reg.tuples[i].kind;
    arch.name = *name;
  } else {
    arch.name = "custom";
  }
  NTupleNetwork net(std::move(arch), g);
  for (std::size_t i = 0; i < net.tuple_count(); ++i) r.floats(net.table(i));
  return net;
}

void save_network(const NTupleNetwork& network, const std::filesystem::path& path) {
  BinaryWriter w(path);
  write_network_body(w, network);
  w.finish();
}

NTupleNetwork load_network(const std::filesystem::path& path) {
  BinaryReader r(path);
  auto net = read_network_body(r);
  r.finish();
  return net;
}

}  // namespace n2048
