#include "dnls/io/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include <boost/crc.hpp>

#include "dnls/errors.hpp"
#include "dnls/io/report_io.hpp"

namespace dnls::io {

namespace {

constexpr char kMagic[4] = {'D', 'N', 'L', 'S'};

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
  return v;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

std::size_t header_size(int d) { return 4 + 2 + 1 + 4 * static_cast<std::size_t>(d) + 8 + 1; }

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const LatticeFunction& u, double time, std::uint8_t flags) {
  const BoxSpec& box = u.box();
  std::vector<std::uint8_t> out;
  out.reserve(header_size(box.d) + 4 + 16 * u.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le(out, kSnapshotVersion, 2);
  put_le(out, static_cast<std::uint64_t>(box.d), 1);
  for (int j = 0; j < box.d; ++j) put_le(out, static_cast<std::uint64_t>(box.M), 4);
  put_le(out, std::bit_cast<std::uint64_t>(time), 8);
  put_le(out, flags, 1);
  put_le(out, crc32(out), 4);
  for (cplx z : u.values()) {
    put_le(out, std::bit_cast<std::uint64_t>(z.real()), 8);
    put_le(out, std::bit_cast<std::uint64_t>(z.imag()), 8);
  }
  return out;
}

Snapshot decode_snapshot(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 7) throw FormatError("snapshot truncated inside the header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("snapshot magic bytes are not DNLS");
  const auto version = static_cast<std::uint16_t>(get_le(bytes, 4, 2));
  if (version != kSnapshotVersion) {
    std::ostringstream os;
    os << "unsupported snapshot version " << version << " (this reader handles version " << kSnapshotVersion << ")";
    throw FormatError(os.str());
  }
  const int d = static_cast<int>(bytes[6]);
  if (d < 1 || d > 3) throw FormatError("snapshot dimension must be 1, 2 or 3");
  const std::size_t hs = header_size(d);
  if (bytes.size() < hs + 4) throw FormatError("snapshot truncated inside the header");
  const auto stored = static_cast<std::uint32_t>(get_le(bytes, hs, 4));
  if (stored != crc32(bytes.first(hs))) throw FormatError("snapshot header checksum mismatch");

  int M = 0;
  for (int j = 0; j < d; ++j) {
    const auto mj = static_cast<std::int64_t>(get_le(bytes, 7 + 4 * static_cast<std::size_t>(j), 4));
    if (j == 0) M = static_cast<int>(mj);
    if (mj != M) throw FormatError("snapshot axes have different lengths; only cubic boxes are supported");
  }
  BoxSpec box{d, M};
  try {
    box.validate();
  } catch (const DomainError& e) {
    throw FormatError(std::string("snapshot box is invalid: ") + e.what());
  }
  const double time = std::bit_cast<double>(get_le(bytes, 7 + 4 * static_cast<std::size_t>(d), 8));
  const std::uint8_t flags = bytes[hs - 1];

  const std::size_t payload = 16 * box.sites();
  const std::size_t start = hs + 4;
  if (bytes.size() < start + payload) throw FormatError("snapshot payload truncated");
  if (bytes.size() > start + payload) throw FormatError("snapshot has trailing bytes after the payload");
  Field v(box.sites());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double re = std::bit_cast<double>(get_le(bytes, start + 16 * i, 8));
    const double im = std::bit_cast<double>(get_le(bytes, start + 16 * i + 8, 8));
    v[i] = cplx(re, im);
  }
  try {
    return Snapshot{LatticeFunction(box, std::move(v)), time, flags};
  } catch (const DomainError& e) {
    throw FormatError(std::string("snapshot payload rejected: ") + e.what());
  }
}

void snapshot_save(const LatticeFunction& u, double time, const std::filesystem::path& path, std::uint8_t flags) {
  const auto bytes = encode_snapshot(u, time, flags);
  atomic_write(path, std::string(bytes.begin(), bytes.end()));
}

Snapshot snapshot_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading snapshot " + path.string());
  try {
    return decode_snapshot(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

SnapshotWriter::SnapshotWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create snapshot directory " + dir_.string() + ": " + ec.message());
}

void SnapshotWriter::append(double t, const LatticeFunction& u) {
  std::ostringstream name;
  name << "snap_" << std::setw(6) << std::setfill('0') << count_ << ".dnls";
  snapshot_save(u, t, dir_ / name.str());
  ++count_;
}

}  // namespace dnls::io
