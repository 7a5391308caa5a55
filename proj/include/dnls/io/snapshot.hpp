#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/trajectory.hpp"

namespace dnls::io {

inline constexpr std::uint16_t kSnapshotVersion = 1;

/// Binary snapshot layout, all integers and floats little-endian:
///   "DNLS" | version u16 | d u8 | M u32 per axis | time f64 | flags u8 | CRC32 of the preceding bytes u32
/// followed by M^d sites in row-major order, each as real f64 then imaginary f64.
struct Snapshot {
  LatticeFunction u{BoxSpec{1, 4}};
  double time = 0.0;
  std::uint8_t flags = 0;
};

std::vector<std::uint8_t> encode_snapshot(const LatticeFunction& u, double time, std::uint8_t flags = 0);
// Throws FormatError on bad magic, unsupported version, checksum mismatch, truncation or trailing bytes.
Snapshot decode_snapshot(std::span<const std::uint8_t> bytes);

// Atomic write (temporary file plus rename).
void snapshot_save(const LatticeFunction& u, double time, const std::filesystem::path& path, std::uint8_t flags = 0);
Snapshot snapshot_load(const std::filesystem::path& path);

// Writes snap_<index>.dnls files into a directory as a solver runs.
class SnapshotWriter : public SnapshotSink {
 public:
  explicit SnapshotWriter(std::filesystem::path dir);
  void append(double t, const LatticeFunction& u) override;
  std::size_t written() const { return count_; }
  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::size_t count_ = 0;
};

}  // namespace dnls::io
