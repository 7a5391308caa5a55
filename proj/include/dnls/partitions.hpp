#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dnls {

// Ordered partition of {1..n} into ordered nonempty groups. Two partitions are equal only when
// both the group order and the order inside every group agree.
struct Partition {
  std::vector<std::vector<int>> groups;

  Partition() = default;
  explicit Partition(std::vector<std::vector<int>> g);

  int n() const;
  // Number of groups.
  int size() const { return static_cast<int>(groups.size()); }
  bool valid() const;
  // Bracket notation, e.g. [(1,3);(2);(4)].
  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;
};

// One conjugation bit per group; 1 means the factor enters conjugated.
using Signal = std::vector<std::uint8_t>;

constexpr int kMaxPartitionOrder = 8;
constexpr int kMaxSignalLength = 16;

// All partitions of {1..n}, 1 <= n <= 8. Sorted by the tuple of group sizes, then by the
// flattened contents; the count is n! 2^{n-1}.
std::vector<Partition> enumerate_partitions(int n);

// All 2^p signals of length p in binary counting order, the first entry being the most
// significant bit.
std::vector<Signal> enumerate_signals(int p);

// The ||tau|| partitions of {1..n+1} obtained by appending n+1 to the end of one group.
std::vector<Partition> extend_partition(const Partition& tau);

std::string signal_to_string(const Signal& s);

}  // namespace dnls
