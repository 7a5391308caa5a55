#include "dnls/partitions.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "dnls/errors.hpp"

namespace dnls {

Partition::Partition(std::vector<std::vector<int>> g) : groups(std::move(g)) {
  if (!valid()) throw DomainError("invalid partition " + to_string());
}

int Partition::n() const {
  int c = 0;
  for (const auto& g : groups) c += static_cast<int>(g.size());
  return c;
}

bool Partition::valid() const {
  if (groups.empty()) return false;
  const int total = n();
  std::vector<bool> seen(total + 1, false);
  for (const auto& g : groups) {
    if (g.empty()) return false;
    for (int i : g) {
      if (i < 1 || i > total || seen[i]) return false;
      seen[i] = true;
    }
  }
  return true;
}

std::string Partition::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t j = 0; j < groups.size(); ++j) {
    if (j) os << ';';
    os << '(';
    for (std::size_t i = 0; i < groups[j].size(); ++i) {
      if (i) os << ',';
      os << groups[j][i];
    }
    os << ')';
  }
  os << ']';
  return os.str();
}

namespace {

void compositions(int remaining, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  for (int s = 1; s <= remaining; ++s) {
    cur.push_back(s);
    compositions(remaining - s, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Partition> enumerate_partitions(int n) {
  if (n < 1 || n > kMaxPartitionOrder)
    throw DomainError("partition order must lie in 1.." + std::to_string(kMaxPartitionOrder));
  std::vector<std::vector<int>> comps;
  std::vector<int> cur;
  compositions(n, cur, comps);

  std::vector<Partition> out;
  std::vector<int> perm(n);
  for (const auto& sizes : comps) {
    std::iota(perm.begin(), perm.end(), 1);
    do {
      Partition tau;
      std::size_t pos = 0;
      for (int s : sizes) {
        tau.groups.emplace_back(perm.begin() + pos, perm.begin() + pos + s);
        pos += s;
      }
      out.push_back(std::move(tau));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

std::vector<Signal> enumerate_signals(int p) {
  if (p < 0 || p > kMaxSignalLength)
    throw DomainError("signal length must lie in 0.." + std::to_string(kMaxSignalLength));
  std::vector<Signal> out;
  out.reserve(std::size_t{1} << p);
  for (std::uint32_t c = 0; c < (1u << p); ++c) {
    Signal s(p);
    for (int j = 0; j < p; ++j) s[j] = static_cast<std::uint8_t>((c >> (p - 1 - j)) & 1u);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Partition> extend_partition(const Partition& tau) {
  if (!tau.valid()) throw DomainError("invalid partition " + tau.to_string());
  const int next = tau.n() + 1;
  std::vector<Partition> out;
  for (std::size_t j = 0; j < tau.groups.size(); ++j) {
    Partition t = tau;
    t.groups[j].push_back(next);
    out.push_back(std::move(t));
  }
  return out;
}

std::string signal_to_string(const Signal& s) {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j) os << ',';
    os << static_cast<int>(s[j]);
  }
  os << ')';
  return os.str();
}

}  // namespace dnls
