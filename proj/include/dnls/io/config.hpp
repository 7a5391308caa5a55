#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dnls/lattice.hpp"

namespace dnls::io {

enum class ExperimentKind { Evolve, Conserve, Decay, Frechet, Taylor, Wave, Soliton, Longtime, Partitions, Probe };

ExperimentKind parse_kind(const std::string& name);
std::string kind_name(ExperimentKind kind);
const std::vector<std::string>& kind_names();

enum class ValueType { Int, UInt64, Real, Bool, String, RealList };

struct KeySpec {
  std::string name;
  ValueType type;
  bool required;
};

// Allowed sections and keys for one experiment kind. Sections not listed are rejected.
using Schema = std::map<std::string, std::vector<KeySpec>>;
const Schema& schema_for(ExperimentKind kind);

/// Sectioned key = value configuration, validated against the schema of its kind on load.
///
/// Values are kept as text and converted by the typed accessors. Every key was type-checked
/// during validation, so accessor conversions of present keys cannot fail.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(ExperimentKind kind, const std::string& text, const std::string& origin = "<config>");
  static ExperimentConfig load(ExperimentKind kind, const std::filesystem::path& path);

  ExperimentKind kind() const { return kind_; }
  bool has(const std::string& section, const std::string& key) const;

  int get_int(const std::string& section, const std::string& key) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key) const;
  double get_real(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::vector<double> get_list(const std::string& section, const std::string& key) const;

  int int_or(const std::string& section, const std::string& key, int fallback) const;
  double real_or(const std::string& section, const std::string& key, double fallback) const;
  bool bool_or(const std::string& section, const std::string& key, bool fallback) const;
  std::string string_or(const std::string& section, const std::string& key, const std::string& fallback) const;

  // [problem] d and M.
  BoxSpec box() const;
  // [problem] data with its parameters; `seed` overrides [problem] seed when given.
  LatticeFunction initial_data(std::optional<std::uint64_t> seed = {}) const;

 private:
  ExperimentKind kind_ = ExperimentKind::Evolve;
  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> values_;
  const std::string& raw(const std::string& section, const std::string& key) const;
};

}  // namespace dnls::io
