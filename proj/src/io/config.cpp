#include "dnls/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dnls/errors.hpp"

namespace dnls::io {

namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& kind_table() {
  static const std::vector<std::pair<ExperimentKind, std::string>> t = {
      {ExperimentKind::Evolve, "evolve"},     {ExperimentKind::Conserve, "conserve"},
      {ExperimentKind::Decay, "decay"},       {ExperimentKind::Frechet, "frechet"},
      {ExperimentKind::Taylor, "taylor"},     {ExperimentKind::Wave, "wave"},
      {ExperimentKind::Soliton, "soliton"},   {ExperimentKind::Longtime, "longtime"},
      {ExperimentKind::Partitions, "partitions"}, {ExperimentKind::Probe, "probe"}};
  return t;
}

using VT = ValueType;

std::vector<KeySpec> problem_keys(bool need_pmu, bool data) {
  std::vector<KeySpec> k{{"d", VT::Int, true}, {"M", VT::Int, true}};
  if (need_pmu) {
    k.push_back({"p", VT::Real, true});
    k.push_back({"mu", VT::Int, true});
  }
  if (data) {
    k.push_back({"data", VT::String, true});
    k.push_back({"width", VT::Real, false});
    k.push_back({"amplitude", VT::Real, false});
  }
  k.push_back({"seed", VT::UInt64, false});
  return k;
}

std::vector<KeySpec> time_keys() { return {{"T", VT::Real, true}, {"dt", VT::Real, true}, {"stride", VT::Int, false}}; }

std::vector<KeySpec> output_keys(bool snapshots) {
  std::vector<KeySpec> k{{"directory", VT::String, false}, {"formats", VT::String, false}};
  if (snapshots) k.push_back({"snapshots", VT::Bool, false});
  return k;
}

Schema build_schema(ExperimentKind kind) {
  Schema s;
  s["experiment"] = {{"kind", VT::String, false}};
  switch (kind) {
    case ExperimentKind::Evolve:
      s["problem"] = problem_keys(true, true);
      s["time"] = time_keys();
      s["output"] = output_keys(true);
      break;
    case ExperimentKind::Conserve:
      s["problem"] = problem_keys(true, true);
      s["time"] = time_keys();
      s["output"] = output_keys(false);
      break;
    case ExperimentKind::Decay:
      s["problem"] = problem_keys(false, true);
      s["decay"] = {{"t_min", VT::Real, true},
                    {"t_max", VT::Real, true},
                    {"samples", VT::Int, true},
                    {"spacing", VT::String, false}};
      s["output"] = output_keys(false);
      break;
    case ExperimentKind::Frechet:
      s["problem"] = problem_keys(true, true);
      s["time"] = time_keys();
      s["frechet"] = {{"order", VT::Int, true}, {"h", VT::RealList, true}, {"direction_width", VT::Real, false}};
      s["output"] = output_keys(false);
      break;
    case ExperimentKind::Taylor:
      s["problem"] = problem_keys(true, true);
      s["time"] = time_keys();
      s["taylor"] = {{"lambda", VT::Real, true}, {"terms", VT::Int, true}, {"eps", VT::RealList, true}};
      s["output"] = output_keys(false);
      break;
    case ExperimentKind::Wave:
      s["problem"] = problem_keys(true, true);
      s["time"] = {{"dt", VT::Real, true}};
      s["wave"] = {{"T_split", VT::Real, true},      {"eps_target", VT::Real, true},
                   {"T_max", VT::Real, false},       {"tol", VT::Real, false},
                   {"picard_tol", VT::Real, false},  {"max_iter", VT::Int, false},
                   {"node_dt", VT::Real, false},     {"check_dt", VT::Real, false},
                   {"auto_tune", VT::Bool, false},   {"T_split_cap", VT::Real, false},
                   {"residual_spacing", VT::Real, false}};
      s["output"] = output_keys(false);
      break;
    case ExperimentKind::Soliton:
      s["problem"] = problem_keys(true, false);
      s["time"] = time_keys();
      s["soliton"] = {{"omega", VT::Real, true}, {"tol", VT::Real, false}, {"scale", VT::Real, false}};
      s["output"] = output_keys(false);
      break;
    case ExperimentKind::Longtime:
      s["problem"] = problem_keys(true, true);
      s["time"] = time_keys();
      s["longtime"] = {{"template", VT::String, true}, {"ladder", VT::RealList, true}, {"gamma", VT::Real, false},
                       {"ceiling", VT::Real, false},   {"window", VT::Real, false},      {"tol", VT::Real, false},
                       {"max_outer", VT::Int, false}};
      s["output"] = output_keys(false);
      break;
    case ExperimentKind::Partitions:
      s["partitions"] = {{"n", VT::Int, true}, {"list", VT::Bool, false}};
      s["output"] = output_keys(false);
      break;
    case ExperimentKind::Probe:
      s["problem"] = problem_keys(false, false);
      s["probe"] = {{"q", VT::Real, true},
                    {"r", VT::Real, true},
                    {"ensemble", VT::Int, true},
                    {"window", VT::Real, true},
                    {"sample_dt", VT::Real, true},
                    {"width", VT::Real, false}};
      s["output"] = output_keys(false);
      break;
  }
  return s;
}

template <class T>
bool parse_integral(const std::string& s, T& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e && !s.empty();
}

bool parse_real(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e && b != e && !std::isnan(out);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

bool parse_list(const std::string& s, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double x = 0.0;
    if (!parse_real(trim(item), x)) return false;
    out.push_back(x);
  }
  return !out.empty() && s.back() != ',';
}

const char* type_name(ValueType t) {
  switch (t) {
    case VT::Int: return "an integer";
    case VT::UInt64: return "an unsigned 64-bit integer";
    case VT::Real: return "a real number";
    case VT::Bool: return "true or false";
    case VT::String: return "a string";
    case VT::RealList: return "a comma-separated list of reals";
  }
  return "a value";
}

bool type_ok(ValueType t, const std::string& v) {
  switch (t) {
    case VT::Int: {
      int x;
      return parse_integral(v, x);
    }
    case VT::UInt64: {
      std::uint64_t x;
      return parse_integral(v, x);
    }
    case VT::Real: {
      double x;
      return parse_real(v, x);
    }
    case VT::Bool: return v == "true" || v == "false";
    case VT::String: return !v.empty();
    case VT::RealList: {
      std::vector<double> x;
      return parse_list(v, x);
    }
  }
  return false;
}

}  // namespace

ExperimentKind parse_kind(const std::string& name) {
  for (const auto& [k, n] : kind_table())
    if (n == name) return k;
  throw ConfigError("unknown experiment kind '" + name + "'");
}

std::string kind_name(ExperimentKind kind) {
  for (const auto& [k, n] : kind_table())
    if (k == kind) return n;
  return "unknown";
}

const std::vector<std::string>& kind_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& kn : kind_table()) v.push_back(kn.second);
    return v;
  }();
  return names;
}

const Schema& schema_for(ExperimentKind kind) {
  static const std::map<ExperimentKind, Schema> all = [] {
    std::map<ExperimentKind, Schema> m;
    for (const auto& kn : kind_table()) m[kn.first] = build_schema(kn.first);
    return m;
  }();
  return all.at(kind);
}

ExperimentConfig ExperimentConfig::parse(ExperimentKind kind, const std::string& text, const std::string& origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream os;
    os << origin << ":" << e.line() << ": " << e.message();
    throw ConfigError(os.str());
  }

  ExperimentConfig cfg;
  cfg.kind_ = kind;
  cfg.origin_ = origin;
  const Schema& schema = schema_for(kind);
  const std::string where = origin + ": ";
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(where + "key '" + section + "' appears outside any section");
    auto sit = schema.find(section);
    if (sit == schema.end())
      throw ConfigError(where + "section [" + section + "] is not allowed for kind " + kind_name(kind));
    auto& dst = cfg.values_[section];
    for (const auto& [key, node] : body) {
      if (!node.empty()) throw ConfigError(where + "nested keys are not supported ([" + section + "] " + key + ")");
      auto kit = std::find_if(sit->second.begin(), sit->second.end(), [&](const KeySpec& k) { return k.name == key; });
      if (kit == sit->second.end())
        throw ConfigError(where + "unknown key '" + key + "' in section [" + section + "]");
      const std::string v = trim(node.data());
      if (!type_ok(kit->type, v))
        throw ConfigError(where + "[" + section + "] " + key + " = '" + v + "' is not " + type_name(kit->type));
      dst[key] = v;
    }
  }
  for (const auto& [section, keys] : schema)
    for (const auto& k : keys)
      if (k.required && !cfg.has(section, k.name))
        throw ConfigError(where + "missing required key '" + k.name + "' in section [" + section + "]");

  if (cfg.has("experiment", "kind") && cfg.get_string("experiment", "kind") != kind_name(kind))
    throw ConfigError(where + "[experiment] kind = " + cfg.get_string("experiment", "kind") +
                      " does not match the requested kind " + kind_name(kind));

  if (cfg.has("problem", "data")) {
    const std::string data = cfg.get_string("problem", "data");
    std::set<std::string> needed, allowed;
    if (data == "gaussian" || data == "random") {
      needed = {"width", "amplitude"};
      allowed = needed;
    } else if (data == "delta") {
      allowed = {"amplitude"};
    } else if (data != "zero") {
      throw ConfigError(where + "[problem] data = '" + data + "' is not one of gaussian, delta, random, zero");
    }
    for (const auto& k : needed)
      if (!cfg.has("problem", k)) throw ConfigError(where + "data = " + data + " requires [problem] " + k);
    for (const auto& k : {"width", "amplitude"})
      if (cfg.has("problem", k) && !allowed.count(k))
        throw ConfigError(where + "[problem] " + k + " does not apply to data = " + data);
  }
  if (cfg.has("output", "formats")) {
    std::stringstream ss(cfg.get_string("output", "formats"));
    std::string f;
    while (std::getline(ss, f, ','))
      if (trim(f) != "csv" && trim(f) != "json")
        throw ConfigError(where + "[output] formats accepts csv and json only");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(ExperimentKind kind, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(kind, ss.str(), path.string());
}

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  auto it = values_.find(section);
  return it != values_.end() && it->second.count(key) > 0;
}

const std::string& ExperimentConfig::raw(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw ConfigError(origin_ + ": missing key '" + key + "' in section [" + section + "]");
  return values_.at(section).at(key);
}

int ExperimentConfig::get_int(const std::string& section, const std::string& key) const {
  int x = 0;
  parse_integral(raw(section, key), x);
  return x;
}

std::uint64_t ExperimentConfig::get_u64(const std::string& section, const std::string& key) const {
  std::uint64_t x = 0;
  parse_integral(raw(section, key), x);
  return x;
}

double ExperimentConfig::get_real(const std::string& section, const std::string& key) const {
  double x = 0.0;
  parse_real(raw(section, key), x);
  return x;
}

bool ExperimentConfig::get_bool(const std::string& section, const std::string& key) const {
  return raw(section, key) == "true";
}

std::string ExperimentConfig::get_string(const std::string& section, const std::string& key) const {
  return raw(section, key);
}

std::vector<double> ExperimentConfig::get_list(const std::string& section, const std::string& key) const {
  std::vector<double> v;
  parse_list(raw(section, key), v);
  return v;
}

int ExperimentConfig::int_or(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

double ExperimentConfig::real_or(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? get_real(section, key) : fallback;
}

bool ExperimentConfig::bool_or(const std::string& section, const std::string& key, bool fallback) const {
  return has(section, key) ? get_bool(section, key) : fallback;
}

std::string ExperimentConfig::string_or(const std::string& section, const std::string& key,
                                        const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

BoxSpec ExperimentConfig::box() const {
  BoxSpec box{get_int("problem", "d"), get_int("problem", "M")};
  try {
    box.validate();
  } catch (const DomainError& e) {
    throw ConfigError(origin_ + ": " + e.what());
  }
  return box;
}

LatticeFunction ExperimentConfig::initial_data(std::optional<std::uint64_t> seed) const {
  const BoxSpec b = box();
  const std::string data = get_string("problem", "data");
  if (data == "zero") return make_zero(b);
  if (data == "delta") {
    const std::array<int, 3> origin{0, 0, 0};
    return make_delta(b, std::span<const int>(origin.data(), static_cast<std::size_t>(b.d))) *
           cplx(real_or("problem", "amplitude", 1.0), 0.0);
  }
  const double width = get_real("problem", "width");
  const double amplitude = get_real("problem", "amplitude");
  if (!(width > 0.0)) throw ConfigError(origin_ + ": [problem] width must be positive");
  if (data == "gaussian") return make_gaussian(b, width, cplx(amplitude, 0.0));
  if (!seed && !has("problem", "seed"))
    throw ConfigError(origin_ + ": data = random requires [problem] seed or --seed");
  const std::uint64_t s = seed ? *seed : get_u64("problem", "seed");
  return make_localized_random(b, s, 0, width) * cplx(amplitude, 0.0);
}

}  // namespace dnls::io
