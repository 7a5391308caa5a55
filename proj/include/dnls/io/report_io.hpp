#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dnls/diagnostics.hpp"
#include "dnls/evolution.hpp"
#include "dnls/frechet.hpp"
#include "dnls/scattering.hpp"

namespace dnls::io {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// "%.17g"; non-finite values print as inf, -inf, nan.
std::string format_number(double x);

// ',' delimiter, LF line endings, header line always present.
std::string to_csv(const CsvTable& table);
// Doubles are written with 17 significant digits and non-finite doubles as null.
std::string to_json_text(const Json& j);

// Writes to a sibling temporary file, then renames over `path`. Throws IoError naming the path.
void atomic_write(const std::filesystem::path& path, const std::string& contents);
void emit_csv(const CsvTable& table, const std::filesystem::path& path);
void emit_json(const Json& j, const std::filesystem::path& path);

// Columns t, sup_norm, log_t, log_sup.
CsvTable decay_table(const DecayFitReport& r);
// Columns t, mass, energy, energy_partial_form, conserved_energy.
CsvTable conservation_table(const ConservationReport& r);
// Columns t, l2_norm, sup_norm over every time step.
CsvTable trajectory_table(const Trajectory& traj);

Json to_json(const ConservationReport& r);
ConservationReport conservation_from_json(const Json& j);
Json to_json(const DecayFitReport& r);
Json to_json(const FiniteDifferenceReport& r);
Json to_json(const TaylorCheckReport& r);
Json to_json(const ScatterReport& r);
Json to_json(const SolitonReport& r);
Json to_json(const HorizonTable& t);
Json to_json(const StrichartzProbeReport& r);

}  // namespace dnls::io
