#include "dnls/io/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "dnls/errors.hpp"

namespace dnls::io {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw DomainError("CSV row width does not match the header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

namespace {

void write_json(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        out += Json(it.key()).dump();
        out += ": ";
        write_json(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write_json(j[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        write_json(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_number(x) : "null";
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

Json doubles(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::vector<double> read_doubles(const Json& a) {
  std::vector<double> v;
  for (const auto& x : a) v.push_back(x.is_null() ? std::nan("") : x.get<double>());
  return v;
}

double read_double(const Json& j, const char* key) {
  const auto& x = j.at(key);
  return x.is_null() ? std::nan("") : x.get<double>();
}

Json matrix(const std::vector<std::vector<double>>& m) {
  Json a = Json::array();
  for (const auto& row : m) a.push_back(doubles(row));
  return a;
}

Json header(const char* report) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["report"] = report;
  return j;
}

}  // namespace

std::string to_json_text(const Json& j) {
  std::string out;
  write_json(j, out, 0);
  out += '\n';
  return out;
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

void emit_csv(const CsvTable& table, const std::filesystem::path& path) { atomic_write(path, to_csv(table)); }

void emit_json(const Json& j, const std::filesystem::path& path) { atomic_write(path, to_json_text(j)); }

CsvTable decay_table(const DecayFitReport& r) {
  CsvTable t{{"t", "sup_norm", "log_t", "log_sup"}, {}};
  for (std::size_t i = 0; i < r.times.size(); ++i)
    t.rows.push_back({r.times[i], r.sup_norm[i], std::log(r.times[i]), std::log(r.sup_norm[i])});
  return t;
}

CsvTable conservation_table(const ConservationReport& r) {
  CsvTable t{{"t", "mass", "energy", "energy_partial_form", "conserved_energy"}, {}};
  for (std::size_t i = 0; i < r.times.size(); ++i)
    t.rows.push_back(
        {r.times[i], r.mass[i], r.energy_difference_form[i], r.energy_partial_form[i], r.conserved_energy[i]});
  return t;
}

CsvTable trajectory_table(const Trajectory& traj) {
  CsvTable t{{"t", "l2_norm", "sup_norm"}, {}};
  for (std::size_t n = 0; n < traj.step_l2.size(); ++n)
    t.rows.push_back({traj.grid.time(static_cast<long>(n)), traj.step_l2[n], traj.step_sup[n]});
  return t;
}

Json to_json(const ConservationReport& r) {
  Json j = header("conservation");
  j["mass_drift"] = r.mass_drift;
  j["energy_drift"] = r.energy_drift;
  j["conserved_energy_drift"] = r.conserved_energy_drift;
  j["form_mismatch"] = r.form_mismatch;
  j["times"] = doubles(r.times);
  j["mass"] = doubles(r.mass);
  j["energy"] = doubles(r.energy_difference_form);
  j["energy_partial_form"] = doubles(r.energy_partial_form);
  j["conserved_energy"] = doubles(r.conserved_energy);
  return j;
}

ConservationReport conservation_from_json(const Json& j) {
  if (j.at("report") != "conservation") throw FormatError("JSON document is not a conservation report");
  if (j.at("schema_version").get<int>() != kReportSchemaVersion) throw FormatError("unsupported report schema version");
  ConservationReport r;
  r.mass_drift = read_double(j, "mass_drift");
  r.energy_drift = read_double(j, "energy_drift");
  r.conserved_energy_drift = read_double(j, "conserved_energy_drift");
  r.form_mismatch = read_double(j, "form_mismatch");
  r.times = read_doubles(j.at("times"));
  r.mass = read_doubles(j.at("mass"));
  r.energy_difference_form = read_doubles(j.at("energy"));
  r.energy_partial_form = read_doubles(j.at("energy_partial_form"));
  r.conserved_energy = read_doubles(j.at("conserved_energy"));
  return r;
}

Json to_json(const DecayFitReport& r) {
  Json j = header("decay");
  j["slope"] = r.slope;
  j["intercept"] = r.intercept;
  j["fit_residual"] = r.residual;
  j["bound_constant"] = r.bound_constant;
  j["max_boundary_fraction"] = r.max_boundary_fraction;
  j["times"] = doubles(r.times);
  j["sup_norm"] = doubles(r.sup_norm);
  return j;
}

Json to_json(const FiniteDifferenceReport& r) {
  Json j = header("frechet_difference");
  j["order"] = r.order;
  j["h"] = doubles(r.h);
  j["remainder"] = doubles(r.remainder);
  j["scaled"] = doubles(r.scaled);
  j["improvement"] = doubles(r.improvement);
  return j;
}

Json to_json(const TaylorCheckReport& r) {
  Json j = header("taylor");
  j["eps"] = doubles(r.eps);
  j["errors"] = doubles(r.errors);
  j["shrink"] = doubles(r.shrink);
  j["route_difference"] = doubles(r.route_difference);
  j["max_route_difference"] = r.max_route_difference;
  return j;
}

Json to_json(const ScatterReport& r) {
  Json j = header("scatter");
  j["T_split"] = r.T_split;
  j["T_max"] = r.T_max;
  j["eps_measured"] = r.eps_measured;
  j["tune_doublings"] = r.tune_doublings;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["iterate_s0"] = doubles(r.iterate_s0);
  j["differences"] = doubles(r.differences);
  j["ratios"] = doubles(r.ratios);
  j["pn_bound"] = r.pn_bound;
  j["pn_holds"] = r.pn_holds;
  j["tail_exponent"] = r.tail_exponent;
  j["tail_bound"] = r.tail_bound;
  j["truncation_flag"] = r.truncation_flag;
  j["mass_defect"] = r.mass_defect;
  j["data_gap"] = r.data_gap;
  j["times"] = doubles(r.times);
  j["residual"] = doubles(r.residual);
  j["residual_decreasing"] = r.residual_decreasing;
  j["cauchy"] = matrix(r.cauchy);
  return j;
}

Json to_json(const SolitonReport& r) {
  Json j = header("soliton");
  j["max_amplitude_deviation"] = r.max_amplitude_deviation;
  j["phase_rate"] = r.phase_rate;
  j["phase_rate_error"] = r.phase_rate_error;
  j["peak_index"] = r.peak_index;
  j["stationary"] = r.stationary;
  j["times"] = doubles(r.times);
  j["amplitude_deviation"] = doubles(r.amplitude_deviation);
  Json s;
  s["mesh"] = doubles(r.scattering.mesh);
  s["defect"] = doubles(r.scattering.defect);
  s["floor"] = r.scattering.floor;
  s["final_difference"] = r.scattering.final_difference;
  s["inconclusive"] = r.scattering.inconclusive;
  j["cauchy"] = std::move(s);
  return j;
}

Json to_json(const HorizonTable& t) {
  Json j = header("horizon");
  j["ceiling"] = t.ceiling;
  j["window"] = t.window;
  j["slope_log"] = t.slope_log;
  j["intercept_log"] = t.intercept_log;
  j["slope_loglog"] = t.slope_loglog;
  j["intercept_loglog"] = t.intercept_loglog;
  j["certified_K_log"] = t.certified_K_log;
  j["certified_K_loglog"] = t.certified_K_loglog;
  j["monotone"] = t.monotone;
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json x;
    x["epsilon"] = r.epsilon;
    x["horizon"] = r.horizon;
    x["reached_window_end"] = r.reached_window_end;
    x["outer_iterations"] = r.outer_iterations;
    x["status"] = r.status;
    rows.push_back(std::move(x));
  }
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const StrichartzProbeReport& r) {
  Json j = header("strichartz_probe");
  j["constant"] = r.constant;
  j["ratios"] = doubles(r.ratios);
  return j;
}

}  // namespace dnls::io
