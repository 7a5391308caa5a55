#include "dnls/io/experiment.hpp"

#include <unistd.h>

#include <sstream>

#include "dnls/diagnostics.hpp"
#include "dnls/errors.hpp"
#include "dnls/evolution.hpp"
#include "dnls/frechet.hpp"
#include "dnls/io/report_io.hpp"
#include "dnls/io/snapshot.hpp"
#include "dnls/partitions.hpp"
#include "dnls/scattering.hpp"

namespace dnls::io {

namespace fs = std::filesystem;

namespace {

struct Formats {
  bool csv = true;
  bool json = true;
};

Formats formats_of(const ExperimentConfig& cfg) {
  if (!cfg.has("output", "formats")) return {};
  const std::string f = cfg.get_string("output", "formats");
  Formats out{false, false};
  std::stringstream ss(f);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    const std::string t = b == std::string::npos ? "" : item.substr(b, e - b + 1);
    if (t == "csv") out.csv = true;
    if (t == "json") out.json = true;
  }
  return out;
}

TimeGrid time_grid(const ExperimentConfig& cfg) {
  return TimeGrid::make(cfg.get_real("time", "T"), cfg.get_real("time", "dt"));
}

SolveOptions solve_options(const ExperimentConfig& cfg) {
  SolveOptions o;
  o.stride = cfg.int_or("time", "stride", 1);
  if (o.stride < 1) throw ConfigError("[time] stride must be positive");
  return o;
}

std::uint64_t required_seed(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed, const char* what) {
  if (seed) return *seed;
  if (cfg.has("problem", "seed")) return cfg.get_u64("problem", "seed");
  throw ConfigError(std::string(what) + " requires [problem] seed or --seed");
}

int integer_p(double p) {
  const int ip = static_cast<int>(p);
  if (static_cast<double>(ip) != p) throw ConfigError("[problem] p must be an integer for this experiment");
  return ip;
}

void put(ExperimentOutputs& out, const Formats& f, const std::string& csv_name, const CsvTable* table, const Json& j) {
  if (f.csv && table) out.files[csv_name] = to_csv(*table);
  if (f.json) out.files["report.json"] = to_json_text(j);
}

}  // namespace

ExperimentOutputs execute(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed,
                          const fs::path& staging_root) {
  ExperimentOutputs out;
  const Formats fmt = formats_of(cfg);
  const std::string kind = kind_name(cfg.kind());

  switch (cfg.kind()) {
    case ExperimentKind::Evolve: {
      SemilinearProblem prob{cfg.get_int("problem", "mu"), cfg.get_real("problem", "p"), cfg.initial_data(seed)};
      SolveOptions opts = solve_options(cfg);
      opts.store = false;
      std::optional<SnapshotWriter> writer;
      if (cfg.bool_or("output", "snapshots", false)) {
        out.snapshot_staging = staging_root / "snapshots";
        writer.emplace(out.snapshot_staging);
        opts.sink = &*writer;
      }
      const Trajectory traj = solve_semilinear_splitstep(prob, time_grid(cfg), opts);
      const CsvTable table = trajectory_table(traj);
      Json j;
      j["schema_version"] = kReportSchemaVersion;
      j["report"] = "evolve";
      j["steps"] = traj.grid.steps;
      j["final_time"] = traj.grid.T;
      j["initial_l2_norm"] = traj.step_l2.front();
      j["final_l2_norm"] = traj.step_l2.back();
      j["final_sup_norm"] = traj.step_sup.back();
      j["snapshots"] = writer ? writer->written() : 0;
      put(out, fmt, "series.csv", &table, j);
      break;
    }
    case ExperimentKind::Conserve: {
      SemilinearProblem prob{cfg.get_int("problem", "mu"), cfg.get_real("problem", "p"), cfg.initial_data(seed)};
      const ConservationReport r = conservation_run(prob, time_grid(cfg), solve_options(cfg));
      const CsvTable table = conservation_table(r);
      put(out, fmt, "conservation.csv", &table, to_json(r));
      break;
    }
    case ExperimentKind::Decay: {
      const LatticeFunction u0 = cfg.initial_data(seed);
      const std::string spacing = cfg.string_or("decay", "spacing", "log");
      if (spacing != "log" && spacing != "linear") throw ConfigError("[decay] spacing must be log or linear");
      const auto times = sample_times(cfg.get_real("decay", "t_min"), cfg.get_real("decay", "t_max"),
                                      cfg.get_int("decay", "samples"), spacing == "log");
      const DecayFitReport r = decay_fit(u0, u0.box().d, times);
      const CsvTable table = decay_table(r);
      put(out, fmt, "decay.csv", &table, to_json(r));
      break;
    }
    case ExperimentKind::Frechet: {
      const int order = cfg.get_int("frechet", "order");
      if (order < 1 || order > 3) throw ConfigError("[frechet] order must be 1, 2 or 3");
      const LatticeFunction u0 = cfg.initial_data(seed);
      const std::uint64_t s = required_seed(cfg, seed, "the frechet experiment");
      const double width = cfg.real_or("frechet", "direction_width", 3.0);
      std::vector<LatticeFunction> v;
      for (int i = 0; i < order; ++i)
        v.push_back(make_localized_random(u0.box(), s, static_cast<std::uint64_t>(i) + 1, width));
      const FiniteDifferenceReport r =
          frechet_order_check(cfg.get_int("problem", "mu"), integer_p(cfg.get_real("problem", "p")), u0, v,
                              time_grid(cfg), cfg.get_list("frechet", "h"), solve_options(cfg));
      CsvTable table{{"h", "remainder", "scaled"}, {}};
      for (std::size_t i = 0; i < r.h.size(); ++i) table.rows.push_back({r.h[i], r.remainder[i], r.scaled[i]});
      put(out, fmt, "frechet.csv", &table, to_json(r));
      break;
    }
    case ExperimentKind::Taylor: {
      const TaylorCheckReport r =
          taylor_check(cfg.get_int("problem", "mu"), integer_p(cfg.get_real("problem", "p")), cfg.initial_data(seed),
                       cfg.get_real("taylor", "lambda"), cfg.get_int("taylor", "terms"), cfg.get_list("taylor", "eps"),
                       time_grid(cfg), solve_options(cfg));
      CsvTable table{{"eps", "error"}, {}};
      for (std::size_t i = 0; i < r.eps.size(); ++i) table.rows.push_back({r.eps[i], r.errors[i]});
      put(out, fmt, "taylor.csv", &table, to_json(r));
      break;
    }
    case ExperimentKind::Wave: {
      WaveOperatorConfig w;
      w.u_plus = cfg.initial_data(seed);
      w.mu = cfg.get_int("problem", "mu");
      w.p = cfg.get_real("problem", "p");
      w.backward_dt = cfg.get_real("time", "dt");
      w.T_split = cfg.get_real("wave", "T_split");
      w.eps_target = cfg.get_real("wave", "eps_target");
      w.T_max = cfg.real_or("wave", "T_max", w.T_max);
      w.tol = cfg.real_or("wave", "tol", w.tol);
      w.picard_tol = cfg.real_or("wave", "picard_tol", w.picard_tol);
      w.max_iter = cfg.int_or("wave", "max_iter", w.max_iter);
      w.node_dt = cfg.real_or("wave", "node_dt", w.node_dt);
      w.check_dt = cfg.real_or("wave", "check_dt", w.check_dt);
      w.auto_tune = cfg.bool_or("wave", "auto_tune", w.auto_tune);
      w.T_split_cap = cfg.real_or("wave", "T_split_cap", w.T_split_cap);
      w.residual_spacing = cfg.real_or("wave", "residual_spacing", w.residual_spacing);
      const WaveOperatorResult r = wave_operator(w);
      CsvTable table{{"t", "residual"}, {}};
      for (std::size_t i = 0; i < r.report.times.size(); ++i)
        table.rows.push_back({r.report.times[i], r.report.residual[i]});
      put(out, fmt, "residual.csv", &table, to_json(r.report));
      const auto bytes = encode_snapshot(r.u0, 0.0);
      out.files["u0.dnls"] = std::string(bytes.begin(), bytes.end());
      break;
    }
    case ExperimentKind::Soliton: {
      const SolitonExperiment e =
          soliton_experiment(cfg.get_real("problem", "p"), cfg.get_int("problem", "d"), cfg.get_real("soliton", "omega"),
                             cfg.box(), cfg.get_int("problem", "mu"), cfg.real_or("soliton", "tol", 1e-10),
                             time_grid(cfg), cfg.int_or("time", "stride", 100), cfg.real_or("soliton", "scale", 1.0));
      Json j = to_json(e.report);
      j["omega"] = e.ground.omega;
      j["ground_state_residual"] = e.ground.residual;
      j["ground_state_iterations"] = e.ground.iterations;
      CsvTable table{{"t", "amplitude_deviation"}, {}};
      for (std::size_t i = 0; i < e.report.times.size(); ++i)
        table.rows.push_back({e.report.times[i], e.report.amplitude_deviation[i]});
      put(out, fmt, "soliton.csv", &table, j);
      break;
    }
    case ExperimentKind::Longtime: {
      const LatticeFunction u0 = cfg.initial_data(seed);
      const QuasilinearProblem prob =
          quasilinear_template(cfg.get_string("longtime", "template"), cfg.get_int("problem", "mu"),
                               cfg.get_real("problem", "p"), cfg.real_or("longtime", "gamma", 0.0), u0);
      HorizonOptions ho;
      ho.T = cfg.get_real("time", "T");
      ho.dt = cfg.get_real("time", "dt");
      ho.window = cfg.real_or("longtime", "window", ho.window);
      ho.tol = cfg.real_or("longtime", "tol", ho.tol);
      ho.max_outer = cfg.int_or("longtime", "max_outer", ho.max_outer);
      const HorizonTable t =
          smalldata_horizon(prob, u0, cfg.get_list("longtime", "ladder"), cfg.real_or("longtime", "ceiling", 0.1), ho);
      CsvTable table{{"epsilon", "horizon", "reached_window_end", "outer_iterations"}, {}};
      for (const auto& r : t.rows)
        table.rows.push_back({r.epsilon, r.horizon, r.reached_window_end ? 1.0 : 0.0,
                              static_cast<double>(r.outer_iterations)});
      put(out, fmt, "horizons.csv", &table, to_json(t));
      break;
    }
    case ExperimentKind::Partitions: {
      const int n = cfg.get_int("partitions", "n");
      const auto parts = enumerate_partitions(n);
      Json j;
      j["schema_version"] = kReportSchemaVersion;
      j["report"] = "partitions";
      j["n"] = n;
      j["count"] = parts.size();
      if (cfg.bool_or("partitions", "list", false)) {
        Json a = Json::array();
        for (const auto& p : parts) a.push_back(p.to_string());
        j["partitions"] = std::move(a);
      }
      put(out, fmt, "", nullptr, j);
      break;
    }
    case ExperimentKind::Probe: {
      const BoxSpec box = cfg.box();
      const std::uint64_t s = required_seed(cfg, seed, "the probe experiment");
      const int count = cfg.get_int("probe", "ensemble");
      if (count < 1) throw ConfigError("[probe] ensemble must be positive");
      const double width = cfg.real_or("probe", "width", box.M / 8.0);
      std::vector<LatticeFunction> ensemble;
      for (int i = 0; i < count; ++i)
        ensemble.push_back(make_localized_random(box, s, static_cast<std::uint64_t>(i), width));
      const StrichartzProbeReport r =
          strichartz_constant_probe(box.d, AdmissiblePair{cfg.get_real("probe", "q"), cfg.get_real("probe", "r")},
                                    ensemble, cfg.get_real("probe", "window"), cfg.get_real("probe", "sample_dt"));
      CsvTable table{{"member", "ratio"}, {}};
      for (std::size_t i = 0; i < r.ratios.size(); ++i) table.rows.push_back({static_cast<double>(i), r.ratios[i]});
      put(out, fmt, "probe.csv", &table, to_json(r));
      break;
    }
  }
  (void)kind;
  return out;
}

namespace {

void write_diagnostic(const fs::path& dir, const std::string& kind, const std::string& type, const std::string& what,
                      std::ostream& err) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["report"] = "diagnostic";
  j["kind"] = kind;
  j["error"] = type;
  j["message"] = what;
  try {
    emit_json(j, dir / "diagnostic.json");
  } catch (const std::exception& e) {
    err << "dnls: could not write diagnostic: " << e.what() << "\n";
  }
}

}  // namespace

int run(const RunRequest& req, std::ostream& err) {
  const std::string kind = kind_name(req.kind);
  ExperimentConfig cfg;
  fs::path out_dir;
  try {
    cfg = ExperimentConfig::load(req.kind, req.config);
    out_dir = req.out ? *req.out : fs::path(cfg.string_or("output", "directory", "."));
  } catch (const std::exception& e) {
    err << "dnls: invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  }

  const fs::path staging = out_dir / (".dnls-staging-" + std::to_string(::getpid()));
  auto cleanup = [&] {
    std::error_code ec;
    fs::remove_all(staging, ec);
  };
  try {
    ExperimentOutputs outputs = execute(cfg, req.seed, staging);
    for (const auto& [name, contents] : outputs.files) atomic_write(out_dir / name, contents);
    if (!outputs.snapshot_staging.empty()) {
      const fs::path target = out_dir / "snapshots";
      std::error_code ec;
      fs::remove_all(target, ec);
      fs::rename(outputs.snapshot_staging, target, ec);
      if (ec) throw IoError("cannot move snapshots into " + target.string() + ": " + ec.message());
    }
    cleanup();
    return kExitOk;
  } catch (const NumericalError& e) {
    cleanup();
    err << "dnls: numerical failure: " << e.what() << "\n";
    write_diagnostic(out_dir, kind, dynamic_cast<const DivergenceError*>(&e) ? "divergence" : "numerical", e.what(),
                     err);
    return kExitNumerical;
  } catch (const GuardViolation& e) {
    cleanup();
    err << "dnls: numerical failure: " << e.what() << "\n";
    write_diagnostic(out_dir, kind, "guard_violation", e.what(), err);
    return kExitNumerical;
  } catch (const DomainError& e) {
    cleanup();
    err << "dnls: invalid parameters: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    cleanup();
    err << "dnls: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    cleanup();
    err << "dnls: failure: " << e.what() << "\n";
    write_diagnostic(out_dir, kind, "internal", e.what(), err);
    return kExitNumerical;
  }
}

}  // namespace dnls::io
