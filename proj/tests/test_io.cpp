#include <unistd.h>

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "dnls/diagnostics.hpp"
#include "dnls/errors.hpp"
#include "dnls/io/config.hpp"
#include "dnls/io/experiment.hpp"
#include "dnls/io/report_io.hpp"
#include "dnls/io/snapshot.hpp"
#include "doctest.h"

using namespace dnls;
using namespace dnls::io;
namespace fs = std::filesystem;

namespace {

// Reflected bitwise CRC-32 (polynomial 0xEDB88320), written out independently of the encoder.
std::uint32_t crc32_reference(const std::uint8_t* p, std::size_t n) {
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < n; ++i) {
    c ^= p[i];
    for (int k = 0; k < 8; ++k) c = (c >> 1) ^ (0xEDB88320u & (0u - (c & 1u)));
  }
  return ~c;
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

double read_f64(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = bits << 8 | p[i];
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dnls_test_io_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

const char* kConserve = R"(
[problem]
d = 1
M = 128
p = 3
mu = 1
data = gaussian
width = 3
amplitude = 0.5
[time]
T = 1
dt = 1e-2
stride = 10
)";

LatticeFunction sample_field(const BoxSpec& box) {
  LatticeFunction u = make_random(box, 99, 0);
  Field f = u.field();
  f[0] = cplx(-0.0, std::numeric_limits<double>::denorm_min());
  f[1] = cplx(1.0 / 3.0, -1e300);
  return LatticeFunction(box, f);
}

}  // namespace

TEST_CASE("snapshot header layout matches the documented byte order") {
  const BoxSpec box = BoxSpec::make(2, 4);
  const LatticeFunction u = sample_field(box);
  const auto bytes = encode_snapshot(u, 2.5, 0x5A);
  const std::size_t header = 4 + 2 + 1 + 4 * 2 + 8 + 1;
  REQUIRE(bytes.size() == header + 4 + box.sites() * 16);
  CHECK(std::memcmp(bytes.data(), "DNLS", 4) == 0);
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 2);
  CHECK(read_u32(&bytes[7]) == 4);
  CHECK(read_u32(&bytes[11]) == 4);
  CHECK(read_f64(&bytes[15]) == 2.5);
  CHECK(bytes[23] == 0x5A);
  CHECK(read_u32(&bytes[header]) == crc32_reference(bytes.data(), header));
  for (std::size_t i = 0; i < box.sites(); ++i) {
    const std::uint8_t* site = &bytes[header + 4 + 16 * i];
    CHECK(std::bit_cast<std::uint64_t>(read_f64(site)) == std::bit_cast<std::uint64_t>(u[i].real()));
    CHECK(std::bit_cast<std::uint64_t>(read_f64(site + 8)) == std::bit_cast<std::uint64_t>(u[i].imag()));
  }
}

TEST_CASE("snapshot round trip is bit exact through the filesystem") {
  const fs::path dir = scratch("roundtrip");
  for (int d : {1, 2, 3}) {
    const BoxSpec box = BoxSpec::make(d, d == 3 ? 6 : 8);
    const LatticeFunction u = sample_field(box);
    const fs::path path = dir / ("u" + std::to_string(d) + ".dnls");
    snapshot_save(u, 0.1 + d, path, 3);
    const Snapshot s = snapshot_load(path);
    CHECK(s.u.box().d == d);
    CHECK(s.u.box().M == box.M);
    CHECK(s.time == 0.1 + d);
    CHECK(s.flags == 3);
    bool identical = true;
    for (std::size_t i = 0; i < u.size(); ++i) {
      identical = identical && std::bit_cast<std::uint64_t>(s.u[i].real()) == std::bit_cast<std::uint64_t>(u[i].real());
      identical = identical && std::bit_cast<std::uint64_t>(s.u[i].imag()) == std::bit_cast<std::uint64_t>(u[i].imag());
    }
    CHECK(identical);
    CHECK(std::signbit(s.u[0].real()));
  }
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() == ".dnls");
}

TEST_CASE("malformed snapshots raise FormatError") {
  const BoxSpec box = BoxSpec::make(1, 8);
  const auto good = encode_snapshot(sample_field(box), 1.0);

  SUBCASE("truncated payload") {
    for (std::size_t cut : {std::size_t(0), std::size_t(3), std::size_t(20), good.size() - 1}) {
      std::vector<std::uint8_t> b(good.begin(), good.begin() + static_cast<long>(cut));
      CHECK_THROWS_AS(decode_snapshot(b), FormatError);
    }
  }
  SUBCASE("corrupt checksum") {
    auto b = good;
    b[20] ^= 0x01;
    CHECK_THROWS_AS(decode_snapshot(b), FormatError);
  }
  SUBCASE("corrupt header byte") {
    auto b = good;
    b[15] ^= 0x80;
    CHECK_THROWS_AS(decode_snapshot(b), FormatError);
  }
  SUBCASE("version 2 file with a valid checksum") {
    auto b = good;
    b[4] = 2;
    const std::uint32_t c = crc32_reference(b.data(), 20);
    for (int i = 0; i < 4; ++i) b[20 + i] = static_cast<std::uint8_t>(c >> (8 * i));
    CHECK_THROWS_WITH_AS(decode_snapshot(b), doctest::Contains("version 2"), FormatError);
  }
  SUBCASE("bad magic") {
    auto b = good;
    b[0] = 'X';
    CHECK_THROWS_AS(decode_snapshot(b), FormatError);
  }
  SUBCASE("trailing bytes") {
    auto b = good;
    b.push_back(0);
    CHECK_THROWS_AS(decode_snapshot(b), FormatError);
  }
  SUBCASE("truncated file on disk") {
    const fs::path dir = scratch("truncated");
    std::ofstream(dir / "t.dnls", std::ios::binary).write(reinterpret_cast<const char*>(good.data()), 30);
    CHECK_THROWS_AS(snapshot_load(dir / "t.dnls"), FormatError);
  }
  CHECK_NOTHROW(decode_snapshot(good));
}

TEST_CASE("snapshot writer streams numbered files") {
  const fs::path dir = scratch("writer") / "snaps";
  SnapshotWriter w(dir);
  const BoxSpec box = BoxSpec::make(1, 8);
  for (int k = 0; k < 3; ++k) w.append(0.5 * k, make_gaussian(box, 2.0, cplx(k + 1.0, 0.0)));
  CHECK(w.written() == 3);
  CHECK(fs::exists(dir / "snap_000000.dnls"));
  CHECK(snapshot_load(dir / "snap_000002.dnls").time == 1.0);
  CHECK(snapshot_load(dir / "snap_000002.dnls").u[4].real() == doctest::Approx(3.0));
}

TEST_CASE("numbers are written with 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-2.5e-300) == "-2.5e-300");
  CHECK(format_number(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  for (double x : {M_PI, 1e-17 / 3.0, -123456.789, std::nextafter(1.0, 2.0)})
    CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
}

TEST_CASE("CSV layout") {
  SUBCASE("empty decay series is header only") {
    DecayFitReport r;
    CHECK(to_csv(decay_table(r)) == "t,sup_norm,log_t,log_sup\n");
  }
  SUBCASE("decay columns and rows") {
    DecayFitReport r;
    r.times = {1.0, 10.0};
    r.sup_norm = {0.5, 0.25};
    const std::string csv = to_csv(decay_table(r));
    CHECK(csv.find('\r') == std::string::npos);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,sup_norm,log_t,log_sup");
    std::getline(in, line);
    CHECK(line == "1,0.5,0," + format_number(std::log(0.5)));
    std::getline(in, line);
    CHECK(line == "10,0.25," + format_number(std::log(10.0)) + "," + format_number(std::log(0.25)));
    CHECK(!std::getline(in, line));
  }
  SUBCASE("ragged rows are rejected") {
    CsvTable t{{"a", "b"}, {{1.0}}};
    CHECK_THROWS_AS(to_csv(t), DomainError);
  }
}

TEST_CASE("conservation report survives a JSON round trip digit for digit") {
  SemilinearProblem prob{1, 3.0, make_gaussian(BoxSpec::make(1, 64), 3.0, cplx(0.5, 0.0))};
  SolveOptions opts;
  opts.stride = 5;
  const ConservationReport r = conservation_run(prob, TimeGrid::make(0.5, 1e-2), opts);
  REQUIRE(r.mass_drift > 0.0);
  const std::string text = to_json_text(to_json(r));
  const ConservationReport back = conservation_from_json(Json::parse(text));
  CHECK(std::bit_cast<std::uint64_t>(back.mass_drift) == std::bit_cast<std::uint64_t>(r.mass_drift));
  CHECK(std::bit_cast<std::uint64_t>(back.energy_drift) == std::bit_cast<std::uint64_t>(r.energy_drift));
  CHECK(std::bit_cast<std::uint64_t>(back.conserved_energy_drift) ==
        std::bit_cast<std::uint64_t>(r.conserved_energy_drift));
  CHECK(back.times == r.times);
  CHECK(back.mass == r.mass);
  CHECK(back.conserved_energy == r.conserved_energy);
  CHECK(text.find("\"mass_drift\": " + format_number(r.mass_drift)) != std::string::npos);
  CHECK(to_json_text(to_json(back)) == text);
}

TEST_CASE("non-finite values become null in JSON") {
  Json j;
  j["x"] = std::nan("");
  j["y"] = 1.5;
  CHECK(to_json_text(j) == "{\n  \"x\": null,\n  \"y\": 1.5\n}\n");
}

TEST_CASE("atomic writes leave no temporary files") {
  const fs::path dir = scratch("atomic");
  atomic_write(dir / "sub" / "a.txt", "first");
  atomic_write(dir / "sub" / "a.txt", "second");
  CHECK(slurp(dir / "sub" / "a.txt") == "second");
  int count = 0;
  for (const auto& e : fs::directory_iterator(dir / "sub")) {
    (void)e;
    ++count;
  }
  CHECK(count == 1);
}

TEST_CASE("configuration schema is strict") {
  CHECK_NOTHROW(ExperimentConfig::parse(ExperimentKind::Conserve, kConserve));

  auto rejects = [](ExperimentKind k, const std::string& text, const char* fragment) {
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse(k, text), doctest::Contains(fragment), ConfigError);
  };
  const std::string base = kConserve;
  auto without = [&](const std::string& line) {
    std::string s = base;
    s.erase(s.find(line), line.size() + 1);
    return s;
  };

  SUBCASE("unknown key") { rejects(ExperimentKind::Conserve, base + "colour = blue\n", "colour"); }
  SUBCASE("unknown section") { rejects(ExperimentKind::Conserve, base + "[extra]\nx = 1\n", "extra"); }
  SUBCASE("key from another experiment") { rejects(ExperimentKind::Conserve, base + "[wave]\nT_split = 1\n", "wave"); }
  SUBCASE("no defaults for the model parameters") {
    for (const char* line : {"dt = 1e-2", "T = 1", "p = 3", "mu = 1", "d = 1"})
      rejects(ExperimentKind::Conserve, without(line), "missing");
  }
  SUBCASE("type errors") {
    std::string s = base;
    s.replace(s.find("T = 1"), 5, "T = soon");
    rejects(ExperimentKind::Conserve, s, "T");
    s = base;
    s.replace(s.find("M = 128"), 7, "M = 12.5");
    rejects(ExperimentKind::Conserve, s, "M");
  }
  SUBCASE("data kinds") {
    std::string s = base;
    s.replace(s.find("data = gaussian"), 15, "data = noise");
    rejects(ExperimentKind::Conserve, s, "noise");
  }
  SUBCASE("kind mismatch") { rejects(ExperimentKind::Conserve, "[experiment]\nkind = decay\n" + base, "kind"); }
  SUBCASE("partitions") {
    const ExperimentConfig c = ExperimentConfig::parse(ExperimentKind::Partitions, "[partitions]\nn = 4\n");
    CHECK(c.get_int("partitions", "n") == 4);
    rejects(ExperimentKind::Partitions, "[partitions]\nn = 4\n[time]\ndt = 1\n", "time");
  }
  SUBCASE("lists") {
    const ExperimentConfig c = ExperimentConfig::parse(
        ExperimentKind::Frechet, base + "[frechet]\norder = 2\nh = 1e-2, 5e-3 ,2.5e-3\n");
    CHECK(c.get_list("frechet", "h") == std::vector<double>{1e-2, 5e-3, 2.5e-3});
    rejects(ExperimentKind::Frechet, base + "[frechet]\norder = 2\nh = 1e-2, x\n", "h");
  }
}

TEST_CASE("random data follows the seed") {
  const std::string text = std::string(kConserve) + "";
  std::string s = text;
  s.replace(s.find("data = gaussian"), 15, "data = random");
  const ExperimentConfig c = ExperimentConfig::parse(ExperimentKind::Conserve, s);
  CHECK_THROWS_AS(c.initial_data(), ConfigError);
  const LatticeFunction a = c.initial_data(5);
  const LatticeFunction b = c.initial_data(5);
  const LatticeFunction other = c.initial_data(6);
  CHECK(a.field() == b.field());
  CHECK(a.field() != other.field());
  CHECK(a.field() == (make_localized_random(a.box(), 5, 0, 3.0) * cplx(0.5, 0.0)).field());
}

TEST_CASE("execute is deterministic for a fixed config and seed") {
  std::string s = kConserve;
  s.replace(s.find("data = gaussian"), 15, "data = random");
  const ExperimentConfig c = ExperimentConfig::parse(ExperimentKind::Conserve, s);
  const ExperimentOutputs a = execute(c, 42, scratch("det_a"));
  const ExperimentOutputs b = execute(c, 42, scratch("det_b"));
  const ExperimentOutputs other = execute(c, 43, scratch("det_c"));
  REQUIRE(a.files.size() == 2);
  CHECK(a.files == b.files);
  CHECK(a.files.at("conservation.csv") != other.files.at("conservation.csv"));
}

TEST_CASE("run maps failures to exit codes") {
  const fs::path dir = scratch("run");
  std::ostringstream err;

  SUBCASE("success writes the outputs") {
    write_text(dir / "ok.ini", kConserve);
    const int code = run({ExperimentKind::Conserve, dir / "ok.ini", dir / "out", {}}, err);
    CHECK(code == kExitOk);
    CHECK(fs::exists(dir / "out" / "report.json"));
    CHECK(fs::exists(dir / "out" / "conservation.csv"));
  }
  SUBCASE("validation failure writes nothing") {
    std::string s = kConserve;
    s.erase(s.find("dt = 1e-2"), 10);
    write_text(dir / "bad.ini", s);
    CHECK(run({ExperimentKind::Conserve, dir / "bad.ini", dir / "out", {}}, err) == kExitValidation);
    CHECK(!fs::exists(dir / "out"));
    CHECK(err.str().find("dt") != std::string::npos);
  }
  SUBCASE("missing config file") {
    CHECK(run({ExperimentKind::Conserve, dir / "absent.ini", dir / "out", {}}, err) == kExitValidation);
    CHECK(!fs::exists(dir / "out"));
  }
  SUBCASE("out-of-range parameter") {
    std::string s = kConserve;
    s.replace(s.find("dt = 1e-2"), 9, "dt = -1");
    write_text(dir / "neg.ini", s);
    CHECK(run({ExperimentKind::Conserve, dir / "neg.ini", dir / "out", {}}, err) == kExitValidation);
    CHECK(!fs::exists(dir / "out"));
  }
  SUBCASE("numerical failure writes a diagnostic") {
    write_text(dir / "wave.ini", R"(
[problem]
d = 3
M = 32
p = 3
mu = 1
data = gaussian
width = 1.5
amplitude = 2
[time]
dt = 1e-2
[wave]
T_split = 1
eps_target = 0.05
auto_tune = false
)");
    CHECK(run({ExperimentKind::Wave, dir / "wave.ini", dir / "out", {}}, err) == kExitNumerical);
    REQUIRE(fs::exists(dir / "out" / "diagnostic.json"));
    const Json j = Json::parse(slurp(dir / "out" / "diagnostic.json"));
    CHECK(j.at("error") == "divergence");
    CHECK(!fs::exists(dir / "out" / "report.json"));
  }
  SUBCASE("snapshots land in the output directory") {
    std::string s = kConserve;
    s += "[output]\nsnapshots = true\n";
    write_text(dir / "evolve.ini", s);
    CHECK(run({ExperimentKind::Evolve, dir / "evolve.ini", dir / "out", {}}, err) == kExitOk);
    CHECK(fs::exists(dir / "out" / "snapshots" / "snap_000010.dnls"));
    CHECK(snapshot_load(dir / "out" / "snapshots" / "snap_000010.dnls").time == doctest::Approx(1.0));
    CHECK(!fs::exists(dir / "out" / "snapshots" / "snap_000011.dnls"));
    for (const auto& e : fs::directory_iterator(dir / "out"))
      CHECK(e.path().filename().string().rfind(".dnls-staging", 0) == std::string::npos);
  }
}
